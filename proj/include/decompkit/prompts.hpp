// Copyright 2026 The decompkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shipped prompt assets. The correction prompt is sent verbatim (the request
// adds only the sentence to fix); the two QA prompts are provided for running
// external few-shot baselines and are not used by the pipeline. Copies live
// under prompts/ in the source tree.

#pragma once

#include <string_view>

namespace decompkit::prompts {

inline constexpr std::string_view kCorrection =
    R"(Fix the input sentence with correct facts if there are factual errors.

Wrong: Mount Fuji is in China.
Correct: Mount Fuji is in Japan.

Wrong: Amy Winehouse was diagnosed with stage 4 breast cancer in May 2017.
Correct: Amy Winehouse was not diagnosed with cancer.

Wrong: Ten gallons of seawater weigh 650 pounds.
Correct: Ten gallons of seawater weigh approximately 83 pounds.

Wrong: Buffalo wings contain capsaicin.
Correct: Buffalo wings contain capsaicin.

Wrong: The Albany in Georgia has over 50,000 people.
Correct: The Albany in Georgia has over 73,000 people.

)";

}  // namespace decompkit::prompts
