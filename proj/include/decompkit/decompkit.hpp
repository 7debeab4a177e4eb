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

#pragma once

#include "decompkit/backend.hpp"
#include "decompkit/config.hpp"
#include "decompkit/corpus.hpp"
#include "decompkit/date.hpp"
#include "decompkit/dedup.hpp"
#include "decompkit/embedding.hpp"
#include "decompkit/emit.hpp"
#include "decompkit/error.hpp"
#include "decompkit/http_backend.hpp"
#include "decompkit/ingest.hpp"
#include "decompkit/metrics.hpp"
#include "decompkit/mining.hpp"
#include "decompkit/mock_backend.hpp"
#include "decompkit/orchestrator.hpp"
#include "decompkit/pairs_io.hpp"
#include "decompkit/prompts.hpp"
#include "decompkit/random.hpp"
#include "decompkit/text.hpp"
