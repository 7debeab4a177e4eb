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

// Backend capabilities (embed / generate / entail / correct) as abstract
// interfaces. HTTP and in-process mock implementations live in
// http_backend.hpp and mock_backend.hpp.

#pragma once

#include <string>
#include <vector>

namespace decompkit {

struct EmbedResponse {
  std::size_t dim = 0;
  std::vector<std::vector<double>> vectors;
};

struct GenerateRequest {
  std::string model;
  std::string input;
  int num_candidates = 5;
  double diversity = 0.0;
};

struct GenerationCandidate {
  std::string text;
  double score = 0.0;  // log-probability scale, higher is better

  friend bool operator==(const GenerationCandidate&, const GenerationCandidate&) = default;
};

struct EntailResult {
  std::string label;
  double confidence = 0.0;
};

// Implementations must be safe to call from several threads at once.
class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual EmbedResponse embed(const std::string& model, const std::vector<std::string>& texts) = 0;
};

class GenerateBackend {
 public:
  virtual ~GenerateBackend() = default;
  virtual std::vector<GenerationCandidate> generate(const GenerateRequest& request) = 0;
};

class EntailBackend {
 public:
  virtual ~EntailBackend() = default;
  virtual EntailResult entail(const std::string& input) = 0;
};

class CorrectBackend {
 public:
  virtual ~CorrectBackend() = default;
  virtual std::string correct(const std::string& prompt, const std::string& sentence) = 0;
};

class Backend : public EmbedBackend,
                public GenerateBackend,
                public EntailBackend,
                public CorrectBackend {};

}  // namespace decompkit
