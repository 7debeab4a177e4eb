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

#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decompkit/corpus.hpp"
#include "decompkit/error.hpp"
#include "decompkit/ingest.hpp"

namespace decompkit {

inline std::size_t write_pairs(std::span<const SentencePair> pairs, const std::string& path,
                               const std::optional<json>& header = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  if (header) out << json{{"header", *header}}.dump() << '\n';
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path);
  return pairs.size();
}

// Header records are skipped.
inline std::vector<SentencePair> read_pairs(const std::string& path) {
  ingest::LineReader reader(path);
  std::vector<SentencePair> out;
  std::string line;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedJson, e.what());
    }
    if (is_header_record(j)) continue;
    out.push_back(sentence_pair_from_json(j));
  }
  return out;
}

}  // namespace decompkit
