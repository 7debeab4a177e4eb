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

// Training-data emission: pair-to-pair seq2seq instances with a random
// direction, span-corruption (denoising) instances, and JSONL output.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decompkit/corpus.hpp"
#include "decompkit/error.hpp"
#include "decompkit/ingest.hpp"
#include "decompkit/random.hpp"
#include "decompkit/text.hpp"

namespace decompkit::emit {

// The per-instance seed is derived from the run seed and pair_id, so a pair's
// direction does not depend on its position in the file.
inline TrainingInstance make_pair_instance(const SentencePair& pair, std::uint64_t run_seed) {
  const std::uint64_t seed = derive_seed(run_seed, pair.pair_id);
  Rng rng(seed);
  const bool forward = rng.uniform01() < 0.5;
  TrainingInstance t;
  t.objective = Objective::kPair2Pair;
  t.input_text = forward ? pair.left.text : pair.right.text;
  t.target_text = forward ? pair.right.text : pair.left.text;
  t.meta.similarity = pair.similarity;
  t.meta.signature = pair.signature;
  t.meta.left_id = pair.left.article_id;
  t.meta.right_id = pair.right.article_id;
  t.meta.forward = forward;
  t.meta.seed = seed;
  return t;
}

struct DenoiseParams {
  double corruption_rate = 0.15;
  double mean_span_length = 3.0;
  // "{}" is replaced by the sentinel ordinal.
  std::string sentinel_template = "⟨M{}⟩";
  std::size_t min_tokens = 2;

  void validate() const {
    if (!(corruption_rate >= 0.0 && corruption_rate < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "corruption_rate must be in [0, 1)");
    }
    if (!(mean_span_length > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "mean_span_length must be positive");
    }
    if (sentinel_template.find("{}") == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "sentinel_template needs a {} placeholder");
    }
    if (min_tokens < 2) throw Error(ErrorCode::kInvalidArgument, "min_tokens must be >= 2");
  }

  std::string sentinel(std::size_t k) const {
    std::string s = sentinel_template;
    s.replace(s.find("{}"), 2, std::to_string(k));
    return s;
  }
};

// [begin, begin + length) token ranges, sorted and disjoint.
struct Span {
  std::size_t begin = 0;
  std::size_t length = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

namespace detail {

// Uniform random composition of `total` into `parts` positive integers.
inline std::vector<std::size_t> random_segmentation(std::size_t total, std::size_t parts, Rng& rng) {
  std::vector<std::size_t> cuts(total - 1);
  std::iota(cuts.begin(), cuts.end(), std::size_t{1});
  sample_prefix(cuts, parts - 1, rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::size_t> lengths;
  std::size_t prev = 0;
  for (auto c : cuts) {
    lengths.push_back(c - prev);
    prev = c;
  }
  lengths.push_back(total - prev);
  return lengths;
}

}  // namespace detail

// Noise layout for an n-token sequence: round(n * rate) noise tokens (at least
// one when rate > 0, at most n - 1) split into round(noise / mean_span_length)
// spans, interleaved with non-noise runs that start the sequence.
inline std::vector<Span> sample_spans(std::size_t n, const DenoiseParams& params, Rng& rng) {
  if (n < 2 || params.corruption_rate == 0.0) return {};
  auto noise = static_cast<std::size_t>(std::llround(static_cast<double>(n) * params.corruption_rate));
  noise = std::clamp<std::size_t>(noise, 1, n - 1);
  auto spans = static_cast<std::size_t>(
      std::llround(static_cast<double>(noise) / params.mean_span_length));
  spans = std::clamp<std::size_t>(spans, 1, std::min(noise, n - noise));
  const auto noise_lengths = detail::random_segmentation(noise, spans, rng);
  const auto keep_lengths = detail::random_segmentation(n - noise, spans, rng);
  std::vector<Span> out;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < spans; ++k) {
    pos += keep_lengths[k];
    out.push_back({pos, noise_lengths[k]});
    pos += noise_lengths[k];
  }
  return out;
}

// Input: tokens with each span replaced by its sentinel. Target: each
// sentinel followed by the tokens it replaced; with no spans the target is
// the lone sentinel 0.
inline TrainingInstance make_denoise_instance(const std::vector<std::string>& tokens,
                                              std::span<const Span> spans,
                                              const DenoiseParams& params, std::uint64_t seed) {
  std::vector<std::string> input;
  std::vector<std::string> target;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const Span& s = spans[k];
    if (s.begin < pos || s.length == 0 || s.begin + s.length > tokens.size()) {
      throw Error(ErrorCode::kInvalidArgument, "spans must be sorted, disjoint and in range");
    }
    input.insert(input.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                 tokens.begin() + static_cast<std::ptrdiff_t>(s.begin));
    input.push_back(params.sentinel(k));
    target.push_back(params.sentinel(k));
    target.insert(target.end(), tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
                  tokens.begin() + static_cast<std::ptrdiff_t>(s.begin + s.length));
    pos = s.begin + s.length;
  }
  input.insert(input.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos), tokens.end());
  if (spans.empty()) target.push_back(params.sentinel(0));

  TrainingInstance t;
  t.objective = Objective::kDenoise;
  t.input_text = text::join(input, " ");
  t.target_text = text::join(target, " ");
  t.meta.seed = seed;
  return t;
}

struct DenoiseStats {
  std::uint64_t sentences = 0;
  std::uint64_t emitted = 0;
  std::uint64_t skipped = 0;
  std::uint64_t tokens = 0;
  std::uint64_t corrupted_tokens = 0;

  double corrupted_fraction() const {
    return tokens == 0 ? 0.0 : static_cast<double>(corrupted_tokens) / static_cast<double>(tokens);
  }
};

// Sentence i is corrupted with seed derive_seed(run_seed, i). Sentences with
// fewer than params.min_tokens whitespace tokens, or that already contain a
// sentinel-shaped token, are skipped.
inline std::vector<TrainingInstance> make_denoise_instances(std::span<const std::string> sentences,
                                                            const DenoiseParams& params,
                                                            std::uint64_t run_seed,
                                                            DenoiseStats* stats = nullptr) {
  params.validate();
  const std::string prefix = params.sentinel_template.substr(0, params.sentinel_template.find("{}"));
  DenoiseStats local;
  std::vector<TrainingInstance> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ++local.sentences;
    const auto tokens = text::split_whitespace(sentences[i]);
    const bool clashes = !prefix.empty() && std::any_of(tokens.begin(), tokens.end(), [&](const auto& t) {
      return t.rfind(prefix, 0) == 0;
    });
    if (tokens.size() < params.min_tokens || clashes) {
      ++local.skipped;
      continue;
    }
    const std::uint64_t seed = derive_seed(run_seed, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const auto spans = sample_spans(tokens.size(), params, rng);
    local.tokens += tokens.size();
    for (const auto& s : spans) local.corrupted_tokens += s.length;
    out.push_back(make_denoise_instance(tokens, spans, params, seed));
    ++local.emitted;
  }
  if (stats) *stats = local;
  return out;
}

// Seeded reservoir sample of up to k non-blank lines, returned in file order.
inline std::vector<std::string> sample_lines(const std::string& path, std::size_t k,
                                             std::uint64_t seed) {
  ingest::LineReader reader(path);
  Rng rng(seed);
  std::vector<std::pair<std::uint64_t, std::string>> reservoir;
  std::string line;
  std::uint64_t seen = 0;
  while (reader.next(line)) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    if (reservoir.size() < k) {
      reservoir.emplace_back(seen, std::string(trimmed));
    } else if (k > 0) {
      const std::uint64_t j = rng.uniform_below(seen + 1);
      if (j < k) reservoir[j] = {seen, std::string(trimmed)};
    }
    ++seen;
  }
  std::sort(reservoir.begin(), reservoir.end());
  std::vector<std::string> out;
  for (auto& [idx, s] : reservoir) out.push_back(std::move(s));
  return out;
}

inline std::size_t write_instances(std::span<const TrainingInstance> instances,
                                   const std::string& path,
                                   const std::optional<json>& header = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  if (header) out << json{{"header", *header}}.dump() << '\n';
  for (const auto& t : instances) out << to_json(t).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path);
  return instances.size();
}

inline std::vector<TrainingInstance> read_instances(const std::string& path) {
  ingest::LineReader reader(path);
  std::vector<TrainingInstance> out;
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
    out.push_back(training_instance_from_json(j));
  }
  return out;
}

}  // namespace decompkit::emit
