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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "decompkit/backend.hpp"
#include "decompkit/error.hpp"

namespace decompkit {

// Fixed-dimension, finite real vector.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty embedding");
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kProtocolError, "non-finite embedding value");
    }
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  EmbeddingVector operator-() const {
    std::vector<double> neg(values_);
    for (auto& v : neg) v = -v;
    return EmbeddingVector(std::move(neg));
  }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of an all-zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine(u.values(), v.values());
}

struct EmbedClientOptions {
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  bool cache = true;
  // The cache is dropped wholesale once it holds this many vectors.
  std::size_t cache_capacity = 1u << 20;
};

struct EmbedClientStats {
  std::uint64_t requests = 0;
  std::uint64_t texts_sent = 0;
  std::uint64_t cache_hits = 0;
};

// Batching, caching front end for one embedding model. Safe to share between
// threads. The dimension is fixed by the first response.
class EmbedClient {
 public:
  EmbedClient(EmbedBackend& backend, std::string model, EmbedClientOptions options = {})
      : backend_(backend), model_(std::move(model)), options_(options) {
    if (options_.batch_size == 0 || options_.max_in_flight == 0) {
      throw Error(ErrorCode::kInvalidArgument, "batch_size and max_in_flight must be positive");
    }
  }

  const std::string& model() const noexcept { return model_; }

  std::size_t dim() const {
    std::lock_guard lock(mu_);
    return dim_;
  }

  EmbedClientStats stats() const {
    std::lock_guard lock(mu_);
    return stats_;
  }

  void clear_cache() {
    std::lock_guard lock(mu_);
    cache_.clear();
  }

  EmbeddingVector embed_one(const std::string& text) { return embed({text}).front(); }

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) {
    std::unordered_map<std::string, EmbeddingVector> found;
    std::vector<std::string> misses;
    {
      std::lock_guard lock(mu_);
      std::unordered_set<std::string> queued;
      for (const auto& t : texts) {
        if (found.count(t) || queued.count(t)) continue;
        if (options_.cache) {
          if (auto it = cache_.find(t); it != cache_.end()) {
            found.emplace(t, it->second);
            ++stats_.cache_hits;
            continue;
          }
        }
        queued.insert(t);
        misses.push_back(t);
      }
    }

    std::vector<std::vector<std::string>> batches;
    for (std::size_t i = 0; i < misses.size(); i += options_.batch_size) {
      const auto end = std::min(misses.size(), i + options_.batch_size);
      batches.emplace_back(misses.begin() + static_cast<std::ptrdiff_t>(i),
                           misses.begin() + static_cast<std::ptrdiff_t>(end));
    }
    std::vector<EmbedResponse> responses(batches.size());
    for (std::size_t wave = 0; wave < batches.size(); wave += options_.max_in_flight) {
      const auto wave_end = std::min(batches.size(), wave + options_.max_in_flight);
      if (wave_end - wave == 1) {
        responses[wave] = backend_.embed(model_, batches[wave]);
        continue;
      }
      std::vector<std::future<EmbedResponse>> inflight;
      for (std::size_t b = wave; b < wave_end; ++b) {
        inflight.push_back(std::async(std::launch::async,
                                      [this, &batches, b] { return backend_.embed(model_, batches[b]); }));
      }
      for (std::size_t b = wave; b < wave_end; ++b) responses[b] = inflight[b - wave].get();
    }

    {
      std::lock_guard lock(mu_);
      for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto& resp = responses[b];
        ++stats_.requests;
        stats_.texts_sent += batches[b].size();
        if (resp.vectors.size() != batches[b].size()) {
          throw Error(ErrorCode::kProtocolError,
                      "embed returned " + std::to_string(resp.vectors.size()) + " vectors for " +
                          std::to_string(batches[b].size()) + " texts");
        }
        for (std::size_t i = 0; i < resp.vectors.size(); ++i) {
          EmbeddingVector v(resp.vectors[i]);
          if (resp.dim != 0 && v.dim() != resp.dim) {
            throw Error(ErrorCode::kDimensionMismatch, "vector length disagrees with reported dim");
          }
          if (dim_ == 0) dim_ = v.dim();
          if (v.dim() != dim_) {
            throw Error(ErrorCode::kDimensionMismatch,
                        "model '" + model_ + "' changed dimension " + std::to_string(dim_) +
                            " -> " + std::to_string(v.dim()));
          }
          if (options_.cache) {
            if (cache_.size() >= options_.cache_capacity) cache_.clear();
            cache_.emplace(batches[b][i], v);
          }
          found.emplace(batches[b][i], std::move(v));
        }
      }
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(found.at(t));
    return out;
  }

 private:
  EmbedBackend& backend_;
  std::string model_;
  EmbedClientOptions options_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
  std::size_t dim_ = 0;
  EmbedClientStats stats_;
};

}  // namespace decompkit
