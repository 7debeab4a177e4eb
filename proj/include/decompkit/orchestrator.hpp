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

// Decompose-correct-entail question answering.
//
// A chain generates up to max_steps facts one at a time. At each step the
// generator sees "<question> Decompositions: <fact1> ; <fact2> ..." built from
// the corrected facts so far and returns k scored candidates; one is sampled
// by softmax(score / T), sent alone to the corrector, and appended. From step
// 2 on, if every candidate is at least `stop_threshold` similar to some
// existing fact, the chain stops before selecting. The entailment backend then
// labels the chain yes/no with a confidence, and several independently seeded
// chains vote with their confidences as weights.

#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decompkit/backend.hpp"
#include "decompkit/corpus.hpp"
#include "decompkit/embedding.hpp"
#include "decompkit/error.hpp"
#include "decompkit/prompts.hpp"
#include "decompkit/random.hpp"
#include "decompkit/text.hpp"

namespace decompkit::qa {

enum class Label { kYes, kNo };

inline std::string_view label_name(Label l) { return l == Label::kYes ? "yes" : "no"; }

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "yes") return Label::kYes;
  if (s == "no") return Label::kNo;
  return std::nullopt;
}

struct Question {
  std::string id;
  std::string text;
  std::optional<Label> gold_answer;
};

// Accepts {"id", "question" | "text", "answer" | "gold_answer": bool | "yes" | "no"}.
inline Question question_from_json(const json& j) {
  Question q;
  try {
    q.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    q.text = j.contains("question") ? j.at("question").get<std::string>()
                                    : j.at("text").get<std::string>();
    for (const char* key : {"gold_answer", "answer"}) {
      if (!j.contains(key) || j[key].is_null()) continue;
      const auto& g = j[key];
      if (g.is_boolean()) {
        q.gold_answer = g.get<bool>() ? Label::kYes : Label::kNo;
      } else if (auto l = parse_label(g.get<std::string>())) {
        q.gold_answer = *l;
      } else {
        throw Error(ErrorCode::kInvalidLabel, g.dump(), key);
      }
      break;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMissingField, e.what(), "question");
  }
  if (text::trim(q.text).empty()) throw Error(ErrorCode::kEmptyText, "empty question", "question");
  return q;
}

struct Fact {
  int step = 0;
  std::string raw_text;
  std::string corrected_text;
  bool changed = false;
  // Set when the corrector was unreachable and the pass-through policy kept
  // the raw text.
  bool correction_skipped = false;
};

enum class StopReason { kMaxSteps, kEarlyStop };

inline std::string_view stop_reason_name(StopReason r) {
  return r == StopReason::kMaxSteps ? "max_steps" : "early_stop";
}

struct StepTrace {
  int step = 0;
  std::string input;
  std::vector<GenerationCandidate> candidates;
  std::vector<double> probabilities;
  std::vector<double> max_similarity;  // empty at step 1
  std::optional<std::size_t> selected;
};

struct Chain {
  std::string question_id;
  std::uint64_t seed = 0;
  std::vector<Fact> facts;
  Label verdict = Label::kNo;
  double confidence = 0.0;
  StopReason stop_reason = StopReason::kMaxSteps;
  std::vector<StepTrace> steps;
};

struct Verdict {
  Label label = Label::kNo;
  double weight_yes = 0.0;
  double weight_no = 0.0;
  std::vector<Chain> chains;
};

enum class CorrectionFailurePolicy { kFailChain, kPassThrough };

struct PipelineOptions {
  int num_candidates = 5;
  double diversity = 0.0;
  double temperature = 1.0;
  double stop_threshold = 0.95;
  int max_steps = 3;
  int chains = 5;
  std::string generate_model = "decomp";
  CorrectionFailurePolicy on_correction_failure = CorrectionFailurePolicy::kFailChain;
  std::string correction_prompt{prompts::kCorrection};
  // Chains of one question run concurrently when > 1.
  std::size_t jobs = 1;

  void validate() const {
    if (num_candidates < 1) throw Error(ErrorCode::kInvalidArgument, "num_candidates must be >= 1");
    if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
    if (!(stop_threshold > 0.0 && stop_threshold <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "stop threshold must be in (0, 1]");
    }
    if (max_steps < 1) throw Error(ErrorCode::kInvalidArgument, "max_steps must be >= 1");
    if (chains < 1) throw Error(ErrorCode::kInvalidArgument, "chains must be >= 1");
  }
};

struct Backends {
  GenerateBackend& generator;
  EmbedClient& paraphrase;
  CorrectBackend& corrector;
  EntailBackend& entailer;
};

// The one formatter for both generation and entailment input.
inline std::string build_decompose_input(std::string_view question,
                                         std::span<const std::string> facts) {
  std::string out(question);
  out += " Decompositions:";
  if (!facts.empty()) {
    out += ' ';
    for (std::size_t i = 0; i < facts.size(); ++i) {
      if (i) out += " ; ";
      out += facts[i];
    }
  }
  return out;
}

inline std::vector<std::string> corrected_texts(std::span<const Fact> facts) {
  std::vector<std::string> out;
  out.reserve(facts.size());
  for (const auto& f : facts) out.push_back(f.corrected_text);
  return out;
}

// Up to k distinct non-empty candidates, best score first. Duplicate texts
// (after trimming) keep their highest score.
inline std::vector<GenerationCandidate> generate_step(const std::string& input,
                                                      GenerateBackend& generator, int k,
                                                      double diversity,
                                                      const std::string& model = "decomp") {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto raw = generator.generate(GenerateRequest{model, input, k, diversity});
  std::vector<GenerationCandidate> out;
  for (const auto& c : raw) {
    if (!std::isfinite(c.score)) throw Error(ErrorCode::kProtocolError, "non-finite candidate score");
    std::string t(text::trim(c.text));
    if (t.empty()) continue;
    auto dup = std::find_if(out.begin(), out.end(), [&](const auto& o) { return o.text == t; });
    if (dup == out.end()) {
      out.push_back({std::move(t), c.score});
    } else {
      dup->score = std::max(dup->score, c.score);
    }
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyGeneration, "all candidates empty");
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.score > y.score; });
  if (out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

inline std::vector<double> softmax_probabilities(std::span<const GenerationCandidate> candidates,
                                                 double temperature = 1.0) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no candidates");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  double top = candidates.front().score;
  for (const auto& c : candidates) top = std::max(top, c.score);
  std::vector<double> p;
  p.reserve(candidates.size());
  double z = 0.0;
  for (const auto& c : candidates) {
    p.push_back(std::exp((c.score - top) / temperature));
    z += p.back();
  }
  for (auto& x : p) x /= z;
  return p;
}

// Index drawn with probability softmax(score / temperature).
inline std::size_t select_candidate(std::span<const GenerationCandidate> candidates, Rng& rng,
                                    double temperature = 1.0) {
  const auto p = softmax_probabilities(candidates, temperature);
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

// For each candidate, its highest cosine to any current fact.
inline std::vector<double> max_similarities(std::span<const GenerationCandidate> candidates,
                                            std::span<const std::string> facts,
                                            EmbedClient& paraphrase) {
  if (facts.empty()) throw Error(ErrorCode::kInvalidArgument, "early-stop check needs current facts");
  std::vector<std::string> texts(facts.begin(), facts.end());
  for (const auto& c : candidates) texts.push_back(c.text);
  const auto vectors = paraphrase.embed(texts);
  std::vector<double> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double best = -1.0;
    for (std::size_t f = 0; f < facts.size(); ++f) {
      best = std::max(best, cosine(vectors[facts.size() + i], vectors[f]));
    }
    out.push_back(best);
  }
  return out;
}

// True iff every candidate is at least `threshold` similar to some fact.
inline bool should_stop(std::span<const GenerationCandidate> candidates,
                        std::span<const std::string> facts, EmbedClient& paraphrase,
                        double threshold = 0.95) {
  const auto sims = max_similarities(candidates, facts, paraphrase);
  return std::all_of(sims.begin(), sims.end(), [&](double s) { return s >= threshold; });
}

// The corrector sees the prompt and the fact only.
inline std::string correct_fact(const std::string& fact, CorrectBackend& corrector,
                                const std::string& prompt = std::string(prompts::kCorrection)) {
  if (text::trim(fact).empty()) throw Error(ErrorCode::kEmptyText, "empty fact", "fact");
  std::string fixed(text::trim(corrector.correct(prompt, fact)));
  if (fixed.empty()) throw Error(ErrorCode::kProtocolError, "corrector returned an empty sentence");
  return fixed;
}

struct Entailment {
  Label label = Label::kNo;
  double confidence = 0.0;
};

inline Entailment entail(std::string_view question, std::span<const std::string> facts,
                         EntailBackend& entailer) {
  if (facts.empty()) throw Error(ErrorCode::kInvalidArgument, "entailment needs at least one fact");
  const auto r = entailer.entail(build_decompose_input(question, facts));
  const auto label = parse_label(r.label);
  if (!label) throw Error(ErrorCode::kInvalidLabel, "'" + r.label + "'", "label");
  if (!(r.confidence > 0.0 && r.confidence <= 1.0)) {
    throw Error(ErrorCode::kProtocolError, "confidence " + std::to_string(r.confidence) +
                                               " outside (0, 1]");
  }
  return {*label, r.confidence};
}

inline Chain run_chain(const Question& question, Backends& backends, const PipelineOptions& options,
                       std::uint64_t seed) {
  options.validate();
  Chain chain;
  chain.question_id = question.id;
  chain.seed = seed;
  chain.stop_reason = StopReason::kMaxSteps;
  Rng rng(seed);
  int step = 1;
  try {
    for (; step <= options.max_steps; ++step) {
      const auto current = corrected_texts(chain.facts);
      StepTrace trace;
      trace.step = step;
      trace.input = build_decompose_input(question.text, current);
      trace.candidates = generate_step(trace.input, backends.generator, options.num_candidates,
                                       options.diversity, options.generate_model);
      trace.probabilities = softmax_probabilities(trace.candidates, options.temperature);
      if (step >= 2) {
        trace.max_similarity = max_similarities(trace.candidates, current, backends.paraphrase);
        const bool stop = std::all_of(trace.max_similarity.begin(), trace.max_similarity.end(),
                                      [&](double s) { return s >= options.stop_threshold; });
        if (stop) {
          chain.steps.push_back(std::move(trace));
          chain.stop_reason = StopReason::kEarlyStop;
          break;
        }
      }
      const std::size_t pick = select_candidate(trace.candidates, rng, options.temperature);
      trace.selected = pick;
      Fact fact;
      fact.step = step;
      fact.raw_text = trace.candidates[pick].text;
      try {
        fact.corrected_text = correct_fact(fact.raw_text, backends.corrector, options.correction_prompt);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kBackendUnavailable ||
            options.on_correction_failure == CorrectionFailurePolicy::kFailChain) {
          throw;
        }
        fact.corrected_text = fact.raw_text;
        fact.correction_skipped = true;
      }
      fact.changed = fact.corrected_text != fact.raw_text;
      chain.facts.push_back(std::move(fact));
      chain.steps.push_back(std::move(trace));
    }
    step = static_cast<int>(chain.facts.size()) + 1;
    const auto result = entail(question.text, corrected_texts(chain.facts), backends.entailer);
    chain.verdict = result.label;
    chain.confidence = result.confidence;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw;
    throw Error(ErrorCode::kChainFailed, std::string(e.what()), {}, step);
  }
  return chain;
}

// Confidence-weighted vote. Equal weights go to the label of the single most
// confident chain; if that is tied too, the answer is "no".
inline Verdict vote(std::vector<Chain> chains) {
  if (chains.empty()) throw Error(ErrorCode::kNoChains, "nothing to vote on");
  Verdict v;
  double best_yes = 0.0, best_no = 0.0;
  for (const auto& c : chains) {
    if (c.verdict == Label::kYes) {
      v.weight_yes += c.confidence;
      best_yes = std::max(best_yes, c.confidence);
    } else {
      v.weight_no += c.confidence;
      best_no = std::max(best_no, c.confidence);
    }
  }
  if (v.weight_yes != v.weight_no) {
    v.label = v.weight_yes > v.weight_no ? Label::kYes : Label::kNo;
  } else {
    v.label = best_yes > best_no ? Label::kYes : Label::kNo;
  }
  v.chains = std::move(chains);
  return v;
}

struct ChainOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::optional<Chain> chain;
  std::string error;
  std::optional<int> failed_step;
};

struct AnswerResult {
  Question question;
  std::uint64_t seed = 0;
  std::vector<ChainOutcome> outcomes;  // chain-index order
  Verdict verdict;
};

inline std::uint64_t chain_seed(std::uint64_t run_seed, std::size_t index) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(index));
}

// Runs options.chains chains and votes over the ones that succeed. Throws
// NoChains only when every chain fails.
inline AnswerResult answer(const Question& question, Backends& backends,
                           const PipelineOptions& options, std::uint64_t seed) {
  options.validate();
  AnswerResult r;
  r.question = question;
  r.seed = seed;
  const auto n = static_cast<std::size_t>(options.chains);
  r.outcomes.resize(n);
  const auto run_one = [&](std::size_t i) {
    ChainOutcome& o = r.outcomes[i];
    o.index = i;
    o.seed = chain_seed(seed, i);
    try {
      o.chain = run_chain(question, backends, options, o.seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kChainFailed) throw;
      o.error = e.detail();
      o.failed_step = e.step();
    }
  };
  if (options.jobs > 1 && n > 1) {
    std::vector<std::future<void>> futures;
    for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, run_one, i));
    std::exception_ptr first;
    for (auto& f : futures) {
      try {
        f.get();
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  } else {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  }
  std::vector<Chain> ok;
  for (const auto& o : r.outcomes) {
    if (o.chain) ok.push_back(*o.chain);
  }
  if (ok.empty()) throw Error(ErrorCode::kNoChains, "all " + std::to_string(n) + " chains failed");
  r.verdict = vote(std::move(ok));
  return r;
}

inline json to_json(const Fact& f) {
  return json{{"step", f.step},
              {"raw", f.raw_text},
              {"corrected", f.corrected_text},
              {"changed", f.changed},
              {"correction_skipped", f.correction_skipped}};
}

inline json to_json(const StepTrace& s) {
  json cands = json::array();
  for (const auto& c : s.candidates) cands.push_back({{"text", c.text}, {"score", c.score}});
  json j{{"step", s.step}, {"input", s.input}, {"candidates", cands},
         {"probabilities", s.probabilities}};
  if (!s.max_similarity.empty()) j["max_similarity"] = s.max_similarity;
  j["selected"] = s.selected ? json(*s.selected) : json(nullptr);
  return j;
}

inline json to_json(const Chain& c) {
  json facts = json::array();
  for (const auto& f : c.facts) facts.push_back(to_json(f));
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(to_json(s));
  return json{{"seed", c.seed},
              {"facts", facts},
              {"steps", steps},
              {"stop_reason", stop_reason_name(c.stop_reason)},
              {"verdict", label_name(c.verdict)},
              {"confidence", c.confidence}};
}

// Full audit record: every chain with raw/corrected facts, candidate scores,
// and the vote weights.
inline json trace_json(const AnswerResult& r) {
  json chains = json::array();
  for (const auto& o : r.outcomes) {
    json entry{{"index", o.index}, {"seed", o.seed}};
    if (o.chain) {
      entry["status"] = "ok";
      entry["chain"] = to_json(*o.chain);
    } else {
      entry["status"] = "failed";
      entry["error"] = o.error;
      entry["failed_step"] = o.failed_step ? json(*o.failed_step) : json(nullptr);
    }
    chains.push_back(std::move(entry));
  }
  json question{{"id", r.question.id}, {"text", r.question.text}};
  question["gold_answer"] = r.question.gold_answer ? json(label_name(*r.question.gold_answer)) : json(nullptr);
  return json{{"question", question},
              {"seed", r.seed},
              {"chains", chains},
              {"weights", {{"yes", r.verdict.weight_yes}, {"no", r.verdict.weight_no}}},
              {"label", label_name(r.verdict.label)}};
}

// One line of the verdict output file.
inline json verdict_json(const AnswerResult& r) {
  std::size_t failed = 0;
  for (const auto& o : r.outcomes) failed += o.chain ? 0 : 1;
  json j{{"id", r.question.id},
         {"label", label_name(r.verdict.label)},
         {"weight_yes", r.verdict.weight_yes},
         {"weight_no", r.verdict.weight_no},
         {"chains", r.outcomes.size()},
         {"failed_chains", failed}};
  if (r.question.gold_answer) {
    j["gold_answer"] = label_name(*r.question.gold_answer);
    j["correct"] = *r.question.gold_answer == r.verdict.label;
  }
  return j;
}

}  // namespace decompkit::qa
