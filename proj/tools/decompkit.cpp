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

// decompkit command-line driver.
//
//   decompkit mine       --in corpus.jsonl[.gz]... --out pairs.jsonl
//   decompkit dedup      --in pairs.jsonl --idf idf.tsv --out deduped.jsonl
//   decompkit emit       --in deduped.jsonl [--denoise-in book.txt] --out instances.jsonl
//   decompkit stats      --in pairs.jsonl --vectors vectors.txt
//   decompkit answer     --questions q.jsonl --backends mock --trace-out traces/
//   decompkit serve-mock --port 8080 [--script script.json]
//
// Settings resolve as flags > --config file > defaults. Exit codes: 0 ok,
// 1 stage error (JSON report on stderr), 2 usage error.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "decompkit/decompkit.hpp"

namespace {

using decompkit::Error;
using decompkit::ErrorCode;
using decompkit::json;
using decompkit::RunConfig;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One RunConfig field: its config-file key and how to parse a value into it.
struct Setting {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> apply;
};

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
  std::istringstream in(raw);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) throw UsageError("invalid value '" + raw + "' for " + key);
  return value;
}

template <typename T>
Setting setting(std::string key, T RunConfig::*member) {
  return Setting{key, [key, member](RunConfig& c, const std::string& raw) {
                   if constexpr (std::is_same_v<T, std::string>) {
                     c.*member = raw;
                   } else {
                     c.*member = parse_value<T>(key, raw);
                   }
                 }};
}

const std::map<std::string, Setting>& all_settings() {
  static const std::map<std::string, Setting> table = [] {
    std::vector<Setting> list = {
        setting("window_days", &RunConfig::window_days),
        setting("title_threshold", &RunConfig::title_threshold),
        setting("band_lo", &RunConfig::band_lo),
        setting("band_hi", &RunConfig::band_hi),
        setting("min_sentence_tokens", &RunConfig::min_sentence_tokens),
        setting("min_shared_title_tokens", &RunConfig::min_shared_title_tokens),
        setting("cap", &RunConfig::cap),
        setting("corruption_rate", &RunConfig::corruption_rate),
        setting("mean_span_length", &RunConfig::mean_span_length),
        setting("denoise_sample", &RunConfig::denoise_sample),
        setting("sample", &RunConfig::metrics_sample),
        setting("chains", &RunConfig::chains),
        setting("max_steps", &RunConfig::max_steps),
        setting("num_candidates", &RunConfig::num_candidates),
        setting("stop_threshold", &RunConfig::stop_threshold),
        setting("temperature", &RunConfig::temperature),
        setting("diversity", &RunConfig::diversity),
        setting("correction_policy", &RunConfig::correction_policy),
        setting("backends", &RunConfig::backends),
        setting("embed_model", &RunConfig::embed_model),
        setting("title_model", &RunConfig::title_model),
        setting("paraphrase_model", &RunConfig::paraphrase_model),
        setting("generate_model", &RunConfig::generate_model),
        setting("embed_batch", &RunConfig::embed_batch),
        setting("embed_in_flight", &RunConfig::embed_in_flight),
        setting("seed", &RunConfig::seed),
        setting("jobs", &RunConfig::jobs),
    };
    std::map<std::string, Setting> m;
    for (auto& s : list) m.emplace(s.key, std::move(s));
    return m;
  }();
  return table;
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

// Flat "key = value" file; '#' starts a comment; keys may use '-' or '_'.
void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto trimmed = decompkit::text::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(decompkit::text::trim(trimmed.substr(0, eq)));
    std::replace(key.begin(), key.end(), '-', '_');
    std::string value(decompkit::text::trim(trimmed.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const auto it = all_settings().find(key);
    if (it == all_settings().end()) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    it->second.apply(config, value);
  }
}

// Registers config flags on a subcommand and resolves them after parsing.
class ConfigFlags {
 public:
  ConfigFlags(CLI::App* app, std::vector<std::string> keys) : keys_(std::move(keys)) {
    app->add_option("--config", config_path_, "key = value settings file");
    for (const auto& key : keys_) {
      options_[key] = app->add_option(flag_name(key), values_[key], "overrides " + key);
    }
  }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path_.empty()) apply_config_file(config, config_path_);
    for (const auto& key : keys_) {
      if (options_.at(key)->count() > 0) all_settings().at(key).apply(config, values_.at(key));
    }
    try {
      config.validate();
    } catch (const Error& e) {
      throw UsageError(e.detail());
    }
    return config;
  }

 private:
  std::vector<std::string> keys_;
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

const std::vector<std::string> kCommon = {"seed", "jobs", "backends", "embed_model",
                                          "embed_batch", "embed_in_flight"};

std::vector<std::string> with_common(std::vector<std::string> keys) {
  keys.insert(keys.end(), kCommon.begin(), kCommon.end());
  return keys;
}

void echo_config(std::string_view stage, const RunConfig& config) {
  std::cerr << json{{"resolved", decompkit::header_json(stage, config)}}.dump() << std::endl;
}

decompkit::EmbedClientOptions embed_options(const RunConfig& c) {
  decompkit::EmbedClientOptions o;
  o.batch_size = c.embed_batch;
  o.max_in_flight = c.embed_in_flight;
  return o;
}

// ---------------------------------------------------------------------------

struct MineArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string policy = "skip";
};

int run_mine(const MineArgs& args, const RunConfig& config) {
  echo_config("mine", config);
  const auto policy = args.policy == "fail" ? decompkit::ingest::ValidationPolicy::kFailFast
                                            : decompkit::ingest::ValidationPolicy::kSkipInvalid;
  decompkit::ingest::IngestCounters counters;
  const auto articles = decompkit::ingest::read_corpus(args.inputs, policy, &counters);
  std::cout << counters.to_json().dump() << std::endl;

  auto backend = decompkit::open_backend(config.backends);
  decompkit::EmbedClient title_client(*backend, config.resolved_title_model(), embed_options(config));
  decompkit::EmbedClient sentence_client(*backend, config.embed_model, embed_options(config));
  decompkit::mining::MineOptions options;
  options.window_days = config.window_days;
  options.title.threshold = config.title_threshold;
  options.title.min_shared_tokens = config.min_shared_title_tokens;
  options.band = {config.band_lo, config.band_hi};
  options.segmenter.min_sentence_tokens = config.min_sentence_tokens;
  options.jobs = config.jobs;
  const auto result = decompkit::mining::mine(articles, title_client, sentence_client, options);
  decompkit::write_pairs(result.sentence_pairs, args.out, decompkit::header_json("mine", config));
  std::cout << json{{"mine", result.stats.to_json()}}.dump() << std::endl;
  return 0;
}

struct DedupArgs {
  std::string in;
  std::string out;
  std::string idf;
  std::string idf_corpus;
  std::string idf_out;
};

decompkit::IdfTable idf_from_documents(const std::string& path) {
  decompkit::ingest::LineReader reader(path);
  decompkit::dedup::IdfBuilder builder;
  std::string line;
  while (reader.next(line)) {
    if (decompkit::text::trim(line).empty()) continue;
    if (line.front() == '{') {
      try {
        const auto j = json::parse(line);
        if (j.contains("text") && j["text"].is_string()) {
          builder.add_document(j["text"].get<std::string>());
          continue;
        }
      } catch (const json::parse_error&) {
      }
    }
    builder.add_document(line);
  }
  return builder.build();
}

int run_dedup(const DedupArgs& args, const RunConfig& config) {
  echo_config("dedup", config);
  if (args.idf.empty() == args.idf_corpus.empty()) {
    throw UsageError("dedup needs exactly one of --idf or --idf-corpus");
  }
  const auto idf = args.idf.empty() ? idf_from_documents(args.idf_corpus)
                                    : decompkit::dedup::load_idf(args.idf);
  if (!args.idf_out.empty()) decompkit::dedup::save_idf(idf, args.idf_out);
  auto pairs = decompkit::read_pairs(args.in);
  const auto result =
      decompkit::dedup::sign_and_dedup(std::move(pairs), idf, config.cap, config.seed, config.jobs);
  decompkit::write_pairs(result.retained, args.out, decompkit::header_json("dedup", config));
  std::cout << json{{"dedup", result.stats.to_json()}}.dump() << std::endl;
  return 0;
}

struct EmitArgs {
  std::string in;
  std::string out;
  std::string denoise_in;
};

int run_emit(const EmitArgs& args, const RunConfig& config) {
  echo_config("emit", config);
  std::vector<decompkit::TrainingInstance> instances;
  std::size_t pair_count = 0;
  if (!args.in.empty()) {
    for (const auto& p : decompkit::read_pairs(args.in)) {
      instances.push_back(decompkit::emit::make_pair_instance(p, config.seed));
    }
    pair_count = instances.size();
  }
  decompkit::emit::DenoiseStats dstats;
  if (!args.denoise_in.empty()) {
    const std::size_t k = config.denoise_sample == 0 ? std::numeric_limits<std::size_t>::max()
                                                     : config.denoise_sample;
    const auto sentences =
        decompkit::emit::sample_lines(args.denoise_in, k, decompkit::derive_seed(config.seed, "denoise-sample"));
    decompkit::emit::DenoiseParams params;
    params.corruption_rate = config.corruption_rate;
    params.mean_span_length = config.mean_span_length;
    auto noisy = decompkit::emit::make_denoise_instances(
        sentences, params, decompkit::derive_seed(config.seed, "denoise"), &dstats);
    instances.insert(instances.end(), std::make_move_iterator(noisy.begin()),
                     std::make_move_iterator(noisy.end()));
  }
  if (args.in.empty() && args.denoise_in.empty()) {
    throw UsageError("emit needs --in and/or --denoise-in");
  }
  decompkit::emit::write_instances(instances, args.out, decompkit::header_json("emit", config));
  std::cout << json{{"emit",
                     {{"pair2pair", pair_count},
                      {"denoise", dstats.emitted},
                      {"denoise_skipped", dstats.skipped},
                      {"corrupted_fraction", dstats.corrupted_fraction()}}}}
                   .dump()
            << std::endl;
  return 0;
}

struct StatsArgs {
  std::string in;
  std::string vectors;
  std::string out;
};

int run_stats(const StatsArgs& args, const RunConfig& config) {
  echo_config("stats", config);
  auto pairs = decompkit::metrics::text_pairs(decompkit::read_pairs(args.in));
  pairs = decompkit::metrics::sample_pairs(std::move(pairs), config.metrics_sample, config.seed);
  const auto wv = decompkit::metrics::WordVectors::load(args.vectors);
  auto backend = decompkit::open_backend(config.backends);
  decompkit::EmbedClient client(*backend, config.embed_model, embed_options(config));
  const auto report = decompkit::metrics::compute_metrics(pairs, wv, client);
  json j = report.to_json();
  j["header"] = decompkit::header_json("stats", config);
  if (args.out.empty() || args.out == "-") {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(args.out);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + args.out);
    out << j.dump(2) << '\n';
  }
  return 0;
}

struct AnswerArgs {
  std::string questions;
  std::string out = "-";
  std::string trace_out;
};

std::vector<decompkit::qa::Question> read_questions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  std::vector<decompkit::qa::Question> out;
  const auto first = content.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && content[first] == '[') {
      for (const auto& j : json::parse(content)) out.push_back(decompkit::qa::question_from_json(j));
      return out;
    }
    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
      if (decompkit::text::trim(line).empty()) continue;
      out.push_back(decompkit::qa::question_from_json(json::parse(line)));
    }
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, e.what());
  }
  return out;
}

std::string trace_file_name(const std::string& id) {
  std::string name;
  for (char c : id) {
    name.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  }
  return (name.empty() ? "question" : name) + ".json";
}

int run_answer(const AnswerArgs& args, const RunConfig& config) {
  echo_config("answer", config);
  const auto questions = read_questions(args.questions);
  auto backend = decompkit::open_backend(config.backends);
  decompkit::EmbedClient paraphrase(*backend, config.paraphrase_model, embed_options(config));
  decompkit::qa::Backends backends{*backend, paraphrase, *backend, *backend};
  decompkit::qa::PipelineOptions options;
  options.num_candidates = config.num_candidates;
  options.diversity = config.diversity;
  options.temperature = config.temperature;
  options.stop_threshold = config.stop_threshold;
  options.max_steps = config.max_steps;
  options.chains = config.chains;
  options.generate_model = config.generate_model;
  options.on_correction_failure = config.correction_policy == "pass_through"
                                      ? decompkit::qa::CorrectionFailurePolicy::kPassThrough
                                      : decompkit::qa::CorrectionFailurePolicy::kFailChain;
  options.jobs = config.jobs;

  if (!args.trace_out.empty()) std::filesystem::create_directories(args.trace_out);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (args.out != "-") {
    file.open(args.out, std::ios::binary);
    if (!file) throw Error(ErrorCode::kIoError, "cannot write " + args.out);
    out = &file;
  }
  *out << json{{"header", decompkit::header_json("answer", config)}}.dump() << '\n';

  std::size_t with_gold = 0, correct = 0, unanswered = 0;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    const std::uint64_t qseed = decompkit::derive_seed(config.seed, q.id);
    try {
      const auto result = decompkit::qa::answer(q, backends, options, qseed);
      *out << decompkit::qa::verdict_json(result).dump() << '\n';
      if (q.gold_answer) {
        ++with_gold;
        correct += *q.gold_answer == result.verdict.label ? 1 : 0;
      }
      if (!args.trace_out.empty()) {
        std::ofstream trace(std::filesystem::path(args.trace_out) / trace_file_name(q.id),
                            std::ios::binary);
        trace << decompkit::qa::trace_json(result).dump(2) << '\n';
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoChains) throw;
      ++unanswered;
      with_gold += q.gold_answer ? 1 : 0;
      *out << json{{"id", q.id}, {"error", std::string(e.code_name())}, {"message", e.detail()}}.dump()
           << '\n';
    }
  }
  out->flush();
  json summary{{"questions", questions.size()},
               {"with_gold", with_gold},
               {"correct", correct},
               {"unanswered", unanswered}};
  summary["accuracy"] = with_gold == 0 ? json(nullptr)
                                       : json(static_cast<double>(correct) / static_cast<double>(with_gold));
  std::cout << json{{"summary", summary}}.dump() << std::endl;
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string script;
};

int run_serve_mock(const ServeArgs& args) {
  auto backend = args.script.empty() ? decompkit::MockBackend()
                                     : decompkit::MockBackend::from_file(args.script);
  httplib::Server server;
  // httplib's defaults add SO_REUSEPORT, which would let a second server
  // share a busy port instead of reporting it.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  decompkit::install_routes(server, backend);

  int port = args.port;
  if (port == 0) {
    port = server.bind_to_any_port(args.host);
  } else if (!server.bind_to_port(args.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::kPortInUse, args.host + ":" + std::to_string(args.port));
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::atomic<bool> signaled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signaled = true;
    server.stop();
  });

  std::cout << json{{"listening", args.host + ":" + std::to_string(port)}, {"port", port}}.dump()
            << std::endl;
  server.listen_after_bind();
  if (!signaled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

void report_error(std::string_view code, const std::string& message, const std::string& field = {}) {
  json j{{"error", code}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparable-corpus mining and decomposition QA toolkit", "decompkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(decompkit::kVersion));

  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "Mine cross-document sentence pairs from a dated corpus");
  mine->add_option("--in", mine_args.inputs, "JSONL corpus files (.gz ok)")->required();
  mine->add_option("--out", mine_args.out, "Output pairs JSONL")->required();
  mine->add_option("--policy", mine_args.policy, "skip | fail on invalid records")
      ->check(CLI::IsMember({"skip", "fail"}));
  ConfigFlags mine_flags(mine, with_common({"window_days", "title_threshold", "band_lo", "band_hi",
                                            "min_sentence_tokens", "min_shared_title_tokens",
                                            "title_model"}));

  DedupArgs dedup_args;
  auto* dedup = app.add_subcommand("dedup", "Sign pairs by tf-idf and cap each signature group");
  dedup->add_option("--in", dedup_args.in, "Pairs JSONL")->required();
  dedup->add_option("--out", dedup_args.out, "Output pairs JSONL")->required();
  dedup->add_option("--idf", dedup_args.idf, "Idf table (TSV)");
  dedup->add_option("--idf-corpus", dedup_args.idf_corpus, "Build idf from documents (JSONL or text lines)");
  dedup->add_option("--idf-out", dedup_args.idf_out, "Save the idf table used");
  ConfigFlags dedup_flags(dedup, with_common({"cap"}));

  EmitArgs emit_args;
  auto* emit = app.add_subcommand("emit", "Write seq2seq training instances");
  emit->add_option("--in", emit_args.in, "Deduplicated pairs JSONL");
  emit->add_option("--out", emit_args.out, "Output instances JSONL")->required();
  emit->add_option("--denoise-in", emit_args.denoise_in, "Sentences (one per line) for the denoising objective");
  ConfigFlags emit_flags(emit, with_common({"corruption_rate", "mean_span_length", "denoise_sample"}));

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Dataset comparison metrics over a pair sample");
  stats->add_option("--in", stats_args.in, "Pairs JSONL")->required();
  stats->add_option("--vectors", stats_args.vectors, "Word vectors (token v1 .. vD per line)")->required();
  stats->add_option("--out", stats_args.out, "Report path (default stdout)");
  ConfigFlags stats_flags(stats, with_common({"sample"}));

  AnswerArgs answer_args;
  auto* answer = app.add_subcommand("answer", "Answer yes/no questions by decomposition and voting");
  answer->add_option("--questions", answer_args.questions, "Questions JSONL or JSON array")->required();
  answer->add_option("--out", answer_args.out, "Verdict JSONL (default stdout)");
  answer->add_option("--trace-out", answer_args.trace_out, "Directory for per-question traces");
  ConfigFlags answer_flags(answer, with_common({"chains", "max_steps", "num_candidates", "stop_threshold",
                                                "temperature", "diversity", "correction_policy",
                                                "paraphrase_model", "generate_model"}));

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve-mock", "Serve the deterministic mock backend over HTTP");
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--port", serve_args.port, "Port (0 picks a free one)");
  serve->add_option("--script", serve_args.script, "Mock script JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*mine) return run_mine(mine_args, mine_flags.resolve());
    if (*dedup) return run_dedup(dedup_args, dedup_flags.resolve());
    if (*emit) return run_emit(emit_args, emit_flags.resolve());
    if (*stats) return run_stats(stats_args, stats_flags.resolve());
    if (*answer) return run_answer(answer_args, answer_flags.resolve());
    if (*serve) return run_serve_mock(serve_args);
  } catch (const UsageError& e) {
    report_error("UsageError", e.what());
    std::cerr << app.help() << std::endl;
    return 2;
  } catch (const Error& e) {
    report_error(e.code_name(), e.detail(), e.field());
    return 1;
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return 1;
  }
  return 2;
}
