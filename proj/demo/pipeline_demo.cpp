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

// End-to-end walk through the library on the bundled demo data, using the
// in-process mock backend. Usage: pipeline_demo [data_dir]

#include <iostream>
#include <sstream>

#include "decompkit/decompkit.hpp"

namespace dk = decompkit;

int main(int argc, char** argv) {
  const std::string data = argc > 1 ? argv[1] : DECOMPKIT_DEMO_DATA;
  const std::uint64_t seed = 7;
  try {
    dk::ingest::IngestCounters counters;
    const auto articles =
        dk::ingest::read_corpus({data + "/corpus.jsonl"}, dk::ingest::ValidationPolicy::kSkipInvalid, &counters);
    std::cout << "ingest  " << counters.to_json().dump() << "\n";

    dk::MockBackend embedder;
    dk::EmbedClient titles(embedder, "title");
    dk::EmbedClient sentences(embedder, "sentence");
    const auto mined = dk::mining::mine(articles, titles, sentences);
    std::cout << "mine    " << mined.stats.to_json().dump() << "\n";

    const auto idf = dk::dedup::load_idf(data + "/idf.tsv");
    const auto deduped = dk::dedup::sign_and_dedup(mined.sentence_pairs, idf, 10, seed, 1);
    std::cout << "dedup   " << deduped.retained.size() << " of " << mined.sentence_pairs.size() << " pairs kept\n";

    for (std::size_t i = 0; i < deduped.retained.size() && i < 2; ++i) {
      const auto inst = dk::emit::make_pair_instance(deduped.retained[i], seed);
      std::cout << "pair    " << inst.input_text << "\n     -> " << inst.target_text << "\n";
    }
    const auto book = dk::emit::sample_lines(data + "/book.txt", 3, seed);
    for (const auto& inst : dk::emit::make_denoise_instances(book, {}, seed)) {
      std::cout << "denoise " << inst.input_text << "\n     -> " << inst.target_text << "\n";
    }

    const auto wv = dk::metrics::WordVectors::load(data + "/vectors.txt");
    const auto report = dk::metrics::compute_metrics(dk::metrics::text_pairs(deduped.retained), wv, sentences);
    std::cout << "metrics " << report.to_json().dump() << "\n";

    std::ifstream script_in(data + "/mock_script.json");
    dk::MockBackend qa_mock(dk::json::parse(script_in));
    dk::EmbedClient paraphrase(qa_mock, "paraphrase");
    dk::qa::Backends backends{qa_mock, paraphrase, qa_mock, qa_mock};
    std::ifstream questions(data + "/questions.jsonl");
    for (std::string line; std::getline(questions, line);) {
      if (line.empty()) continue;
      const auto q = dk::qa::question_from_json(dk::json::parse(line));
      const auto r = dk::qa::answer(q, backends, {}, seed);
      std::cout << "answer  " << q.text << " => " << dk::qa::label_name(r.verdict.label) << " (yes "
                << r.verdict.weight_yes << ", no " << r.verdict.weight_no << ")\n";
      const auto& first = r.outcomes.front().chain;
      if (first) {
        for (const auto& f : first->facts) std::cout << "          fact " << f.step << ": " << f.corrected_text << "\n";
      }
    }
  } catch (const dk::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
