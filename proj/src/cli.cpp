// Copyright 2026 the impactir authors
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

#include "impactir/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>

#include "impactir/corpus.hpp"
#include "impactir/errors.hpp"
#include "impactir/eval.hpp"
#include "impactir/impacts.hpp"
#include "impactir/index.hpp"
#include "impactir/quantizer.hpp"
#include "impactir/query.hpp"
#include "text_io.hpp"

namespace impactir::cli {

namespace {

struct TokenizerFlags {
  bool no_lowercase = false;
  bool keep_punctuation = false;
  bool stem = false;
  std::string stopwords_path;

  void attach(CLI::App *app) {
    app->add_flag("--no-lowercase", no_lowercase, "Keep original letter case");
    app->add_flag("--keep-punctuation", keep_punctuation, "Split on whitespace only");
    app->add_flag("--stem", stem, "Apply the Porter stemmer");
    app->add_option("--stopwords", stopwords_path, "File with one stopword per line");
  }

  TokenizerConfig config() const {
    TokenizerConfig c;
    c.lowercase = !no_lowercase;
    c.strip_punctuation = !keep_punctuation;
    c.stemming = stem;
    if (!stopwords_path.empty()) {
      auto in = detail::open_input(stopwords_path);
      std::unordered_set<std::string> words;
      std::string line;
      while (std::getline(in, line)) {
        for (const auto w : detail::split_ws(line)) {
          words.emplace(c.lowercase ? tokenize(w, {true, false, false, std::nullopt}).front() : std::string(w));
        }
      }
      c.stopwords = std::move(words);
    }
    return c;
  }
};

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// "name=path" or plain "path" (system named after the file stem).
std::pair<std::string, std::filesystem::path> named_run(const std::string &spec) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos && eq > 0) return {spec.substr(0, eq), spec.substr(eq + 1)};
  const std::filesystem::path p(spec);
  return {p.stem().string(), p};
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  for (const auto part : detail::split(s, ',')) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Quantized impact inverted index: expansion, scoring, indexing, retrieval and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "impactir 1.0");

  unsigned threads = 1;
  std::function<void()> action;

  // expand
  auto *expand = app.add_subcommand("expand", "Tokenize a corpus and merge predicted expansion queries");
  std::string corpus_path, expansions_path, expand_out, mode_name = "full";
  TokenizerFlags expand_tok;
  expand->add_option("--corpus", corpus_path, "Corpus TSV (doc_id<TAB>text)")->required();
  expand->add_option("--expansions", expansions_path, "Expansion JSON-lines ({\"id\", \"queries\"})");
  expand->add_option("--mode", mode_name, "Expansion mode")
      ->check(CLI::IsMember({"none", "full", "rewrite", "inject"}))
      ->capture_default_str();
  expand->add_option("-o,--output", expand_out, "Passage TSV to write")->required();
  expand_tok.attach(expand);
  expand->callback([&] {
    action = [&] {
      const auto docs = read_corpus_tsv(corpus_path);
      std::vector<ExpansionRecord> records;
      if (!expansions_path.empty()) records = read_expansions_jsonl(expansions_path);
      const auto passages = expand_corpus(docs, records, parse_expansion_mode(mode_name), expand_tok.config());
      write_passages_tsv(expand_out, passages);
      out << "expanded " << passages.size() << " passages (mode " << mode_name << ")\n";
    };
  });

  // score-bm25
  auto *score = app.add_subcommand("score-bm25", "Compute BM25 term impacts for a passage file");
  std::string passages_path, impacts_out;
  Bm25Params bm25;
  TokenizerFlags score_tok;
  score->add_option("--passages", passages_path, "Passage TSV (from expand) or raw corpus TSV")->required();
  score->add_option("--k1", bm25.k1, "BM25 k1")->capture_default_str();
  score->add_option("--b", bm25.b, "BM25 b")->capture_default_str();
  score->add_option("-o,--output", impacts_out, "Impact JSON-lines to write")->required();
  score->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 64u));
  score_tok.attach(score);
  score->callback([&] {
    action = [&] {
      const auto passages = read_passages_tsv(passages_path, score_tok.config());
      const auto impacts = compute_bm25_impacts(passages, bm25, threads);
      write_impact_file(impacts_out, impacts);
      out << "scored " << impacts.doc_count() << " documents, " << impacts.posting_count() << " term impacts\n";
    };
  });

  // build
  auto *build = app.add_subcommand("build", "Quantize impacts and write an index");
  std::string build_impacts, index_out;
  int bits = 8;
  build->add_option("--impacts", build_impacts, "Impact JSON-lines")->required();
  build->add_option("--bits", bits, "Bits per quantized impact")->capture_default_str();
  build->add_option("-o,--output", index_out, "Index file to write")->required();
  build->callback([&] {
    action = [&] {
      const auto collection = load_impact_file(build_impacts);
      const auto quantizer = LinearQuantizer::fit(collection, bits);
      const auto index = ImpactIndex::build(collection, quantizer);
      index.save(index_out);
      out << "indexed " << index.doc_count() << " documents, " << index.term_count() << " terms, "
          << index.posting_count() << " postings (bits " << bits << ", s_max " << quantizer.s_max() << ")\n";
    };
  });

  // search
  auto *search_cmd = app.add_subcommand("search", "Retrieve top-k documents for a query file");
  std::string search_index, search_queries, run_out, strategy_name = "maxscore", run_tag = "impactir";
  int k = 1000;
  TokenizerFlags search_tok;
  search_cmd->add_option("--index", search_index, "Index file")->required();
  search_cmd->add_option("--queries", search_queries, "Query TSV (query_id<TAB>text)")->required();
  search_cmd->add_option("-k,--k", k, "Results per query")->capture_default_str();
  search_cmd->add_option("--strategy", strategy_name, "Query processing strategy")
      ->check(CLI::IsMember({"maxscore", "exhaustive"}))
      ->capture_default_str();
  search_cmd->add_option("--run-tag", run_tag, "Run tag written in the last column")->capture_default_str();
  search_cmd->add_option("-o,--output", run_out, "TREC run file to write")->required();
  search_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 64u));
  search_tok.attach(search_cmd);
  search_cmd->callback([&] {
    action = [&] {
      if (k < 1) throw ConfigError("k must be >= 1");
      const auto index = ImpactIndex::load(search_index);
      const auto queries = read_queries_tsv(search_queries, search_tok.config());
      const auto batch = batch_search(index, queries, static_cast<std::size_t>(k), parse_strategy(strategy_name), threads);
      write_trec_run(run_out, batch.results, run_tag);
      out << "searched " << queries.size() << " queries\n";
    };
  });

  // evaluate
  auto *evaluate = app.add_subcommand("evaluate", "Score run files against relevance judgments");
  std::string eval_qrels, metrics_list = "mrr@10,recall@1000,ndcg@10,map", report_out, per_query_out;
  std::vector<std::string> eval_runs;
  int min_grade = 1;
  evaluate->add_option("--qrels", eval_qrels, "TREC qrels")->required();
  evaluate->add_option("--run", eval_runs, "Run file, optionally name=path; repeatable")->required();
  evaluate->add_option("--metrics", metrics_list, "Comma-separated metrics (mrr@K, recall@K, ndcg@K, map)")
      ->capture_default_str();
  evaluate->add_option("--min-grade", min_grade, "Lowest grade counted as relevant")->capture_default_str();
  evaluate->add_option("-o,--output", report_out, "Report TSV (default: stdout)");
  evaluate->add_option("--per-query", per_query_out, "Per-query TSV dump");
  evaluate->callback([&] {
    action = [&] {
      const auto qrels = parse_qrels(std::filesystem::path(eval_qrels));
      const auto metrics = split_list(metrics_list);
      std::vector<std::string> names;
      std::vector<std::vector<MetricReport>> reports;
      for (const auto &spec : eval_runs) {
        auto [name, path] = named_run(spec);
        const auto run = parse_run(path);
        names.push_back(name);
        auto &per_system = reports.emplace_back();
        for (const auto &m : metrics) per_system.push_back(evaluate_metric(m, run, qrels, min_grade));
      }

      std::ostringstream report;
      report << "metric";
      for (const auto &n : names) report << '\t' << n;
      report << '\n';
      for (std::size_t m = 0; m < metrics.size(); ++m) {
        report << metrics[m];
        for (const auto &per_system : reports) report << '\t' << fixed(per_system[m].mean, 4);
        report << '\n';
      }
      if (report_out.empty()) {
        out << report.str();
      } else {
        auto f = detail::open_output(report_out);
        f << report.str();
        detail::finish_output(f, report_out);
      }

      if (!per_query_out.empty()) {
        auto f = detail::open_output(per_query_out);
        f << "system\tmetric\tquery_id\tvalue\n";
        for (std::size_t s = 0; s < names.size(); ++s) {
          for (const auto &r : reports[s]) {
            for (const auto &[qid, v] : r.per_query) f << names[s] << '\t' << r.metric << '\t' << qid << '\t' << fixed(v, 6) << '\n';
          }
        }
        detail::finish_output(f, per_query_out);
      }
    };
  });

  // bench
  auto *bench = app.add_subcommand("bench", "Measure per-query latency (MRT, p50, p99)");
  std::string bench_index, bench_queries, bench_strategy = "both";
  int bench_k = 1000, repeat = 1, warmup = 0;
  TokenizerFlags bench_tok;
  bench->add_option("--index", bench_index, "Index file")->required();
  bench->add_option("--queries", bench_queries, "Query TSV")->required();
  bench->add_option("-k,--k", bench_k, "Results per query")->capture_default_str();
  bench->add_option("--strategy", bench_strategy, "Strategy to time")
      ->check(CLI::IsMember({"maxscore", "exhaustive", "both"}))
      ->capture_default_str();
  bench->add_option("--repeat", repeat, "Timed passes over the query set")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--warmup", warmup, "Untimed passes before measuring")->check(CLI::NonNegativeNumber);
  bench_tok.attach(bench);
  bench->callback([&] {
    action = [&] {
      if (bench_k < 1) throw ConfigError("k must be >= 1");
      const auto index = ImpactIndex::load(bench_index);
      const auto queries = read_queries_tsv(bench_queries, bench_tok.config());
      std::vector<Strategy> strategies;
      if (bench_strategy != "maxscore") strategies.push_back(Strategy::kExhaustive);
      if (bench_strategy != "exhaustive") strategies.push_back(Strategy::kMaxScore);

      out << "strategy\tqueries\tmrt_ms\tp50_ms\tp99_ms\n";
      for (const auto strategy : strategies) {
        const auto kk = static_cast<std::size_t>(bench_k);
        for (int i = 0; i < warmup; ++i) batch_search(index, queries, kk, strategy);
        std::vector<double> samples;
        for (int i = 0; i < repeat; ++i) {
          auto batch = batch_search(index, queries, kk, strategy);
          samples.insert(samples.end(), batch.latencies_ms.begin(), batch.latencies_ms.end());
        }
        const auto s = summarize_latencies(samples);
        out << to_string(strategy) << '\t' << s.count << '\t' << fixed(s.mean_ms, 4) << '\t' << fixed(s.p50_ms, 4)
            << '\t' << fixed(s.p99_ms, 4) << '\n';
      }
    };
  });

  // significance
  auto *signif = app.add_subcommand("significance", "Bonferroni-corrected paired t-tests between runs");
  std::string sig_qrels, sig_metric = "mrr@10", sig_out;
  std::vector<std::string> sig_runs;
  double alpha = 0.05;
  int sig_min_grade = 1;
  signif->add_option("--qrels", sig_qrels, "TREC qrels")->required();
  signif->add_option("--run", sig_runs, "Run file, optionally name=path; at least two")->required();
  signif->add_option("--metric", sig_metric, "Per-query metric to compare")->capture_default_str();
  signif->add_option("--alpha", alpha, "Family-wise significance level")->capture_default_str();
  signif->add_option("--min-grade", sig_min_grade, "Lowest grade counted as relevant")->capture_default_str();
  signif->add_option("-o,--output", sig_out, "Matrix TSV (default: stdout)");
  signif->callback([&] {
    action = [&] {
      if (sig_runs.size() < 2) throw ConfigError("significance needs at least two --run files");
      const auto qrels = parse_qrels(std::filesystem::path(sig_qrels));
      std::map<std::string, std::map<std::string, double>> per_query;
      std::vector<std::string> order;
      for (const auto &spec : sig_runs) {
        auto [name, path] = named_run(spec);
        if (per_query.contains(name)) throw ConfigError("duplicate system name '" + name + "'");
        per_query[name] = evaluate_metric(sig_metric, parse_run(path), qrels, sig_min_grade).per_query;
      }
      const auto matrix = paired_ttest_bonferroni(per_query, alpha);
      std::ostringstream report;
      report << "system_a\tsystem_b\tt\tp_value\tsignificant\n";
      for (const auto &p : matrix.pairs) {
        report << p.system_a << '\t' << p.system_b << '\t' << fixed(p.t, 6) << '\t' << std::setprecision(6)
               << p.p_value << '\t' << (p.significant ? "yes" : "no") << '\n';
      }
      if (sig_out.empty()) {
        out << report.str();
      } else {
        auto f = detail::open_output(sig_out);
        f << report.str();
        detail::finish_output(f, sig_out);
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (action) action();
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  std::vector<const char *> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("impactir");
  for (const auto &a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace impactir::cli
