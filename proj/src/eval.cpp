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

#include "impactir/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <tuple>

#include "impactir/errors.hpp"
#include "text_io.hpp"

namespace impactir {

namespace {

template <typename T>
bool parse_number(std::string_view s, T &out) {
  const auto *end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

int grade_of(const RelevanceJudgments &qrels, const std::string &qid, const std::string &doc) {
  const auto q = qrels.find(qid);
  if (q == qrels.end()) return 0;
  const auto d = q->second.find(doc);
  return d == q->second.end() ? 0 : d->second;
}

const std::vector<std::string> &ranking_for(const RankedRun &run, const std::string &qid) {
  static const std::vector<std::string> kEmpty;
  const auto it = run.find(qid);
  return it == run.end() ? kEmpty : it->second;
}

std::size_t relevant_count(const std::map<std::string, int> &judged, int min_grade) {
  return static_cast<std::size_t>(
      std::count_if(judged.begin(), judged.end(), [&](const auto &kv) { return kv.second >= min_grade; }));
}

void finish_report(MetricReport &report) {
  report.query_count = report.per_query.size();
  double sum = 0.0;
  for (const auto &kv : report.per_query) sum += kv.second;
  report.mean = report.query_count == 0 ? 0.0 : sum / static_cast<double>(report.query_count);
}

void check_k(std::size_t k) {
  if (k == 0) throw ConfigError("metric cutoff k must be >= 1");
}

}  // namespace

RelevanceJudgments parse_qrels(std::istream &in, std::string_view source) {
  RelevanceJudgments qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 4) {
      throw ParseError("expected 'query_id iteration doc_id grade' in " + std::string(source), line_no);
    }
    int grade = 0;
    if (!parse_number(fields[3], grade)) {
      throw ParseError("grade '" + std::string(fields[3]) + "' is not an integer in " + std::string(source), line_no);
    }
    if (grade < 0) throw ParseError("negative grade in " + std::string(source), line_no);
    qrels[std::string(fields[0])][std::string(fields[2])] = grade;
  }
  return qrels;
}

RelevanceJudgments parse_qrels(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  return parse_qrels(in, path.string());
}

RankedRun parse_run(std::istream &in, std::string_view source) {
  struct Entry {
    double score;
    long rank;
    std::string doc;
  };
  std::map<std::string, std::vector<Entry>> entries;
  std::map<std::string, std::set<std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 6) {
      throw ParseError("expected 'query_id Q0 doc_id rank score tag' in " + std::string(source), line_no);
    }
    Entry e{0.0, 0, std::string(fields[2])};
    if (!parse_number(fields[3], e.rank) || !parse_number(fields[4], e.score)) {
      throw ParseError("bad rank or score in " + std::string(source), line_no);
    }
    const std::string qid(fields[0]);
    if (!seen[qid].insert(e.doc).second) {
      throw DataError("document '" + e.doc + "' repeated for query '" + qid + "' in " + std::string(source) +
                      " at line " + std::to_string(line_no));
    }
    entries[qid].push_back(std::move(e));
  }

  RankedRun run;
  for (auto &[qid, list] : entries) {
    std::stable_sort(list.begin(), list.end(), [](const Entry &a, const Entry &b) {
      return a.score != b.score ? a.score > b.score : a.rank < b.rank;
    });
    auto &docs = run[qid];
    for (auto &e : list) docs.push_back(std::move(e.doc));
  }
  return run;
}

RankedRun parse_run(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  return parse_run(in, path.string());
}

RankedRun run_from_results(const std::vector<TopKResult> &results) {
  RankedRun run;
  for (const auto &r : results) {
    auto &docs = run[r.query_id];
    for (const auto &h : r.hits) docs.push_back(h.doc_id);
  }
  return run;
}

MetricReport mrr_at_k(const RankedRun &run, const RelevanceJudgments &qrels, std::size_t k, int min_grade) {
  check_k(k);
  MetricReport report{"mrr@" + std::to_string(k), {}, 0.0, 0};
  for (const auto &[qid, judged] : qrels) {
    const auto &ranking = ranking_for(run, qid);
    double rr = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
      if (grade_of(qrels, qid, ranking[i]) >= min_grade) {
        rr = 1.0 / static_cast<double>(i + 1);
        break;
      }
    }
    report.per_query[qid] = rr;
  }
  finish_report(report);
  return report;
}

MetricReport recall_at_k(const RankedRun &run, const RelevanceJudgments &qrels, std::size_t k, int min_grade) {
  check_k(k);
  MetricReport report{"recall@" + std::to_string(k), {}, 0.0, 0};
  for (const auto &[qid, judged] : qrels) {
    const auto total = relevant_count(judged, min_grade);
    if (total == 0) continue;
    const auto &ranking = ranking_for(run, qid);
    std::size_t found = 0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
      if (grade_of(qrels, qid, ranking[i]) >= min_grade) ++found;
    }
    report.per_query[qid] = static_cast<double>(found) / static_cast<double>(total);
  }
  finish_report(report);
  return report;
}

MetricReport ndcg_at_k(const RankedRun &run, const RelevanceJudgments &qrels, std::size_t k) {
  check_k(k);
  auto gain = [](int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; };
  auto discount = [](std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); };

  MetricReport report{"ndcg@" + std::to_string(k), {}, 0.0, 0};
  for (const auto &[qid, judged] : qrels) {
    std::vector<int> ideal;
    for (const auto &kv : judged) {
      if (kv.second > 0) ideal.push_back(kv.second);
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) idcg += gain(ideal[i]) * discount(i + 1);

    const auto &ranking = ranking_for(run, qid);
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
      dcg += gain(grade_of(qrels, qid, ranking[i])) * discount(i + 1);
    }
    report.per_query[qid] = idcg > 0.0 ? dcg / idcg : 0.0;
  }
  finish_report(report);
  return report;
}

MetricReport map_metric(const RankedRun &run, const RelevanceJudgments &qrels, int min_grade) {
  MetricReport report{"map", {}, 0.0, 0};
  for (const auto &[qid, judged] : qrels) {
    const auto total = relevant_count(judged, min_grade);
    double ap = 0.0;
    if (total > 0) {
      const auto &ranking = ranking_for(run, qid);
      std::size_t found = 0;
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (grade_of(qrels, qid, ranking[i]) >= min_grade) {
          ++found;
          ap += static_cast<double>(found) / static_cast<double>(i + 1);
        }
      }
      ap /= static_cast<double>(total);
    }
    report.per_query[qid] = ap;
  }
  finish_report(report);
  return report;
}

MetricReport evaluate_metric(std::string_view name, const RankedRun &run, const RelevanceJudgments &qrels,
                             int min_grade) {
  if (name == "map") return map_metric(run, qrels, min_grade);
  const auto at = name.find('@');
  std::size_t k = 0;
  if (at == std::string_view::npos || !parse_number(name.substr(at + 1), k) || k == 0) {
    throw ConfigError("unknown metric '" + std::string(name) + "'");
  }
  const auto base = name.substr(0, at);
  if (base == "mrr") return mrr_at_k(run, qrels, k, min_grade);
  if (base == "recall") return recall_at_k(run, qrels, k, min_grade);
  if (base == "ndcg") return ndcg_at_k(run, qrels, k);
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

// --- Statistics ------------------------------------------------------------

namespace {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEpsilon = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta requires a, b > 0");
  if (x < 0.0 || x > 1.0 || std::isnan(x)) throw DomainError("incomplete beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges quickly for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double students_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw DomainError("degrees of freedom must be > 0");
  if (std::isnan(t)) throw DomainError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

SignificanceMatrix paired_ttest_bonferroni(const std::map<std::string, std::map<std::string, double>> &per_query,
                                           double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (per_query.size() < 2) throw ConfigError("significance testing needs at least two systems");

  SignificanceMatrix out;
  out.alpha = alpha;
  const auto &reference = per_query.begin()->second;
  if (reference.size() < 2) throw DataError("significance testing needs at least two queries");
  for (const auto &[name, scores] : per_query) {
    out.systems.push_back(name);
    const bool same = scores.size() == reference.size() &&
                      std::equal(scores.begin(), scores.end(), reference.begin(),
                                 [](const auto &x, const auto &y) { return x.first == y.first; });
    if (!same) throw DataError("system '" + name + "' does not cover the same queries as '" + out.systems[0] + "'");
  }

  const std::size_t n_sys = out.systems.size();
  out.comparisons = n_sys * (n_sys - 1) / 2;
  const double corrected_alpha = alpha / static_cast<double>(out.comparisons);
  const double n = static_cast<double>(reference.size());

  for (std::size_t i = 0; i < n_sys; ++i) {
    for (std::size_t j = i + 1; j < n_sys; ++j) {
      const auto &a = per_query.at(out.systems[i]);
      const auto &b = per_query.at(out.systems[j]);
      std::vector<double> diff;
      diff.reserve(a.size());
      for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) diff.push_back(ia->second - ib->second);

      double mean = 0.0;
      for (const double d : diff) mean += d;
      mean /= n;
      double ss = 0.0;
      for (const double d : diff) ss += (d - mean) * (d - mean);
      const double sd = std::sqrt(ss / (n - 1.0));

      PairedTTest test{out.systems[i], out.systems[j], 0.0, 1.0, false};
      if (sd == 0.0) {
        // Constant differences: no evidence when all zero, otherwise certain.
        if (mean != 0.0) {
          test.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
          test.p_value = 0.0;
        }
      } else {
        test.t = mean / (sd / std::sqrt(n));
        test.p_value = students_t_two_sided_p(test.t, n - 1.0);
      }
      test.significant = test.p_value < corrected_alpha;
      out.pairs.push_back(std::move(test));
    }
  }
  return out;
}

}  // namespace impactir
