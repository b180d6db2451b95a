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

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "impactir/query.hpp"

namespace impactir {

/// query_id -> doc_id -> grade. Missing pairs have grade 0.
using RelevanceJudgments = std::map<std::string, std::map<std::string, int>>;

/// query_id -> doc ids in rank order.
using RankedRun = std::map<std::string, std::vector<std::string>>;

/// TREC qrels: `query_id iteration doc_id grade`. A repeated (query, doc)
/// pair keeps the last grade.
RelevanceJudgments parse_qrels(std::istream &in, std::string_view source = "<stream>");
RelevanceJudgments parse_qrels(const std::filesystem::path &path);

/// TREC run: `query_id Q0 doc_id rank score tag`. Each query's list is
/// ordered by descending score, then ascending rank.
RankedRun parse_run(std::istream &in, std::string_view source = "<stream>");
RankedRun parse_run(const std::filesystem::path &path);

RankedRun run_from_results(const std::vector<TopKResult> &results);

struct MetricReport {
  std::string metric;
  std::map<std::string, double> per_query;
  double mean = 0.0;
  std::size_t query_count = 0;
};

/// Reciprocal rank of the first hit with grade >= min_grade inside the top k.
MetricReport mrr_at_k(const RankedRun &run, const RelevanceJudgments &qrels, std::size_t k, int min_grade = 1);

/// Fraction of relevant documents found in the top k. Queries without any
/// relevant document are left out of the mean.
MetricReport recall_at_k(const RankedRun &run, const RelevanceJudgments &qrels, std::size_t k, int min_grade = 1);

/// Exponential gain 2^grade - 1 with a log2(rank + 1) discount, normalized by
/// the ideal ordering of the judged documents. Zero when no document has a
/// positive grade.
MetricReport ndcg_at_k(const RankedRun &run, const RelevanceJudgments &qrels, std::size_t k);

/// Average precision over the full run depth.
MetricReport map_metric(const RankedRun &run, const RelevanceJudgments &qrels, int min_grade = 1);

/// Evaluates a metric by name: "mrr@K", "recall@K", "ndcg@K" or "map".
MetricReport evaluate_metric(std::string_view name, const RankedRun &run, const RelevanceJudgments &qrels,
                             int min_grade = 1);

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t statistic with `dof` degrees of freedom.
double students_t_two_sided_p(double t, double dof);

struct PairedTTest {
  std::string system_a;
  std::string system_b;
  double t = 0.0;        // positive when system_a scores higher on average
  double p_value = 1.0;  // uncorrected two-sided
  bool significant = false;
};

struct SignificanceMatrix {
  std::vector<std::string> systems;
  std::vector<PairedTTest> pairs;  // every unordered pair, i < j in `systems` order
  std::size_t comparisons = 0;
  double alpha = 0.05;
};

/// Two-sided paired t-tests between every pair of systems. A pair is flagged
/// significant when p < alpha / m, m being the number of pairs. All systems
/// must cover the same query ids (DataError otherwise) with at least two queries.
SignificanceMatrix paired_ttest_bonferroni(const std::map<std::string, std::map<std::string, double>> &per_query,
                                           double alpha = 0.05);

}  // namespace impactir
