// Copyright 2026 The dhprep Authors.
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
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/intensity.hpp"
#include "dhprep/model.hpp"
#include "dhprep/objective.hpp"
#include "dhprep/random.hpp"
#include "dhprep/temporal_graph.hpp"
#include "dhprep/text.hpp"

namespace dhprep {

enum class PairTask { link, newlink };

/// A vertex pair labeled by whether it is an edge of snapshot t+1; the
/// features come from snapshot t.
struct LabeledPair {
  VertexId i = 0;
  VertexId j = 0;
  int t = 0;
  bool positive = false;
  PairTask task = PairTask::link;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

struct PairSet {
  std::vector<LabeledPair> pairs;
  std::vector<std::string> warnings;
};

namespace detail {

/// Draws `count` distinct pairs u < v satisfying `eligible`, uniformly.
template <typename Eligible>
std::vector<std::pair<VertexId, VertexId>> sample_distinct_pairs(std::size_t n, std::size_t count, Eligible eligible,
                                                                 Rng& rng, std::size_t* available_out) {
  const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  std::vector<std::pair<VertexId, VertexId>> out;
  if (total <= 4e6) {
    std::vector<std::pair<VertexId, VertexId>> pool;
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u + 1; v < n; ++v) {
        if (eligible(u, v)) pool.emplace_back(u, v);
      }
    }
    *available_out = pool.size();
    const std::size_t take = std::min(count, pool.size());
    for (std::size_t k = 0; k < take; ++k) {
      const auto r = k + static_cast<std::size_t>(uniform_index(rng, pool.size() - k));
      std::swap(pool[k], pool[r]);
      out.push_back(pool[k]);
    }
    return out;
  }
  // Sparse graphs at this size leave almost every pair eligible.
  *available_out = static_cast<std::size_t>(total);
  std::set<std::pair<VertexId, VertexId>> seen;
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 100 * count + 1000) {
    ++attempts;
    auto u = static_cast<VertexId>(uniform_index(rng, n));
    auto v = static_cast<VertexId>(uniform_index(rng, n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!eligible(u, v) || !seen.insert({u, v}).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

}  // namespace detail

/// Positives are edges of E_{t+1} (link) or E_{t+1} \ E_t (newlink) for every
/// t in [1, T-1]; negatives are distinct non-edges of t+1 (and of t for
/// newlink), ratio times as many, sampled uniformly.
inline PairSet build_pairs(const DynamicNetwork& net, PairTask task, double ratio, Rng& rng) {
  if (net.snapshot_count() < 2) throw ValidationError("pair construction needs T >= 2");
  if (!(ratio >= 0.0)) throw ValidationError("negative ratio must be >= 0");
  PairSet out;
  const std::size_t n = net.vertex_count();
  for (int t = 1; t < net.snapshot_count(); ++t) {
    const auto& now = net.snapshot(t);
    const auto& next = net.snapshot(t + 1);
    std::size_t positives = 0;
    for (const auto& e : next.edges()) {
      if (task == PairTask::newlink && now.has_edge(e.u, e.v)) continue;
      out.pairs.push_back({e.u, e.v, t, true, task});
      ++positives;
    }
    if (positives == 0) {
      out.warnings.push_back("snapshot " + std::to_string(t + 1) + ": no positive pairs, skipped");
      continue;
    }
    const auto wanted = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(positives)));
    std::size_t available = 0;
    const auto negs = detail::sample_distinct_pairs(
        n, wanted,
        [&](VertexId u, VertexId v) {
          return !next.has_edge(u, v) && !(task == PairTask::newlink && now.has_edge(u, v));
        },
        rng, &available);
    if (negs.size() < wanted) {
      out.warnings.push_back("snapshot " + std::to_string(t + 1) + ": only " + std::to_string(negs.size()) + " of " +
                             std::to_string(wanted) + " non-links available");
    }
    for (const auto& [u, v] : negs) out.pairs.push_back({u, v, t, false, task});
  }
  return out;
}

/// Elementwise |u_i - u_j|.
inline std::vector<double> feature_vector(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("feature inputs differ in dimension");
  std::vector<double> f(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) f[k] = std::abs(a[k] - b[k]);
  return f;
}

/// Row-major sample matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

inline FeatureMatrix pair_features(std::span<const LabeledPair> pairs, const EmbeddingSequence& emb) {
  FeatureMatrix m{pairs.size(), emb.dim(), {}};
  m.data.reserve(m.rows * m.cols);
  for (const auto& p : pairs) {
    const auto f = feature_vector(emb.row(p.t, p.i), emb.row(p.t, p.j));
    m.data.insert(m.data.end(), f.begin(), f.end());
  }
  return m;
}

struct ClassifierOptions {
  double l2 = 1e-4;
  int iterations = 500;
  double lr = 0.1;
};

/// Logistic regression on standardized features.
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> scale;

  double margin(std::span<const double> x) const {
    double s = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * (x[k] - mean[k]) / scale[k];
    return s;
  }
  double predict(std::span<const double> x) const { return sigmoid(margin(x)); }
};

/// Full-batch gradient descent on the mean logistic loss plus
/// (l2/2)||w||^2, from zero weights. Features are standardized with the
/// training sample's mean and population deviation.
inline LogisticModel fit_classifier(const FeatureMatrix& x, std::span<const int> labels,
                                    const ClassifierOptions& opt = {}) {
  if (labels.size() != x.rows) throw ValidationError("label count differs from sample count");
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size()))
    throw ValidationError("classifier needs samples of both classes");
  const std::size_t n = x.rows, d = x.cols;
  LogisticModel m;
  m.weights.assign(d, 0.0);
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < d; ++k) m.mean[k] += row[k];
  }
  for (auto& v : m.mean) v /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < d; ++k) var[k] += (row[k] - m.mean[k]) * (row[k] - m.mean[k]);
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(var[k] / static_cast<double>(n));
    m.scale[k] = sd > 0.0 ? sd : 1.0;
  }
  std::vector<double> z(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < d; ++k) z[r * d + k] = (row[k] - m.mean[k]) / m.scale[k];
  }
  std::vector<double> gw(d);
  for (int it = 0; it < opt.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double* zr = z.data() + r * d;
      const double s = m.bias + dot(m.weights.data(), zr, d);
      const double err = sigmoid(s) - static_cast<double>(labels[r]);
      gb += err;
      for (std::size_t k = 0; k < d; ++k) gw[k] += err * zr[k];
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < d; ++k) m.weights[k] -= opt.lr * (gw[k] * inv + opt.l2 * m.weights[k]);
    m.bias -= opt.lr * gb * inv;
  }
  return m;
}

struct BinaryMetrics {
  double f1 = 0.0;
  double auc = 0.0;
};

/// Mann-Whitney AUC with half credit for ties.
inline double auc_score(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n;) {
    std::size_t e = k;
    while (e < n && scores[order[e]] == scores[order[k]]) ++e;
    const double mid_rank = 0.5 * static_cast<double>(k + 1 + e);  // average of ranks k+1..e
    for (std::size_t q = k; q < e; ++q) {
      if (labels[order[q]] == 1) {
        rank_sum += mid_rank;
        ++pos;
      }
    }
    k = e;
  }
  const double np = static_cast<double>(pos), nn = static_cast<double>(n - pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

/// F1 of the `score >= threshold` decision, and rank AUC.
inline BinaryMetrics binary_metrics(std::span<const double> scores, std::span<const int> labels,
                                    double threshold = 0.5) {
  if (scores.size() != labels.size()) throw ValidationError("score and label counts differ");
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size()))
    throw ValidationError("metrics need labels of both classes");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const bool predicted = scores[k] >= threshold;
    if (predicted && labels[k] == 1) ++tp;
    if (predicted && labels[k] != 1) ++fp;
    if (!predicted && labels[k] == 1) ++fn;
  }
  BinaryMetrics m;
  m.f1 = tp > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
  m.auc = auc_score(scores, labels);
  return m;
}

struct MetricSummary {
  std::string metric;
  int k = 0;  // 0 for metrics without a cutoff
  double mean = 0.0;
  double std = 0.0;
};

/// Metric rows of one task, plus the per-fold values behind F1/AUC.
struct EvalReport {
  std::string task;
  std::vector<MetricSummary> rows;
  std::vector<double> fold_f1;
  std::vector<double> fold_auc;

  const MetricSummary& row(const std::string& metric) const {
    for (const auto& r : rows) {
      if (r.metric == metric) return r;
    }
    throw ValidationError("report has no metric " + metric);
  }
};

/// Mean and population standard deviation.
inline std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

struct CrossValidationOptions {
  int folds = 5;
  int repeats = 10;
  ClassifierOptions classifier;
};

/// Repeated stratified k-fold cross-validation of the logistic classifier on
/// |u_i^t - u_j^t| features. Each repeat reshuffles the fold assignment.
inline EvalReport cross_validate(std::span<const LabeledPair> pairs, const EmbeddingSequence& emb,
                                 const CrossValidationOptions& opt, Rng& rng) {
  if (opt.folds < 2) throw ValidationError("folds must be >= 2");
  if (opt.repeats < 1) throw ValidationError("repeats must be >= 1");
  std::vector<std::size_t> pos, neg;
  for (std::size_t k = 0; k < pairs.size(); ++k) (pairs[k].positive ? pos : neg).push_back(k);
  const auto folds = static_cast<std::size_t>(opt.folds);
  if (pos.size() < folds || neg.size() < folds)
    throw ValidationError("cross-validation needs at least " + std::to_string(folds) + " samples per class");

  const auto x = pair_features(pairs, emb);
  std::vector<int> labels(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) labels[k] = pairs[k].positive ? 1 : 0;

  EvalReport report;
  report.task = pairs.front().task == PairTask::link ? "link" : "newlink";
  std::vector<std::size_t> fold_of(pairs.size());
  for (int rep = 0; rep < opt.repeats; ++rep) {
    shuffle(pos, rng);
    shuffle(neg, rng);
    for (std::size_t k = 0; k < pos.size(); ++k) fold_of[pos[k]] = k % folds;
    for (std::size_t k = 0; k < neg.size(); ++k) fold_of[neg[k]] = k % folds;
    for (std::size_t f = 0; f < folds; ++f) {
      FeatureMatrix train{0, x.cols, {}}, test{0, x.cols, {}};
      std::vector<int> train_y, test_y;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto& dst = fold_of[k] == f ? test : train;
        const auto row = x.row(k);
        dst.data.insert(dst.data.end(), row.begin(), row.end());
        ++dst.rows;
        (fold_of[k] == f ? test_y : train_y).push_back(labels[k]);
      }
      const auto model = fit_classifier(train, train_y, opt.classifier);
      std::vector<double> scores(test.rows);
      for (std::size_t r = 0; r < test.rows; ++r) scores[r] = model.predict(test.row(r));
      const auto m = binary_metrics(scores, test_y);
      report.fold_f1.push_back(m.f1);
      report.fold_auc.push_back(m.auc);
    }
  }
  const auto [f1m, f1s] = mean_std(report.fold_f1);
  const auto [aucm, aucs] = mean_std(report.fold_auc);
  report.rows.push_back({"F1", 0, f1m, f1s});
  report.rows.push_back({"AUC", 0, aucm, aucs});
  return report;
}

/// Candidates ranked by -||u_i^t - u_j^t||^2, best first, ties by ascending
/// id. Returns at most k entries.
inline std::vector<VertexId> recommend_topk(VertexId i, int t, const EmbeddingSequence& emb,
                                            std::span<const VertexId> candidates, std::size_t k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  std::vector<std::pair<double, VertexId>> scored;
  scored.reserve(candidates.size());
  const auto ui = emb.row(t, i);
  for (VertexId c : candidates) {
    if (c == i) throw ValidationError("candidate list contains the query vertex");
    scored.emplace_back(-squared_distance(ui, emb.row(t, c)), c);
  }
  const std::size_t take = std::min(k, scored.size());
  auto better = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  std::vector<VertexId> out(take);
  for (std::size_t q = 0; q < take; ++q) out[q] = scored[q].second;
  return out;
}

struct RankingAtK {
  std::size_t k = 0;
  double precision = 0.0;
  double recall = 0.0;
  double precision_std = 0.0;
  double recall_std = 0.0;
};

/// P@k = hits/k and R@k = hits/|truth|, averaged over queries whose truth
/// set is non-empty. recommendations[q] is ranked best first.
inline std::vector<RankingAtK> ranking_metrics(std::span<const std::vector<VertexId>> recommendations,
                                               std::span<const std::vector<VertexId>> truth,
                                               std::span<const std::size_t> ks) {
  if (recommendations.size() != truth.size()) throw ValidationError("recommendation and truth counts differ");
  for (auto k : ks) {
    if (k == 0) throw ValidationError("k must be >= 1");
  }
  std::vector<RankingAtK> out;
  for (auto k : ks) {
    std::vector<double> precision, recall;
    for (std::size_t q = 0; q < truth.size(); ++q) {
      if (truth[q].empty()) continue;
      std::vector<VertexId> sorted_truth = truth[q];
      std::sort(sorted_truth.begin(), sorted_truth.end());
      const std::size_t upto = std::min(k, recommendations[q].size());
      double hits = 0.0;
      for (std::size_t r = 0; r < upto; ++r) {
        if (std::binary_search(sorted_truth.begin(), sorted_truth.end(), recommendations[q][r])) hits += 1.0;
      }
      precision.push_back(hits / static_cast<double>(k));
      recall.push_back(hits / static_cast<double>(sorted_truth.size()));
    }
    if (precision.empty()) throw ValidationError("no query vertex has ground-truth neighbors");
    RankingAtK r;
    r.k = k;
    std::tie(r.precision, r.precision_std) = mean_std(precision);
    std::tie(r.recall, r.recall_std) = mean_std(recall);
    out.push_back(r);
  }
  return out;
}

struct RecommendationOptions {
  std::vector<std::size_t> ks = {10, 20};
  bool new_only = false;       // truth restricted to E_{t+1} \ E_t
  bool active_only = false;    // candidates restricted to vertices with edges at t
};

/// For every t in [1, T-1] and every vertex with a non-empty next-snapshot
/// neighborhood, ranks candidates with snapshot-t embeddings.
inline EvalReport evaluate_recommendation(const DynamicNetwork& net, const EmbeddingSequence& emb,
                                          const RecommendationOptions& opt) {
  if (net.snapshot_count() < 2) throw ValidationError("recommendation needs T >= 2");
  if (opt.ks.empty()) throw ValidationError("k list is empty");
  const std::size_t kmax = *std::max_element(opt.ks.begin(), opt.ks.end());
  std::vector<std::vector<VertexId>> recs, truth;
  for (int t = 1; t < net.snapshot_count(); ++t) {
    const auto& now = net.snapshot(t);
    const auto& next = net.snapshot(t + 1);
    for (VertexId i = 0; i < net.vertex_count(); ++i) {
      std::vector<VertexId> gt;
      for (const auto& nb : next.neighbors(i)) {
        if (opt.new_only && now.has_edge(i, nb.id)) continue;
        gt.push_back(nb.id);
      }
      if (gt.empty()) continue;
      std::vector<VertexId> candidates;
      for (VertexId c = 0; c < net.vertex_count(); ++c) {
        if (c == i || (opt.active_only && now.degree(c) == 0)) continue;
        candidates.push_back(c);
      }
      if (candidates.empty()) continue;
      recs.push_back(recommend_topk(i, t, emb, candidates, std::max<std::size_t>(kmax, 1)));
      truth.push_back(std::move(gt));
    }
  }
  EvalReport report;
  report.task = "recommend";
  for (const auto& r : ranking_metrics(recs, truth, opt.ks)) {
    report.rows.push_back({"P@" + std::to_string(r.k), static_cast<int>(r.k), r.precision, r.precision_std});
    report.rows.push_back({"R@" + std::to_string(r.k), static_cast<int>(r.k), r.recall, r.recall_std});
  }
  return report;
}

/// p(j | i, H_i(t)) with the softmax denominator over every j' != i.
inline std::vector<double> exact_softmax_distribution(VertexId i, int t, const Model& model, const DynamicNetwork& net,
                                                      int window) {
  AnchorState anchor(model, net, i, t, window);
  std::vector<double> candidates_raw;
  for (VertexId c = 0; c < net.vertex_count(); ++c) {
    if (c != i) candidates_raw.push_back(anchor.intensity(model, c).raw);
  }
  if (candidates_raw.empty()) throw ValidationError("no candidate besides the query vertex");
  const auto p = edge_probability_from_raw(candidates_raw);
  std::vector<double> out(net.vertex_count(), 0.0);
  std::size_t q = 0;
  for (VertexId c = 0; c < net.vertex_count(); ++c) {
    if (c != i) out[c] = p[q++];
  }
  return out;
}

inline double exact_softmax_score(VertexId i, VertexId j, int t, const Model& model, const DynamicNetwork& net,
                                  int window) {
  if (i == j) throw ValidationError("query and candidate coincide");
  net.check_vertex(j);
  return exact_softmax_distribution(i, t, model, net, window)[j];
}

struct EvaluationSettings {
  std::string task = "link";  // link, newlink or recommend
  double ratio = 1.0;
  CrossValidationOptions cv;
  RecommendationOptions recommendation;
};

/// Runs one task against embeddings trained on net. Pair-construction
/// warnings are appended to warnings when given.
inline EvalReport evaluate_embeddings(const DynamicNetwork& net, const EmbeddingSequence& emb,
                                      const EvaluationSettings& settings, Rng& rng,
                                      std::vector<std::string>* warnings = nullptr) {
  if (emb.vertex_count() != net.vertex_count() || emb.snapshot_count() != net.snapshot_count())
    throw ValidationError("embeddings cover " + std::to_string(emb.vertex_count()) + " vertices x " +
                          std::to_string(emb.snapshot_count()) + " snapshots but the network has " +
                          std::to_string(net.vertex_count()) + " x " + std::to_string(net.snapshot_count()));
  if (net.snapshot_count() < 2) throw ValidationError("evaluation needs T >= 2: no t+1 ground truth exists");
  if (settings.task == "recommend") return evaluate_recommendation(net, emb, settings.recommendation);
  PairTask task{};
  if (settings.task == "link") task = PairTask::link;
  else if (settings.task == "newlink") task = PairTask::newlink;
  else throw ValidationError("unknown task '" + settings.task + "'");
  auto set = build_pairs(net, task, settings.ratio, rng);
  if (warnings) warnings->insert(warnings->end(), set.warnings.begin(), set.warnings.end());
  return cross_validate(set.pairs, emb, settings.cv, rng);
}

/// Tab-separated rows: task, metric, k ("-" when not applicable), mean, std.
inline void write_report(const EvalReport& report, std::ostream& out, bool header = true) {
  if (header) out << "task\tmetric\tk\tmean\tstd\n";
  for (const auto& r : report.rows) {
    out << report.task << '\t' << r.metric << '\t' << (r.k > 0 ? std::to_string(r.k) : std::string("-")) << '\t'
        << text::format_double(r.mean) << '\t' << text::format_double(r.std) << '\n';
  }
}

}  // namespace dhprep
