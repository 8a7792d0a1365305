/*
 * Copyright 2026 The rfalcf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFALCF_CLUSTERING_HPP
#define RFALCF_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rfalcf/types.hpp"

namespace rfalcf {

struct ClusteringResult {
  std::vector<int> assignments;         // cluster index in [0, K) per point
  Matrix centroids;                     // K x R, unit rows (or zero)
  double inertia = 0.0;                 // sum of cosine distances to centroids
  std::vector<double> inertia_history;  // one value per Lloyd iteration
};

struct PerKRow {
  int k = 0;
  double mean_ac = 0.0;
  double std_ac = 0.0;
  double best_ac = 0.0;
  double mean_f = 0.0;
};

struct EvalReport {
  double mean_ac = 0.0;  // pooled over every (K, subset, restart) cell
  double std_ac = 0.0;
  double best_ac = 0.0;
  double mean_f = 0.0;
  std::vector<PerKRow> per_k;
  std::vector<std::string> warnings;  // skipped-K records
};

namespace detail {

/// Cosine distance with the zero-vector guard: any zero vector is at
/// distance 1 from everything.
inline double cosine_distance_unit(const Eigen::RowVectorXd& unit_a,
                                   const Eigen::RowVectorXd& unit_b) {
  return 1.0 - unit_a.dot(unit_b);
}

inline Matrix normalize_rows(const Matrix& points) {
  Matrix unit = points;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm > 0.0) unit.row(i) /= norm;
  }
  return unit;
}

/// Minimum-cost perfect matching on a square cost matrix (potentials method,
/// O(n^3)); returns the column matched to each row.
inline std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

/// Best total over injective row->column maps of a (padded square)
/// score matrix, by exhaustive permutation.
inline double best_assignment_bruteforce(const Matrix& score) {
  const int n = static_cast<int>(score.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += score(i, perm[i]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Maximum total matched count over injective cluster->class maps.
inline double best_assignment_score(const Matrix& counts) {
  const Eigen::Index n = std::max(counts.rows(), counts.cols());
  Matrix square = Matrix::Zero(n, n);
  square.topLeftCorner(counts.rows(), counts.cols()) = counts;
  if (n <= 8) return best_assignment_bruteforce(square);
  const double shift = square.maxCoeff();
  const std::vector<int> cols = min_cost_assignment((shift - square.array()).matrix());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += square(i, cols[i]);
  return total;
}

inline std::vector<int> compact_labels(const std::vector<int>& labels) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] = ids.emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

inline Matrix contingency(const std::vector<int>& a, const std::vector<int>& b) {
  const std::vector<int> ca = compact_labels(a);
  const std::vector<int> cb = compact_labels(b);
  const int ka = 1 + *std::max_element(ca.begin(), ca.end());
  const int kb = 1 + *std::max_element(cb.begin(), cb.end());
  Matrix counts = Matrix::Zero(ka, kb);
  for (std::size_t i = 0; i < ca.size(); ++i) counts(ca[i], cb[i]) += 1.0;
  return counts;
}

}  // namespace detail

/// Spherical K-means: cosine distance, centroids are the unit-normalized
/// means of the unit-normalized member points. Empty clusters are reseeded
/// with the point currently farthest from its centroid; the loop stops at an
/// assignment fixpoint or after max_iters iterations.
inline ClusteringResult kmeans_cosine(const Matrix& points, int k,
                                      std::uint64_t seed, int max_iters = 100) {
  const Eigen::Index n = points.rows();
  const Eigen::Index r = points.cols();
  if (k < 1 || k > n)
    throw InvalidInputError("kmeans_cosine: K must be in [1, N]");
  if (max_iters < 1)
    throw InvalidInputError("kmeans_cosine: max_iters must be >= 1");

  const Matrix unit = detail::normalize_rows(points);

  // seed centroids with K distinct points
  std::mt19937_64 gen(seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(order[i], order[pick(gen)]);
  }
  Matrix centroids(k, r);
  for (int c = 0; c < k; ++c) centroids.row(c) = unit.row(order[c]);

  ClusteringResult result;
  result.assignments.assign(n, 0);
  std::vector<int> prev(n, -1);

  for (int iter = 0; iter < max_iters; ++iter) {
    // assignment step
    for (Eigen::Index i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = detail::cosine_distance_unit(unit.row(i), centroids.row(c));
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      result.assignments[i] = best_c;
    }

    // reseed empty clusters with the farthest point
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) counts[result.assignments[i]]++;
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      Eigen::Index far_i = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (counts[result.assignments[i]] <= 1) continue;  // keep donors nonempty
        const double d = detail::cosine_distance_unit(
            unit.row(i), centroids.row(result.assignments[i]));
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i < 0) break;
      counts[result.assignments[far_i]]--;
      result.assignments[far_i] = c;
      counts[c] = 1;
    }

    // centroid step
    centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      centroids.row(result.assignments[i]) += unit.row(i);
    for (int c = 0; c < k; ++c) {
      const double norm = centroids.row(c).norm();
      if (norm > 0.0) centroids.row(c) /= norm;
    }

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      inertia += detail::cosine_distance_unit(unit.row(i),
                                              centroids.row(result.assignments[i]));
    result.inertia_history.push_back(inertia);

    if (result.assignments == prev) break;
    prev = result.assignments;
  }

  result.centroids = centroids;
  result.inertia = result.inertia_history.back();
  return result;
}

/// Clustering accuracy: fraction matched under the best injective map from
/// predicted clusters to ground-truth classes (optimal assignment on the
/// contingency table).
inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw InvalidInputError("accuracy: label vectors differ in length");
  if (pred.empty()) throw InvalidInputError("accuracy: empty label vectors");
  const Matrix counts = detail::contingency(pred, truth);
  return detail::best_assignment_score(counts) / static_cast<double>(pred.size());
}

/// Pairwise F1: precision and recall over unordered sample pairs placed in
/// the same cluster; 0 when either partition has no same-cluster pairs.
inline double f_measure(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw InvalidInputError("f_measure: label vectors differ in length");
  if (pred.empty()) throw InvalidInputError("f_measure: empty label vectors");
  const Matrix counts = detail::contingency(pred, truth);

  const auto pairs = [](double c) { return c * (c - 1.0) / 2.0; };
  double both = 0.0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j) both += pairs(counts(i, j));
  double in_pred = 0.0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i) in_pred += pairs(counts.row(i).sum());
  double in_truth = 0.0;
  for (Eigen::Index j = 0; j < counts.cols(); ++j) in_truth += pairs(counts.col(j).sum());

  if (in_pred == 0.0 || in_truth == 0.0) return 0.0;
  const double precision = both / in_pred;
  const double recall = both / in_truth;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

/// Produces the N x R representation to cluster for one protocol cell.
using RepresentationFn =
    std::function<Matrix(const DataMatrix& subset, int rank, std::uint64_t seed)>;

struct ProtocolConfig {
  int k_min = 2;
  int k_max = 10;
  int subset_draws = 10;  // random class subsets per K
  int restarts = 30;      // K-means restarts per subset
  int kmeans_max_iters = 100;
  std::uint64_t seed = 0;
};

/// Clustering protocol: for each K in [k_min, k_max], draw class subsets,
/// learn a rank-(K+1) representation, run seeded K-means restarts, and score
/// accuracy and pairwise F1 against the hidden labels. Ks with more classes
/// requested than available are skipped with a warning record.
inline EvalReport run_protocol(const DataMatrix& x, const std::vector<int>& labels,
                               const ProtocolConfig& cfg,
                               const RepresentationFn& representation) {
  if (static_cast<Eigen::Index>(labels.size()) != x.samples())
    throw InvalidInputError("run_protocol: label count does not match samples");
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min)
    throw InvalidInputError("run_protocol: bad K range");
  if (cfg.subset_draws < 1 || cfg.restarts < 1)
    throw InvalidInputError("run_protocol: draws and restarts must be >= 1");

  std::vector<int> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2)
    throw InvalidInputError("run_protocol: at least 2 classes required");

  EvalReport report;
  std::vector<double> all_ac;
  std::vector<double> all_f;

  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    if (k > static_cast<int>(classes.size())) {
      report.warnings.push_back("K=" + std::to_string(k) +
                                " skipped: only " + std::to_string(classes.size()) +
                                " classes available");
      continue;
    }
    std::vector<double> k_ac;
    std::vector<double> k_f;
    for (int draw = 0; draw < cfg.subset_draws; ++draw) {
      // pick K distinct classes
      std::mt19937_64 gen(detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(k),
                                           static_cast<std::uint64_t>(draw)));
      std::vector<int> pool = classes;
      for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
        std::swap(pool[i], pool[pick(gen)]);
      }
      std::vector<int> subset_classes(pool.begin(), pool.begin() + k);

      std::vector<Eigen::Index> cols;
      for (Eigen::Index i = 0; i < x.samples(); ++i)
        if (std::find(subset_classes.begin(), subset_classes.end(), labels[i]) !=
            subset_classes.end())
          cols.push_back(i);

      DataMatrix sub;
      sub.values.resize(x.dim(), static_cast<Eigen::Index>(cols.size()));
      std::vector<int> sub_labels(cols.size());
      for (std::size_t i = 0; i < cols.size(); ++i) {
        sub.values.col(static_cast<Eigen::Index>(i)) = x.values.col(cols[i]);
        sub_labels[i] = labels[cols[i]];
      }

      const std::uint64_t fit_seed =
          detail::mix_seed(cfg.seed, 0x66697473ULL, static_cast<std::uint64_t>(k * 1000 + draw));
      const Matrix rep = representation(sub, k + 1, fit_seed);

      for (int restart = 0; restart < cfg.restarts; ++restart) {
        const std::uint64_t km_seed = detail::mix_seed(
            fit_seed, 0x6b6d65616eULL, static_cast<std::uint64_t>(restart));
        const ClusteringResult cl = kmeans_cosine(rep, k, km_seed, cfg.kmeans_max_iters);
        k_ac.push_back(accuracy(cl.assignments, sub_labels));
        k_f.push_back(f_measure(cl.assignments, sub_labels));
      }
    }

    PerKRow row;
    row.k = k;
    const double n_cells = static_cast<double>(k_ac.size());
    row.mean_ac = std::accumulate(k_ac.begin(), k_ac.end(), 0.0) / n_cells;
    double var = 0.0;
    for (double a : k_ac) var += (a - row.mean_ac) * (a - row.mean_ac);
    row.std_ac = n_cells > 1 ? std::sqrt(var / (n_cells - 1.0)) : 0.0;
    row.best_ac = *std::max_element(k_ac.begin(), k_ac.end());
    row.mean_f = std::accumulate(k_f.begin(), k_f.end(), 0.0) / n_cells;
    report.per_k.push_back(row);

    all_ac.insert(all_ac.end(), k_ac.begin(), k_ac.end());
    all_f.insert(all_f.end(), k_f.begin(), k_f.end());
  }

  if (!all_ac.empty()) {
    const double n_all = static_cast<double>(all_ac.size());
    report.mean_ac = std::accumulate(all_ac.begin(), all_ac.end(), 0.0) / n_all;
    double var = 0.0;
    for (double a : all_ac) var += (a - report.mean_ac) * (a - report.mean_ac);
    report.std_ac = n_all > 1 ? std::sqrt(var / (n_all - 1.0)) : 0.0;
    report.best_ac = *std::max_element(all_ac.begin(), all_ac.end());
    report.mean_f = std::accumulate(all_f.begin(), all_f.end(), 0.0) / n_all;
  }
  return report;
}

/// Per-K CSV rows: k,mean_ac,std_ac,best_ac,mean_f.
inline void export_eval(const EvalReport& report, std::ostream& out) {
  out << "k,mean_ac,std_ac,best_ac,mean_f\n";
  for (const PerKRow& row : report.per_k) {
    out << row.k << ',' << detail::format_double(row.mean_ac) << ','
        << detail::format_double(row.std_ac) << ','
        << detail::format_double(row.best_ac) << ','
        << detail::format_double(row.mean_f) << '\n';
  }
  if (!out) throw IoError("export_eval: write failed");
}

}  // namespace rfalcf

#endif  // RFALCF_CLUSTERING_HPP
