#include "ddml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

namespace ddml::stats {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw InputError("mean: empty input");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw InputError("median: empty input");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  double m = xs[mid];
  if (xs.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(xs.begin(), xs.begin() + mid));
  }
  return m;
}

double mae(const std::vector<double>& estimates, double truth) {
  if (estimates.empty()) throw InputError("mae: empty input");
  double s = 0.0;
  for (double e : estimates) s += std::abs(e - truth);
  return s / static_cast<double>(estimates.size());
}

double rmse(const std::vector<double>& estimates, double truth) {
  if (estimates.empty()) throw InputError("rmse: empty input");
  double s = 0.0;
  for (double e : estimates) s += (e - truth) * (e - truth);
  return std::sqrt(s / static_cast<double>(estimates.size()));
}

double pearson(const Vector& a, const Vector& b, double eps) {
  require_len(b, a.size(), "pearson");
  if (a.size() < 2) throw InputError("pearson: need at least 2 samples");
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  const double denom = ac.norm() * bc.norm() + eps;
  if (denom == 0.0) return 0.0;
  return ac.dot(bc) / denom;
}

Vector average_ranks(const Vector& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return values[i] < values[j]; });
  Vector ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double auc_score(const Vector& scores, const Vector& labels) {
  require_len(labels, scores.size(), "auc_score");
  double n1 = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) {
      throw InputError("auc_score: labels must be in {0,1}");
    }
    n1 += labels[i];
  }
  const double n0 = static_cast<double>(labels.size()) - n1;
  if (n1 == 0.0 || n0 == 0.0) return 0.5;
  const Vector ranks = average_ranks(scores);
  double rank_sum_pos = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1.0) rank_sum_pos += ranks[i];
  }
  return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

double spearman(const Vector& a, const Vector& b) {
  require_len(b, a.size(), "spearman");
  if (a.size() < 2) return 0.0;
  const Vector ra = average_ranks(a);
  const Vector rb = average_ranks(b);
  const Vector rac = ra.array() - ra.mean();
  const Vector rbc = rb.array() - rb.mean();
  const double denom = rac.norm() * rbc.norm();
  if (denom == 0.0) return 0.0;
  return rac.dot(rbc) / denom;
}

namespace {
Matrix with_intercept(const Matrix& features) {
  Matrix aug(features.rows(), features.cols() + 1);
  aug.leftCols(features.cols()) = features;
  aug.col(features.cols()).setOnes();
  return aug;
}
}  // namespace

Vector linear_fitted(const Matrix& features, const Vector& target) {
  if (features.rows() != target.size()) throw ShapeError("linear_fitted: row/target mismatch");
  if (features.rows() < 2) throw InputError("linear_fitted: need at least 2 rows");
  const Matrix aug = with_intercept(features);
  const Eigen::VectorXd coef = aug.colPivHouseholderQr().solve(target);
  return aug * coef;
}

double linear_r2(const Matrix& features, const Vector& target) {
  const Vector fitted = linear_fitted(features, target);
  const double sst = (target.array() - target.mean()).square().sum();
  if (sst == 0.0) return 0.0;
  const double sse = (target - fitted).squaredNorm();
  return 1.0 - sse / sst;
}

double nemenyi_cd(int num_methods, int num_tasks, double alpha) {
  // Two-tailed Studentized-range critical values at alpha = 0.05 for
  // 2..10 compared methods.
  static constexpr double kQ05[] = {1.960, 2.343, 2.569, 2.728, 2.850,
                                    2.949, 3.031, 3.102, 3.164};
  if (alpha != 0.05) throw InputError("nemenyi_cd: only alpha=0.05 is tabulated");
  if (num_methods < 2 || num_methods > 10) {
    throw InputError("nemenyi_cd: method count must be in 2..10");
  }
  if (num_tasks < 1) throw InputError("nemenyi_cd: task count must be >= 1");
  const double q = kQ05[num_methods - 2];
  const double d = static_cast<double>(num_methods);
  return q * std::sqrt(d * (d + 1.0) / (6.0 * static_cast<double>(num_tasks)));
}

FriedmanResult friedman_ranks(const Matrix& scores, bool higher_is_better) {
  const Eigen::Index methods = scores.rows();
  const Eigen::Index tasks = scores.cols();
  if (methods < 2 || tasks < 2) {
    throw InputError("friedman_ranks: need at least 2 methods and 2 tasks");
  }
  if (!scores.allFinite()) throw InputError("friedman_ranks: table has non-finite cells");

  FriedmanResult out;
  out.ranks.resize(methods, tasks);
  for (Eigen::Index j = 0; j < tasks; ++j) {
    Vector col = scores.col(j);
    if (higher_is_better) col = -col;
    out.ranks.col(j) = average_ranks(col);
  }
  out.mean_ranks = out.ranks.rowwise().mean();

  const double d = static_cast<double>(methods);
  const double eta = static_cast<double>(tasks);
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < methods; ++i) sum_sq += out.mean_ranks[i] * out.mean_ranks[i];
  out.chi2 = 12.0 * eta / (d * (d + 1.0)) * (sum_sq - d * (d + 1.0) * (d + 1.0) / 4.0);
  return out;
}

}  // namespace ddml::stats
