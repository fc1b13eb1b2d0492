#include "ddml/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ddml::nuisance {

void ForestConfig::validate() const {
  if (trees < 1) throw InputError("ForestConfig: trees must be >= 1");
  if (min_leaf < 1) throw InputError("ForestConfig: min leaf must be >= 1");
  if (max_depth < 0) throw InputError("ForestConfig: max depth must be >= 0");
  if (mtry < 0) throw InputError("ForestConfig: mtry must be >= 0");
}

int ForestConfig::resolve_mtry(int p) const {
  if (mtry > 0) return std::min(mtry, p);
  const double dp = static_cast<double>(p);
  const int m = classification ? static_cast<int>(std::ceil(std::sqrt(dp)))
                               : static_cast<int>(std::ceil(dp / 3.0));
  return std::clamp(m, 1, p);
}

double DecisionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    node = (row[nodes[node].feature] <= nodes[node].threshold) ? nodes[node].left
                                                               : nodes[node].right;
  }
  return nodes[node].value;
}

namespace {

// Sum in sorted order so the result depends only on the value multiset.
double sorted_sum(std::vector<double>& vals) {
  std::sort(vals.begin(), vals.end());
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();
};

struct TreeBuilder {
  const Matrix& x;
  const Vector& y;
  const ForestConfig& cfg;
  SeededRng& rng;
  int mtry;
  DecisionTree tree;

  double leaf_value(const std::vector<int>& samples) const {
    std::vector<double> vals;
    vals.reserve(samples.size());
    for (int i : samples) vals.push_back(y[i]);
    return sorted_sum(vals) / static_cast<double>(samples.size());
  }

  bool is_pure(const std::vector<int>& samples) const {
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (y[samples[i]] != y[samples[0]]) return false;
    }
    return true;
  }

  std::vector<int> draw_features() {
    const int p = static_cast<int>(x.cols());
    std::vector<int> all(static_cast<std::size_t>(p));
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < mtry; ++i) {
      const auto j = i + rng.uniform_index(static_cast<std::uint64_t>(p - i));
      std::swap(all[static_cast<std::size_t>(i)], all[j]);
    }
    std::vector<int> out(all.begin(), all.begin() + mtry);
    std::sort(out.begin(), out.end());  // fixed feature scan order
    return out;
  }

  // Best split over one feature, scanning midpoint thresholds in ascending
  // order; strict improvement keeps the first best.
  void scan_feature(int feature, const std::vector<int>& samples, SplitChoice& best) const {
    const std::size_t n = samples.size();
    std::vector<std::pair<double, double>> pairs;  // (value, target)
    pairs.reserve(n);
    for (int i : samples) pairs.emplace_back(x(i, feature), y[i]);
    std::sort(pairs.begin(), pairs.end());
    if (pairs.front().first == pairs.back().first) return;  // constant feature

    if (cfg.classification) {
      double total_ones = 0.0;
      for (const auto& pr : pairs) total_ones += pr.second;
      double left_ones = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_ones += pairs[i].second;
        if (pairs[i].first == pairs[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n - i - 1);
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        const double pl = left_ones / nl;
        const double pr = (total_ones - left_ones) / nr;
        const double score = nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr);
        if (score < best.score) {
          best = {feature, 0.5 * (pairs[i].first + pairs[i + 1].first), score};
        }
      }
    } else {
      double total_sum = 0.0, total_sq = 0.0;
      for (const auto& pr : pairs) {
        total_sum += pr.second;
        total_sq += pr.second * pr.second;
      }
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += pairs[i].second;
        left_sq += pairs[i].second * pairs[i].second;
        if (pairs[i].first == pairs[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n - i - 1);
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        const double sse_l = left_sq - left_sum * left_sum / nl;
        const double right_sum = total_sum - left_sum;
        const double sse_r = (total_sq - left_sq) - right_sum * right_sum / nr;
        const double score = sse_l + sse_r;
        if (score < best.score) {
          best = {feature, 0.5 * (pairs[i].first + pairs[i + 1].first), score};
        }
      }
    }
  }

  int build(std::vector<int>&& samples, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    const bool depth_capped = cfg.max_depth > 0 && depth >= cfg.max_depth;
    if (samples.size() < 2 * static_cast<std::size_t>(cfg.min_leaf) || depth_capped ||
        is_pure(samples)) {
      tree.nodes[node_id].value = leaf_value(samples);
      return node_id;
    }

    SplitChoice best;
    for (int feature : draw_features()) scan_feature(feature, samples, best);
    if (best.feature < 0) {
      tree.nodes[node_id].value = leaf_value(samples);
      return node_id;
    }

    std::vector<int> left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (int i : samples) {
      (x(i, best.feature) <= best.threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[node_id].feature = best.feature;
    tree.nodes[node_id].threshold = best.threshold;
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
  }
};

DecisionTree fit_tree(const Matrix& x, const Vector& y, const ForestConfig& cfg,
                      SeededRng tree_rng) {
  const int n = static_cast<int>(x.rows());
  std::vector<int> samples;
  samples.reserve(static_cast<std::size_t>(n));
  if (cfg.bootstrap) {
    for (int i = 0; i < n; ++i) {
      samples.push_back(static_cast<int>(tree_rng.uniform_index(static_cast<std::uint64_t>(n))));
    }
  } else {
    samples.resize(static_cast<std::size_t>(n));
    std::iota(samples.begin(), samples.end(), 0);
  }
  TreeBuilder builder{x, y, cfg, tree_rng, cfg.resolve_mtry(static_cast<int>(x.cols())), {}};
  builder.build(std::move(samples), 0);
  return std::move(builder.tree);
}

}  // namespace

RandomForest RandomForest::fit(const Matrix& x, const Vector& y, const ForestConfig& cfg,
                               SeededRng& rng) {
  cfg.validate();
  if (x.rows() < 2) throw InputError("RandomForest: need at least 2 rows");
  if (y.size() != x.rows()) throw ShapeError("RandomForest: target length mismatch");
  if (cfg.classification) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw InputError("RandomForest: classification target outside {0,1}");
      }
    }
  }

  RandomForest forest;
  forest.input_width_ = static_cast<int>(x.cols());
  forest.classification_ = cfg.classification;
  forest.trees_.resize(static_cast<std::size_t>(cfg.trees));
  const SeededRng base = rng.derive(rng.next_u64());
  for (int i = 0; i < cfg.trees; ++i) {
    forest.trees_[static_cast<std::size_t>(i)] =
        fit_tree(x, y, cfg, base.derive(static_cast<std::uint64_t>(i)));
  }
  return forest;
}

double RandomForest::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict_row(row);
  return s / static_cast<double>(trees_.size());
}

Vector RandomForest::predict(const Matrix& x) const {
  if (x.cols() != input_width_) throw ShapeError("RandomForest: feature width mismatch");
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
  return out;
}

}  // namespace ddml::nuisance
