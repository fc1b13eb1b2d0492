#pragma once

#include <variant>
#include <vector>

#include "ddml/forest.hpp"
#include "ddml/net.hpp"

namespace ddml::nuisance {

enum class NuisanceKind { kMlp, kRandomForest };
enum class NuisanceTask { kRegression, kBinaryProbability };

struct NuisanceSpec {
  NuisanceKind kind = NuisanceKind::kMlp;
  NuisanceTask task = NuisanceTask::kRegression;

  // random forest
  int rf_trees = 200;
  int rf_max_depth = 0;  // 0 = unlimited
  int rf_min_leaf = 5;
  bool rf_bootstrap = true;

  // mlp
  std::vector<int> mlp_hidden = {64, 64};
  num::TrainConfig mlp_train;

  void validate() const;
};

/// A trained nuisance model. Binary-probability predictions always lie in
/// [0,1]; inputs of the wrong width are rejected.
class FittedNuisance {
 public:
  FittedNuisance(NuisanceSpec spec, num::FeedForwardNet net);
  FittedNuisance(NuisanceSpec spec, RandomForest forest);

  const NuisanceSpec& spec() const { return spec_; }
  int input_width() const { return input_width_; }

  Vector predict(const Matrix& features) const;

 private:
  NuisanceSpec spec_;
  int input_width_ = 0;
  std::variant<num::FeedForwardNet, RandomForest> model_;
};

FittedNuisance fit_nuisance(const Matrix& features, const Vector& target,
                            const NuisanceSpec& spec, SeededRng& rng);

Vector predict_nuisance(const FittedNuisance& model, const Matrix& features);

}  // namespace ddml::nuisance
