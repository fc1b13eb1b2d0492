#include "ddml/nuisance.hpp"

#include <utility>

namespace ddml::nuisance {

void NuisanceSpec::validate() const {
  if (rf_trees < 1) throw InputError("NuisanceSpec: trees must be >= 1");
  if (rf_min_leaf < 1) throw InputError("NuisanceSpec: min leaf must be >= 1");
  if (mlp_train.epochs < 1) throw InputError("NuisanceSpec: epochs must be >= 1");
  mlp_train.validate();
}

FittedNuisance::FittedNuisance(NuisanceSpec spec, num::FeedForwardNet net)
    : spec_(std::move(spec)), input_width_(net.input_width()), model_(std::move(net)) {}

FittedNuisance::FittedNuisance(NuisanceSpec spec, RandomForest forest)
    : spec_(std::move(spec)), input_width_(forest.input_width()), model_(std::move(forest)) {}

Vector FittedNuisance::predict(const Matrix& features) const {
  if (features.cols() != input_width_) {
    throw ShapeError("FittedNuisance: feature width mismatch (" +
                     std::to_string(features.cols()) + " vs " + std::to_string(input_width_) +
                     ")");
  }
  if (features.rows() == 0) return Vector(0);
  if (const auto* net = std::get_if<num::FeedForwardNet>(&model_)) {
    Vector out = net->forward(features).col(0);
    if (spec_.task == NuisanceTask::kBinaryProbability) out = num::sigmoid(out);
    return out;
  }
  return std::get<RandomForest>(model_).predict(features);
}

FittedNuisance fit_nuisance(const Matrix& features, const Vector& target,
                            const NuisanceSpec& spec, SeededRng& rng) {
  spec.validate();
  if (features.rows() < 2) throw InputError("fit_nuisance: need at least 2 rows");
  if (target.size() != features.rows()) throw ShapeError("fit_nuisance: target length mismatch");
  if (spec.task == NuisanceTask::kBinaryProbability) {
    for (Eigen::Index i = 0; i < target.size(); ++i) {
      if (target[i] != 0.0 && target[i] != 1.0) {
        throw InputError("fit_nuisance: binary target outside {0,1} at row " + std::to_string(i));
      }
    }
  }

  if (spec.kind == NuisanceKind::kMlp) {
    std::vector<int> widths;
    widths.push_back(static_cast<int>(features.cols()));
    widths.insert(widths.end(), spec.mlp_hidden.begin(), spec.mlp_hidden.end());
    widths.push_back(1);
    num::FeedForwardNet net = num::FeedForwardNet::make(widths, rng);
    const auto loss = (spec.task == NuisanceTask::kBinaryProbability)
                          ? num::SupervisedLoss::kBceLogits
                          : num::SupervisedLoss::kMse;
    num::fit_supervised(net, features, target, loss, spec.mlp_train, rng);
    return FittedNuisance(spec, std::move(net));
  }

  ForestConfig cfg;
  cfg.trees = spec.rf_trees;
  cfg.max_depth = spec.rf_max_depth;
  cfg.min_leaf = spec.rf_min_leaf;
  cfg.bootstrap = spec.rf_bootstrap;
  cfg.classification = (spec.task == NuisanceTask::kBinaryProbability);
  return FittedNuisance(spec, RandomForest::fit(features, target, cfg, rng));
}

Vector predict_nuisance(const FittedNuisance& model, const Matrix& features) {
  return model.predict(features);
}

}  // namespace ddml::nuisance
