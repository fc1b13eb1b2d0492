#pragma once

#include <vector>

#include "ddml/matrix.hpp"

namespace ddml::stats {

double mean(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);  // population (1/n)
double median(std::vector<double> xs);

/// MAE / RMSE of repeated estimates against a single reference value.
double mae(const std::vector<double>& estimates, double truth);
double rmse(const std::vector<double>& estimates, double truth);

/// Sample Pearson correlation with an additive stabilizer in the denominator.
double pearson(const Vector& a, const Vector& b, double eps = 0.0);

/// 1-based ranks with ties averaged (smallest value gets rank 1).
Vector average_ranks(const Vector& values);

/// Rank-based AUC of `scores` against binary labels; 0.5 when one class is
/// empty (constant target).
double auc_score(const Vector& scores, const Vector& labels);

/// Spearman rank correlation; 0 when either side has zero rank variance.
double spearman(const Vector& a, const Vector& b);

/// R^2 of least squares of `target` on [features, 1]; 0 for a constant target.
double linear_r2(const Matrix& features, const Vector& target);

/// Least-squares fitted values of `target` on [features, 1].
Vector linear_fitted(const Matrix& features, const Vector& target);

/// Nemenyi critical difference CD = q_{alpha,D} sqrt(D(D+1)/(6 eta)).
/// Embedded two-tailed Studentized-range values cover alpha=0.05, D in 2..10.
double nemenyi_cd(int num_methods, int num_tasks, double alpha = 0.05);

struct FriedmanResult {
  Matrix ranks;       // methods × tasks, ties averaged
  Vector mean_ranks;  // per method
  double chi2 = 0.0;  // Friedman chi-square statistic
};

/// Per-task ranks and the Friedman statistic for a complete methods×tasks
/// score table. Rank 1 is best.
FriedmanResult friedman_ranks(const Matrix& scores, bool higher_is_better);

}  // namespace ddml::stats
