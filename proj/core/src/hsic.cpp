#include "ddml/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ddml::hsic {

void KernelSpec::validate() const {
  if (bandwidth && !(*bandwidth > 0.0)) throw InputError("KernelSpec: bandwidth must be > 0");
  if (!(bandwidth_floor > 0.0)) throw InputError("KernelSpec: bandwidth floor must be > 0");
}

namespace {

Matrix squared_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Vector sq = x.rowwise().squaredNorm();
  Matrix d2 = -2.0 * (x * x.transpose());
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  return d2;
}

double median_of_upper_triangle(const Matrix& d2) {
  const Eigen::Index n = d2.rows();
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) vals.push_back(d2(i, j));
  }
  const std::size_t m = vals.size();
  auto mid = vals.begin() + m / 2;
  std::nth_element(vals.begin(), mid, vals.end());
  double med = *mid;
  if (m % 2 == 0) {
    auto lo = std::max_element(vals.begin(), mid);
    med = 0.5 * (med + *lo);
  }
  return med;
}

double bandwidth_from_d2(const Matrix& d2, const KernelSpec& spec) {
  spec.validate();
  if (spec.bandwidth) return std::max(*spec.bandwidth, spec.bandwidth_floor);
  return std::max(std::sqrt(median_of_upper_triangle(d2)), spec.bandwidth_floor);
}

Matrix gram_from_d2(const Matrix& d2, double sigma) {
  Matrix k = (-d2 / (2.0 * sigma * sigma)).array().exp();
  k.diagonal().setOnes();
  return k;
}

// G = H K H via double centering.
Matrix center_gram(const Matrix& k) {
  Vector row_mean = k.rowwise().mean();
  const double total_mean = row_mean.mean();
  Matrix g = k;
  g.colwise() -= row_mean;
  g.rowwise() -= row_mean.transpose();  // K symmetric: column means equal row means
  g.array() += total_mean;
  return g;
}

void require_pair(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hsic: sample blocks have different row counts");
  if (a.rows() < 2) throw InputError("hsic: need at least 2 rows");
}

}  // namespace

double resolve_bandwidth(const Matrix& samples, const KernelSpec& spec) {
  if (samples.rows() < 2) throw InputError("resolve_bandwidth: need at least 2 rows");
  return bandwidth_from_d2(squared_distances(samples), spec);
}

Matrix gram_matrix(const Matrix& samples, const KernelSpec& spec) {
  if (samples.rows() < 2) throw InputError("gram_matrix: need at least 2 rows");
  Matrix d2 = squared_distances(samples);
  return gram_from_d2(d2, bandwidth_from_d2(d2, spec));
}

double hsic_value(const Matrix& a, const Matrix& b, const KernelSpec& spec) {
  require_pair(a, b);
  const double n = static_cast<double>(a.rows());
  Matrix kc = center_gram(gram_matrix(a, spec));
  Matrix lc = center_gram(gram_matrix(b, spec));
  return kc.cwiseProduct(lc).sum() / (n * n);
}

HsicGrad hsic_with_grad(const Matrix& a, const Matrix& b, const KernelSpec& spec) {
  require_pair(a, b);
  const Eigen::Index n = a.rows();
  const double nn = static_cast<double>(n) * static_cast<double>(n);

  Matrix d2a = squared_distances(a);
  Matrix d2b = squared_distances(b);
  const double sa = bandwidth_from_d2(d2a, spec);
  const double sb = bandwidth_from_d2(d2b, spec);
  Matrix k = gram_from_d2(d2a, sa);
  Matrix l = gram_from_d2(d2b, sb);
  Matrix kc = center_gram(k);
  Matrix lc = center_gram(l);

  HsicGrad out;
  out.value = kc.cwiseProduct(lc).sum() / nn;

  // d HSIC / dA: with W = K .* center(L),
  // grad = -(2 / (n^2 sigma_a^2)) (diag(W 1) A - W A); symmetrically for B.
  auto side_grad = [nn](const Matrix& gram, const Matrix& other_centered, const Matrix& x,
                        double sigma) {
    Matrix w = gram.cwiseProduct(other_centered);
    Vector row_sums = w.rowwise().sum();
    Matrix grad = row_sums.asDiagonal() * x - w * x;
    grad *= -2.0 / (nn * sigma * sigma);
    return grad;
  };
  out.da = side_grad(k, lc, a, sa);
  out.db = side_grad(l, kc, b, sb);
  return out;
}

}  // namespace ddml::hsic
