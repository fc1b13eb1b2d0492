#pragma once

#include <Eigen/Core>
#include <string>

#include "ddml/errors.hpp"

namespace ddml {

// Row-major double matrices throughout; rows are samples, columns features.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Checked dense product: a (r×k) times b (k×c).
inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("mat_mul: inner dimensions differ (" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + ")");
  }
  return a * b;
}

inline void require_rows(const Matrix& m, Eigen::Index rows, const char* what) {
  if (m.rows() != rows) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) +
                     " rows, got " + std::to_string(m.rows()));
  }
}

inline void require_cols(const Matrix& m, Eigen::Index cols, const char* what) {
  if (m.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(cols) +
                     " columns, got " + std::to_string(m.cols()));
  }
}

inline void require_len(const Vector& v, Eigen::Index len, const char* what) {
  if (v.size() != len) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(len) +
                     ", got " + std::to_string(v.size()));
  }
}

/// Column-wise horizontal concatenation of two sample blocks.
inline Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hcat: row counts differ");
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace ddml
