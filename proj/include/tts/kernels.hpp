#pragma once

// Data-parallel hot loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with the same
// signature. Each output element is produced by exactly one thread with a
// fixed summation order, so both versions agree bitwise for any thread count.

#include "tts/common.hpp"
#include "tts/simplex.hpp"

namespace tts {

/// Implicit symmetric operator  x -> F F^T x - diag(shift) x  where F is a
/// sparse rows x n factor. Used for G_JJ = D_J D_J^T - (n/N) M_JJ and for
/// D_J D_J^T (singular values) without forming the dense block.
struct GramOperator {
  SparseReal by_col;       // F, column-major
  SparseRealRows by_row;   // F, row-major
  Vector shift;            // length rows; zero means no diagonal correction

  GramOperator() = default;
  GramOperator(SparseReal factor, Vector diag_shift);

  Index dim() const { return by_col.rows(); }
  Index inner() const { return by_col.cols(); }
};

namespace kernels {

namespace serial {
void gram_apply(const GramOperator& op, const Vector& x, Vector& y);
Matrix gram_dense(const GramOperator& op);
// Row l of `points` against conv(rows of v): weights (m x K) and sqdist (m).
void simplex_ls_rows(const Matrix& points, const Matrix& v, Matrix& weights, Vector& sqdist,
                     const SimplexLsOptions& opts = {});
// Solve [1; V^T] pi = [1; r] for every row r of `points`.
void barycentric_rows(const Matrix& points, const Matrix& v, Matrix& pi);
// Per-document weighted simplex regression of D_{*i} on the columns of `design`.
// `row_weight` holds 1/sqrt(m_j) for usable words and 0 for excluded ones.
void weight_regression(const SparseReal& d, const Matrix& design, const Vector& row_weight, Matrix& w_hat,
                       std::vector<int>& status);
}  // namespace serial

namespace omp {
void gram_apply(const GramOperator& op, const Vector& x, Vector& y);
Matrix gram_dense(const GramOperator& op);
void simplex_ls_rows(const Matrix& points, const Matrix& v, Matrix& weights, Vector& sqdist,
                     const SimplexLsOptions& opts = {});
void barycentric_rows(const Matrix& points, const Matrix& v, Matrix& pi);
void weight_regression(const SparseReal& d, const Matrix& design, const Vector& row_weight, Matrix& w_hat,
                       std::vector<int>& status);
}  // namespace omp

}  // namespace kernels
}  // namespace tts
