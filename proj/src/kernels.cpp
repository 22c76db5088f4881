#include "tts/kernels.hpp"

#include <cmath>

namespace tts {

GramOperator::GramOperator(SparseReal factor, Vector diag_shift)
    : by_col(std::move(factor)), shift(std::move(diag_shift)) {
  by_col.makeCompressed();
  by_row = by_col;
  by_row.makeCompressed();
  if (shift.size() == 0) shift = Vector::Zero(by_col.rows());
  if (shift.size() != by_col.rows()) throw ConfigError("Gram shift length does not match the factor");
}

namespace kernels {
namespace {

// Each body computes one output element (or row) with a fixed order.

inline double column_dot(const SparseReal& f, Index i, const Vector& x) {
  double acc = 0.0;
  for (SparseReal::InnerIterator it(f, i); it; ++it) acc += it.value() * x[it.row()];
  return acc;
}

inline double row_dot(const SparseRealRows& f, Index j, const Vector& t) {
  double acc = 0.0;
  for (SparseRealRows::InnerIterator it(f, j); it; ++it) acc += it.value() * t[it.col()];
  return acc;
}

inline void gram_column(const GramOperator& op, Index j, Matrix& g) {
  auto col = g.col(j);
  for (SparseRealRows::InnerIterator it(op.by_row, j); it; ++it) {
    const double fji = it.value();
    for (SparseReal::InnerIterator jt(op.by_col, it.col()); jt; ++jt) col[jt.row()] += fji * jt.value();
  }
  col[j] -= op.shift[j];
}

inline void simplex_row(const Matrix& points, const Matrix& v, Index l, Matrix& weights, Vector& sqdist,
                        const SimplexLsOptions& opts) {
  auto res = simplex_barycentric_ls_nothrow(points.row(l).transpose(), v, opts);
  weights.row(l) = res.weights.transpose();
  sqdist[l] = res.sqdist;
}

struct BarySystem {
  Eigen::PartialPivLU<Matrix> lu;
  explicit BarySystem(const Matrix& v) {
    const Index k = v.rows();
    Matrix b(k, k);
    b.row(0).setOnes();
    b.bottomRows(k - 1) = v.transpose();
    lu.compute(b);
  }
};

inline void bary_row(const BarySystem& sys, const Matrix& points, Index l, Matrix& pi) {
  Vector rhs(points.cols() + 1);
  rhs[0] = 1.0;
  rhs.tail(points.cols()) = points.row(l).transpose();
  pi.row(l) = sys.lu.solve(rhs).transpose();
}

struct RegressionSystem {
  Matrix scaled;  // design rows scaled by row_weight
  Matrix btb;
  bool degenerate = false;
  RegressionSystem(const Matrix& design, const Vector& row_weight) {
    scaled = row_weight.asDiagonal() * design;
    btb = scaled.transpose() * scaled;
    Eigen::SelfAdjointEigenSolver<Matrix> es(btb, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    degenerate = !(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top;
  }
};

inline void regression_column(const RegressionSystem& sys, const SparseReal& d, const Vector& row_weight,
                              Index i, Matrix& w_hat, std::vector<int>& status) {
  const Index k = sys.btb.rows();
  if (sys.degenerate) {
    w_hat.col(i).setConstant(1.0 / static_cast<double>(k));
    status[i] = 1;
    return;
  }
  Vector bty = Vector::Zero(k);
  double yty = 0.0;
  for (SparseReal::InnerIterator it(d, i); it; ++it) {
    const double rw = row_weight[it.row()];
    if (rw == 0.0) continue;
    const double y = it.value() * rw;
    bty += y * sys.scaled.row(it.row()).transpose();
    yty += y * y;
  }
  // Gram of shifted points (B e_a - y): btb_ab - bty_a - bty_b + yty.
  Matrix q = sys.btb;
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) q(a, b) += yty - bty[a] - bty[b];
  auto res = simplex_ls_gram(q);
  w_hat.col(i) = res.weights;
  status[i] = res.converged ? 0 : 2;
}

}  // namespace

namespace serial {

void gram_apply(const GramOperator& op, const Vector& x, Vector& y) {
  Vector t(op.inner());
  for (Index i = 0; i < op.inner(); ++i) t[i] = column_dot(op.by_col, i, x);
  y.resize(op.dim());
  for (Index j = 0; j < op.dim(); ++j) y[j] = row_dot(op.by_row, j, t) - op.shift[j] * x[j];
}

Matrix gram_dense(const GramOperator& op) {
  Matrix g = Matrix::Zero(op.dim(), op.dim());
  for (Index j = 0; j < op.dim(); ++j) gram_column(op, j, g);
  return g;
}

void simplex_ls_rows(const Matrix& points, const Matrix& v, Matrix& weights, Vector& sqdist,
                     const SimplexLsOptions& opts) {
  weights.resize(points.rows(), v.rows());
  sqdist.resize(points.rows());
  for (Index l = 0; l < points.rows(); ++l) simplex_row(points, v, l, weights, sqdist, opts);
}

void barycentric_rows(const Matrix& points, const Matrix& v, Matrix& pi) {
  BarySystem sys(v);
  pi.resize(points.rows(), v.rows());
  for (Index l = 0; l < points.rows(); ++l) bary_row(sys, points, l, pi);
}

void weight_regression(const SparseReal& d, const Matrix& design, const Vector& row_weight, Matrix& w_hat,
                       std::vector<int>& status) {
  RegressionSystem sys(design, row_weight);
  w_hat.resize(design.cols(), d.cols());
  status.assign(static_cast<std::size_t>(d.cols()), 0);
  for (Index i = 0; i < d.cols(); ++i) regression_column(sys, d, row_weight, i, w_hat, status);
}

}  // namespace serial

namespace omp {

void gram_apply(const GramOperator& op, const Vector& x, Vector& y) {
  Vector t(op.inner());
  const Index n = op.inner();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) t[i] = column_dot(op.by_col, i, x);
  y.resize(op.dim());
  const Index p = op.dim();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < p; ++j) y[j] = row_dot(op.by_row, j, t) - op.shift[j] * x[j];
}

Matrix gram_dense(const GramOperator& op) {
  Matrix g = Matrix::Zero(op.dim(), op.dim());
  const Index p = op.dim();
#pragma omp parallel for schedule(dynamic, 8)
  for (Index j = 0; j < p; ++j) gram_column(op, j, g);
  return g;
}

void simplex_ls_rows(const Matrix& points, const Matrix& v, Matrix& weights, Vector& sqdist,
                     const SimplexLsOptions& opts) {
  weights.resize(points.rows(), v.rows());
  sqdist.resize(points.rows());
  const Index m = points.rows();
#pragma omp parallel for schedule(dynamic, 32)
  for (Index l = 0; l < m; ++l) simplex_row(points, v, l, weights, sqdist, opts);
}

void barycentric_rows(const Matrix& points, const Matrix& v, Matrix& pi) {
  BarySystem sys(v);
  pi.resize(points.rows(), v.rows());
  const Index m = points.rows();
#pragma omp parallel for schedule(static)
  for (Index l = 0; l < m; ++l) bary_row(sys, points, l, pi);
}

void weight_regression(const SparseReal& d, const Matrix& design, const Vector& row_weight, Matrix& w_hat,
                       std::vector<int>& status) {
  RegressionSystem sys(design, row_weight);
  w_hat.resize(design.cols(), d.cols());
  status.assign(static_cast<std::size_t>(d.cols()), 0);
  const Index n = d.cols();
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) regression_column(sys, d, row_weight, i, w_hat, status);
}

}  // namespace omp

}  // namespace kernels
}  // namespace tts
