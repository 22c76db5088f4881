#include "tts/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tts {

namespace {

void apply(const GramOperator& op, const Vector& x, Vector& y, bool parallel) {
  if (parallel) {
    kernels::omp::gram_apply(op, x, y);
  } else {
    kernels::serial::gram_apply(op, x, y);
  }
}

// Two passes of classical Gram-Schmidt against the first `cur` columns.
double orthogonalize(const Matrix& q, Index cur, Vector& v) {
  for (int pass = 0; pass < 2; ++pass) {
    if (cur == 0) break;
    Vector c = q.leftCols(cur).transpose() * v;
    v.noalias() -= q.leftCols(cur) * c;
  }
  return v.norm();
}

}  // namespace

EigenResult dense_top_eigenpairs(const Matrix& g, Index k) {
  if (g.rows() != g.cols()) throw ConfigError("eigensolver: matrix must be square");
  if (k < 1 || k > g.rows()) throw ConfigError("eigensolver: k must lie in [1, dim]");
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success) throw NumericalError("dense symmetric eigensolver failed");
  const Index dim = g.rows();
  EigenResult r;
  r.values.resize(k);
  r.vectors.resize(dim, k);
  for (Index c = 0; c < k; ++c) {
    r.values[c] = es.eigenvalues()[dim - 1 - c];
    r.vectors.col(c) = es.eigenvectors().col(dim - 1 - c);
  }
  return r;
}

EigenResult lanczos_top_eigenpairs(const GramOperator& op, Index k, const EigenOptions& opts) {
  const Index dim = op.dim();
  if (k < 1 || k > dim) throw ConfigError("eigensolver: k must lie in [1, dim]");
  const Index m = std::min(dim, std::max<Index>(2 * k + 20, 40));
  if (m >= dim) {
    EigenResult r = dense_top_eigenpairs(opts.parallel ? kernels::omp::gram_dense(op) : kernels::serial::gram_dense(op), k);
    return r;
  }
  const Index cap = opts.max_matvecs > 0 ? opts.max_matvecs : 10 * dim;
  const Index keep_max = k + (m - k) / 2;

  Matrix q(dim, m), aq(dim, m);
  Index cur = 0, matvecs = 0;
  std::mt19937_64 rng(0x7a6c3e1dULL);
  std::normal_distribution<double> gauss;
  Vector av;

  auto push = [&](Vector v) {
    const double before = v.norm();
    const double after = orthogonalize(q, cur, v);
    if (!(after > 1e-10 * before) || !(after > 0.0)) return false;
    q.col(cur) = v / after;
    apply(op, q.col(cur), av, opts.parallel);
    aq.col(cur) = av;
    ++cur;
    ++matvecs;
    return true;
  };
  auto push_random = [&]() {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector v(dim);
      for (Index i = 0; i < dim; ++i) v[i] = gauss(rng);
      if (push(std::move(v))) return;
    }
    throw NumericalError("Lanczos: could not extend the Krylov basis");
  };

  {
    // Mostly-positive start: the leading eigenvector of a Gram block is.
    Vector v0(dim);
    for (Index i = 0; i < dim; ++i) v0[i] = 1.0 + 0.1 * gauss(rng);
    if (!push(std::move(v0))) push_random();
  }

  while (true) {
    while (cur < m) {
      if (!push(aq.col(cur - 1))) push_random();
    }
    Matrix t = q.leftCols(cur).transpose() * aq.leftCols(cur);
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    if (es.info() != Eigen::Success) throw NumericalError("Lanczos: projected eigensolve failed");
    // Descending order.
    Matrix s = es.eigenvectors().rowwise().reverse();
    Vector theta = es.eigenvalues().reverse();
    const double scale = std::max(theta.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

    Matrix y = q.leftCols(cur) * s.leftCols(keep_max);
    Matrix ay = aq.leftCols(cur) * s.leftCols(keep_max);
    Index first_bad = -1;
    for (Index c = 0; c < k; ++c) {
      const double resid = (ay.col(c) - theta[c] * y.col(c)).norm();
      if (resid > opts.tol * scale) {
        first_bad = c;
        break;
      }
    }
    if (first_bad < 0) {
      EigenResult r;
      r.values = theta.head(k);
      r.vectors = y.leftCols(k);
      r.matvecs = matvecs;
      r.iterative = true;
      return r;
    }
    if (matvecs >= cap)
      throw NumericalError("Lanczos did not converge within " + std::to_string(cap) + " matrix-vector products");

    // Thick restart on the leading Ritz vectors, extended by a residual.
    q.leftCols(keep_max) = y;
    aq.leftCols(keep_max) = ay;
    cur = keep_max;
    Vector resid = ay.col(first_bad) - theta[first_bad] * y.col(first_bad);
    if (!push(std::move(resid))) push_random();
  }
}

EigenResult operator_top_eigenpairs(const GramOperator& op, Index k, const EigenOptions& opts) {
  if (op.dim() < opts.dense_cutoff) {
    return dense_top_eigenpairs(opts.parallel ? kernels::omp::gram_dense(op) : kernels::serial::gram_dense(op), k);
  }
  return lanczos_top_eigenpairs(op, k, opts);
}

}  // namespace tts
