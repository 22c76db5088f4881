#pragma once

#include "tts/common.hpp"

namespace tts {

struct SimplexLsOptions {
  // Stop when ||x||^2 - min_i <p_i, x> <= tol * max_i ||p_i||^2 (Wolfe's test).
  double tol = 1e-10;
  int max_iterations = 0;  // 0 = 10 * (m + d) + 100
};

struct SimplexLsResult {
  Vector weights;  // on the unit simplex, length m
  double sqdist = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Squared Euclidean distance from u to conv(rows of V), with the minimizing
/// barycentric weights. Wolfe's minimum-norm-point active-set method on the
/// shifted points V_i - u. Throws NumericalError on non-convergence.
SimplexLsResult simplex_barycentric_ls(const Eigen::Ref<const Vector>& u,
                                       const Eigen::Ref<const Matrix>& v,
                                       const SimplexLsOptions& opts = {});

/// Same problem, never throws; `converged` reports the outcome. Used inside
/// batched kernels where a single stubborn point should not abort the batch.
SimplexLsResult simplex_barycentric_ls_nothrow(const Eigen::Ref<const Vector>& u,
                                               const Eigen::Ref<const Matrix>& v,
                                               const SimplexLsOptions& opts = {});

/// Same problem posed through the Gram matrix q = P P^T of the shifted
/// points P_i = V_i - u. Never throws.
SimplexLsResult simplex_ls_gram(const Matrix& q, const SimplexLsOptions& opts = {});

/// KKT check for min ||V^T w - u||^2 over the simplex: gradient entries are
/// equal on the support and no smaller off it, within tol (relative to the
/// gradient scale).
bool simplex_kkt_satisfied(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Matrix>& v,
                           const Vector& weights, double tol);

/// Sum over the rows u_l of U of their squared distance to conv(V).
double simplex_distance_sum(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Matrix>& v);

}  // namespace tts
