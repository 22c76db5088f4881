#pragma once

#include "tts/common.hpp"
#include "tts/kernels.hpp"

namespace tts {

struct EigenOptions {
  double tol = 1e-10;        // residual relative to the largest Ritz value magnitude
  Index dense_cutoff = 512;  // below this dimension the block is materialized
  Index max_matvecs = 0;     // 0 = 10 * dim
  bool parallel = true;      // omp kernels for the operator products
};

struct EigenResult {
  Vector values;   // descending
  Matrix vectors;  // dim x k, orthonormal columns
  Index matvecs = 0;
  bool iterative = false;
};

/// The k algebraically largest eigenpairs of a dense symmetric matrix.
EigenResult dense_top_eigenpairs(const Matrix& g, Index k);

/// The k algebraically largest eigenpairs of the operator. Dense solve below
/// opts.dense_cutoff, restarted Lanczos with full reorthogonalization above.
/// Throws NumericalError when the matvec cap is exceeded.
EigenResult operator_top_eigenpairs(const GramOperator& op, Index k, const EigenOptions& opts = {});

/// Restarted Lanczos regardless of dimension. Exposed for tests.
EigenResult lanczos_top_eigenpairs(const GramOperator& op, Index k, const EigenOptions& opts = {});

}  // namespace tts
