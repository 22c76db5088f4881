#pragma once

#include "tts/corpus.hpp"
#include "tts/eigensolver.hpp"
#include "tts/kernels.hpp"
#include "tts/vocabulary.hpp"

namespace tts {

/// G_JJ = D_J D_J^T - (n/N) diag(m_J), held as an operator over the sparse
/// rows D_J. dense() materializes it.
struct GramBlock {
  GramOperator op;
  std::vector<Index> j_index;
  Index n_docs = 0;
  Index p = 0;
  Index p_n = 0;  // max(p, n)
  double avg_len = 0.0;

  Index dim() const { return op.dim(); }
  Matrix dense(bool parallel = true) const;
};

GramBlock build_gram(const FrequencyMatrix& freq, const std::vector<Index>& j);
GramBlock build_gram(const CorpusMatrix& corpus, const VocabularySubset& j);

// Rows D_J of the frequency matrix (|J| x n), without touching other rows.
SparseReal frequency_rows(const CorpusMatrix& corpus, const std::vector<Index>& j);
SparseReal frequency_rows(const FrequencyMatrix& freq, const std::vector<Index>& j);

struct SpectralBundle {
  Vector eigenvalues;  // descending, length k
  Matrix xi;           // |J| x k
  bool xi1_positive = false;        // every leading-vector entry > 0
  std::vector<Index> dropped_rows;  // positions in J with xi1 <= 0
  Index matvecs = 0;
};

/// Leading vector: strict majority of entries positive, ties broken toward a
/// positive sum. Others: largest-magnitude entry positive. Idempotent.
void fix_eigenvector_signs(Matrix& xi);

SpectralBundle top_eigenpairs(const GramBlock& block, Index k, const EigenOptions& opts = {});
SpectralBundle top_eigenpairs(const Matrix& g, Index k);

// Algebraically largest `count` eigenvalues, descending.
Vector top_eigenvalues(const GramBlock& block, Index count, const EigenOptions& opts = {});

double default_g_n(const GramBlock& block);  // 8 log p_n
double eigen_cutoff(const GramBlock& block, double g_n);

/// #{k : lambda_k(G_JJ) > g_n sqrt(n log p_n / N)}.
Index estimate_k_eigen(const GramBlock& block, double g_n, const EigenOptions& opts = {});

/// #{k : sigma_k(D_J) > 4 sqrt(n log(p + n) / N)}.
Index estimate_k_singular(const CorpusMatrix& corpus, const VocabularySubset& j, const EigenOptions& opts = {});
Index estimate_k_singular(const FrequencyMatrix& freq, const std::vector<Index>& j, const EigenOptions& opts = {});
double singular_cutoff(Index p, Index n, double avg_len);

// Number of values strictly above the cutoff, with eigenvalues of the
// operator computed lazily by doubling.
Index count_eigenvalues_above(const GramOperator& op, double cutoff, const EigenOptions& opts = {});

struct KneeResult {
  Index index = 0;  // 0-based position of the knee, i.e. the number of values before it
  bool low_confidence = false;
};

/// Kneedle (sensitivity 1) on a decreasing scree profile. With log_x the
/// x-axis is log(i + 1) for 1-based rank i. Throws ConfigError on < 3 values.
KneeResult kneedle_knee(const std::vector<double>& values, bool log_x = false);

}  // namespace tts
