#pragma once

#include "tts/corpus.hpp"
#include "tts/score.hpp"
#include "tts/spectral.hpp"
#include "tts/vertexhunt.hpp"

#include <map>
#include <optional>
#include <string>

namespace tts {

enum class GnMode { eight_log, fixed };
enum class WeightMode { simplex, box };

struct FitConfig {
  std::optional<Index> k;  // estimated with estimate_k_eigen when absent
  double alpha = 0.005;
  VertexMethod vh = VertexMethod::sp;
  SvsConfig svs;
  AAConfig aa;
  GnMode g_n_mode = GnMode::eight_log;
  double g_n_value = 0.0;  // used when g_n_mode == fixed
  std::uint64_t seed = 0;
  EigenOptions eigen;
  Index spectrum_size = 30;  // eigenvalues reported in the result

  void validate() const;
};

struct FitDiagnostics {
  double removed_fraction = 0.0;
  Index j_size = 0;
  Index dropped_rows = 0;   // xi1 <= 0
  Index clipped_rows = 0;   // Pi rows with a negative entry before clipping
  Index fallback_rows = 0;  // Pi rows with no positive entry, sent to the nearest vertex
  double max_negative = 0.0;  // largest magnitude of a clipped entry
  std::optional<Index> k_eigen;
  double g_n = 0.0;
  double wall_seconds = 0.0;
  std::map<std::string, double> stage_seconds;
  std::vector<std::string> warnings;
};

struct FitResult {
  Matrix a_hat;  // p x K
  Index k_used = 0;
  VocabularySubset j_set;
  Vector spectrum;  // top eigenvalues, descending
  SimplexVertices vertices;
  PointCloud cloud;
  Matrix pi_hat;  // |J'| x K
  FitDiagnostics diagnostics;
};

struct MixingWeights {
  Matrix pi;  // rows on the simplex
  Index clipped_rows = 0;
  Index fallback_rows = 0;
  double max_negative = 0.0;
};

/// Solves [1 ... 1; v_1 ... v_K] pi = [1; r_j] per row, clips negatives and
/// renormalizes. Throws NumericalError on a degenerate vertex matrix.
MixingWeights recover_mixing_weights(const Matrix& points, const Matrix& vertices);
MixingWeights recover_mixing_weights(const PointCloud& cloud, const SimplexVertices& vertices);

/// A_J'k = xi1 .* Pi_k normalized to unit l1; all other rows zero.
Matrix assemble_topic_matrix(const Matrix& pi, const Vector& xi1, const std::vector<Index>& word_ids, Index p);

// Runs the chosen vertex hunter on a cloud.
SimplexVertices hunt_vertices(const PointCloud& cloud, Index k, const FitConfig& cfg);

FitResult fit_tts(const CorpusMatrix& corpus, const FitConfig& cfg);

/// Noiseless entry point: exact frequencies, avg_len may be +infinity (no
/// debiasing, zero threshold).
FitResult fit_tts(const FrequencyMatrix& freq, const FitConfig& cfg);

struct OracleResult {
  Matrix a_tilde;  // p x K, zero outside J
  PointCloud cloud;
  SimplexVertices vertices;
  MixingWeights pi;
};

/// Oracle procedure on D_0 = A W: SVD of [D_0]_J, SCORE, vertex hunting,
/// barycentric recovery, normalization.
OracleResult fit_oracle(const Matrix& a, const Matrix& w, const std::vector<Index>& j, const FitConfig& cfg);

/// Topic-SCORE baseline: left singular vectors of diag(m)^{-1/2} D, no
/// thresholding, re-weighted by diag(m)^{1/2} before normalization.
FitResult fit_topic_score(const CorpusMatrix& corpus, Index k, const FitConfig& cfg);

struct WeightEstimate {
  Matrix w_hat;             // K x n
  std::vector<int> status;  // 0 ok, 1 degenerate design, 2 not converged
  Index degenerate_docs = 0;
};

/// Per document, argmin sum_{m_j > 0} (D_ji - (A w)_j)^2 / m_j over the
/// simplex (or over [0,1]^K in box mode).
WeightEstimate estimate_document_weights(const CorpusMatrix& corpus, const Matrix& a_hat,
                                         WeightMode mode = WeightMode::simplex);
WeightEstimate estimate_document_weights(const FrequencyMatrix& freq, const Matrix& a_hat,
                                         WeightMode mode = WeightMode::simplex);

}  // namespace tts
