#pragma once

#include "tts/corpus.hpp"
#include "tts/spectral.hpp"
#include "tts/vocabulary.hpp"

namespace tts {

/// alpha * sqrt(log(max(p, n)) / (n N)), natural log, N the mean length.
double threshold_value(Index p, Index n, double avg_len, double alpha);

/// J = {j : m_j >= threshold}. Throws ConfigError when fewer than min_size
/// words survive, naming an alpha that would keep min_size words.
VocabularySubset threshold_vocabulary(const FrequencyDiagonal& diag, Index p, double alpha, Index min_size = 1);
VocabularySubset threshold_vocabulary(const CorpusMatrix& corpus, double alpha, Index min_size = 1);
VocabularySubset threshold_vocabulary(const FrequencyMatrix& freq, double alpha, Index min_size = 1);

/// SCORE-normalized rows r_j = (xi_2(j), ..., xi_K(j)) / xi_1(j).
struct PointCloud {
  Matrix points;                 // |J'| x (K - 1)
  Vector xi1;                    // |J'|, strictly positive
  std::vector<Index> word_ids;   // original word index of each row
  std::vector<Index> dropped;    // original word ids with xi1 <= 0

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

PointCloud score_point_cloud(const SpectralBundle& bundle, const std::vector<Index>& j_index);
PointCloud score_point_cloud(const SpectralBundle& bundle, const VocabularySubset& j);

// Largest Euclidean norm over cloud rows.
double cloud_radius(const PointCloud& cloud);

}  // namespace tts
