#pragma once

#include "tts/corpus.hpp"
#include "tts/estimator.hpp"

#include <optional>

namespace tts {

struct AlignedComparison {
  std::vector<Index> permutation;  // estimate column/row permutation[k] is matched to truth k
  std::vector<double> per_topic_scores;
  double aggregate = 0.0;
};

/// min over column permutations of (1/K) ||A_hat P - A||_1.
double l1_permuted_loss(const Matrix& a_hat, const Matrix& a_true);
AlignedComparison l1_alignment(const Matrix& a_hat, const Matrix& a_true);

/// max over permutations of the mean cosine between matched columns.
double topic_resolution(const Matrix& a1, const Matrix& a2);
AlignedComparison resolution_alignment(const Matrix& a1, const Matrix& a2);

/// One global sigma minimizing (1/nK) sum |W_hat_{sigma(k) i} - y_ki|;
/// per-topic cosines under that sigma.
AlignedComparison label_alignment(const Matrix& w_hat, const Matrix& labels);

struct SplitHalfResult {
  std::vector<std::optional<double>> eta;  // missing when a half-fit failed
  std::vector<std::string> failures;
  double median = 0.0;
  double iqr = 0.0;
  Index completed = 0;
};

struct SplitHalfOptions {
  int n_splits = 25;
  std::uint64_t seed = 0;
  bool duplicate_halves = false;  // both halves get the same documents (sanity check)
};

SplitHalfResult split_half_resolution(const CorpusMatrix& corpus, const FitConfig& cfg, const SplitHalfOptions& opts);

/// Median and interquartile range (linear interpolation between order statistics).
double median_of(std::vector<double> values);
double iqr_of(std::vector<double> values);
double quantile_of(std::vector<double> values, double q);

}  // namespace tts
