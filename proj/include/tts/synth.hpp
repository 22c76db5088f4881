#pragma once

#include "tts/common.hpp"
#include "tts/corpus.hpp"

#include <map>
#include <string>
#include <vector>

namespace tts {

enum class GenerationMode { zipf, uniform };

struct GenerationConfig {
  Index p = 1000;
  Index n = 500;
  Index K = 3;
  Index N = 500;
  Index anchors_per_topic = 5;
  double delta_anchor = 1e-3;
  GenerationMode mode = GenerationMode::zipf;
  double a_zipf = 1.0;
  double b_zipf = 2.7;
  std::vector<double> dirichlet_alpha;  // empty means all-ones of length K
  std::uint64_t seed = 0;

  // Throws ConfigError on any invariant violation.
  void validate() const;
  std::vector<double> resolved_alpha() const;

  std::string to_json() const;
  static GenerationConfig from_json(const std::string& text);
};

std::string to_string(GenerationMode mode);
GenerationMode parse_generation_mode(const std::string& name);

/// p x K column-stochastic topic matrix. Anchor rows come first in block
/// layout: rows [k*a, (k+1)*a) are anchors of topic k with entry delta_anchor
/// before normalization. Non-anchor entries follow 1/(rank + b)^a under an
/// independent random rank permutation per column (zipf) or Uniform(0,1).
Matrix generate_topic_matrix(const GenerationConfig& cfg);

/// K x n, columns i.i.d. Dirichlet(alpha) via normalized Gamma draws.
Matrix generate_weights(const GenerationConfig& cfg);

/// Draws column i as Multinomial(N, (AW)_{*i}). Each document uses its own
/// generator derived from (seed, i), so the result does not depend on the
/// thread count.
CorpusMatrix sample_corpus(const Matrix& a, const Matrix& w, Index doc_len, std::uint64_t seed);

struct SyntheticCorpus {
  Matrix a;
  Matrix w;
  CorpusMatrix corpus;
};

// Convenience: A, W and D from one config, with independent child seeds.
SyntheticCorpus generate_corpus(const GenerationConfig& cfg);

struct SparsityReport {
  double sigma_k_a_over_sqrt_k = 0.0;
  double sigma_k_sigma_w = 0.0;
  double min_ata_entry = 0.0;
  std::map<double, double> s_of_q;
  std::vector<Index> anchor_rows;
};

/// sigma_K(A)/sqrt(K), sigma_K(n^{-1} W W^T), min entry of A^T A, and
/// s(q) = max_k max_j j * A_{(j)k}^q from sorted columns.
SparsityReport assumption_diagnostics(const Matrix& a, const Matrix& w, const std::vector<double>& q_grid);

}  // namespace tts
