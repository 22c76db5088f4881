#pragma once

#include "tts/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tts {

enum class CorpusFormat { triplet, dense_csv };

CorpusFormat parse_corpus_format(const std::string& name);

/// Row-major column-stochastic frequency view of a corpus: D_ji = count_ji / N_i.
/// The noiseless entry points build this directly from an exact D_0 so that
/// oracle tests do not need gigantic document lengths.
struct FrequencyMatrix {
  SparseReal d;          // p x n, columns sum to 1
  double avg_len = 0.0;  // N, mean document length

  Index p() const { return d.rows(); }
  Index n() const { return d.cols(); }

  static FrequencyMatrix from_dense(const Matrix& d0, double avg_len);
};

struct FrequencyDiagonal {
  std::vector<double> m;  // m_j = n^{-1} sum_i D_ji
  Index n_docs = 0;
  double avg_len = 0.0;
};

/// p x n word-by-document count matrix. Immutable once built.
class CorpusMatrix {
 public:
  CorpusMatrix() = default;

  // Does not validate; see validate_corpus().
  CorpusMatrix(SparseCounts counts, std::vector<std::int64_t> doc_lengths,
               std::vector<std::string> vocab = {});

  // Computes doc_lengths as column sums and validates. Throws ConfigError.
  static CorpusMatrix from_counts(SparseCounts counts, std::vector<std::string> vocab = {});
  static CorpusMatrix from_dense(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts);

  Index p() const { return counts_.rows(); }
  Index n() const { return counts_.cols(); }
  const SparseCounts& counts() const { return counts_; }
  const std::vector<std::int64_t>& doc_lengths() const { return doc_lengths_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  double avg_len() const;

  FrequencyMatrix frequencies() const;

  // Sub-corpus made of the listed documents, in the given order.
  CorpusMatrix select_documents(const std::vector<Index>& docs) const;

 private:
  SparseCounts counts_;
  std::vector<std::int64_t> doc_lengths_;
  std::vector<std::string> vocab_;
};

FrequencyDiagonal word_frequency_diag(const FrequencyMatrix& freq);
FrequencyDiagonal word_frequency_diag(const CorpusMatrix& corpus);

struct ValidationReport {
  Index p = 0;
  Index n = 0;
  std::int64_t min_len = 0;
  double mean_len = 0.0;
  std::int64_t max_len = 0;
  Index zero_rows = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  std::string summary() const;
};

ValidationReport validate_corpus(const CorpusMatrix& corpus);

CorpusMatrix load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(const std::filesystem::path& path, const CorpusMatrix& corpus, CorpusFormat format);

std::vector<std::string> load_vocab(const std::filesystem::path& path);

// Plain numeric CSV, no header. Used for A, W and a_hat files.
Matrix read_dense_csv(const std::filesystem::path& path);
void write_dense_csv(const std::filesystem::path& path, const Matrix& m);

}  // namespace tts
