#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tts {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseCounts = Eigen::SparseMatrix<std::int64_t, Eigen::ColMajor, Index>;
using SparseReal = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
using SparseRealRows = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

// Bad input or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure in an input file; carries the 1-based line number.
class FormatError : public ConfigError {
 public:
  FormatError(const std::string& what, std::size_t line)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Non-convergence, singular systems, degenerate spectra. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer. Used to derive independent child seeds from a
/// master seed (per trial, per document, per restart).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Number of OpenMP threads configured for the process; 1 without OpenMP.
int thread_count();
void set_thread_count(int threads);

}  // namespace tts
