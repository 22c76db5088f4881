#pragma once

// Hand-rolled generators and dense oracles shared by the unit tests.

#include "tts/corpus.hpp"
#include "tts/synth.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace tts::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_index(Rng& rng, Index lo, Index hi) {  // inclusive
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline Vector random_simplex(Rng& rng, Index k) {
  std::exponential_distribution<double> e(1.0);
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = e(rng);
  return v / v.sum();
}

inline Matrix random_stochastic_columns(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) m.col(c) = random_simplex(rng, rows);
  return m;
}

// Separable A: the first anchors*K rows are anchors in block layout, the rest
// random positive entries; columns normalized. W columns on the simplex.
struct Instance {
  Matrix a;
  Matrix w;
};

inline Instance separable_instance(Rng& rng, Index p, Index k, Index n, Index anchors = 1) {
  Instance s;
  s.a = Matrix::Zero(p, k);
  for (Index t = 0; t < k; ++t)
    for (Index r = 0; r < anchors; ++r) s.a(t * anchors + r, t) = uniform(rng, 0.02, 0.1);
  for (Index j = anchors * k; j < p; ++j)
    for (Index t = 0; t < k; ++t) s.a(j, t) = uniform(rng, 0.0, 1.0) / static_cast<double>(p);
  for (Index t = 0; t < k; ++t) s.a.col(t) /= s.a.col(t).sum();
  s.w = random_stochastic_columns(rng, k, n);
  return s;
}

inline CorpusMatrix random_corpus(Rng& rng, Index p, Index n, std::int64_t max_count = 5, double density = 0.4) {
  std::vector<Eigen::Triplet<std::int64_t, Index>> trip;
  for (Index i = 0; i < n; ++i) {
    bool any = false;
    for (Index j = 0; j < p; ++j) {
      if (uniform(rng) < density) {
        trip.emplace_back(j, i, uniform_index(rng, 1, max_count));
        any = true;
      }
    }
    if (!any) trip.emplace_back(uniform_index(rng, 0, p - 1), i, 1);
  }
  SparseCounts c(p, n);
  c.setFromTriplets(trip.begin(), trip.end());
  return CorpusMatrix::from_counts(std::move(c));
}

inline Matrix dense_frequencies(const CorpusMatrix& c) {
  Matrix d = Matrix(c.counts().cast<double>());
  for (Index i = 0; i < c.n(); ++i) d.col(i) /= static_cast<double>(c.doc_lengths()[i]);
  return d;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tts_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Every permutation of [0, k) in lexicographic order.
inline std::vector<std::vector<Index>> all_permutations(Index k) {
  std::vector<Index> perm(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) perm[i] = i;
  std::vector<std::vector<Index>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace tts::testing
