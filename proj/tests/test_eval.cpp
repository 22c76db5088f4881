#include "doctest.h"
#include "support.hpp"

#include "tts/eval.hpp"

#include <cmath>

using namespace tts;
using namespace tts::testing;

namespace {

double brute_l1(const Matrix& a, const Matrix& b) {
  const Index k = a.cols();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& perm : all_permutations(k)) {
    double s = 0.0;
    for (Index c = 0; c < k; ++c) s += (a.col(perm[c]) - b.col(c)).cwiseAbs().sum();
    best = std::min(best, s / k);
  }
  return best;
}

double cosine(const Vector& x, const Vector& y) { return x.dot(y) / (x.norm() * y.norm()); }

double brute_eta(const Matrix& a, const Matrix& b) {
  const Index k = a.cols();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& perm : all_permutations(k)) {
    double s = 0.0;
    for (Index c = 0; c < k; ++c) s += cosine(a.col(c), b.col(perm[c]));
    best = std::max(best, s / k);
  }
  return best;
}

double brute_label_d(const Matrix& w, const Matrix& y) {
  const Index k = w.rows();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& perm : all_permutations(k)) {
    double s = 0.0;
    for (Index t = 0; t < k; ++t) s += (w.row(perm[t]) - y.row(t)).cwiseAbs().sum();
    best = std::min(best, s / static_cast<double>(w.cols() * k));
  }
  return best;
}

Matrix shift_columns(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (Index c = 0; c < a.cols(); ++c) out.col((c + 1) % a.cols()) = a.col(c);
  return out;
}

Matrix one_hot_labels(Rng& rng, Index k, Index n) {
  Matrix y = Matrix::Zero(k, n);
  for (Index i = 0; i < n; ++i) y(i < k ? i : uniform_index(rng, 0, k - 1), i) = 1.0;
  return y;
}

}  // namespace

TEST_CASE("l1 loss basics") {
  Rng rng(1);
  Matrix a = random_stochastic_columns(rng, 20, 4);
  CHECK(l1_permuted_loss(a, a) == 0.0);
  CHECK(l1_permuted_loss(shift_columns(a), a) == 0.0);
  CHECK_THROWS_AS(l1_permuted_loss(a, Matrix::Zero(20, 3)), ConfigError);
}

TEST_CASE("assignment metrics equal factorial brute force") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const Index k = uniform_index(rng, 1, 6), p = uniform_index(rng, 3, 30);
    Matrix a = random_stochastic_columns(rng, p, k), b = random_stochastic_columns(rng, p, k);
    CHECK(std::abs(l1_permuted_loss(a, b) - brute_l1(a, b)) <= 1e-12);
    CHECK(std::abs(topic_resolution(a, b) - brute_eta(a, b)) <= 1e-12);
    auto al = l1_alignment(a, b);
    double sum = 0.0;
    for (double s : al.per_topic_scores) sum += s;
    CHECK(al.aggregate == doctest::Approx(sum / k).epsilon(1e-14));
    std::vector<Index> sorted = al.permutation;
    std::sort(sorted.begin(), sorted.end());
    for (Index c = 0; c < k; ++c) CHECK(sorted[c] == c);
  }
}

TEST_CASE("l1 loss is a pseudometric up to permutation") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Index k = uniform_index(rng, 1, 5), p = uniform_index(rng, 3, 20);
    Matrix a = random_stochastic_columns(rng, p, k), b = random_stochastic_columns(rng, p, k),
           c = random_stochastic_columns(rng, p, k);
    CHECK(std::abs(l1_permuted_loss(a, b) - l1_permuted_loss(b, a)) <= 1e-12);
    CHECK(l1_permuted_loss(a, c) <= l1_permuted_loss(a, b) + l1_permuted_loss(b, c) + 1e-12);
    CHECK(l1_permuted_loss(a, b) > 0.0);
  }
}

TEST_CASE("topic resolution range and extremes") {
  Rng rng(4);
  Matrix a = random_stochastic_columns(rng, 15, 3);
  CHECK(topic_resolution(a, a) == doctest::Approx(1.0));
  CHECK(topic_resolution(shift_columns(a), 3.0 * a) == doctest::Approx(1.0));
  Matrix x = Matrix::Zero(6, 3), y = Matrix::Zero(6, 3);
  for (Index c = 0; c < 3; ++c) {
    x(c, c) = 1.0;
    y(3 + c, c) = 1.0;
  }
  CHECK(topic_resolution(x, y) == 0.0);
  for (int t = 0; t < 50; ++t) {
    Matrix u = random_stochastic_columns(rng, 10, 4), v = random_stochastic_columns(rng, 10, 4);
    const double eta = topic_resolution(u, v);
    CHECK(eta >= 0.0);
    CHECK(eta <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(topic_resolution(Matrix::Zero(4, 2), a.topRows(4).leftCols(2)), ConfigError);
}

TEST_CASE("label alignment") {
  Rng rng(5);
  Matrix y = one_hot_labels(rng, 3, 40);
  auto exact = label_alignment(y, y);
  CHECK(exact.aggregate == 0.0);
  for (double s : exact.per_topic_scores) CHECK(s == doctest::Approx(1.0));

  for (Index k : {2, 3, 5}) {
    Matrix lab = one_hot_labels(rng, k, 30);
    Matrix uni = Matrix::Constant(k, 30, 1.0 / k);
    CHECK(label_alignment(uni, lab).aggregate == doctest::Approx(2.0 * (k - 1) / (k * k)).epsilon(1e-12));
  }

  for (int t = 0; t < 20; ++t) {
    Matrix lab = one_hot_labels(rng, 3, 50);
    Matrix w = random_stochastic_columns(rng, 3, 50);
    auto al = label_alignment(w, lab);
    CHECK(std::abs(al.aggregate - brute_label_d(w, lab)) <= 1e-12);
    for (Index k = 0; k < 3; ++k)
      CHECK(al.per_topic_scores[k] ==
            doctest::Approx(cosine(w.row(al.permutation[k]).transpose(), lab.row(k).transpose())));
  }
  CHECK_THROWS_AS(label_alignment(Matrix::Ones(3, 5), Matrix::Zero(3, 5)), ConfigError);
}

TEST_CASE("order statistics") {
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(iqr_of({1.0, 2.0, 3.0, 4.0, 5.0}) == doctest::Approx(2.0));
  CHECK(quantile_of({0.0, 10.0}, 0.3) == doctest::Approx(3.0));
}

TEST_CASE("split-half resolution") {
  GenerationConfig g;
  g.p = 300;
  g.n = 400;
  g.N = 400;
  g.seed = 3;
  auto s = generate_corpus(g);
  FitConfig cfg;
  cfg.k = 3;
  SplitHalfOptions opts;
  opts.n_splits = 4;
  opts.seed = 17;
  auto r1 = split_half_resolution(s.corpus, cfg, opts);
  auto r2 = split_half_resolution(s.corpus, cfg, opts);
  REQUIRE(r1.eta.size() == 4);
  CHECK(r1.completed == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(r1.eta[i].has_value());
    CHECK(*r1.eta[i] == *r2.eta[i]);
    CHECK(*r1.eta[i] > 0.5);
  }
  opts.duplicate_halves = true;
  auto dup = split_half_resolution(s.corpus, cfg, opts);
  for (const auto& e : dup.eta) CHECK(e.value_or(0.0) >= 0.99);

  // Failures are recorded, not thrown.
  cfg.alpha = 1e4;
  auto bad = split_half_resolution(s.corpus, cfg, opts);
  CHECK(bad.completed == 0);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK_FALSE(bad.eta[i].has_value());
    CHECK_FALSE(bad.failures[i].empty());
  }

  GenerationConfig tiny = g;
  tiny.n = 4;
  cfg.alpha = 0.005;
  CHECK_THROWS_AS(split_half_resolution(generate_corpus(tiny).corpus, cfg, opts), ConfigError);
}
