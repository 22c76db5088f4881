#include "doctest.h"
#include "support.hpp"

#include "tts/synth.hpp"

#include <cmath>

using namespace tts;
using namespace tts::testing;

TEST_CASE("one anchor per topic with p = K gives the identity") {
  GenerationConfig cfg;
  cfg.p = 4;
  cfg.K = 4;
  cfg.anchors_per_topic = 1;
  cfg.delta_anchor = 0.37;
  Matrix a = generate_topic_matrix(cfg);
  CHECK(a.isApprox(Matrix::Identity(4, 4), 0.0));
}

TEST_CASE("zipf column before the rank shuffle") {
  GenerationConfig cfg;
  cfg.p = 4;
  cfg.K = 1;
  cfg.anchors_per_topic = 0;
  Matrix a = generate_topic_matrix(cfg);
  std::vector<double> got(a.data(), a.data() + 4), want{1 / 3.7, 1 / 4.7, 1 / 5.7, 1 / 6.7};
  double total = 0.0;
  for (double v : want) total += v;
  for (double& v : want) v /= total;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  CHECK(a.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("topic matrix invariants over random configs") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    GenerationConfig cfg;
    cfg.K = uniform_index(rng, 1, 6);
    cfg.anchors_per_topic = uniform_index(rng, 0, 5);
    cfg.p = cfg.K * cfg.anchors_per_topic + uniform_index(rng, 1, 200);
    cfg.delta_anchor = uniform(rng, 1e-4, 0.1);
    cfg.mode = uniform(rng) < 0.5 ? GenerationMode::zipf : GenerationMode::uniform;
    cfg.seed = rng();
    Matrix a = generate_topic_matrix(cfg);
    CHECK((a.array() >= 0.0).all());
    for (Index k = 0; k < cfg.K; ++k) CHECK(std::abs(a.col(k).sum() - 1.0) <= 1e-12);
    for (Index j = 0; j < cfg.K * cfg.anchors_per_topic; ++j) {
      CHECK((a.row(j).array() != 0.0).count() == 1);
      CHECK(a(j, j / cfg.anchors_per_topic) > 0.0);
    }
    CHECK(generate_topic_matrix(cfg) == a);
  }
}

TEST_CASE("zipf columns differ") {
  GenerationConfig cfg;
  cfg.p = 1000;
  cfg.K = 3;
  Matrix a = generate_topic_matrix(cfg);
  CHECK(a.col(0) != a.col(1));
  CHECK(a.col(1) != a.col(2));
}

TEST_CASE("config validation") {
  GenerationConfig cfg;
  cfg.p = 10;
  cfg.K = 3;
  cfg.anchors_per_topic = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.anchors_per_topic = 2;
  cfg.delta_anchor = 0.6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.delta_anchor = 0.01;
  cfg.dirichlet_alpha = {1.0, 2.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.dirichlet_alpha = {1.0, 2.0, 0.5};
  CHECK_NOTHROW(cfg.validate());
  auto back = GenerationConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK_THROWS_AS(GenerationConfig::from_json("{\"p\": \"x\"}"), ConfigError);
}

TEST_CASE("dirichlet weights") {
  GenerationConfig cfg;
  cfg.K = 1;
  cfg.n = 7;
  CHECK(generate_weights(cfg) == Matrix::Ones(1, 7));

  cfg.K = 3;
  cfg.n = 10000;
  cfg.seed = 4;
  Matrix w = generate_weights(cfg);
  for (Index i = 0; i < cfg.n; ++i) CHECK(std::abs(w.col(i).sum() - 1.0) <= 1e-12);
  Vector mean = w.rowwise().mean();
  for (Index k = 0; k < 3; ++k) CHECK(std::abs(mean[k] - 1.0 / 3.0) <= 0.02);
  CHECK(generate_weights(cfg) == w);
}

TEST_CASE("multinomial sampling") {
  SUBCASE("identity topics put every token on word 1") {
    Matrix a = Matrix::Identity(3, 3);
    Matrix w = Matrix::Zero(3, 5);
    w.row(0).setOnes();
    CorpusMatrix c = sample_corpus(a, w, 50, 1);
    Matrix d = dense_frequencies(c);
    CHECK(d.row(0).sum() == 5.0);
  }
  SUBCASE("concentration at large N") {
    Rng rng(2);
    Matrix a = random_stochastic_columns(rng, 8, 3);
    Matrix w = random_stochastic_columns(rng, 3, 1);
    CorpusMatrix c = sample_corpus(a, w, 1000000, 9);
    CHECK((dense_frequencies(c).col(0) - a * w).lpNorm<1>() <= 0.01);
  }
  SUBCASE("frequency diagonal converges") {
    Rng rng(8);
    Matrix a = random_stochastic_columns(rng, 6, 2);
    Matrix w = random_stochastic_columns(rng, 2, 4);
    CorpusMatrix c = sample_corpus(a, w, 1000000, 3);
    auto d = word_frequency_diag(c);
    Vector target = (a * w).rowwise().mean();
    for (Index j = 0; j < 6; ++j) CHECK(std::abs(d.m[j] - target[j]) <= 0.005);
  }
  SUBCASE("replicate mean within three standard errors") {
    Rng rng(12);
    Matrix a = random_stochastic_columns(rng, 5, 3);
    Matrix w = random_stochastic_columns(rng, 3, 4);
    const Index len = 40;
    const int reps = 500;
    Matrix sum = Matrix::Zero(5, 4);
    for (int r = 0; r < reps; ++r) sum += dense_frequencies(sample_corpus(a, w, len, 1000 + r));
    Matrix d0 = a * w;
    Matrix mean = sum / reps;
    for (Index j = 0; j < 5; ++j)
      for (Index i = 0; i < 4; ++i) {
        const double se = std::sqrt(d0(j, i) * (1.0 - d0(j, i)) / static_cast<double>(len) / reps);
        CHECK(std::abs(mean(j, i) - d0(j, i)) <= 3.0 * se + 1e-12);
      }
  }
  SUBCASE("columns of AW must be stochastic") {
    Matrix a = Matrix::Constant(2, 1, 0.7);
    Matrix w = Matrix::Ones(1, 1);
    CHECK_THROWS_AS(sample_corpus(a, w, 10, 0), ConfigError);
  }
  SUBCASE("thread count does not change the draw") {
    GenerationConfig cfg;
    cfg.p = 300;
    cfg.n = 64;
    cfg.seed = 77;
    const int before = thread_count();
    set_thread_count(1);
    auto one = generate_corpus(cfg);
    set_thread_count(4);
    auto four = generate_corpus(cfg);
    set_thread_count(before);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> x = one.corpus.counts(), y = four.corpus.counts();
    CHECK(x == y);
  }
}

TEST_CASE("assumption diagnostics") {
  SUBCASE("identity") {
    const Index k = 4;
    Matrix a = Matrix::Identity(k, k);
    Matrix w = Matrix::Constant(k, 3, 1.0 / k);
    auto r = assumption_diagnostics(a, w, {0.3, 0.5, 0.9});
    CHECK(r.sigma_k_a_over_sqrt_k == doctest::Approx(1.0 / std::sqrt(4.0)));
    for (auto [q, s] : r.s_of_q) CHECK(s == doctest::Approx(1.0));
    CHECK(r.anchor_rows.size() == 4);
  }
  SUBCASE("s(q) equals the exhaustive max") {
    GenerationConfig cfg;
    cfg.p = 60;
    cfg.K = 2;
    cfg.anchors_per_topic = 0;
    Matrix a = generate_topic_matrix(cfg);
    auto r = assumption_diagnostics(a, generate_weights(cfg), {0.5});
    double oracle = 0.0;
    for (Index k = 0; k < 2; ++k) {
      for (Index j = 0; j < a.rows(); ++j) {
        // rank of entry j within its column, 1-based, by counting larger entries
        Index rank = 1;
        for (Index t = 0; t < a.rows(); ++t) rank += a(t, k) > a(j, k);
        oracle = std::max(oracle, static_cast<double>(rank) * std::sqrt(a(j, k)));
      }
    }
    CHECK(r.s_of_q.at(0.5) == doctest::Approx(oracle).epsilon(1e-12));
  }
  SUBCASE("duplicate columns have sigma_K = 0") {
    Rng rng(1);
    Matrix a(5, 2);
    a.col(0) = random_simplex(rng, 5);
    a.col(1) = a.col(0);
    auto r = assumption_diagnostics(a, Matrix::Constant(2, 4, 0.5), {0.5});
    CHECK(r.sigma_k_a_over_sqrt_k <= 1e-12);
  }
}
