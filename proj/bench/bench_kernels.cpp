// Serial reference kernels against their OpenMP versions.
// The second benchmark argument is the thread count for the omp runs.

#include "tts/kernels.hpp"
#include "tts/score.hpp"
#include "tts/spectral.hpp"
#include "tts/synth.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tts;

namespace {

struct Data {
  GramOperator op;
  Vector x;
  Matrix points, vertices;
  SparseReal d;
  Matrix design;
  Vector row_weight;
};

const Data& data() {
  static const Data s = [] {
    Data s;
    GenerationConfig g;
    g.p = 3000;
    g.n = 1000;
    g.N = 500;
    g.seed = 3;
    auto syn = generate_corpus(g);
    auto j = threshold_vocabulary(syn.corpus, 0.005);
    s.op = build_gram(syn.corpus, j).op;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    s.x = Vector::NullaryExpr(s.op.dim(), [&] { return z(rng); });
    s.points = Matrix::NullaryExpr(4000, 2, [&] { return 0.3 * z(rng); });
    s.vertices.resize(3, 2);
    s.vertices << 0.0, 1.0, -0.87, -0.5, 0.87, -0.5;
    s.d = syn.corpus.frequencies().d;
    s.design = syn.a;
    auto diag = word_frequency_diag(syn.corpus);
    s.row_weight = Vector::Zero(g.p);
    for (Index w = 0; w < g.p; ++w)
      if (diag.m[w] > 0.0) s.row_weight[w] = 1.0 / std::sqrt(diag.m[w]);
    return s;
  }();
  return s;
}

void with_threads(benchmark::State& st) { set_thread_count(static_cast<int>(st.range(0))); }

void BM_gram_apply_serial(benchmark::State& st) {
  const auto& s = data();
  Vector y;
  for (auto _ : st) {
    kernels::serial::gram_apply(s.op, s.x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
void BM_gram_apply_omp(benchmark::State& st) {
  with_threads(st);
  const auto& s = data();
  Vector y;
  for (auto _ : st) {
    kernels::omp::gram_apply(s.op, s.x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_gram_dense_serial(benchmark::State& st) {
  const auto& s = data();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::gram_dense(s.op).data());
}
void BM_gram_dense_omp(benchmark::State& st) {
  with_threads(st);
  const auto& s = data();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::omp::gram_dense(s.op).data());
}

void BM_simplex_rows_serial(benchmark::State& st) {
  const auto& s = data();
  Matrix w;
  Vector d;
  for (auto _ : st) {
    kernels::serial::simplex_ls_rows(s.points, s.vertices, w, d);
    benchmark::DoNotOptimize(d.data());
  }
}
void BM_simplex_rows_omp(benchmark::State& st) {
  with_threads(st);
  const auto& s = data();
  Matrix w;
  Vector d;
  for (auto _ : st) {
    kernels::omp::simplex_ls_rows(s.points, s.vertices, w, d);
    benchmark::DoNotOptimize(d.data());
  }
}

void BM_weight_regression_serial(benchmark::State& st) {
  const auto& s = data();
  Matrix w;
  std::vector<int> status;
  for (auto _ : st) {
    kernels::serial::weight_regression(s.d, s.design, s.row_weight, w, status);
    benchmark::DoNotOptimize(w.data());
  }
}
void BM_weight_regression_omp(benchmark::State& st) {
  with_threads(st);
  const auto& s = data();
  Matrix w;
  std::vector<int> status;
  for (auto _ : st) {
    kernels::omp::weight_regression(s.d, s.design, s.row_weight, w, status);
    benchmark::DoNotOptimize(w.data());
  }
}

}  // namespace

BENCHMARK(BM_gram_apply_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_gram_apply_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_gram_dense_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_dense_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simplex_rows_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simplex_rows_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weight_regression_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weight_regression_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
