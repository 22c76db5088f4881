#include "doctest.h"
#include "support.hpp"

#include "tts/kernels.hpp"

using namespace tts;
using namespace tts::testing;

namespace {

GramOperator random_operator(Rng& rng, Index rows, Index cols) {
  Matrix f = Matrix::NullaryExpr(rows, cols, [&] { return uniform(rng) < 0.3 ? uniform(rng) : 0.0; });
  Vector shift = Vector::NullaryExpr(rows, [&] { return uniform(rng); });
  return GramOperator(f.sparseView(), shift);
}

struct ThreadScope {
  int saved = thread_count();
  explicit ThreadScope(int t) { set_thread_count(t); }
  ~ThreadScope() { set_thread_count(saved); }
};

}  // namespace

TEST_CASE("gram operator matches the dense product") {
  Rng rng(1);
  GramOperator op = random_operator(rng, 40, 25);
  Matrix f = Matrix(op.by_col);
  Matrix want = f * f.transpose();
  want.diagonal() -= op.shift;
  CHECK((kernels::serial::gram_dense(op) - want).cwiseAbs().maxCoeff() <= 1e-13);
  Vector x = Vector::NullaryExpr(40, [&] { return uniform(rng, -1.0, 1.0); });
  Vector y;
  kernels::serial::gram_apply(op, x, y);
  CHECK((y - want * x).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("dense gram is exactly symmetric") {
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    Matrix g = kernels::omp::gram_dense(random_operator(rng, 60, 30));
    CHECK(g == g.transpose());
  }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  Rng rng(3);
  GramOperator op = random_operator(rng, 300, 120);
  Vector x = Vector::NullaryExpr(300, [&] { return uniform(rng, -1.0, 1.0); });

  Matrix points = Matrix::NullaryExpr(500, 3, [&] { return uniform(rng, -1.0, 1.0); });
  Matrix v = Matrix::NullaryExpr(4, 3, [&] { return uniform(rng, -1.0, 1.0); });
  Matrix cloud = Matrix::NullaryExpr(120, 3, [&] { return uniform(rng, -1.0, 1.0); });

  Matrix a = random_stochastic_columns(rng, 80, 4);
  Matrix w = random_stochastic_columns(rng, 4, 200);
  SparseReal d = Matrix(a * w).sparseView();
  Vector rw = Vector::NullaryExpr(80, [&] { return uniform(rng) < 0.1 ? 0.0 : uniform(rng, 1.0, 5.0); });

  Vector ys;
  kernels::serial::gram_apply(op, x, ys);
  const Matrix gs = kernels::serial::gram_dense(op);
  Matrix ws, ws2, pis, whs;
  Vector ds, ds2;
  std::vector<int> sts;
  kernels::serial::simplex_ls_rows(points, v, ws, ds);
  kernels::serial::simplex_ls_rows(v, cloud, ws2, ds2);
  kernels::serial::barycentric_rows(points, v, pis);
  kernels::serial::weight_regression(d, a, rw, whs, sts);

  for (int threads : {1, 2, 4, 7}) {
    ThreadScope scope(threads);
    Vector yo;
    kernels::omp::gram_apply(op, x, yo);
    CHECK(yo == ys);
    CHECK(kernels::omp::gram_dense(op) == gs);
    Matrix wo, wo2, pio, who;
    Vector dO, dO2;
    std::vector<int> sto;
    kernels::omp::simplex_ls_rows(points, v, wo, dO);
    kernels::omp::simplex_ls_rows(v, cloud, wo2, dO2);
    kernels::omp::barycentric_rows(points, v, pio);
    kernels::omp::weight_regression(d, a, rw, who, sto);
    CHECK(wo == ws);
    CHECK(dO == ds);
    CHECK(wo2 == ws2);
    CHECK(dO2 == ds2);
    CHECK(pio == pis);
    CHECK(who == whs);
    CHECK(sto == sts);
  }
}

TEST_CASE("barycentric rows invert the forward map") {
  Rng rng(4);
  const Index k = 5;
  Matrix v = Matrix::NullaryExpr(k, k - 1, [&] { return uniform(rng, -1.0, 1.0); });
  Matrix pi = random_stochastic_columns(rng, k, 50).transpose();
  Matrix points = pi * v;
  Matrix back;
  kernels::serial::barycentric_rows(points, v, back);
  CHECK((back - pi).cwiseAbs().maxCoeff() <= 1e-10);
}
