#include "tts/estimator.hpp"

#include "tts/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <type_traits>

namespace tts {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void FitConfig::validate() const {
  if (k && *k < 2) throw ConfigError("K must be at least 2 (SCORE needs a second eigenvector)");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (g_n_mode == GnMode::fixed && !(g_n_value > 0.0)) throw ConfigError("fixed g_n must be positive");
  if (spectrum_size < 0) throw ConfigError("spectrum size must be non-negative");
}

MixingWeights recover_mixing_weights(const Matrix& points, const Matrix& vertices) {
  const Index k = vertices.rows();
  if (points.cols() != k - 1 || vertices.cols() != k - 1) throw ConfigError("cloud and vertices disagree on K");
  if (simplex_is_degenerate(vertices)) throw NumericalError("degenerate vertex matrix: vertices are affinely dependent");
  MixingWeights out;
  kernels::omp::barycentric_rows(points, vertices, out.pi);
  for (Index j = 0; j < out.pi.rows(); ++j) {
    auto row = out.pi.row(j);
    const double lowest = row.minCoeff();
    if (lowest < 0.0) {
      ++out.clipped_rows;
      out.max_negative = std::max(out.max_negative, -lowest);
      row = row.cwiseMax(0.0);
    }
    const double total = row.sum();
    if (total > 0.0) {
      row /= total;
    } else {
      Index nearest = 0;
      (vertices.rowwise() - points.row(j)).rowwise().squaredNorm().minCoeff(&nearest);
      row.setZero();
      row[nearest] = 1.0;
      ++out.fallback_rows;
    }
  }
  return out;
}

MixingWeights recover_mixing_weights(const PointCloud& cloud, const SimplexVertices& vertices) {
  return recover_mixing_weights(cloud.points, vertices.v);
}

Matrix assemble_topic_matrix(const Matrix& pi, const Vector& xi1, const std::vector<Index>& word_ids, Index p) {
  if (pi.rows() != xi1.size() || static_cast<Index>(word_ids.size()) != pi.rows())
    throw ConfigError("assemble: Pi, xi1 and word ids have different lengths");
  if ((xi1.array() <= 0.0).any()) throw ConfigError("assemble: xi1 must be strictly positive");
  const Index k = pi.cols();
  Matrix a = Matrix::Zero(p, k);
  for (Index r = 0; r < pi.rows(); ++r) {
    if (word_ids[r] < 0 || word_ids[r] >= p) throw ConfigError("assemble: word id out of range");
    a.row(word_ids[r]) = xi1[r] * pi.row(r);
  }
  for (Index c = 0; c < k; ++c) {
    const double total = a.col(c).sum();
    if (!(total > 0.0)) throw NumericalError("topic " + std::to_string(c + 1) + " received no mass");
    a.col(c) /= total;
  }
  return a;
}

SimplexVertices hunt_vertices(const PointCloud& cloud, Index k, const FitConfig& cfg) {
  switch (cfg.vh) {
    case VertexMethod::sp: return successive_projection(cloud, k);
    case VertexMethod::svs: {
      SvsConfig s = cfg.svs;
      s.seed = child_seed(cfg.seed, 11);
      return sketched_vertex_search(cloud, k, s);
    }
    case VertexMethod::aa: {
      AAConfig a = cfg.aa;
      a.seed = child_seed(cfg.seed, 12);
      return archetype_analysis(cloud, k, a);
    }
  }
  throw ConfigError("unknown vertex hunter");
}

namespace {

// Shared tail of every SCORE-type pipeline: cloud -> vertices -> Pi -> A.
void finish_fit(FitResult& r, const SpectralBundle& bundle, const std::vector<Index>& rows, Index p,
                const FitConfig& cfg, const Vector* reweight) {
  auto t0 = Clock::now();
  r.cloud = score_point_cloud(bundle, rows);
  r.diagnostics.dropped_rows = static_cast<Index>(r.cloud.dropped.size());
  if (!r.cloud.dropped.empty())
    r.diagnostics.warnings.push_back(std::to_string(r.cloud.dropped.size()) +
                                     " words have a non-positive leading eigenvector entry; their rows are zero");
  r.diagnostics.stage_seconds["score"] = seconds_since(t0);

  t0 = Clock::now();
  r.vertices = hunt_vertices(r.cloud, r.k_used, cfg);
  r.diagnostics.stage_seconds["vertex_hunting"] = seconds_since(t0);

  t0 = Clock::now();
  MixingWeights mw = recover_mixing_weights(r.cloud, r.vertices);
  r.pi_hat = std::move(mw.pi);
  r.diagnostics.clipped_rows = mw.clipped_rows;
  r.diagnostics.fallback_rows = mw.fallback_rows;
  r.diagnostics.max_negative = mw.max_negative;
  if (mw.fallback_rows > 0)
    r.diagnostics.warnings.push_back(std::to_string(mw.fallback_rows) +
                                     " rows had every barycentric weight negative; assigned to the nearest vertex");
  Vector weight = r.cloud.xi1;
  if (reweight) {
    for (Index a = 0; a < weight.size(); ++a) weight[a] *= (*reweight)[a];
  }
  r.a_hat = assemble_topic_matrix(r.pi_hat, weight, r.cloud.word_ids, p);
  r.diagnostics.stage_seconds["assemble"] = seconds_since(t0);
}

template <class Input>
FitResult fit_tts_impl(const Input& input, const FitConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  FitResult r;

  auto t0 = Clock::now();
  const Index min_size = cfg.k ? *cfg.k : 2;
  r.j_set = threshold_vocabulary(input, cfg.alpha, min_size);
  r.diagnostics.removed_fraction = r.j_set.removed_fraction;
  r.diagnostics.j_size = r.j_set.size();
  r.diagnostics.stage_seconds["threshold"] = seconds_since(t0);

  t0 = Clock::now();
  GramBlock block;
  if constexpr (std::is_same_v<Input, CorpusMatrix>) {
    block = build_gram(input, r.j_set);
  } else {
    block = build_gram(input, r.j_set.indices);
  }
  r.diagnostics.stage_seconds["gram"] = seconds_since(t0);

  t0 = Clock::now();
  r.diagnostics.g_n = cfg.g_n_mode == GnMode::fixed ? cfg.g_n_value : default_g_n(block);
  if (cfg.k) {
    r.k_used = *cfg.k;
  } else {
    const Index kh = estimate_k_eigen(block, r.diagnostics.g_n, cfg.eigen);
    r.diagnostics.k_eigen = kh;
    if (kh < 2)
      throw ConfigError("estimated K=" + std::to_string(kh) + " is below 2; inspect the scree plot and pass --k");
    r.k_used = kh;
  }
  if (r.k_used > r.j_set.size())
    throw ConfigError("K=" + std::to_string(r.k_used) + " exceeds |J|=" + std::to_string(r.j_set.size()) +
                      "; use a smaller alpha");
  const Index want = std::min(block.dim(), std::max(r.k_used, cfg.spectrum_size));
  SpectralBundle full = top_eigenpairs(block, want, cfg.eigen);
  r.spectrum = full.eigenvalues.head(std::min(want, std::max<Index>(cfg.spectrum_size, 0)));
  SpectralBundle bundle;
  bundle.eigenvalues = full.eigenvalues.head(r.k_used);
  bundle.xi = full.xi.leftCols(r.k_used);
  bundle.dropped_rows = full.dropped_rows;
  bundle.xi1_positive = full.xi1_positive;
  r.diagnostics.stage_seconds["eigen"] = seconds_since(t0);

  finish_fit(r, bundle, r.j_set.indices, block.p, cfg, nullptr);
  r.diagnostics.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace

FitResult fit_tts(const CorpusMatrix& corpus, const FitConfig& cfg) { return fit_tts_impl(corpus, cfg); }

FitResult fit_tts(const FrequencyMatrix& freq, const FitConfig& cfg) { return fit_tts_impl(freq, cfg); }

OracleResult fit_oracle(const Matrix& a, const Matrix& w, const std::vector<Index>& j, const FitConfig& cfg) {
  if (a.cols() != w.rows()) throw ConfigError("A and W dimensions are inconsistent");
  const Index k = a.cols();
  if (k < 2) throw ConfigError("oracle procedure needs K >= 2");
  if (j.empty()) throw ConfigError("empty word set");
  Matrix dj(static_cast<Index>(j.size()), w.cols());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r] < 0 || j[r] >= a.rows()) throw ConfigError("word index out of range");
    dj.row(static_cast<Index>(r)) = a.row(j[r]) * w;
  }
  Eigen::BDCSVD<Matrix> svd(dj, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (sv.size() < k || !(sv[k - 1] > 1e-12 * sv[0])) throw NumericalError("rank of [D_0]_J is below K");
  SpectralBundle b;
  b.eigenvalues = sv.head(k);
  b.xi = svd.matrixU().leftCols(k);
  fix_eigenvector_signs(b.xi);

  OracleResult out;
  out.cloud = score_point_cloud(b, j);
  out.vertices = hunt_vertices(out.cloud, k, cfg);
  out.pi = recover_mixing_weights(out.cloud, out.vertices);
  out.a_tilde = assemble_topic_matrix(out.pi.pi, out.cloud.xi1, out.cloud.word_ids, a.rows());
  return out;
}

FitResult fit_topic_score(const CorpusMatrix& corpus, Index k, const FitConfig& cfg) {
  if (k < 2) throw ConfigError("Topic-SCORE needs K >= 2");
  const auto start = Clock::now();
  FitResult r;
  r.k_used = k;
  const FrequencyDiagonal diag = word_frequency_diag(corpus);
  std::vector<Index> kept;
  for (Index j = 0; j < corpus.p(); ++j)
    if (diag.m[j] > 0.0) kept.push_back(j);
  if (static_cast<Index>(kept.size()) < corpus.p())
    r.diagnostics.warnings.push_back(std::to_string(corpus.p() - static_cast<Index>(kept.size())) +
                                     " words never occur and were dropped before normalization");
  if (static_cast<Index>(kept.size()) < k) throw ConfigError("fewer than K words occur in the corpus");
  r.j_set.p = corpus.p();
  r.j_set.indices = kept;
  r.j_set.removed_fraction = 1.0 - static_cast<double>(kept.size()) / static_cast<double>(corpus.p());
  r.diagnostics.removed_fraction = r.j_set.removed_fraction;
  r.diagnostics.j_size = r.j_set.size();

  SparseReal y = frequency_rows(corpus, kept);
  Vector inv_sqrt(static_cast<Index>(kept.size())), sqrt_m(static_cast<Index>(kept.size()));
  for (std::size_t a = 0; a < kept.size(); ++a) {
    sqrt_m[a] = std::sqrt(diag.m[kept[a]]);
    inv_sqrt[a] = 1.0 / sqrt_m[a];
  }
  y = inv_sqrt.asDiagonal() * y;
  GramOperator op(std::move(y), Vector());
  const Index want = std::min(op.dim(), std::max(k, cfg.spectrum_size));
  EigenResult er = operator_top_eigenpairs(op, want, cfg.eigen);
  r.spectrum = er.values;
  SpectralBundle b;
  b.eigenvalues = er.values.head(k);
  b.xi = er.vectors.leftCols(k);
  fix_eigenvector_signs(b.xi);

  // Cloud rows follow the kept-word order; map the reweighting onto them.
  PointCloud probe = score_point_cloud(b, kept);
  Vector rw(probe.size());
  std::size_t cursor = 0;
  for (Index a = 0; a < probe.size(); ++a) {
    while (kept[cursor] != probe.word_ids[a]) ++cursor;
    rw[a] = sqrt_m[static_cast<Index>(cursor)];
  }
  finish_fit(r, b, kept, corpus.p(), cfg, &rw);
  r.diagnostics.wall_seconds = seconds_since(start);
  return r;
}

namespace {

void box_regression(const SparseReal& d, const Matrix& design, const Vector& row_weight, Matrix& w_hat,
                    std::vector<int>& status) {
  const Index k = design.cols();
  const Matrix scaled = row_weight.asDiagonal() * design;
  const Matrix q = scaled.transpose() * scaled;
  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  const bool degenerate = !(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top;
  w_hat.resize(k, d.cols());
  status.assign(static_cast<std::size_t>(d.cols()), 0);
  const Index n = d.cols();
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    if (degenerate) {
      w_hat.col(i).setConstant(1.0 / static_cast<double>(k));
      status[i] = 1;
      continue;
    }
    Vector c = Vector::Zero(k);
    for (SparseReal::InnerIterator it(d, i); it; ++it) {
      const double rw = row_weight[it.row()];
      if (rw != 0.0) c += (it.value() * rw) * scaled.row(it.row()).transpose();
    }
    // Cyclic coordinate descent on the box; exact per-coordinate minimization.
    Vector x = Vector::Constant(k, 1.0 / static_cast<double>(k));
    bool done = false;
    for (int sweep = 0; sweep < 10000 && !done; ++sweep) {
      double change = 0.0;
      for (Index a = 0; a < k; ++a) {
        const double g = c[a] - q.row(a).dot(x) + q(a, a) * x[a];
        const double nx = std::clamp(g / q(a, a), 0.0, 1.0);
        change = std::max(change, std::abs(nx - x[a]));
        x[a] = nx;
      }
      done = change <= 1e-15;
    }
    w_hat.col(i) = x;
    status[i] = done ? 0 : 2;
  }
}

WeightEstimate weights_impl(const SparseReal& d, const FrequencyDiagonal& diag, const Matrix& a_hat, WeightMode mode) {
  const Index p = d.rows();
  if (a_hat.rows() != p) throw ConfigError("A_hat has " + std::to_string(a_hat.rows()) + " rows, corpus has " +
                                           std::to_string(p));
  if (a_hat.cols() < 1) throw ConfigError("A_hat has no columns");
  Vector row_weight = Vector::Zero(p);
  for (Index j = 0; j < p; ++j)
    if (diag.m[j] > 0.0) row_weight[j] = 1.0 / std::sqrt(diag.m[j]);
  WeightEstimate out;
  if (mode == WeightMode::simplex) {
    kernels::omp::weight_regression(d, a_hat, row_weight, out.w_hat, out.status);
  } else {
    box_regression(d, a_hat, row_weight, out.w_hat, out.status);
  }
  for (int s : out.status) out.degenerate_docs += s == 1;
  return out;
}

}  // namespace

WeightEstimate estimate_document_weights(const CorpusMatrix& corpus, const Matrix& a_hat, WeightMode mode) {
  const FrequencyMatrix f = corpus.frequencies();
  return weights_impl(f.d, word_frequency_diag(f), a_hat, mode);
}

WeightEstimate estimate_document_weights(const FrequencyMatrix& freq, const Matrix& a_hat, WeightMode mode) {
  return weights_impl(freq.d, word_frequency_diag(freq), a_hat, mode);
}

}  // namespace tts
