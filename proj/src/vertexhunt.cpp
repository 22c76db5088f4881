#include "tts/vertexhunt.hpp"

#include "tts/assignment.hpp"
#include "tts/kernels.hpp"
#include "tts/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tts {

std::string to_string(VertexMethod method) {
  switch (method) {
    case VertexMethod::sp: return "sp";
    case VertexMethod::svs: return "svs";
    case VertexMethod::aa: return "aa";
  }
  return "sp";
}

VertexMethod parse_vertex_method(const std::string& name) {
  if (name == "sp") return VertexMethod::sp;
  if (name == "svs") return VertexMethod::svs;
  if (name == "aa") return VertexMethod::aa;
  throw ConfigError("unknown vertex hunter '" + name + "' (expected sp, svs or aa)");
}

bool simplex_is_degenerate(const Matrix& v, double tol) {
  const Index k = v.rows();
  if (k == 0 || v.cols() != k - 1) return true;
  Matrix b(k, k);
  b.row(0).setOnes();
  if (k > 1) b.bottomRows(k - 1) = v.transpose();
  Eigen::JacobiSVD<Matrix> svd(b);
  return !(svd.singularValues()[k - 1] >= tol);
}

namespace {

void check_cloud(const Matrix& points, Index k) {
  if (k < 1) throw ConfigError("K must be positive");
  if (points.rows() < k)
    throw ConfigError("point cloud has " + std::to_string(points.rows()) + " points, fewer than K=" + std::to_string(k));
  if (points.cols() != k - 1)
    throw ConfigError("point cloud dimension " + std::to_string(points.cols()) + " does not match K-1");
  if (!points.allFinite()) throw NumericalError("point cloud contains non-finite coordinates");
}

}  // namespace

SimplexVertices successive_projection(const Matrix& points, Index k) {
  check_cloud(points, k);
  const Index m = points.rows();
  Matrix res(m, k);
  res.col(0).setOnes();
  res.rightCols(k - 1) = points;
  SimplexVertices out;
  out.method = VertexMethod::sp;
  out.v.resize(k, k - 1);
  const double first = res.rowwise().squaredNorm().maxCoeff();
  for (Index t = 0; t < k; ++t) {
    Vector norms = res.rowwise().squaredNorm();
    Index best = 0;
    for (Index j = 1; j < m; ++j)
      if (norms[j] > norms[best]) best = j;
    if (!(norms[best] > 1e-20 * first)) out.degenerate = true;
    out.source_rows.push_back(best);
    out.v.row(t) = points.row(best);
    if (norms[best] > 0.0) {
      Vector u = res.row(best).transpose() / std::sqrt(norms[best]);
      Vector proj = res * u;
      res.noalias() -= proj * u.transpose();
    }
  }
  out.iterations = static_cast<int>(k);
  out.degenerate = out.degenerate || simplex_is_degenerate(out.v);
  return out;
}

SimplexVertices successive_projection(const PointCloud& cloud, Index k) { return successive_projection(cloud.points, k); }

Matrix kmeans_centers(const Matrix& points, Index centers, std::uint64_t seed, int iterations) {
  const Index m = points.rows(), d = points.cols();
  if (centers < 1 || centers > m) throw ConfigError("k-means needs 1 <= L <= number of points");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix c(centers, d);
  Vector d2 = Vector::Constant(m, std::numeric_limits<double>::infinity());
  Index pick = static_cast<Index>(unif(rng) * static_cast<double>(m));
  pick = std::min(pick, m - 1);
  for (Index l = 0; l < centers; ++l) {
    c.row(l) = points.row(pick);
    for (Index j = 0; j < m; ++j) d2[j] = std::min(d2[j], (points.row(j) - c.row(l)).squaredNorm());
    if (l + 1 == centers) break;
    const double total = d2.sum();
    if (total > 0.0) {
      const double target = unif(rng) * total;
      double acc = 0.0;
      pick = m - 1;
      for (Index j = 0; j < m; ++j) {
        acc += d2[j];
        if (acc > target && d2[j] > 0.0) {
          pick = j;
          break;
        }
      }
    } else {
      pick = std::min(static_cast<Index>(unif(rng) * static_cast<double>(m)), m - 1);
    }
  }

  std::vector<Index> label(static_cast<std::size_t>(m), -1);
  for (int it = 0; it < iterations; ++it) {
    int changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
    for (Index j = 0; j < m; ++j) {
      Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Index l = 0; l < centers; ++l) {
        const double dist = (points.row(j) - c.row(l)).squaredNorm();
        if (dist < bd) {
          bd = dist;
          best = l;
        }
      }
      if (label[j] != best) {
        label[j] = best;
        ++changed;
      }
    }
    if (changed == 0 && it > 0) break;
    Matrix sum = Matrix::Zero(centers, d);
    std::vector<Index> count(static_cast<std::size_t>(centers), 0);
    for (Index j = 0; j < m; ++j) {
      sum.row(label[j]) += points.row(j);
      ++count[label[j]];
    }
    for (Index l = 0; l < centers; ++l)
      if (count[l] > 0) c.row(l) = sum.row(l) / static_cast<double>(count[l]);
  }
  return c;
}

namespace {

double binomial(Index n, Index k) {
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

SimplexVertices sketched_vertex_search(const Matrix& points, Index k, const SvsConfig& cfg) {
  check_cloud(points, k);
  const Index m = points.rows();
  Index l = cfg.centers > 0 ? cfg.centers : std::min<Index>(10 * k, m);
  if (l < k) throw ConfigError("SVS needs L >= K");
  if (l > m) throw ConfigError("SVS needs at least L=" + std::to_string(l) + " points, cloud has " + std::to_string(m));
  const double subsets = binomial(l, k);
  if (subsets > cfg.subset_budget)
    throw ConfigError("SVS would search C(" + std::to_string(l) + "," + std::to_string(k) + ") = " +
                      std::to_string(static_cast<long long>(subsets)) +
                      " subsets, over the budget; lower --svs-l or use sp/aa");
  const Matrix c = kmeans_centers(points, l, cfg.seed, cfg.kmeans_iterations);

  // Enumerate subsets in lexicographic order.
  std::vector<Index> flat;
  flat.reserve(static_cast<std::size_t>(subsets) * static_cast<std::size_t>(k));
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    flat.insert(flat.end(), idx.begin(), idx.end());
    Index i = k - 1;
    while (i >= 0 && idx[i] == l - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (Index t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  const Index count = static_cast<Index>(flat.size()) / k;
  std::vector<double> score(static_cast<std::size_t>(count));
  std::vector<char> degenerate(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 64)
  for (Index s = 0; s < count; ++s) {
    Matrix v(k, k - 1);
    for (Index t = 0; t < k; ++t) v.row(t) = c.row(flat[s * k + t]);
    degenerate[s] = simplex_is_degenerate(v);
    double worst = 0.0;
    for (Index q = 0; q < l; ++q)
      worst = std::max(worst, simplex_barycentric_ls_nothrow(c.row(q).transpose(), v).sqdist);
    score[s] = worst;
  }
  Index best = -1;
  for (Index s = 0; s < count; ++s) {
    if (best < 0) {
      best = s;
      continue;
    }
    // Non-degenerate simplices win over degenerate ones, then lower score.
    if (degenerate[best] != degenerate[s]) {
      if (!degenerate[s]) best = s;
    } else if (score[s] < score[best]) {
      best = s;
    }
  }
  SimplexVertices out;
  out.method = VertexMethod::svs;
  out.v.resize(k, k - 1);
  for (Index t = 0; t < k; ++t) {
    out.v.row(t) = c.row(flat[best * k + t]);
    out.source_rows.push_back(flat[best * k + t]);
  }
  out.objective = score[best];
  out.degenerate = degenerate[best] != 0;
  return out;
}

SimplexVertices sketched_vertex_search(const PointCloud& cloud, Index k, const SvsConfig& cfg) {
  return sketched_vertex_search(cloud.points, k, cfg);
}

namespace {

struct AAState {
  Matrix pi;       // m x K, cloud rows against V
  Vector d_cloud;  // D(r_j; V)
  Matrix theta;    // K x m, vertices against the cloud
  Vector d_vert;   // D(v_k; R)
};

AAState aa_weights(const Matrix& points, const Matrix& v, const SimplexLsOptions& opts) {
  AAState s;
  kernels::omp::simplex_ls_rows(points, v, s.pi, s.d_cloud, opts);
  kernels::omp::simplex_ls_rows(v, points, s.theta, s.d_vert, opts);
  return s;
}

}  // namespace

double aa_objective(const Matrix& points, const Matrix& v, double lambda) {
  AAState s = aa_weights(points, v, {});
  return s.d_cloud.sum() + lambda * s.d_vert.sum();
}

SimplexVertices archetype_fit(const Matrix& points, const Matrix& start, double lambda, const AAConfig& cfg) {
  if (!(lambda > 0.0)) throw ConfigError("AA lambda must be positive");
  if (!(cfg.tol > 0.0)) throw ConfigError("AA tol must be positive");
  SimplexLsOptions opts;
  opts.max_iterations = cfg.max_inner_iters;

  SimplexVertices out;
  out.method = VertexMethod::aa;
  out.lambda = lambda;
  Matrix v = start;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_outer_iters; ++it) {
    AAState s = aa_weights(points, v, opts);
    const double obj = s.d_cloud.sum() + lambda * s.d_vert.sum();
    if (!std::isfinite(obj)) break;
    // The majorization step cannot increase the objective beyond solver noise.
    if (obj > prev * (1.0 + 1e-12) + 1e-300) break;
    out.v = v;
    out.objective = obj;
    out.objective_trace.push_back(obj);
    out.iterations = it + 1;
    if (std::isfinite(prev) && prev - obj <= cfg.tol * prev) break;
    prev = obj;
    Matrix lhs = s.pi.transpose() * s.pi;
    lhs.diagonal().array() += lambda;
    Matrix rhs = s.pi.transpose() * points + lambda * (s.theta * points);
    v = lhs.ldlt().solve(rhs);
  }
  if (out.objective_trace.empty()) throw NumericalError("archetype analysis produced a non-finite objective");
  out.degenerate = simplex_is_degenerate(out.v);
  return out;
}

SimplexVertices archetype_analysis(const Matrix& points, Index k, const AAConfig& cfg) {
  if (k == 1) {
    if (points.rows() < 1) throw ConfigError("empty point cloud");
    SimplexVertices out;
    out.method = VertexMethod::aa;
    out.v = points.colwise().mean();
    out.objective = (points.rowwise() - out.v.row(0)).squaredNorm();
    out.objective_trace.push_back(out.objective);
    return out;
  }
  check_cloud(points, k);
  if (cfg.restarts < 1) throw ConfigError("AA needs at least one restart");

  const SimplexVertices sp = successive_projection(points, k);
  std::vector<Matrix> starts{sp.v};
  {
    const Eigen::RowVectorXd centre = sp.v.colwise().mean();
    double diam = 0.0;
    for (Index a = 0; a < k; ++a)
      for (Index b = a + 1; b < k; ++b) diam = std::max(diam, (sp.v.row(a) - sp.v.row(b)).norm());
    if (!(diam > 0.0)) diam = 1.0;
    for (int r = 1; r < cfg.restarts; ++r) {
      std::mt19937_64 rng(child_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      std::uniform_real_distribution<double> grow(0.0, 0.3);
      std::normal_distribution<double> noise(0.0, 0.02 * diam);
      Matrix v0 = sp.v;
      const double s = grow(rng);
      for (Index a = 0; a < k; ++a) {
        v0.row(a) = centre + (1.0 + s) * (sp.v.row(a) - centre);
        for (Index t = 0; t < k - 1; ++t) v0(a, t) += noise(rng);
      }
      starts.push_back(v0);
    }
  }

  std::vector<double> lambdas;
  const bool constrained = !cfg.lambda && cfg.delta > 0.0;
  if (cfg.lambda) {
    lambdas = {*cfg.lambda};
  } else if (constrained) {
    for (int e = -6; e <= 4; ++e) lambdas.push_back(std::pow(10.0, 0.5 * e));
  } else {
    lambdas = cfg.lambda_grid;
  }
  if (lambdas.empty()) throw ConfigError("AA lambda grid is empty");

  struct Candidate {
    SimplexVertices fit;
    double max_contain = 0.0;
    double vert_dist = 0.0;
  };
  std::vector<Candidate> cands;
  for (double lambda : lambdas) {
    std::optional<SimplexVertices> best;
    for (const Matrix& v0 : starts) {
      SimplexVertices f = archetype_fit(points, v0, lambda, cfg);
      if (!best || f.objective < best->objective) best = std::move(f);
    }
    AAState s = aa_weights(points, best->v, {});
    cands.push_back({std::move(*best), s.d_cloud.maxCoeff(), s.d_vert.sum()});
  }

  double scale = 0.0;
  for (Index j = 0; j < points.rows(); ++j) scale = std::max(scale, points.row(j).squaredNorm());
  const double tie = 1e-12 * std::max(scale, 1.0);
  std::size_t pick = 0;
  if (constrained) {
    const double bound = cfg.delta * cfg.delta;
    auto better = [&](const Candidate& a, const Candidate& b) {
      const bool fa = a.max_contain <= bound, fb = b.max_contain <= bound;
      if (fa != fb) return fa;
      if (fa) return a.vert_dist < b.vert_dist;
      return a.max_contain < b.max_contain;
    };
    for (std::size_t c = 1; c < cands.size(); ++c)
      if (better(cands[c], cands[pick])) pick = c;
  } else {
    for (std::size_t c = 1; c < cands.size(); ++c) {
      const double d = cands[c].max_contain - cands[pick].max_contain;
      if (d < -tie || (std::abs(d) <= tie && cands[c].vert_dist < cands[pick].vert_dist)) pick = c;
    }
  }
  return std::move(cands[pick].fit);
}

SimplexVertices archetype_analysis(const PointCloud& cloud, Index k, const AAConfig& cfg) {
  return archetype_analysis(cloud.points, k, cfg);
}

double vertex_error(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw ConfigError("vertex matrices have different shapes");
  const Index k = truth.rows();
  Matrix cost(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) cost(a, b) = (estimate.row(a) - truth.row(b)).norm();
  const Assignment asg = min_cost_assignment(cost);
  double worst = 0.0;
  for (Index a = 0; a < k; ++a) worst = std::max(worst, cost(a, asg.col_for_row[a]));
  return worst;
}

}  // namespace tts
