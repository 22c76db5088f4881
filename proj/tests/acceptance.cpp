// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: tts_acceptance [criterion numbers...]

#include "tts/estimator.hpp"
#include "tts/eval.hpp"
#include "tts/simplex.hpp"
#include "tts/sweep.hpp"
#include "tts/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace tts;

namespace {

// Pinned tolerances and limits.
constexpr double kOracleTol = 1e-8;
constexpr double kPiTol = 1e-10;
constexpr double kGridStep = 1e-3;
constexpr double kGridTol = 1e-5;
constexpr double kAssignTol = 1e-12;
constexpr double kRemovedLo = 0.05, kRemovedHi = 0.60;
constexpr double kAaDiamFrac = 0.05;
constexpr double kCompactRate = 0.90;
constexpr double kWTol = 1e-6;
constexpr double kLabelTol = 1e-12;
constexpr int kSeeds = 20;

using Rng = std::mt19937_64;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

double unif(Rng& rng, double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
Index unif_index(Rng& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

Vector simplex_draw(Rng& rng, Index k) {
  std::exponential_distribution<double> e(1.0);
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = e(rng);
  return v / v.sum();
}

Matrix stochastic(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) m.col(c) = simplex_draw(rng, rows);
  return m;
}

std::vector<std::vector<Index>> permutations(Index k) {
  std::vector<Index> p(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) p[i] = i;
  std::vector<std::vector<Index>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

GenerationConfig zipf_config(Index p, Index n, Index big_n, Index k, std::uint64_t seed) {
  GenerationConfig g;
  g.p = p;
  g.n = n;
  g.N = big_n;
  g.K = k;
  g.seed = seed;
  return g;
}

std::uint64_t seed_for(int criterion, int trial) { return child_seed(0xacce97 + criterion, trial); }

// 1. Oracle exactness.
Outcome oracle_exactness() {
  Rng rng(1);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index k = unif_index(rng, 2, 6), p = unif_index(rng, 4 * k, 200), n = unif_index(rng, 2 * k, 150);
    const Index anchors = unif_index(rng, 1, 3);
    Matrix a = Matrix::Zero(p, k);
    for (Index c = 0; c < k; ++c)
      for (Index r = 0; r < anchors; ++r) a(c * anchors + r, c) = unif(rng, 0.01, 0.1);
    for (Index j = anchors * k; j < p; ++j)
      for (Index c = 0; c < k; ++c) a(j, c) = unif(rng);
    for (Index c = 0; c < k; ++c) a.col(c) /= a.col(c).sum();
    Matrix w = stochastic(rng, k, n);
    std::vector<Index> j;
    for (Index r = 0; r < p; ++r)
      if (r < anchors * k || unif(rng) < 0.6) j.push_back(r);
    FitConfig cfg;
    auto res = fit_oracle(a, w, j, cfg);
    Matrix rhs = Matrix::Zero(p, k);
    for (Index r : j) rhs.row(r) = a.row(r);
    for (Index c = 0; c < k; ++c) rhs.col(c) /= rhs.col(c).sum();
    auto al = l1_alignment(res.a_tilde, rhs);
    for (double s : al.per_topic_scores) worst = std::max(worst, s);
  }
  return {worst <= kOracleTol, "max column l1 error " + num(worst) + " (tol " + num(kOracleTol) + ")"};
}

// 2. Noiseless Pi recovery.
Outcome pi_recovery() {
  Rng rng(2);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index k = unif_index(rng, 2, 8);
    Matrix v = Matrix::NullaryExpr(k, k - 1, [&] { return unif(rng, -1.0, 1.0); });
    Matrix pi = stochastic(rng, k, 50).transpose();
    auto mw = recover_mixing_weights(pi * v, v);
    worst = std::max(worst, (mw.pi - pi).cwiseAbs().maxCoeff());
  }
  return {worst <= kPiTol, "max entry error " + num(worst) + " (tol " + num(kPiTol) + ")"};
}

// 3. Simplex least squares against a grid.
Outcome simplex_grid() {
  Rng rng(3);
  const int steps = static_cast<int>(std::lround(1.0 / kGridStep));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Matrix v = Matrix::NullaryExpr(3, 2, [&] { return unif(rng, -1.0, 1.0); });
    Vector u = Vector::NullaryExpr(2, [&] { return unif(rng, -1.5, 1.5); });
    double best = kInf;
    for (int a = 0; a <= steps; ++a)
      for (int b = 0; a + b <= steps; ++b) {
        const double w0 = a * kGridStep, w1 = b * kGridStep, w2 = 1.0 - w0 - w1;
        const double x = w0 * v(0, 0) + w1 * v(1, 0) + w2 * v(2, 0) - u[0];
        const double y = w0 * v(0, 1) + w1 * v(1, 1) + w2 * v(2, 1) - u[1];
        best = std::min(best, x * x + y * y);
      }
    worst = std::max(worst, std::abs(simplex_barycentric_ls(u, v).sqdist - best));
  }
  return {worst <= kGridTol, "max |sqdist - grid| " + num(worst) + " (tol " + num(kGridTol) + ")"};
}

// 4. Assignment exactness.
Outcome assignment_exactness() {
  Rng rng(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index k = unif_index(rng, 1, 6), p = unif_index(rng, 5, 40);
    Matrix a = stochastic(rng, p, k), b = stochastic(rng, p, k);
    double l1 = kInf, eta = -kInf;
    for (const auto& perm : permutations(k)) {
      double s = 0.0, c = 0.0;
      for (Index q = 0; q < k; ++q) {
        s += (a.col(perm[q]) - b.col(q)).cwiseAbs().sum();
        c += a.col(perm[q]).dot(b.col(q)) / (a.col(perm[q]).norm() * b.col(q).norm());
      }
      l1 = std::min(l1, s / k);
      eta = std::max(eta, c / k);
    }
    worst = std::max({worst, std::abs(l1_permuted_loss(a, b) - l1), std::abs(topic_resolution(a, b) - eta)});
  }
  return {worst <= kAssignTol, "max deviation from brute force " + num(worst) + " (tol " + num(kAssignTol) + ")"};
}

// 5. K recovery on the scree setup.
Outcome k_recovery() {
  std::ostringstream detail;
  bool pass = true;
  for (Index k : {3, 5, 10}) {
    int hits = 0;
    std::vector<double> lam_k, cut;
    std::map<Index, int> seen;
    for (int t = 0; t < kSeeds; ++t) {
      auto s = generate_corpus(zipf_config(5000, 500, 500, k, seed_for(5, t)));
      auto j = threshold_vocabulary(s.corpus, 0.005);
      auto block = build_gram(s.corpus, j);
      const double g_n = default_g_n(block);
      const Index kh = estimate_k_eigen(block, g_n);
      ++seen[kh];
      hits += kh == k;
      if (t == 0) {
        lam_k.push_back(top_eigenvalues(block, k)[k - 1]);
        cut.push_back(eigen_cutoff(block, g_n));
      }
    }
    const double need = k == 3 ? 0.9 : 0.8;
    pass = pass && hits >= need * kSeeds;
    detail << "K=" << k << ": " << hits << "/" << kSeeds << " (K_hat";
    for (auto [kh, c] : seen) detail << " " << kh << "x" << c;
    detail << ", seed0 lambda_K " << num(lam_k[0]) << " vs cutoff " << num(cut[0]) << ") ";
  }
  return {pass, detail.str()};
}

// 6. Thresholding band.
Outcome threshold_band() {
  std::vector<double> removed;
  for (int t = 0; t < kSeeds; ++t) {
    auto s = generate_corpus(zipf_config(5000, 2000, 500, 3, seed_for(6, t)));
    removed.push_back(threshold_vocabulary(s.corpus, 0.005).removed_fraction);
  }
  const double med = median_of(removed);
  return {med >= kRemovedLo && med <= kRemovedHi,
          "median removed fraction " + num(med) + " (band [" + num(kRemovedLo) + ", " + num(kRemovedHi) + "])"};
}

std::vector<double> summary_medians(const SweepResult& r) {
  std::vector<double> out;
  for (const auto& s : r.summary) out.push_back(s.median_loss);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + num(x);
  return s;
}

// 7. Consistency trend in n.
Outcome consistency_trend() {
  FigureOptions o;
  o.seed = seed_for(7, 0);
  o.trials = kSeeds;
  auto r = run_sweep(figure_sweep_spec(FigureName::fig4, o));
  auto med = summary_medians(r);
  bool pass = med.size() == 4;
  for (std::size_t i = 1; i < med.size(); ++i) pass = pass && med[i] < med[i - 1];
  for (const auto& s : r.summary) pass = pass && s.failed == 0;
  return {pass, "median l1 loss at n=250,500,1000,2000: " + join(med)};
}

// 8. Thresholding benefit.
Outcome threshold_benefit() {
  FigureOptions o;
  o.seed = seed_for(8, 0);
  o.trials = kSeeds;
  auto spec = figure_sweep_spec(FigureName::fig6, o);
  auto r = run_sweep(spec);
  auto med = summary_medians(r);
  const double lo = *std::min_element(med.begin(), med.end());
  const bool pass = med.size() >= 3 && lo < med.front() && lo < med.back();
  return {pass, "median l1 loss over alpha grid: " + join(med)};
}

// 9. Non-separable vertex hunting, same hunters and seeds as the fig1 preset.
Outcome nonseparable_hunting() {
  const std::uint64_t seed = FigureOptions{}.seed;
  auto c = planted_triangle_cloud(seed);
  double diam = 0.0;
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b) diam = std::max(diam, (c.vertices.row(a) - c.vertices.row(b)).norm());
  SvsConfig svs;
  svs.seed = child_seed(seed, 1);
  AAConfig aa;
  aa.seed = child_seed(seed, 2);
  const double e_sp = vertex_error(successive_projection(c.points, 3).v, c.vertices);
  const double e_svs = vertex_error(sketched_vertex_search(c.points, 3, svs).v, c.vertices);
  const double e_aa = vertex_error(archetype_analysis(c.points, 3, aa).v, c.vertices);
  const bool pass = e_aa < e_sp && e_aa < e_svs && e_aa <= kAaDiamFrac * diam;
  return {pass, "max vertex error SP " + num(e_sp) + ", SVS " + num(e_svs) + ", AA " + num(e_aa) + " (AA limit " +
                    num(kAaDiamFrac * diam) + ")"};
}

// 10. Point-cloud compactness against Topic-SCORE.
Outcome cloud_compactness() {
  int wins = 0;
  std::vector<double> ratio;
  for (int t = 0; t < kSeeds; ++t) {
    auto s = generate_corpus(zipf_config(5000, 500, 500, 3, seed_for(10, t)));
    FitConfig cfg;
    cfg.k = 3;
    cfg.seed = seed_for(10, t);
    const double r_tts = cloud_radius(fit_tts(s.corpus, cfg).cloud);
    const double r_ts = cloud_radius(fit_topic_score(s.corpus, 3, cfg).cloud);
    wins += r_tts <= r_ts;
    ratio.push_back(r_tts / r_ts);
  }
  return {wins >= kCompactRate * kSeeds, std::to_string(wins) + "/" + std::to_string(kSeeds) +
                                            " seeds with TTS radius <= Topic-SCORE radius (median ratio " +
                                            num(median_of(ratio)) + ")"};
}

// 11. Document-weight regression.
Outcome weight_regression() {
  Rng rng(11);
  double worst = 0.0;
  for (Index k : {2, 3, 5}) {
    const Index p = 100, n = 300;
    Matrix a = Matrix::Zero(p, k);
    for (Index c = 0; c < k; ++c) a(c, c) = 0.05;
    for (Index j = k; j < p; ++j)
      for (Index c = 0; c < k; ++c) a(j, c) = unif(rng);
    for (Index c = 0; c < k; ++c) a.col(c) /= a.col(c).sum();
    Matrix w = stochastic(rng, k, n);
    auto est = estimate_document_weights(FrequencyMatrix::from_dense(a * w, kInf), a);
    worst = std::max(worst, (est.w_hat - w).cwiseAbs().sum() / static_cast<double>(n * k));
  }
  double label_dev = 0.0;
  for (Index k : {2, 3, 4, 6}) {
    const Index n = 60;
    Matrix y = Matrix::Zero(k, n);
    for (Index i = 0; i < n; ++i) y(i % k, i) = 1.0;
    const double d = label_alignment(Matrix::Constant(k, n, 1.0 / k), y).aggregate;
    label_dev = std::max(label_dev, std::abs(d - 2.0 * (k - 1) / static_cast<double>(k * k)));
  }
  return {worst <= kWTol && label_dev <= kLabelTol,
          "||W_hat - W||_1/(nK) " + num(worst) + ", uniform label distance deviation " + num(label_dev)};
}

// 12. Bitwise determinism of every stage.
Outcome determinism() {
  struct Snapshot {
    Matrix a, w, gram, xi, cloud, sp, svs, aa, pi, a_hat, w_hat;
    Vector lambda;
    std::vector<Index> j;
    std::vector<double> eta, sweep;
    bool operator==(const Snapshot&) const = default;
  };
  auto run = [] {
    Snapshot s;
    auto data = generate_corpus(zipf_config(1500, 400, 300, 3, 1234));
    s.a = data.a;
    s.w = data.w;
    auto j = threshold_vocabulary(data.corpus, 0.005);
    s.j = j.indices;
    auto block = build_gram(data.corpus, j);
    s.gram = block.dense();
    auto bundle = top_eigenpairs(block, 3);
    s.lambda = bundle.eigenvalues;
    s.xi = bundle.xi;
    auto cloud = score_point_cloud(bundle, j);
    s.cloud = cloud.points;
    s.sp = successive_projection(cloud, 3).v;
    SvsConfig svs;
    svs.seed = 5;
    s.svs = sketched_vertex_search(cloud, 3, svs).v;
    AAConfig aa;
    aa.seed = 6;
    s.aa = archetype_analysis(cloud, 3, aa).v;
    s.pi = recover_mixing_weights(cloud.points, s.sp).pi;
    FitConfig cfg;
    cfg.k = 3;
    cfg.vh = VertexMethod::aa;
    cfg.seed = 77;
    auto fit = fit_tts(data.corpus, cfg);
    s.a_hat = fit.a_hat;
    s.w_hat = estimate_document_weights(data.corpus, fit.a_hat).w_hat;
    SplitHalfOptions so;
    so.n_splits = 2;
    so.seed = 9;
    for (const auto& e : split_half_resolution(data.corpus, cfg, so).eta) s.eta.push_back(e.value_or(-1.0));
    SweepSpec sw;
    sw.grid = {300};
    sw.gen = zipf_config(800, 300, 300, 3, 0);
    sw.trials = 2;
    sw.seed = 3;
    for (const auto& r : run_sweep(sw).rows) s.sweep.push_back(r.loss);
    return s;
  };
  const Snapshot first = run(), second = run();
  return {first == second, first == second ? "two runs identical at " + std::to_string(thread_count()) + " threads"
                                           : "runs differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle exactness", oracle_exactness},
      {"noiseless Pi recovery", pi_recovery},
      {"simplex LS grid oracle", simplex_grid},
      {"assignment exactness", assignment_exactness},
      {"K recovery", k_recovery},
      {"thresholding band", threshold_band},
      {"consistency trend", consistency_trend},
      {"thresholding benefit", threshold_benefit},
      {"non-separable vertex hunting", nonseparable_hunting},
      {"point-cloud compactness", cloud_compactness},
      {"W regression sanity", weight_regression},
      {"determinism", determinism},
  };
  const std::vector<double> limits{30, 5, 30, 10, 600, 300, 900, 1200, 60, 300, 60, 600};

  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= limits[c];
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %-30s %s  %s [%.1fs%s]\n", id, criteria[c].first, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, in_time ? "" : " over limit");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
