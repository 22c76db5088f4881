#include "tts/eval.hpp"

#include "tts/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace tts {

namespace {

void same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError(std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                      " and " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " differ");
}

double cosine(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  const double nx = x.norm(), ny = y.norm();
  if (!(nx > 0.0) || !(ny > 0.0)) return 0.0;
  return x.dot(y) / (nx * ny);
}

}  // namespace

AlignedComparison l1_alignment(const Matrix& a_hat, const Matrix& a_true) {
  same_shape(a_hat, a_true, "l1 loss");
  const Index k = a_true.cols();
  if (k < 1) throw ConfigError("l1 loss: no columns");
  Matrix cost(k, k);  // cost(truth l, estimate c)
  for (Index l = 0; l < k; ++l)
    for (Index c = 0; c < k; ++c) cost(l, c) = (a_hat.col(c) - a_true.col(l)).lpNorm<1>();
  const Assignment asg = min_cost_assignment(cost);
  AlignedComparison out;
  out.permutation = asg.col_for_row;
  for (Index l = 0; l < k; ++l) out.per_topic_scores.push_back(cost(l, asg.col_for_row[l]));
  out.aggregate = asg.total / static_cast<double>(k);
  return out;
}

double l1_permuted_loss(const Matrix& a_hat, const Matrix& a_true) { return l1_alignment(a_hat, a_true).aggregate; }

AlignedComparison resolution_alignment(const Matrix& a1, const Matrix& a2) {
  same_shape(a1, a2, "topic resolution");
  const Index k = a1.cols();
  if (k < 1) throw ConfigError("topic resolution: no columns");
  for (Index c = 0; c < k; ++c)
    if (!(a1.col(c).norm() > 0.0) || !(a2.col(c).norm() > 0.0))
      throw ConfigError("topic resolution: column " + std::to_string(c + 1) + " is zero");
  Matrix sim(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) sim(a, b) = cosine(a1.col(a), a2.col(b));
  const Assignment asg = max_weight_assignment(sim);
  AlignedComparison out;
  out.permutation = asg.col_for_row;
  for (Index a = 0; a < k; ++a) out.per_topic_scores.push_back(sim(a, asg.col_for_row[a]));
  out.aggregate = asg.total / static_cast<double>(k);
  return out;
}

double topic_resolution(const Matrix& a1, const Matrix& a2) { return resolution_alignment(a1, a2).aggregate; }

AlignedComparison label_alignment(const Matrix& w_hat, const Matrix& labels) {
  same_shape(w_hat, labels, "label alignment");
  const Index k = labels.rows(), n = labels.cols();
  if (k < 1 || n < 1) throw ConfigError("label alignment: empty input");
  for (Index t = 0; t < k; ++t)
    if (!(labels.row(t).array() != 0.0).any())
      throw ConfigError("label alignment: topic " + std::to_string(t + 1) + " has no labelled document");
  Matrix cost(k, k);  // cost(label k, estimate row s)
  for (Index t = 0; t < k; ++t)
    for (Index s = 0; s < k; ++s) cost(t, s) = (w_hat.row(s) - labels.row(t)).lpNorm<1>();
  const Assignment asg = min_cost_assignment(cost);
  AlignedComparison out;
  out.permutation = asg.col_for_row;
  out.aggregate = asg.total / (static_cast<double>(n) * static_cast<double>(k));
  for (Index t = 0; t < k; ++t)
    out.per_topic_scores.push_back(cosine(w_hat.row(asg.col_for_row[t]).transpose(), labels.row(t).transpose()));
  return out;
}

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median_of(std::vector<double> values) { return quantile_of(std::move(values), 0.5); }

double iqr_of(std::vector<double> values) { return quantile_of(values, 0.75) - quantile_of(values, 0.25); }

SplitHalfResult split_half_resolution(const CorpusMatrix& corpus, const FitConfig& cfg, const SplitHalfOptions& opts) {
  if (opts.n_splits < 1) throw ConfigError("n_splits must be positive");
  const Index k_min = cfg.k ? *cfg.k : 2;
  if (corpus.n() < 2 * k_min) throw ConfigError("split-half needs at least 2K documents");
  SplitHalfResult out;
  out.eta.resize(static_cast<std::size_t>(opts.n_splits));
  out.failures.resize(static_cast<std::size_t>(opts.n_splits));
  for (int s = 0; s < opts.n_splits; ++s) {
    const std::uint64_t split_seed = child_seed(opts.seed, static_cast<std::uint64_t>(s));
    std::vector<Index> order(static_cast<std::size_t>(corpus.n()));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(split_seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t half = order.size() / 2;
    std::vector<Index> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<Index> second(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
    if (opts.duplicate_halves) second = first;
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    try {
      FitConfig c1 = cfg, c2 = cfg;
      c1.seed = child_seed(split_seed, 1);
      c2.seed = opts.duplicate_halves ? c1.seed : child_seed(split_seed, 2);
      c1.spectrum_size = c2.spectrum_size = 0;
      FitResult f1 = fit_tts(corpus.select_documents(first), c1);
      if (!cfg.k) c2.k = f1.k_used;  // both halves must agree on K
      FitResult f2 = fit_tts(corpus.select_documents(second), c2);
      out.eta[s] = topic_resolution(f1.a_hat, f2.a_hat);
    } catch (const std::exception& e) {
      out.failures[s] = e.what();
    }
  }
  std::vector<double> ok;
  for (const auto& e : out.eta)
    if (e) ok.push_back(*e);
  out.completed = static_cast<Index>(ok.size());
  if (!ok.empty()) {
    out.median = median_of(ok);
    out.iqr = iqr_of(ok);
  } else {
    out.median = out.iqr = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace tts
