#include "tts/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tts {

VocabularySubset VocabularySubset::all(Index p) {
  VocabularySubset j;
  j.p = p;
  j.indices.resize(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) j.indices[i] = i;
  return j;
}

namespace {

std::vector<Index> row_map(Index p, const std::vector<Index>& j) {
  std::vector<Index> map(static_cast<std::size_t>(p), -1);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r] < 0 || j[r] >= p) throw ConfigError("word index out of range in J");
    if (r > 0 && j[r] <= j[r - 1]) throw ConfigError("J must be strictly increasing");
    map[j[r]] = static_cast<Index>(r);
  }
  return map;
}

GramBlock make_block(SparseReal rows, const FrequencyDiagonal& diag, const std::vector<Index>& j, Index p) {
  GramBlock b;
  b.n_docs = diag.n_docs;
  b.p = p;
  b.p_n = std::max(p, diag.n_docs);
  b.avg_len = diag.avg_len;
  b.j_index = j;
  const double factor = static_cast<double>(diag.n_docs) / diag.avg_len;  // 0 when N is infinite
  Vector shift(static_cast<Index>(j.size()));
  for (std::size_t r = 0; r < j.size(); ++r) shift[r] = factor * diag.m[j[r]];
  b.op = GramOperator(std::move(rows), std::move(shift));
  return b;
}

}  // namespace

SparseReal frequency_rows(const CorpusMatrix& corpus, const std::vector<Index>& j) {
  const auto map = row_map(corpus.p(), j);
  std::vector<Eigen::Triplet<double, Index>> trip;
  const auto& counts = corpus.counts();
  for (Index i = 0; i < corpus.n(); ++i) {
    const double len = static_cast<double>(corpus.doc_lengths()[i]);
    for (SparseCounts::InnerIterator it(counts, i); it; ++it) {
      const Index r = map[it.row()];
      if (r >= 0 && it.value() != 0) trip.emplace_back(r, i, static_cast<double>(it.value()) / len);
    }
  }
  SparseReal out(static_cast<Index>(j.size()), corpus.n());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseReal frequency_rows(const FrequencyMatrix& freq, const std::vector<Index>& j) {
  const auto map = row_map(freq.p(), j);
  std::vector<Eigen::Triplet<double, Index>> trip;
  for (Index i = 0; i < freq.n(); ++i)
    for (SparseReal::InnerIterator it(freq.d, i); it; ++it) {
      const Index r = map[it.row()];
      if (r >= 0 && it.value() != 0.0) trip.emplace_back(r, i, it.value());
    }
  SparseReal out(static_cast<Index>(j.size()), freq.n());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

GramBlock build_gram(const FrequencyMatrix& freq, const std::vector<Index>& j) {
  if (j.empty()) throw ConfigError("cannot build a Gram block on an empty word set");
  return make_block(frequency_rows(freq, j), word_frequency_diag(freq), j, freq.p());
}

GramBlock build_gram(const CorpusMatrix& corpus, const VocabularySubset& j) {
  if (j.indices.empty()) throw ConfigError("cannot build a Gram block on an empty word set");
  return make_block(frequency_rows(corpus, j.indices), word_frequency_diag(corpus), j.indices, corpus.p());
}

Matrix GramBlock::dense(bool parallel) const {
  return parallel ? kernels::omp::gram_dense(op) : kernels::serial::gram_dense(op);
}

void fix_eigenvector_signs(Matrix& xi) {
  if (xi.cols() == 0) return;
  {
    auto c = xi.col(0);
    Index pos = 0, neg = 0;
    for (Index j = 0; j < c.size(); ++j) {
      pos += c[j] > 0.0;
      neg += c[j] < 0.0;
    }
    if (neg > pos || (neg == pos && c.sum() < 0.0)) c = -c;
  }
  for (Index k = 1; k < xi.cols(); ++k) {
    Index arg = 0;
    xi.col(k).cwiseAbs().maxCoeff(&arg);
    if (xi(arg, k) < 0.0) xi.col(k) = -xi.col(k);
  }
}

namespace {

SpectralBundle finish_bundle(EigenResult r) {
  SpectralBundle b;
  b.eigenvalues = std::move(r.values);
  b.xi = std::move(r.vectors);
  b.matvecs = r.matvecs;
  fix_eigenvector_signs(b.xi);
  for (Index j = 0; j < b.xi.rows(); ++j)
    if (!(b.xi(j, 0) > 0.0)) b.dropped_rows.push_back(j);
  b.xi1_positive = b.dropped_rows.empty();
  return b;
}

}  // namespace

SpectralBundle top_eigenpairs(const GramBlock& block, Index k, const EigenOptions& opts) {
  if (k < 1 || k > block.dim()) throw ConfigError("requested " + std::to_string(k) + " eigenpairs of a " +
                                                  std::to_string(block.dim()) + "-dimensional block");
  return finish_bundle(operator_top_eigenpairs(block.op, k, opts));
}

SpectralBundle top_eigenpairs(const Matrix& g, Index k) { return finish_bundle(dense_top_eigenpairs(g, k)); }

Vector top_eigenvalues(const GramBlock& block, Index count, const EigenOptions& opts) {
  count = std::min(count, block.dim());
  if (count < 1) return Vector();
  return operator_top_eigenpairs(block.op, count, opts).values;
}

double default_g_n(const GramBlock& block) { return 8.0 * std::log(static_cast<double>(block.p_n)); }

double eigen_cutoff(const GramBlock& block, double g_n) {
  const double n = static_cast<double>(block.n_docs);
  return g_n * std::sqrt(n * std::log(static_cast<double>(block.p_n)) / block.avg_len);
}

Index count_eigenvalues_above(const GramOperator& op, double cutoff, const EigenOptions& opts) {
  const Index dim = op.dim();
  if (dim < opts.dense_cutoff) {
    Matrix g = opts.parallel ? kernels::omp::gram_dense(op) : kernels::serial::gram_dense(op);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense symmetric eigensolver failed");
    return (es.eigenvalues().array() > cutoff).count();
  }
  Index k = std::min<Index>(dim, 8);
  while (true) {
    Vector vals = operator_top_eigenpairs(op, k, opts).values;
    const Index above = (vals.array() > cutoff).count();
    if (above < k || k == dim) return above;
    k = std::min(dim, 2 * k);
  }
}

Index estimate_k_eigen(const GramBlock& block, double g_n, const EigenOptions& opts) {
  if (!(g_n > 0.0)) throw ConfigError("g_n must be positive");
  return count_eigenvalues_above(block.op, eigen_cutoff(block, g_n), opts);
}

double singular_cutoff(Index p, Index n, double avg_len) {
  const double nn = static_cast<double>(n);
  return 4.0 * std::sqrt(nn * std::log(static_cast<double>(p + n)) / avg_len);
}

namespace {

Index count_singular(SparseReal rows, Index p, Index n, double avg_len, const EigenOptions& opts) {
  const double cut = singular_cutoff(p, n, avg_len);
  GramOperator op(std::move(rows), Vector());
  // sigma_k > c  <=>  lambda_k(D_J D_J^T) > c^2 for c >= 0.
  return count_eigenvalues_above(op, cut * cut, opts);
}

}  // namespace

Index estimate_k_singular(const CorpusMatrix& corpus, const VocabularySubset& j, const EigenOptions& opts) {
  if (j.indices.empty()) throw ConfigError("empty word set");
  return count_singular(frequency_rows(corpus, j.indices), corpus.p(), corpus.n(), corpus.avg_len(), opts);
}

Index estimate_k_singular(const FrequencyMatrix& freq, const std::vector<Index>& j, const EigenOptions& opts) {
  if (j.empty()) throw ConfigError("empty word set");
  return count_singular(frequency_rows(freq, j), freq.p(), freq.n(), freq.avg_len, opts);
}

KneeResult kneedle_knee(const std::vector<double>& values, bool log_x) {
  const std::size_t n = values.size();
  if (n < 3) throw ConfigError("knee detection needs at least 3 values");
  std::vector<double> x(n), y(values);
  for (std::size_t i = 0; i < n; ++i) x[i] = log_x ? std::log(static_cast<double>(i + 2)) : static_cast<double>(i);
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double ymin = *ymin_it, yrange = *ymax_it - *ymin_it;
  const double xmin = x.front(), xrange = x.back() - x.front();
  KneeResult res;
  if (!(yrange > 0.0)) {
    res.index = 1;
    res.low_confidence = true;
    return res;
  }
  // Decreasing profile: flip so the knee is a maximum of the difference curve.
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xn = (x[i] - xmin) / xrange;
    const double yn = (y[i] - ymin) / yrange;
    diff[i] = 1.0 - yn - xn;
  }
  const double sensitivity = 1.0;
  double mean_step = 0.0;
  for (std::size_t i = 1; i < n; ++i) mean_step += (x[i] - x[i - 1]) / xrange;
  mean_step /= static_cast<double>(n - 1);

  const double flat_tol = 1e-9;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(diff[i] > diff[i - 1] && diff[i] >= diff[i + 1])) continue;
    if (diff[i] <= flat_tol) continue;
    const double threshold = diff[i] - sensitivity * mean_step;
    for (std::size_t t = i + 1; t < n; ++t) {
      if (diff[t] > diff[i]) break;  // a higher local maximum supersedes this one
      if (diff[t] < threshold) {
        res.index = static_cast<Index>(i);
        return res;
      }
    }
  }
  // No confirmed knee: fall back to the global maximum.
  std::size_t best = 1;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (diff[i] > diff[best]) best = i;
  res.index = diff[best] > flat_tol ? static_cast<Index>(best) : 1;
  res.low_confidence = true;
  return res;
}

}  // namespace tts
