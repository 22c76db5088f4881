#include "tts/score.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tts {

double threshold_value(Index p, Index n, double avg_len, double alpha) {
  const double pn = static_cast<double>(std::max(p, n));
  return alpha * std::sqrt(std::log(pn) / (static_cast<double>(n) * avg_len));
}

VocabularySubset threshold_vocabulary(const FrequencyDiagonal& diag, Index p, double alpha, Index min_size) {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (static_cast<Index>(diag.m.size()) != p) throw ConfigError("frequency diagonal length does not match p");
  VocabularySubset j;
  j.p = p;
  j.alpha = alpha;
  j.threshold_value = threshold_value(p, diag.n_docs, diag.avg_len, alpha);
  for (Index w = 0; w < p; ++w)
    if (diag.m[w] >= j.threshold_value) j.indices.push_back(w);
  j.removed_fraction = 1.0 - static_cast<double>(j.size()) / static_cast<double>(p);
  if (j.size() < std::max<Index>(min_size, 1)) {
    std::vector<double> sorted(diag.m);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const Index need = std::min<Index>(std::max<Index>(min_size, 1), p);
    const double unit = threshold_value(p, diag.n_docs, diag.avg_len, 1.0);
    std::ostringstream msg;
    msg << "only " << j.size() << " words pass the threshold at alpha=" << alpha << "; ";
    if (unit > 0.0 && sorted[need - 1] > 0.0) {
      msg << "alpha <= " << sorted[need - 1] / unit << " keeps " << need;
    } else {
      msg << "fewer than " << need << " words occur at all";
    }
    throw ConfigError(msg.str());
  }
  return j;
}

VocabularySubset threshold_vocabulary(const CorpusMatrix& corpus, double alpha, Index min_size) {
  return threshold_vocabulary(word_frequency_diag(corpus), corpus.p(), alpha, min_size);
}

VocabularySubset threshold_vocabulary(const FrequencyMatrix& freq, double alpha, Index min_size) {
  return threshold_vocabulary(word_frequency_diag(freq), freq.p(), alpha, min_size);
}

PointCloud score_point_cloud(const SpectralBundle& bundle, const std::vector<Index>& j_index) {
  const Index k = bundle.xi.cols();
  if (k < 2) throw ConfigError("SCORE normalization needs at least two eigenvectors");
  if (static_cast<Index>(j_index.size()) != bundle.xi.rows())
    throw ConfigError("word index map does not match the eigenvector rows");
  std::vector<Index> keep;
  PointCloud c;
  for (Index r = 0; r < bundle.xi.rows(); ++r) {
    if (bundle.xi(r, 0) > 0.0) {
      keep.push_back(r);
    } else {
      c.dropped.push_back(j_index[r]);
    }
  }
  if (keep.empty()) throw NumericalError("every leading-eigenvector entry is non-positive");
  const Index m = static_cast<Index>(keep.size());
  c.points.resize(m, k - 1);
  c.xi1.resize(m);
  c.word_ids.resize(keep.size());
  for (Index a = 0; a < m; ++a) {
    const Index r = keep[a];
    const double x1 = bundle.xi(r, 0);
    c.xi1[a] = x1;
    c.word_ids[a] = j_index[r];
    for (Index t = 1; t < k; ++t) c.points(a, t - 1) = bundle.xi(r, t) / x1;
  }
  return c;
}

PointCloud score_point_cloud(const SpectralBundle& bundle, const VocabularySubset& j) {
  return score_point_cloud(bundle, j.indices);
}

double cloud_radius(const PointCloud& cloud) {
  return cloud.size() == 0 ? 0.0 : cloud.points.rowwise().norm().maxCoeff();
}

}  // namespace tts
