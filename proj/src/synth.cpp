#include "tts/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"

namespace tts {

namespace {
constexpr std::uint64_t kStreamTopics = 1;
constexpr std::uint64_t kStreamWeights = 2;
constexpr std::uint64_t kStreamCorpus = 3;
}  // namespace

std::string to_string(GenerationMode mode) { return mode == GenerationMode::zipf ? "zipf" : "uniform"; }

GenerationMode parse_generation_mode(const std::string& name) {
  if (name == "zipf") return GenerationMode::zipf;
  if (name == "uniform") return GenerationMode::uniform;
  throw ConfigError("unknown generation mode '" + name + "'");
}

void GenerationConfig::validate() const {
  if (p < 1 || n < 1 || K < 1 || N < 1) throw ConfigError("p, n, K and N must be positive");
  if (anchors_per_topic < 0) throw ConfigError("anchors_per_topic must be non-negative");
  if (anchors_per_topic * K > p) throw ConfigError("anchors_per_topic * K exceeds p");
  if (anchors_per_topic > 0) {
    if (!(delta_anchor > 0.0 && delta_anchor < 1.0)) throw ConfigError("delta_anchor must lie in (0, 1)");
    if (delta_anchor * static_cast<double>(anchors_per_topic) >= 1.0)
      throw ConfigError("delta_anchor * anchors_per_topic must be < 1");
  }
  if (!(a_zipf > 0.0) || !(b_zipf > 0.0)) throw ConfigError("a_zipf and b_zipf must be positive");
  if (!dirichlet_alpha.empty()) {
    if (static_cast<Index>(dirichlet_alpha.size()) != K)
      throw ConfigError("dirichlet_alpha must have length K");
    for (double v : dirichlet_alpha)
      if (!(v > 0.0)) throw ConfigError("dirichlet_alpha entries must be positive");
  }
  // A column with no anchors and no free rows would be all-zero.
  if (anchors_per_topic == 0 && p - anchors_per_topic * K < 1) throw ConfigError("no rows left for topic mass");
}

std::vector<double> GenerationConfig::resolved_alpha() const {
  if (!dirichlet_alpha.empty()) return dirichlet_alpha;
  return std::vector<double>(static_cast<std::size_t>(K), 1.0);
}

std::string GenerationConfig::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["n"] = n;
  j["K"] = K;
  j["N"] = N;
  j["anchors_per_topic"] = anchors_per_topic;
  j["delta_anchor"] = delta_anchor;
  j["mode"] = to_string(mode);
  j["a_zipf"] = a_zipf;
  j["b_zipf"] = b_zipf;
  j["dirichlet_alpha"] = resolved_alpha();
  j["seed"] = seed;
  return j.dump(2);
}

GenerationConfig GenerationConfig::from_json(const std::string& text) {
  GenerationConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generation config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("generation config must be a JSON object");
  try {
    if (j.contains("p")) c.p = j.at("p").get<Index>();
    if (j.contains("n")) c.n = j.at("n").get<Index>();
    if (j.contains("K")) c.K = j.at("K").get<Index>();
    if (j.contains("N")) c.N = j.at("N").get<Index>();
    if (j.contains("anchors_per_topic")) c.anchors_per_topic = j.at("anchors_per_topic").get<Index>();
    if (j.contains("delta_anchor")) c.delta_anchor = j.at("delta_anchor").get<double>();
    if (j.contains("mode")) c.mode = parse_generation_mode(j.at("mode").get<std::string>());
    if (j.contains("a_zipf")) c.a_zipf = j.at("a_zipf").get<double>();
    if (j.contains("b_zipf")) c.b_zipf = j.at("b_zipf").get<double>();
    if (j.contains("dirichlet_alpha")) c.dirichlet_alpha = j.at("dirichlet_alpha").get<std::vector<double>>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generation config: ") + e.what());
  }
  c.validate();
  return c;
}

Matrix generate_topic_matrix(const GenerationConfig& cfg) {
  cfg.validate();
  const Index p = cfg.p, K = cfg.K, a = cfg.anchors_per_topic;
  const Index free_rows = p - a * K;
  Matrix A = Matrix::Zero(p, K);
  std::mt19937_64 rng(child_seed(cfg.seed, kStreamTopics));

  std::vector<double> zipf(static_cast<std::size_t>(free_rows));
  for (Index r = 0; r < free_rows; ++r)
    zipf[r] = 1.0 / std::pow(static_cast<double>(r + 1) + cfg.b_zipf, cfg.a_zipf);

  std::vector<Index> ranks(static_cast<std::size_t>(free_rows));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index k = 0; k < K; ++k) {
    for (Index t = 0; t < a; ++t) A(k * a + t, k) = cfg.delta_anchor;
    if (cfg.mode == GenerationMode::zipf) {
      std::iota(ranks.begin(), ranks.end(), Index{0});
      std::shuffle(ranks.begin(), ranks.end(), rng);
      for (Index r = 0; r < free_rows; ++r) A(a * K + r, k) = zipf[ranks[r]];
    } else {
      for (Index r = 0; r < free_rows; ++r) A(a * K + r, k) = unif(rng);
    }
    const double total = A.col(k).sum();
    if (!(total > 0.0)) throw NumericalError("generated topic column has zero mass");
    A.col(k) /= total;
  }
  return A;
}

Matrix generate_weights(const GenerationConfig& cfg) {
  cfg.validate();
  const auto alpha = cfg.resolved_alpha();
  Matrix W(cfg.K, cfg.n);
  std::mt19937_64 rng(child_seed(cfg.seed, kStreamWeights));
  std::vector<std::gamma_distribution<double>> gammas;
  for (double a : alpha) gammas.emplace_back(a, 1.0);
  for (Index i = 0; i < cfg.n; ++i) {
    double total = 0.0;
    for (Index k = 0; k < cfg.K; ++k) {
      W(k, i) = gammas[k](rng);
      total += W(k, i);
    }
    if (total > 0.0) {
      W.col(i) /= total;
    } else {
      W.col(i).setConstant(1.0 / static_cast<double>(cfg.K));
    }
  }
  return W;
}

CorpusMatrix sample_corpus(const Matrix& a, const Matrix& w, Index doc_len, std::uint64_t seed) {
  if (a.cols() != w.rows()) throw ConfigError("A and W dimensions are inconsistent");
  if (doc_len < 1) throw ConfigError("document length must be positive");
  if ((a.array() < 0.0).any() || (w.array() < 0.0).any()) throw ConfigError("A and W must be non-negative");
  const Index p = a.rows(), n = w.cols();

  std::vector<std::vector<std::pair<Index, std::int64_t>>> per_doc(static_cast<std::size_t>(n));
  std::vector<int> bad(static_cast<std::size_t>(n), 0);

#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    Vector prob = a * w.col(i);
    const double mass = prob.sum();
    if (std::abs(mass - 1.0) > 1e-9) {
      bad[i] = 1;
      continue;
    }
    std::mt19937_64 rng(child_seed(seed ^ kStreamCorpus, static_cast<std::uint64_t>(i)));
    // Conditional binomial decomposition of the multinomial.
    std::int64_t remaining = doc_len;
    double rest = 1.0;
    auto& out = per_doc[i];
    for (Index j = 0; j < p && remaining > 0; ++j) {
      const double pj = prob[j];
      if (pj <= 0.0) continue;
      std::int64_t c;
      if (j == p - 1 || pj >= rest) {
        c = remaining;
      } else {
        std::binomial_distribution<std::int64_t> bin(remaining, std::clamp(pj / rest, 0.0, 1.0));
        c = bin(rng);
      }
      rest -= pj;
      if (c > 0) {
        out.emplace_back(j, c);
        remaining -= c;
      }
    }
    if (remaining > 0) {
      // Rounding left mass at the tail: give it to the last supported word.
      Index last = p - 1;
      while (last > 0 && prob[last] <= 0.0) --last;
      if (!out.empty() && out.back().first == last) {
        out.back().second += remaining;
      } else {
        out.emplace_back(last, remaining);
      }
    }
  }
  for (Index i = 0; i < n; ++i)
    if (bad[i]) throw ConfigError("column " + std::to_string(i + 1) + " of AW does not sum to 1 within 1e-9");

  std::vector<Eigen::Triplet<std::int64_t, Index>> trip;
  for (Index i = 0; i < n; ++i)
    for (auto [j, c] : per_doc[i]) trip.emplace_back(j, i, c);
  SparseCounts counts(p, n);
  counts.setFromTriplets(trip.begin(), trip.end());
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(n), doc_len);
  return CorpusMatrix(std::move(counts), std::move(lengths));
}

SyntheticCorpus generate_corpus(const GenerationConfig& cfg) {
  SyntheticCorpus s;
  s.a = generate_topic_matrix(cfg);
  s.w = generate_weights(cfg);
  s.corpus = sample_corpus(s.a, s.w, cfg.N, child_seed(cfg.seed, kStreamCorpus));
  return s;
}

SparsityReport assumption_diagnostics(const Matrix& a, const Matrix& w, const std::vector<double>& q_grid) {
  if (a.cols() != w.rows()) throw ConfigError("A and W dimensions are inconsistent");
  SparsityReport r;
  const Index K = a.cols();
  Eigen::JacobiSVD<Matrix> svd_a(a);
  r.sigma_k_a_over_sqrt_k = svd_a.singularValues()[K - 1] / std::sqrt(static_cast<double>(K));
  Matrix sigma_w = (w * w.transpose()) / static_cast<double>(w.cols());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_w, Eigen::EigenvaluesOnly);
  r.sigma_k_sigma_w = std::max(0.0, es.eigenvalues()[0]);  // ascending order
  r.min_ata_entry = (a.transpose() * a).minCoeff();

  std::vector<std::vector<double>> sorted(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    sorted[k].assign(a.col(k).data(), a.col(k).data() + a.rows());
    std::sort(sorted[k].begin(), sorted[k].end(), std::greater<>());
  }
  for (double q : q_grid) {
    double s = 0.0;
    for (Index k = 0; k < K; ++k)
      for (std::size_t j = 0; j < sorted[k].size(); ++j) {
        if (sorted[k][j] <= 0.0) break;
        s = std::max(s, static_cast<double>(j + 1) * std::pow(sorted[k][j], q));
      }
    r.s_of_q[q] = s;
  }
  for (Index j = 0; j < a.rows(); ++j) {
    int nonzero = 0;
    for (Index k = 0; k < K; ++k) nonzero += a(j, k) != 0.0;
    if (nonzero == 1) r.anchor_rows.push_back(j);
  }
  return r;
}

}  // namespace tts
