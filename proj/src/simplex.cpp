#include "tts/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tts {

namespace {

// Inner products through a precomputed Gram matrix; cheap when m is small.
struct GramGeometry {
  Matrix q;
  explicit GramGeometry(Matrix gram) : q(std::move(gram)) {}
  Index size() const { return q.rows(); }
  double norm2(Index i) const { return q(i, i); }
  double dot(Index i, Index j) const { return q(i, j); }
  // Returns argmin_i <p_i, x> for x = sum_s mu_s p_s, and ||x||^2.
  std::pair<Index, double> argmin_dot(const std::vector<Index>& s, const std::vector<double>& mu,
                                      double& xnorm2) const {
    xnorm2 = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = 0; b < s.size(); ++b) xnorm2 += mu[a] * mu[b] * q(s[a], s[b]);
    Index best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < q.rows(); ++i) {
      double v = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) v += mu[a] * q(i, s[a]);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    return {best, best_val};
  }
};

// Explicit coordinates; used when m is large and d is small (vertex to cloud).
struct PointGeometry {
  const Matrix& p;
  explicit PointGeometry(const Matrix& pts) : p(pts) {}
  Index size() const { return p.rows(); }
  double norm2(Index i) const { return p.row(i).squaredNorm(); }
  double dot(Index i, Index j) const { return p.row(i).dot(p.row(j)); }
  std::pair<Index, double> argmin_dot(const std::vector<Index>& s, const std::vector<double>& mu,
                                      double& xnorm2) const {
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(p.cols());
    for (std::size_t a = 0; a < s.size(); ++a) x += mu[a] * p.row(s[a]);
    xnorm2 = x.squaredNorm();
    Vector dots = p * x.transpose();
    Index best = 0;
    dots.minCoeff(&best);
    return {best, dots[best]};
  }
};

// Minimizes ||sum_s a_s p_s||^2 subject to sum a_s = 1 on the active set.
bool affine_min_norm(const auto& geo, const std::vector<Index>& s, std::vector<double>& alpha) {
  const Index k = static_cast<Index>(s.size());
  Matrix kkt = Matrix::Zero(k + 1, k + 1);
  Vector rhs = Vector::Zero(k + 1);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) kkt(a, b) = geo.dot(s[a], s[b]);
    kkt(a, k) = 1.0;
    kkt(k, a) = 1.0;
  }
  rhs[k] = 1.0;
  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) return false;
  Vector sol = lu.solve(rhs);
  alpha.assign(sol.data(), sol.data() + k);
  return std::all_of(alpha.begin(), alpha.end(), [](double v) { return std::isfinite(v); });
}

SimplexLsResult wolfe(const auto& geo, Index dim, const SimplexLsOptions& opts) {
  const Index m = geo.size();
  SimplexLsResult res;
  res.weights = Vector::Zero(m);
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(10 * (m + dim) + 100);

  double max_norm2 = 0.0;
  Index start = 0;
  double min_norm2 = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m; ++i) {
    const double nn = geo.norm2(i);
    max_norm2 = std::max(max_norm2, nn);
    if (nn < min_norm2) {
      min_norm2 = nn;
      start = i;
    }
  }
  std::vector<Index> s{start};
  std::vector<double> mu{1.0};
  const double eps_weight = 1e-14;
  const double gap_tol = opts.tol * std::max(max_norm2, std::numeric_limits<double>::min());

  double xnorm2 = 0.0;
  int iter = 0;
  while (iter < max_iter) {
    ++iter;
    auto [j, pjx] = geo.argmin_dot(s, mu, xnorm2);
    if (xnorm2 - pjx <= gap_tol || std::find(s.begin(), s.end(), j) != s.end()) {
      res.converged = true;
      break;
    }
    s.push_back(j);
    mu.push_back(0.0);

    // Minor cycles: move toward the affine minimizer until it is interior.
    bool stuck = false;
    while (true) {
      std::vector<double> alpha;
      if (!affine_min_norm(geo, s, alpha)) {
        stuck = true;
        break;
      }
      bool interior = std::all_of(alpha.begin(), alpha.end(), [&](double v) { return v > eps_weight; });
      if (interior) {
        mu = std::move(alpha);
        break;
      }
      double theta = 1.0;
      for (std::size_t a = 0; a < s.size(); ++a)
        if (alpha[a] <= eps_weight) {
          const double denom = mu[a] - alpha[a];
          if (denom > 0.0) theta = std::min(theta, mu[a] / denom);
        }
      for (std::size_t a = 0; a < s.size(); ++a) mu[a] = theta * alpha[a] + (1.0 - theta) * mu[a];
      std::vector<Index> s2;
      std::vector<double> mu2;
      for (std::size_t a = 0; a < s.size(); ++a)
        if (mu[a] > eps_weight) {
          s2.push_back(s[a]);
          mu2.push_back(mu[a]);
        }
      if (s2.empty()) {
        stuck = true;
        break;
      }
      double total = 0.0;
      for (double v : mu2) total += v;
      for (double& v : mu2) v /= total;
      s = std::move(s2);
      mu = std::move(mu2);
      if (++iter >= max_iter) break;
    }
    if (stuck) {
      // Affinely dependent active set; the current iterate is the best we have.
      geo.argmin_dot(s, mu, xnorm2);
      res.converged = false;
      break;
    }
  }
  if (iter >= max_iter && !res.converged) geo.argmin_dot(s, mu, xnorm2);
  double total = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    res.weights[s[a]] += std::max(0.0, mu[a]);
    total += std::max(0.0, mu[a]);
  }
  if (total > 0.0) res.weights /= total;
  res.sqdist = std::max(0.0, xnorm2);
  res.iterations = iter;
  return res;
}

SimplexLsResult solve(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Matrix>& v,
                      const SimplexLsOptions& opts) {
  if (v.rows() < 1 || v.cols() < 1) throw ConfigError("simplex LS needs m >= 1 and d >= 1");
  if (u.size() != v.cols()) throw ConfigError("simplex LS: point dimension does not match vertices");
  Matrix shifted = v.rowwise() - u.transpose();
  SimplexLsResult res;
  if (v.rows() <= 64) {
    res = wolfe(GramGeometry(shifted * shifted.transpose()), v.cols(), opts);
  } else {
    res = wolfe(PointGeometry(shifted), v.cols(), opts);
  }
  // Recompute the distance from the weights in original coordinates.
  Vector proj = v.transpose() * res.weights;
  res.sqdist = (proj - u).squaredNorm();
  return res;
}

}  // namespace

SimplexLsResult simplex_ls_gram(const Matrix& q, const SimplexLsOptions& opts) {
  if (q.rows() < 1 || q.rows() != q.cols()) throw ConfigError("simplex LS: Gram matrix must be square and non-empty");
  auto res = wolfe(GramGeometry(q), q.rows(), opts);
  res.sqdist = std::max(0.0, res.weights.dot(q * res.weights));
  return res;
}

SimplexLsResult simplex_barycentric_ls_nothrow(const Eigen::Ref<const Vector>& u,
                                               const Eigen::Ref<const Matrix>& v,
                                               const SimplexLsOptions& opts) {
  return solve(u, v, opts);
}

SimplexLsResult simplex_barycentric_ls(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Matrix>& v,
                                       const SimplexLsOptions& opts) {
  auto res = solve(u, v, opts);
  if (!res.converged) {
    // An affinely dependent active set can still be optimal; accept it when KKT holds.
    if (!simplex_kkt_satisfied(u, v, res.weights, 1e-8))
      throw NumericalError("simplex least squares did not converge after " + std::to_string(res.iterations) +
                           " iterations");
    res.converged = true;
  }
  return res;
}

bool simplex_kkt_satisfied(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Matrix>& v,
                           const Vector& weights, double tol) {
  if (weights.size() != v.rows()) return false;
  if ((weights.array() < -tol).any() || std::abs(weights.sum() - 1.0) > tol) return false;
  Vector resid = v.transpose() * weights - u;
  Vector grad = 2.0 * (v * resid);
  const double scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
  double support_level = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < weights.size(); ++i)
    if (weights[i] > 1e-12) support_level = std::min(support_level, grad[i]);
  for (Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 1e-12 && std::abs(grad[i] - support_level) > tol * scale) return false;
    if (grad[i] < support_level - tol * scale) return false;
  }
  return true;
}

double simplex_distance_sum(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Matrix>& v) {
  double total = 0.0;
  for (Index l = 0; l < u.rows(); ++l) total += simplex_barycentric_ls_nothrow(u.row(l).transpose(), v).sqdist;
  return total;
}

}  // namespace tts
