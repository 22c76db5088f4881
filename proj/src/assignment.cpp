#include "tts/assignment.hpp"

#include <cmath>
#include <limits>

namespace tts {

Assignment min_cost_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  if (n != cost.cols()) throw ConfigError("assignment needs a square cost matrix");
  if (!cost.allFinite()) throw ConfigError("assignment costs must be finite");
  Assignment a;
  if (n == 0) return a;
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; p[c] is the row matched to column c.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index r = 1; r <= n; ++r) {
    p[0] = r;
    Index c0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[c0] = 1;
      const Index r0 = p[c0];
      double delta = inf;
      Index c1 = 0;
      for (Index c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = c0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          c1 = c;
        }
      }
      for (Index c = 0; c <= n; ++c) {
        if (used[c]) {
          u[p[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      c0 = c1;
    } while (p[c0] != 0);
    do {
      const Index c1 = way[c0];
      p[c0] = p[c1];
      c0 = c1;
    } while (c0 != 0);
  }
  a.col_for_row.assign(static_cast<std::size_t>(n), 0);
  for (Index c = 1; c <= n; ++c) a.col_for_row[p[c] - 1] = c - 1;
  for (Index r = 0; r < n; ++r) a.total += cost(r, a.col_for_row[r]);
  return a;
}

Assignment max_weight_assignment(const Matrix& weight) {
  Assignment a = min_cost_assignment(-weight);
  a.total = 0.0;
  for (Index r = 0; r < weight.rows(); ++r) a.total += weight(r, a.col_for_row[r]);
  return a;
}

}  // namespace tts
