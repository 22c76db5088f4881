#pragma once

#include "tts/common.hpp"

namespace tts {

struct Assignment {
  std::vector<Index> col_for_row;  // a permutation of [0, n)
  double total = 0.0;              // sum of cost(r, col_for_row[r]) in row order
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(n^3)).
Assignment min_cost_assignment(const Matrix& cost);

/// Maximum-weight perfect matching.
Assignment max_weight_assignment(const Matrix& weight);

}  // namespace tts
