#pragma once

#include "tts/common.hpp"

namespace tts {

/// Retained word set J with the threshold that produced it.
struct VocabularySubset {
  std::vector<Index> indices;  // strictly increasing
  Index p = 0;                 // full vocabulary size
  double alpha = 0.0;
  double threshold_value = 0.0;
  double removed_fraction = 0.0;

  Index size() const { return static_cast<Index>(indices.size()); }

  // J = [p], no threshold.
  static VocabularySubset all(Index p);
};

}  // namespace tts
