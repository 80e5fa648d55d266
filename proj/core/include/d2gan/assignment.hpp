#pragma once

#include <vector>

#include "d2gan/data.hpp"

namespace d2gan {

struct Assignment {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with row/column potentials, O(n^3)).
Assignment solve_assignment(const Matrix& cost);

}  // namespace d2gan
