#pragma once

#include <functional>

namespace d2gan {

struct ScalarMax {
  double arg;
  double value;
};

struct GridSearchOptions {
  double lo;
  double hi;
  int points;
  // Absolute tolerance on the search variable (log t for log grids).
  double tol = 1e-10;
};

/// Maximizes f over [lo, hi] (lo > 0) by a log-spaced scan followed by
/// golden-section refinement in log space around the best grid point.
/// Throws UnboundedObjective if the best grid point is an endpoint, which is
/// how a supremum that escapes the range shows up.
ScalarMax maximize_log_grid(const std::function<double(double)>& f, const GridSearchOptions& opts);

/// Linear-grid variant on a closed interval. Endpoints are legitimate
/// maximizers here; refinement stays inside [lo, hi].
ScalarMax maximize_linear_grid(const std::function<double(double)>& f, const GridSearchOptions& opts);

/// Golden-section search for the maximum of a unimodal f on [a, b].
ScalarMax golden_section_max(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace d2gan
