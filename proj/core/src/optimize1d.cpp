#include "d2gan/optimize1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "d2gan/errors.hpp"

namespace d2gan {

namespace {

// Treats NaN as -inf so a single bad evaluation never wins the scan.
double safe(double v) { return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v; }

struct GridBest {
  int index;
  double value;
};

GridBest scan(const std::function<double(double)>& g, double lo, double hi, int points) {
  GridBest best{0, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    const double v = safe(g(x));
    if (v > best.value) best = {i, v};
  }
  return best;
}

void check_options(const GridSearchOptions& opts) {
  if (opts.points < 3) throw std::invalid_argument("grid search needs at least 3 points");
  if (!(opts.hi > opts.lo)) throw std::invalid_argument("grid search needs hi > lo");
}

}  // namespace

ScalarMax golden_section_max(const std::function<double(double)>& f, double a, double b, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = safe(f(c));
  double fd = safe(f(d));
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = safe(f(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = safe(f(d));
    }
    // Floating-point resolution reached before tol.
    if (!(c < d)) break;
  }
  return fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
}

ScalarMax maximize_log_grid(const std::function<double(double)>& f, const GridSearchOptions& opts) {
  check_options(opts);
  if (!(opts.lo > 0.0)) throw std::invalid_argument("log grid needs lo > 0");
  const double llo = std::log(opts.lo);
  const double lhi = std::log(opts.hi);
  auto g = [&f](double s) { return f(std::exp(s)); };
  const GridBest best = scan(g, llo, lhi, opts.points);
  if (best.index == 0 || best.index == opts.points - 1) {
    throw UnboundedObjective("supremum not attained inside [" + std::to_string(opts.lo) + ", " +
                             std::to_string(opts.hi) + "]: maximum sits at the grid boundary");
  }
  const double step = (lhi - llo) / (opts.points - 1);
  const double centre = llo + step * best.index;
  ScalarMax refined = golden_section_max(g, centre - step, centre + step, opts.tol);
  if (best.value > refined.value) refined = {centre, best.value};
  return {std::exp(refined.arg), refined.value};
}

ScalarMax maximize_linear_grid(const std::function<double(double)>& f, const GridSearchOptions& opts) {
  check_options(opts);
  const GridBest best = scan(f, opts.lo, opts.hi, opts.points);
  const double step = (opts.hi - opts.lo) / (opts.points - 1);
  const double centre = opts.lo + step * best.index;
  const double a = std::max(opts.lo, centre - step);
  const double b = std::min(opts.hi, centre + step);
  ScalarMax refined = golden_section_max(f, a, b, opts.tol);
  if (best.value >= refined.value) refined = {centre, best.value};
  return refined;
}

}  // namespace d2gan
