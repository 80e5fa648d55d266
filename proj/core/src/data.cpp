#include "d2gan/data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "d2gan/errors.hpp"

namespace d2gan {

void RingSpec::validate() const {
  if (n_modes < 1) throw std::invalid_argument("ring needs at least one mode");
  if (!(radius > 0.0)) throw std::invalid_argument("ring radius must be positive");
  if (!(covariance_scale > 0.0)) throw std::invalid_argument("covariance scale must be positive");
}

Eigen::Vector2d RingSpec::center(int k) const {
  const double angle = 2.0 * std::numbers::pi * k / n_modes;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double RingSpec::stddev() const { return std::sqrt(covariance_scale); }

Matrix sample_ring(const RingSpec& spec, int n, Rng& rng) {
  spec.validate();
  if (n < 0) throw std::invalid_argument("sample count must be non-negative");
  Matrix out(n, 2);
  const double sd = spec.stddev();
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n_modes)));
    const Eigen::Vector2d c = spec.center(k);
    out(i, 0) = c.x() + sd * rng.normal();
    out(i, 1) = c.y() + sd * rng.normal();
  }
  return out;
}

double ring_density(const RingSpec& spec, const Eigen::Vector2d& x) {
  spec.validate();
  const double var = spec.covariance_scale;
  const double norm = 1.0 / (2.0 * std::numbers::pi * var);
  double total = 0.0;
  for (int k = 0; k < spec.n_modes; ++k) {
    total += std::exp(-(x - spec.center(k)).squaredNorm() / (2.0 * var));
  }
  return norm * total / spec.n_modes;
}

Matrix sample_noise(int n, int dim, Rng& rng) {
  if (n < 1 || dim < 1) throw std::invalid_argument("noise shape must be positive");
  Matrix out(n, dim);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = rng.normal();
  return out;
}

}  // namespace d2gan
