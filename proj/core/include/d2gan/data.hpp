#pragma once

#include <Eigen/Dense>

#include "d2gan/rng.hpp"

namespace d2gan {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Equal-weight mixture of isotropic Gaussians centred on a circle.
struct RingSpec {
  int n_modes = 8;
  double radius = 2.0;
  double covariance_scale = 0.02;

  void validate() const;
  // Centre k sits at angle 2 pi k / n_modes.
  Eigen::Vector2d center(int k) const;
  double stddev() const;
};

/// n x 2 matrix of mixture draws.
Matrix sample_ring(const RingSpec& spec, int n, Rng& rng);

/// Exact mixture density at x.
double ring_density(const RingSpec& spec, const Eigen::Vector2d& x);

/// n x dim matrix of i.i.d. standard normals.
Matrix sample_noise(int n, int dim, Rng& rng);

}  // namespace d2gan
