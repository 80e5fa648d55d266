#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "d2gan/data.hpp"
#include "d2gan/rng.hpp"

namespace d2gan {

class DegenerateSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gaussian kernel density estimate in 2-D with kernel covariance
/// factor^2 * (sample covariance).
///
/// Bandwidth: candidate factors are Scott's n^(-1/6) scaled by 2^(-k/2),
/// k = 0..12. The factor with the highest leave-one-out log-likelihood wins
/// (evaluated on at most 1000 evenly strided samples against all samples).
/// Plain Scott smooths the eight ring modes into one another, so it is only
/// the upper end of the search.
class GaussianKde {
 public:
  explicit GaussianKde(const Matrix& samples);
  GaussianKde(const Matrix& samples, double factor);

  double density(const Eigen::Vector2d& x) const;
  Eigen::Vector2d sample(Rng& rng) const;

  double factor() const { return factor_; }
  const Eigen::Matrix2d& kernel_covariance() const { return kernel_cov_; }

  static double scott_factor(Eigen::Index n);

 private:
  void set_factor(double factor);

  Matrix samples_;
  Eigen::Matrix2d sample_cov_;
  double factor_ = 1.0;
  Eigen::Matrix2d kernel_cov_;
  Eigen::Matrix2d whiten_;     // L^-1 with L L^T = kernel_cov_
  Matrix whitened_;            // samples_ * whiten_^T
  Eigen::Matrix2d chol_;       // L
  double norm_ = 0.0;
};

struct SymmetricKl {
  double forward = 0.0;  // KL(P_d || P_g)
  double reverse = 0.0;  // KL(P_g || P_d)
  double total = 0.0;
  double bandwidth_factor = 0.0;
};

/// KL(P_d||P_g) + KL(P_g||P_d) with P_g a KDE of `samples_g` and P_d the
/// exact ring density. Each direction is a Monte Carlo mean over `mc_draws`
/// draws (from the ring and from the KDE respectively) using `rng`.
/// Densities are floored at 1e-12 inside the logs.
SymmetricKl symmetric_kl_detail(const Matrix& samples_g, const RingSpec& spec, Rng& rng, int mc_draws = 10000);
double symmetric_kl(const Matrix& samples_g, const RingSpec& spec, Rng& rng, int mc_draws = 10000);

inline constexpr int kMaxExactWassersteinSize = 2048;

/// Exact empirical 1-Wasserstein between equal-size point sets: optimal
/// matching cost under Euclidean distance divided by n.
double wasserstein(const Matrix& a, const Matrix& b);

struct ModeCoverageOptions {
  double quality_sigmas = 3.0;     // high quality: within this many stddevs of the nearest centre
  double coverage_fraction = 0.02; // covered: at least this share of all samples are HQ samples of the mode
};

struct ModeReport {
  std::vector<int> assigned;      // samples whose nearest centre is mode k
  std::vector<int> high_quality;  // of those, samples within the quality radius
  int modes_covered = 0;
  double high_quality_fraction = 0.0;
};

ModeReport mode_coverage(const Matrix& samples, const RingSpec& spec, const ModeCoverageOptions& options = {});

}  // namespace d2gan
