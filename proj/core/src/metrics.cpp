#include "d2gan/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "d2gan/assignment.hpp"
#include "d2gan/errors.hpp"

namespace d2gan {

namespace {

constexpr double kDensityFloor = 1e-12;
constexpr int kBandwidthCandidates = 13;
constexpr Eigen::Index kLooSubset = 1000;

Eigen::Matrix2d sample_covariance(const Matrix& x) {
  const Eigen::RowVector2d mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  return (centred.transpose() * centred) / static_cast<double>(x.rows() - 1);
}

}  // namespace

double GaussianKde::scott_factor(Eigen::Index n) { return std::pow(static_cast<double>(n), -1.0 / 6.0); }

GaussianKde::GaussianKde(const Matrix& samples, double factor) : samples_(samples) {
  if (samples_.cols() != 2) throw ShapeError("KDE expects n x 2 samples");
  if (samples_.rows() < 2) throw std::invalid_argument("KDE needs at least two samples");
  sample_cov_ = sample_covariance(samples_);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sample_cov_);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-12 * std::max(lmax, 1.0)) {
    throw DegenerateSamples("sample covariance is singular; KDE undefined");
  }
  set_factor(factor);
}

GaussianKde::GaussianKde(const Matrix& samples) : GaussianKde(samples, scott_factor(samples.rows())) {
  const Eigen::Index n = samples_.rows();
  const double scott = scott_factor(n);
  std::array<double, kBandwidthCandidates> factors{};
  for (int k = 0; k < kBandwidthCandidates; ++k) factors[k] = scott * std::pow(2.0, -0.5 * k);

  // Leave-one-out likelihood in coordinates whitened by the sample covariance,
  // where the kernel for factor f is N(0, f^2 I).
  const Eigen::Matrix2d l0 = sample_cov_.llt().matrixL();
  const Eigen::Matrix2d w0 = l0.inverse();
  const Matrix z = samples_ * w0.transpose();
  const Eigen::Index m = std::min(n, kLooSubset);
  const double stride = static_cast<double>(n) / static_cast<double>(m);
  std::array<double, kBandwidthCandidates> score{};
  std::array<double, kBandwidthCandidates> inv2f2{};
  for (int k = 0; k < kBandwidthCandidates; ++k) inv2f2[k] = 0.5 / (factors[k] * factors[k]);
  for (Eigen::Index s = 0; s < m; ++s) {
    const auto i = static_cast<Eigen::Index>(s * stride);
    std::array<double, kBandwidthCandidates> acc{};
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = (z.row(i) - z.row(j)).squaredNorm();
      for (int k = 0; k < kBandwidthCandidates; ++k) acc[k] += std::exp(-d2 * inv2f2[k]);
    }
    for (int k = 0; k < kBandwidthCandidates; ++k) {
      const double dens = acc[k] / (static_cast<double>(n - 1) * 2.0 * std::numbers::pi * factors[k] * factors[k]);
      score[k] += std::log(std::max(dens, std::numeric_limits<double>::min()));
    }
  }
  int best = 0;
  for (int k = 1; k < kBandwidthCandidates; ++k) {
    if (score[k] > score[best]) best = k;
  }
  set_factor(factors[best]);
}

void GaussianKde::set_factor(double factor) {
  factor_ = factor;
  kernel_cov_ = factor * factor * sample_cov_;
  chol_ = kernel_cov_.llt().matrixL();
  whiten_ = chol_.inverse();
  whitened_ = samples_ * whiten_.transpose();
  norm_ = 1.0 / (static_cast<double>(samples_.rows()) * 2.0 * std::numbers::pi * std::sqrt(kernel_cov_.determinant()));
}

double GaussianKde::density(const Eigen::Vector2d& x) const {
  const Eigen::RowVector2d y = (whiten_ * x).transpose();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < whitened_.rows(); ++j) acc += std::exp(-0.5 * (whitened_.row(j) - y).squaredNorm());
  return norm_ * acc;
}

Eigen::Vector2d GaussianKde::sample(Rng& rng) const {
  const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(samples_.rows())));
  const double z0 = rng.normal();
  const double z1 = rng.normal();
  return samples_.row(j).transpose() + chol_ * Eigen::Vector2d(z0, z1);
}

SymmetricKl symmetric_kl_detail(const Matrix& samples_g, const RingSpec& spec, Rng& rng, int mc_draws) {
  spec.validate();
  if (samples_g.cols() != 2) throw ShapeError("symmetric KL expects n x 2 samples");
  if (samples_g.rows() < 100) throw std::invalid_argument("symmetric KL needs at least 100 samples");
  if (mc_draws < 1) throw std::invalid_argument("mc_draws must be positive");
  const GaussianKde kde(samples_g);
  auto safe_log = [](double d) { return std::log(std::max(d, kDensityFloor)); };

  SymmetricKl out;
  out.bandwidth_factor = kde.factor();
  const Matrix real = sample_ring(spec, mc_draws, rng);
  for (int i = 0; i < mc_draws; ++i) {
    const Eigen::Vector2d x = real.row(i).transpose();
    out.forward += safe_log(ring_density(spec, x)) - safe_log(kde.density(x));
  }
  for (int i = 0; i < mc_draws; ++i) {
    const Eigen::Vector2d x = kde.sample(rng);
    out.reverse += safe_log(kde.density(x)) - safe_log(ring_density(spec, x));
  }
  out.forward /= mc_draws;
  out.reverse /= mc_draws;
  out.total = out.forward + out.reverse;
  return out;
}

double symmetric_kl(const Matrix& samples_g, const RingSpec& spec, Rng& rng, int mc_draws) {
  return symmetric_kl_detail(samples_g, spec, rng, mc_draws).total;
}

double wasserstein(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("Wasserstein needs equal-size point sets");
  if (a.rows() == 0) throw std::invalid_argument("Wasserstein needs non-empty point sets");
  if (a.rows() > kMaxExactWassersteinSize) {
    throw std::invalid_argument("exact Wasserstein limited to " + std::to_string(kMaxExactWassersteinSize) + " points");
  }
  const Eigen::Index n = a.rows();
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
  }
  return solve_assignment(cost).cost / static_cast<double>(n);
}

ModeReport mode_coverage(const Matrix& samples, const RingSpec& spec, const ModeCoverageOptions& options) {
  spec.validate();
  if (samples.cols() != 2) throw ShapeError("mode coverage expects n x 2 samples");
  if (samples.rows() < 100) throw std::invalid_argument("mode coverage needs at least 100 samples");
  ModeReport report;
  report.assigned.assign(spec.n_modes, 0);
  report.high_quality.assign(spec.n_modes, 0);
  const double radius = options.quality_sigmas * spec.stddev();
  std::vector<Eigen::Vector2d> centres;
  for (int k = 0; k < spec.n_modes; ++k) centres.push_back(spec.center(k));

  int hq_total = 0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const Eigen::Vector2d x = samples.row(i).transpose();
    int best = 0;
    double best_d2 = (x - centres[0]).squaredNorm();
    for (int k = 1; k < spec.n_modes; ++k) {
      const double d2 = (x - centres[k]).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    ++report.assigned[best];
    if (std::sqrt(best_d2) <= radius) {
      ++report.high_quality[best];
      ++hq_total;
    }
  }
  const double n = static_cast<double>(samples.rows());
  for (int k = 0; k < spec.n_modes; ++k) {
    if (report.high_quality[k] >= options.coverage_fraction * n) ++report.modes_covered;
  }
  report.high_quality_fraction = hq_total / n;
  return report;
}

}  // namespace d2gan
