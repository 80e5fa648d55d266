#include "d2gan/verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "d2gan/divergences.hpp"
#include "d2gan/rng.hpp"
#include "d2gan/theory.hpp"

namespace d2gan {

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
}

struct AlphaDraw {
  double alpha1;
  double alpha2;
};

AlphaDraw draw_alphas(Rng& rng) {
  for (;;) {
    const double a1 = 0.2 + 2.8 * rng.uniform();
    const double a2 = a1 + 0.2 + 2.8 * rng.uniform();
    if (std::abs(a1 - 1.0) > 1e-3 && std::abs(a2 - 1.0) > 1e-3) return {a1, a2};
  }
}

// Largest |log D*| the optimal discriminators reach on this setting.
double max_log_discriminator(const GanTheorySetting& s, const AlphaDraw& a) {
  const double k = a.alpha1 * a.alpha2 / (a.alpha2 - a.alpha1);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.pd.size(); ++i) {
    const double r = std::log(s.pd[i] / s.pg[i]);
    worst = std::max(worst, std::abs(k * (std::log(s.c1) + r)));
    worst = std::max(worst, std::abs(k * (std::log(s.c2) - r)));
  }
  return worst;
}

GanTheorySetting draw_setting(Rng& rng, double c_lo, double c_hi, LossPair pair) {
  const std::size_t support = 2 + rng.below(15);
  DiscreteDistribution pd = random_distribution(rng, support);
  DiscreteDistribution pg = random_distribution(rng, support);
  const double c1 = log_uniform(rng, c_lo, c_hi);
  const double c2 = log_uniform(rng, c_lo, c_hi);
  return {std::move(pd), std::move(pg), c1, c2, std::move(pair)};
}

// Draws an alpha setting whose optimal discriminators stay within exp(+-limit).
std::pair<GanTheorySetting, AlphaDraw> draw_alpha_setting(Rng& rng, double limit) {
  for (;;) {
    const AlphaDraw a = draw_alphas(rng);
    GanTheorySetting s = draw_setting(rng, 0.05, 5.0, alpha_pair(a.alpha1, a.alpha2));
    if (max_log_discriminator(s, a) <= limit) return {std::move(s), a};
  }
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

IdentityResult finish(std::string name, double max_error, double tol, int trials) {
  return {std::move(name), max_error, tol, trials, std::isfinite(max_error) && max_error < tol};
}

IdentityResult check_optimal_discriminator(Rng& rng, int trials) {
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const AlphaDraw a = draw_alphas(rng);
    const double k = a.alpha1 * a.alpha2 / (a.alpha2 - a.alpha1);
    const double b = log_uniform(rng, 0.1, 10.0);
    const double span = std::min(std::log(10.0), 10.0 / k);
    const double ratio = std::exp(span * (2.0 * rng.uniform() - 1.0));
    const double expected = std::pow(ratio, k);
    const PointwiseOptimum opt = pointwise_bruteforce_opt(ratio * b, b, alpha_pair(a.alpha1, a.alpha2));
    worst = std::max(worst, rel_err(opt.t_star, expected));
  }
  return finish("optimal_discriminator_maximizer", worst, 1e-4, trials);
}

IdentityResult check_value_at_optimum(Rng& rng, int trials, double shift) {
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    auto [s, a] = draw_alpha_setting(rng, 25.0);
    const DiscriminatorPair d = optimal_discriminators(s, a.alpha1, a.alpha2);
    const double v = value_function(s, d.d1, d.d2);
    const double rhs =
        s.c1 * f_divergence(s.pd, s.pg,
                            {[&](double u) { return detail::fc_closed_form_shifted(u, a.alpha1, a.alpha2, s.c1, shift); },
                             GeneratorKind::kClosedFormAlpha, std::nullopt}) +
        s.c2 * f_divergence(s.pg, s.pd,
                            {[&](double u) { return detail::fc_closed_form_shifted(u, a.alpha1, a.alpha2, s.c2, shift); },
                             GeneratorKind::kClosedFormAlpha, std::nullopt});
    worst = std::max(worst, std::abs(v - rhs) / (1.0 + std::abs(v)));
  }
  return finish("value_at_optimum", worst, 1e-8, trials);
}

IdentityResult check_min_value(Rng& rng, int trials) {
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const AlphaDraw a = draw_alphas(rng);
    const double c1 = log_uniform(rng, 0.05, 5.0);
    const double c2 = log_uniform(rng, 0.05, 5.0);
    const std::size_t support = 2 + rng.below(15);
    DiscreteDistribution p = random_distribution(rng, support);
    GanTheorySetting s{p, p, c1, c2, alpha_pair(a.alpha1, a.alpha2)};
    const double rhs = closed_form_divergence_sum(s, a.alpha1, a.alpha2);
    const double expected = equal_distribution_value(c1, c2, a.alpha1, a.alpha2);
    // c^(a1(a2-1)/(a2-a1)) reaches 1e50 for close alphas, so the error is
    // measured relative to the value's scale.
    worst = std::max(worst, std::abs(rhs - expected) / (1.0 + std::abs(expected)));
  }
  return finish("min_value_at_equal_distributions", worst, 1e-9, trials);
}

std::vector<IdentityResult> check_generic_pair(Rng& rng, int trials) {
  double alpha_vs_closed = 0.0;
  double alpha_sup = 0.0;
  double kl_form = 0.0;
  double kl_sup = 0.0;
  for (int i = 0; i < trials; ++i) {
    auto [s, a] = draw_alpha_setting(rng, 12.0);
    const double rhs2 = generic_divergence_sum(s);
    alpha_vs_closed = std::max(alpha_vs_closed, std::abs(rhs2 - closed_form_divergence_sum(s, a.alpha1, a.alpha2)));
    alpha_sup = std::max(alpha_sup, std::abs(sup_value_bruteforce(s) - rhs2));

    GanTheorySetting k = draw_setting(rng, 0.2, 5.0, d2gan_pair());
    const double target = k.c1 * std::log(k.c1) - k.c1 + k.c1 * kl_family(k.pd, k.pg, KlKind::kForward) +
                          k.c2 * std::log(k.c2) - k.c2 + k.c2 * kl_family(k.pg, k.pd, KlKind::kForward);
    const double rhs_kl = generic_divergence_sum(k);
    kl_form = std::max(kl_form, std::abs(rhs_kl - target));
    kl_sup = std::max(kl_sup, std::abs(sup_value_bruteforce(k) - rhs_kl));
  }
  return {finish("generic_alpha_pair_matches_closed_form", alpha_vs_closed, 1e-6, trials),
          finish("generic_alpha_pair_sup_decomposition", alpha_sup, 1e-6, trials),
          finish("generic_kl_pair_matches_kl_form", kl_form, 1e-6, trials),
          finish("generic_kl_pair_sup_decomposition", kl_sup, 1e-6, trials)};
}

IdentityResult check_limit(Rng& rng, int trials) {
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    GanTheorySetting s = draw_setting(rng, 0.5, 2.0, d2gan_pair());
    worst = std::max(worst, kl_limit_check(s).final_gap());
  }
  return finish("kl_limit_gap", worst, 1e-3, trials);
}

IdentityResult check_mixed_alpha(Rng& rng, int trials) {
  double worst = std::abs(mixed_alpha_root(1.0, 2.0) - (std::sqrt(5.0) - 1.0) / 2.0);
  for (int i = 0; i < trials; ++i) {
    const double a = 0.1 + 5.0 * rng.uniform();
    const double b = 0.1 + 5.0 * rng.uniform();
    worst = std::max(worst, std::abs(mixed_alpha_root(a, a) - 0.5));
    worst = std::max(worst, std::abs(mixed_alpha_root(a, b) + mixed_alpha_root(b, a) - 1.0));
  }
  return finish("mixed_alpha_root_symmetry", worst, 1e-9, trials);
}

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(identities.begin(), identities.end(), [](const IdentityResult& r) { return r.pass; });
}

std::vector<std::string> VerifyReport::failing() const {
  std::vector<std::string> names;
  for (const auto& r : identities) {
    if (!r.pass) names.push_back(r.name);
  }
  return names;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& r : identities) {
    ids.push_back({{"name", r.name},
                   {"max_error", r.max_error},
                   {"tolerance", r.tolerance},
                   {"trials", r.trials},
                   {"pass", r.pass}});
  }
  nlohmann::json j{{"seed", options.seed}, {"trials", options.trials}, {"identities", ids}, {"all_pass", all_pass()}};
  if (options.fc_exponent_shift != 0.0) j["fc_exponent_shift"] = options.fc_exponent_shift;
  return j;
}

VerifyReport run_verification(const VerifyOptions& options) {
  VerifyReport report{options, {}};
  const int trials = std::max(options.trials, 1);
  // The sup-based identities scan 2001 grid points per support point; they
  // run on a tenth of the trials.
  const int heavy_trials = std::max(trials / 10, 5);

  Rng rng(options.seed);
  report.identities.push_back(check_optimal_discriminator(rng, trials));
  report.identities.push_back(check_value_at_optimum(rng, trials, options.fc_exponent_shift));
  report.identities.push_back(check_min_value(rng, trials));
  for (auto& r : check_generic_pair(rng, heavy_trials)) report.identities.push_back(std::move(r));
  report.identities.push_back(check_limit(rng, trials));
  report.identities.push_back(check_mixed_alpha(rng, trials));
  return report;
}

}  // namespace d2gan
