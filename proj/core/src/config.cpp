#include "d2gan/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "d2gan/errors.hpp"

namespace d2gan {

namespace {

using nlohmann::json;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be a positive finite number");
}

void require_at_least(int v, int lo, const char* name) {
  if (v < lo) throw std::invalid_argument(std::string(name) + " must be >= " + std::to_string(lo));
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kVanilla: return "vanilla";
    case ModelKind::kD2: return "d2";
    case ModelKind::kD2Alpha: return "d2alpha";
    case ModelKind::kD2General: return "d2general";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_from_string(const std::string& name) {
  if (name == "vanilla") return ModelKind::kVanilla;
  if (name == "d2") return ModelKind::kD2;
  if (name == "d2alpha") return ModelKind::kD2Alpha;
  if (name == "d2general") return ModelKind::kD2General;
  throw std::invalid_argument("unknown model '" + name + "' (expected vanilla, d2, d2alpha or d2general)");
}

void TrainConfig::validate() const {
  if (model == ModelKind::kD2Alpha) {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw std::invalid_argument("alpha1 and alpha2 must be positive");
    if (!(alpha2 > alpha1)) {
      throw ConstraintViolation("d2alpha requires alpha2 > alpha1 (the optimal discriminators (c P_d/P_g)^(a1 a2/(a2-a1)) "
                                "only maximize the value function under this ordering); got alpha1=" +
                                std::to_string(alpha1) + ", alpha2=" + std::to_string(alpha2));
    }
    if (alpha1 == 1.0 || alpha2 == 1.0) {
      throw std::invalid_argument("d2alpha needs alpha1, alpha2 != 1; use model d2general with a neglog loss for the limit");
    }
  }
  if (model == ModelKind::kD2General) loss_pair();
  require_positive(c1, "c1");
  require_positive(c2, "c2");
  require_positive(lr, "lr");
  require_at_least(batch_size, 2, "batch_size");
  require_at_least(epochs, 1, "epochs");
  require_at_least(noise_dim, 1, "noise_dim");
  require_at_least(hidden, 1, "hidden");
  require_at_least(snapshot_every, 1, "snapshot_every");
  require_at_least(snapshot_size, 100, "snapshot_size");
  require_at_least(metric_every, 1, "metric_every");
  require_at_least(eval_size, 100, "eval_size");
  if (eval_size > 2048) throw std::invalid_argument("eval_size must be <= 2048 (exact Wasserstein budget)");
  require_at_least(kl_draws, 1, "kl_draws");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  }
  require_positive(adam.eps, "adam.eps");
  ring.validate();
  if (run_id.find('/') != std::string::npos || run_id == "." || run_id == "..") {
    throw std::invalid_argument("run_id must be a plain directory name");
  }
}

LossPair TrainConfig::loss_pair() const {
  switch (model) {
    case ModelKind::kD2: return d2gan_pair();
    case ModelKind::kD2Alpha: return alpha_pair(alpha1, alpha2);
    case ModelKind::kD2General:
      if (losses.is_null()) return d2gan_pair();
      return make_loss_pair(losses);
    case ModelKind::kVanilla: break;
  }
  throw std::logic_error("vanilla model has no loss pair");
}

json TrainConfig::to_json() const {
  json j;
  j["model"] = to_string(model);
  j["alpha1"] = alpha1;
  j["alpha2"] = alpha2;
  if (model == ModelKind::kD2General) j["losses"] = losses.is_null() ? d2gan_pair().to_json() : losses;
  j["c1"] = c1;
  j["c2"] = c2;
  j["lr"] = lr;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["noise_dim"] = noise_dim;
  j["hidden"] = hidden;
  j["snapshot_every"] = snapshot_every;
  j["snapshot_size"] = snapshot_size;
  j["metric_every"] = metric_every;
  j["eval_size"] = eval_size;
  j["kl_draws"] = kl_draws;
  j["non_saturating"] = non_saturating;
  j["adam"] = {{"beta1", adam.beta1}, {"beta2", adam.beta2}, {"eps", adam.eps}};
  j["ring"] = {{"n_modes", ring.n_modes}, {"radius", ring.radius}, {"covariance_scale", ring.covariance_scale}};
  j["run_id"] = run_id;
  return j;
}

TrainConfig TrainConfig::from_json(const json& j) {
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  static const std::set<std::string> known = {
      "model",       "alpha1",       "alpha2",      "losses",       "c1",        "c2",
      "lr",          "batch_size",   "epochs",      "seed",         "noise_dim", "hidden",
      "snapshot_every", "snapshot_size", "metric_every", "eval_size", "kl_draws", "non_saturating",
      "adam",        "ring",         "run_id"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw FormatError("unknown config key '" + key + "'");
  }
  TrainConfig c;
  if (j.contains("model")) c = preset(model_from_string(j.at("model").get<std::string>()));
  try {
    read_if(j, "alpha1", c.alpha1);
    read_if(j, "alpha2", c.alpha2);
    if (j.contains("losses")) c.losses = j.at("losses");
    read_if(j, "c1", c.c1);
    read_if(j, "c2", c.c2);
    read_if(j, "lr", c.lr);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "epochs", c.epochs);
    read_if(j, "seed", c.seed);
    read_if(j, "noise_dim", c.noise_dim);
    read_if(j, "hidden", c.hidden);
    read_if(j, "snapshot_every", c.snapshot_every);
    read_if(j, "snapshot_size", c.snapshot_size);
    read_if(j, "metric_every", c.metric_every);
    read_if(j, "eval_size", c.eval_size);
    read_if(j, "kl_draws", c.kl_draws);
    read_if(j, "non_saturating", c.non_saturating);
    if (j.contains("adam")) {
      const json& a = j.at("adam");
      read_if(a, "beta1", c.adam.beta1);
      read_if(a, "beta2", c.adam.beta2);
      read_if(a, "eps", c.adam.eps);
    }
    if (j.contains("ring")) {
      const json& r = j.at("ring");
      read_if(r, "n_modes", c.ring.n_modes);
      read_if(r, "radius", c.ring.radius);
      read_if(r, "covariance_scale", c.ring.covariance_scale);
    }
    read_if(j, "run_id", c.run_id);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad config value: ") + e.what());
  }
  c.adam.lr = c.lr;
  return c;
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string TrainConfig::hash() const {
  json j = to_json();
  for (const char* key : {"epochs", "run_id", "snapshot_every", "snapshot_size", "metric_every", "eval_size", "kl_draws"}) {
    j.erase(key);
  }
  if (model != ModelKind::kD2Alpha) {
    j.erase("alpha1");
    j.erase("alpha2");
  }
  const std::string canonical = j.dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.data(), canonical.size())));
  return buf;
}

TrainConfig preset(ModelKind model) {
  TrainConfig c;
  c.model = model;
  switch (model) {
    case ModelKind::kD2Alpha: break;
    case ModelKind::kD2:
    case ModelKind::kD2General:
      c.c1 = 1.2;
      c.c2 = 1.0;
      c.lr = 2e-4;
      break;
    case ModelKind::kVanilla: c.lr = 1e-3; break;
  }
  c.adam.lr = c.lr;
  return c;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config " + path + " is not valid JSON: " + e.what());
  }
  return TrainConfig::from_json(j);
}

void save_config(const TrainConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << config.to_json().dump(2) << '\n';
}

}  // namespace d2gan
