#include "d2gan/checkpoint.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "d2gan/errors.hpp"

namespace d2gan {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'D', '2', 'G', 'A', 'N', 'C', 'K', '\0'};

json nan_as_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double null_as_nan(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

template <typename T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
 public:
  Reader(const std::string& data, std::size_t end) : data_(data), end_(end) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) throw FormatError("checkpoint truncated");
  }
  const std::string& data_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

json rng_json(const Rng::State& s) {
  return {{"words", s.words}, {"has_spare", s.has_spare}, {"spare", s.spare}};
}

Rng::State rng_from_json(const json& j) {
  Rng::State s;
  s.words = j.at("words").get<std::array<std::uint64_t, 4>>();
  s.has_spare = j.at("has_spare").get<bool>();
  s.spare = j.at("spare").get<double>();
  return s;
}

json layers_json(const Network& net) {
  json layers = json::array();
  for (const auto& s : net.layers()) {
    layers.push_back({{"in", s.in_dim}, {"out", s.out_dim}, {"activation", to_string(s.activation)}});
  }
  return layers;
}

Network network_from_layers(const json& layers) {
  std::vector<LayerSpec> specs;
  for (const auto& l : layers) {
    specs.push_back({l.at("in").get<int>(), l.at("out").get<int>(),
                     activation_from_string(l.at("activation").get<std::string>())});
  }
  return Network(std::move(specs));
}

}  // namespace

json to_json(const MetricRow& row) {
  return {{"epoch", row.epoch},
          {"sym_kl", nan_as_null(row.sym_kl)},
          {"wasserstein", nan_as_null(row.wasserstein)},
          {"modes_covered", row.modes_covered},
          {"hq_fraction", nan_as_null(row.hq_fraction)},
          {"value_fn", nan_as_null(row.value_fn)}};
}

MetricRow metric_row_from_json(const json& j) {
  MetricRow r;
  r.epoch = j.at("epoch").get<int>();
  r.sym_kl = null_as_nan(j.at("sym_kl"));
  r.wasserstein = null_as_nan(j.at("wasserstein"));
  r.modes_covered = j.at("modes_covered").get<int>();
  r.hq_fraction = null_as_nan(j.at("hq_fraction"));
  r.value_fn = null_as_nan(j.at("value_fn"));
  return r;
}

void save_checkpoint(const TrainState& state, const std::string& path) {
  std::vector<double> payload;
  auto append = [&payload](const Eigen::VectorXd& v) {
    const std::size_t offset = payload.size();
    payload.insert(payload.end(), v.data(), v.data() + v.size());
    return offset;
  };

  const bool dual = state.config.model != ModelKind::kVanilla;
  std::vector<std::pair<std::string, const Network*>> nets = {{"g", &state.players.g}, {"d1", &state.players.d1}};
  std::vector<std::pair<std::string, const AdamState*>> adams = {{"g", &state.adam_g}, {"d1", &state.adam_d1}};
  if (dual) {
    nets.emplace_back("d2", &state.players.d2);
    adams.emplace_back("d2", &state.adam_d2);
  }

  json header;
  header["config"] = state.config.to_json();
  header["config_hash"] = state.config.hash();
  header["epoch"] = state.epoch;
  header["nonfinite_streak"] = state.nonfinite_streak;
  for (const auto& [name, net] : nets) {
    const std::size_t offset = append(net->params());
    header["networks"][name] = {{"layers", layers_json(*net)}, {"offset", offset}, {"count", net->param_count()}};
  }
  for (const auto& [name, adam] : adams) {
    const std::size_t m_off = append(adam->m);
    const std::size_t v_off = append(adam->v);
    header["adam"][name] = {{"step", adam->step},    {"lr", adam->config.lr},   {"beta1", adam->config.beta1},
                            {"beta2", adam->config.beta2}, {"eps", adam->config.eps}, {"m_offset", m_off},
                            {"v_offset", v_off},     {"count", adam->m.size()}};
  }
  header["rng"] = {{"data", rng_json(state.data_rng)}, {"noise", rng_json(state.noise_rng)}};
  header["rows"] = json::array();
  for (const auto& r : state.rows) header["rows"].push_back(to_json(r));
  header["snapshot_epochs"] = state.snapshot_epochs;

  const std::string text = header.dump();
  std::string buf(kMagic.data(), kMagic.size());
  put(buf, kCheckpointVersion);
  put(buf, static_cast<std::uint64_t>(text.size()));
  buf += text;
  put(buf, static_cast<std::uint64_t>(payload.size()));
  buf.append(reinterpret_cast<const char*>(payload.data()), payload.size() * sizeof(double));
  put(buf, fnv1a64(buf.data(), buf.size()));

  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("checkpoint write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < kMagic.size() + sizeof(std::uint32_t) + 3 * sizeof(std::uint64_t)) {
    throw FormatError("checkpoint " + path + " is too short");
  }
  if (std::memcmp(data.data(), kMagic.data(), kMagic.size()) != 0) throw FormatError(path + " is not a checkpoint");
  const std::size_t body = data.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, data.data() + body, sizeof stored);
  if (stored != fnv1a64(data.data(), body)) throw FormatError("checkpoint " + path + " failed its checksum");

  Reader r(data, body);
  r.bytes(kMagic.size());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const auto header_len = r.get<std::uint64_t>();
  const std::string text = r.bytes(header_len);
  const auto count = r.get<std::uint64_t>();
  if (count > (body - r.pos()) / sizeof(double) || count * sizeof(double) != body - r.pos()) {
    throw FormatError("checkpoint payload length mismatch");
  }
  std::vector<double> payload(count);
  std::memcpy(payload.data(), data.data() + r.pos(), count * sizeof(double));

  try {
    const json header = json::parse(text);
    TrainState s;
    s.config = TrainConfig::from_json(header.at("config"));
    if (s.config.hash() != header.at("config_hash").get<std::string>()) {
      throw FormatError("checkpoint config hash does not match its config");
    }
    s.epoch = header.at("epoch").get<int>();
    s.nonfinite_streak = header.at("nonfinite_streak").get<int>();

    auto slice = [&payload](std::size_t offset, std::size_t n) {
      if (offset > payload.size() || n > payload.size() - offset) throw FormatError("checkpoint offset out of range");
      return Eigen::Map<const Eigen::VectorXd>(payload.data() + offset, static_cast<Eigen::Index>(n)).eval();
    };
    auto load_net = [&](const std::string& name) {
      const json& j = header.at("networks").at(name);
      Network net = network_from_layers(j.at("layers"));
      const auto n = j.at("count").get<std::size_t>();
      if (n != net.param_count()) throw FormatError("network '" + name + "' parameter count mismatch");
      net.params() = slice(j.at("offset").get<std::size_t>(), n);
      return net;
    };
    auto load_adam = [&](const std::string& name) {
      const json& j = header.at("adam").at(name);
      AdamConfig cfg{j.at("lr").get<double>(), j.at("beta1").get<double>(), j.at("beta2").get<double>(),
                     j.at("eps").get<double>()};
      const auto n = j.at("count").get<std::size_t>();
      AdamState a(n, cfg);
      a.step = j.at("step").get<std::int64_t>();
      a.m = slice(j.at("m_offset").get<std::size_t>(), n);
      a.v = slice(j.at("v_offset").get<std::size_t>(), n);
      return a;
    };

    s.players.g = load_net("g");
    s.players.d1 = load_net("d1");
    s.adam_g = load_adam("g");
    s.adam_d1 = load_adam("d1");
    if (s.config.model != ModelKind::kVanilla) {
      s.players.d2 = load_net("d2");
      s.adam_d2 = load_adam("d2");
    }
    s.data_rng = rng_from_json(header.at("rng").at("data"));
    s.noise_rng = rng_from_json(header.at("rng").at("noise"));
    for (const auto& row : header.at("rows")) s.rows.push_back(metric_row_from_json(row));
    s.snapshot_epochs = header.at("snapshot_epochs").get<std::vector<int>>();
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid checkpoint contents: ") + e.what());
  }
}

}  // namespace d2gan
