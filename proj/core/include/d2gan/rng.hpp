#pragma once

#include <array>
#include <cstdint>

namespace d2gan {

/// xoshiro256** seeded through SplitMix64.
///
/// Streams: `Rng::stream(seed, k)` seeds from `seed` and then applies the
/// xoshiro256 jump polynomial k times. Each jump advances 2^128 draws, so
/// streams 0, 1, 2, ... never overlap in practice.
///
/// Doubles are the top 53 bits of a draw scaled by 2^-53. Normals use the
/// Box-Muller transform on (1 - u1, u2); the second variate of each pair is
/// cached and is part of the serialized state.
class Rng {
 public:
  struct State {
    std::array<std::uint64_t, 4> words{};
    bool has_spare = false;
    double spare = 0.0;

    friend bool operator==(const State&, const State&) = default;
  };

  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  // [0, 1)
  double uniform();
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  void jump();

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

 private:
  State state_;
};

/// Fixed stream indices used by training runs.
enum class StreamId : std::uint64_t {
  kInit = 0,
  kData = 1,
  kNoise = 2,
  kMetrics = 3,
  kSnapshot = 4,
};

inline Rng make_stream(std::uint64_t seed, StreamId id) {
  return Rng::stream(seed, static_cast<std::uint64_t>(id));
}

/// Stream keyed by (seed, epoch) for evaluation work, so that metric rows do
/// not depend on how a run was split across resumes.
inline Rng make_epoch_stream(std::uint64_t seed, std::uint64_t epoch, StreamId id) {
  return Rng::stream(seed ^ (0x9E3779B97F4A7C15ULL * (epoch + 1)), static_cast<std::uint64_t>(id));
}

}  // namespace d2gan
