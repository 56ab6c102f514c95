#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace gjn {

/// SplitMix64 finalizer. Used to derive independent sub-seeds from a master
/// seed; the derivation only depends on integer arithmetic, so streams are
/// identical on every platform.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `stream` within replication `replication` of an experiment
/// with the given master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                                    std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ replication) ^ (stream * 0xd1b54a32d192ed03ULL));
}

/// A single random stream. The variate transforms are written out here
/// instead of using <random> distributions, whose outputs are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  double exponential() { return -std::log(uniform()); }
  double normal();
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace gjn
