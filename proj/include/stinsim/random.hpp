#pragma once

#include <cstdint>
#include <random>

namespace stinsim {

using RandomEngine = std::mt19937_64;

/// Independent sub-streams consumed by one trial. Each purpose gets its own
/// engine so that, e.g., the fading draws do not shift when the geometry
/// stream consumes a different number of values.
enum class StreamPurpose : std::uint64_t {
  kGeometry = 1,
  kFading = 2,
  kAvailability = 3,
  kPilots = 4,
  kChannels = 5,
  kPilotNoise = 6,
  kPopulation = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based derivation: the stream for (seed, index, purpose) never
/// depends on which other trials ran or in which order.
inline RandomEngine make_stream(std::uint64_t master_seed, std::uint64_t index,
                                StreamPurpose purpose) {
  std::uint64_t key = splitmix64(master_seed);
  key = splitmix64(key ^ index);
  key = splitmix64(key ^ static_cast<std::uint64_t>(purpose));
  return RandomEngine(key);
}

/// Seed for a nested family of streams, e.g. one replication of an experiment.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication) {
  return splitmix64(splitmix64(master_seed) + 0xD1B54A32D192ED03ULL * (replication + 1));
}

}  // namespace stinsim
