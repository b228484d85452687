#pragma once

// Deterministic random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; normals come from the Box-Muller
// transform so no library distribution (implementation-defined) is involved.

#include <cstdint>
#include <random>

namespace tvrls {

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` under `master`:
///   splitmix64(master + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tvrls
