#pragma once

// Scalar Brownian paths.
//
// Randomness: std::mt19937_64 (standardized output sequence, period 2^19937-1)
// seeded with a 64-bit seed; uniforms take the top 53 bits; normals use the
// Marsaglia polar method. Increments are rounded to a power-of-two lattice
// (quantum ~1e-15 sqrt(dt) of the level-0 step) so that refinement sums are
// exact in floating point. Seeds for Monte Carlo samples come from
// derive_seed, a SplitMix64-finalizer hash of (master, sample, stream) that is
// injective in (sample, stream) for a fixed master.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace ncd {

/// Standard normal source with a platform-stable output sequence.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // in [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct BrownianPath {
  double dt = 0.0;
  std::vector<double> increments;
  std::uint64_t seed = 0;
  int level = 0;

  std::size_t steps() const noexcept { return increments.size(); }
  double horizon() const noexcept { return dt * static_cast<double>(increments.size()); }

  friend bool operator==(const BrownianPath&, const BrownianPath&) = default;
};

/// Number of steps T / dt; throws unless T / dt is an integer within 1e-9.
std::size_t step_count(double horizon, double dt);

BrownianPath sample_path(double horizon, double dt, std::uint64_t seed);

/// Halves dt. Each increment dB splits into (x, y) with x ~ N(dB/2, dt/4)
/// and x + y == dB exactly in floating point.
BrownianPath refine(const BrownianPath& p);

/// Sums adjacent pairs: the inverse of refine.
BrownianPath coarsen(const BrownianPath& p);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sample_index,
                          std::uint32_t stream);

/// FNV-1a over the increment bit patterns.
std::uint64_t checksum(const BrownianPath& p);

// Persistence. Binary: 8-byte magic "NCDPATH\0", version byte, then
// little-endian T, dt (f64), seed (u64), level (i32), count (u64), increments.
void write_path_binary(std::ostream& os, const BrownianPath& p);
BrownianPath read_path_binary(std::istream& is);
void write_path_csv(std::ostream& os, const BrownianPath& p);
BrownianPath read_path_csv(std::istream& is);

}  // namespace ncd
