#include "ncd/stochastic.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "detail/binary_io.hpp"
#include "ncd/error.hpp"

namespace ncd {

namespace {

constexpr char kPathMagic[9] = "NCDPATH";
constexpr std::uint8_t kPathVersion = 1;
constexpr std::uint32_t kBridgeStream = 0xb41d6e;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Increments live on a lattice of multiples of a power of two q chosen from
// the level-0 step: every lattice value below 2^53 q in magnitude is a double,
// so the difference of two lattice values is exact and refine() reproduces
// coarse increments bit-for-bit. q = 2^(ceil(log2(64 sqrt(dt0))) - 52), about
// 1e-15 relative to sqrt(dt0).
double lattice_quantum(double root_dt) {
  const int e = static_cast<int>(std::ceil(std::log2(64.0 * std::sqrt(root_dt))));
  return std::ldexp(1.0, e - 52);
}

double snap(double v, double quantum) { return std::nearbyint(v / quantum) * quantum; }

}  // namespace

double GaussianSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0)) throw ValidationError("time step dt must be positive");
  if (!(horizon >= 0.0)) throw ValidationError("horizon T must be non-negative");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    std::ostringstream os;
    os << "T / dt = " << ratio << " is not an integer (T=" << horizon
       << ", dt=" << dt << ")";
    throw ValidationError(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

BrownianPath sample_path(double horizon, double dt, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw ValidationError("sample_path: T must be positive");
  const std::size_t n = step_count(horizon, dt);
  BrownianPath p;
  p.dt = dt;
  p.seed = seed;
  p.level = 0;
  p.increments.resize(n);
  GaussianSource rng(seed);
  const double sd = std::sqrt(dt);
  const double q = lattice_quantum(dt);
  for (double& db : p.increments) db = snap(sd * rng.normal(), q);
  return p;
}

BrownianPath refine(const BrownianPath& p) {
  BrownianPath out;
  out.dt = 0.5 * p.dt;
  out.seed = p.seed;
  out.level = p.level + 1;
  out.increments.resize(2 * p.increments.size());
  GaussianSource rng(derive_seed(p.seed, static_cast<std::uint64_t>(p.level), kBridgeStream));
  const double sd = 0.5 * std::sqrt(p.dt);
  const double q = lattice_quantum(std::ldexp(p.dt, p.level));
  for (std::size_t i = 0; i < p.increments.size(); ++i) {
    const double total = p.increments[i];
    const double first = snap(0.5 * total + sd * rng.normal(), q);
    const double second = total - first;
    if (first + second != total) {
      throw std::logic_error("refine: increment left the exact lattice");
    }
    out.increments[2 * i] = first;
    out.increments[2 * i + 1] = second;
  }
  return out;
}

BrownianPath coarsen(const BrownianPath& p) {
  if (p.increments.size() % 2 != 0) {
    throw ValidationError("coarsen: odd number of increments");
  }
  BrownianPath out;
  out.dt = 2.0 * p.dt;
  out.seed = p.seed;
  out.level = p.level - 1;
  out.increments.resize(p.increments.size() / 2);
  for (std::size_t i = 0; i < out.increments.size(); ++i) {
    out.increments[i] = p.increments[2 * i] + p.increments[2 * i + 1];
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sample_index,
                          std::uint32_t stream) {
  // (sample, stream) -> key is injective for sample < 2^40 and stream < 2^24;
  // splitmix64 is a bijection, so distinct keys never collide.
  const std::uint64_t key = (sample_index << 24) ^ (stream & 0xffffffu);
  return splitmix64(splitmix64(master) ^ key);
}

std::uint64_t checksum(const BrownianPath& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  mix(std::bit_cast<std::uint64_t>(p.dt));
  for (double db : p.increments) mix(std::bit_cast<std::uint64_t>(db));
  return h;
}

void write_path_binary(std::ostream& os, const BrownianPath& p) {
  detail::put_magic(os, kPathMagic, kPathVersion);
  detail::put_f64(os, p.horizon());
  detail::put_f64(os, p.dt);
  detail::put_u64(os, p.seed);
  detail::put_u64(os, static_cast<std::uint64_t>(static_cast<std::int64_t>(p.level)));
  detail::put_u64(os, p.increments.size());
  for (double db : p.increments) detail::put_f64(os, db);
}

BrownianPath read_path_binary(std::istream& is) {
  const std::uint8_t version = detail::expect_magic(is, kPathMagic);
  if (version != kPathVersion) {
    throw ValidationError("unsupported path format version " + std::to_string(version));
  }
  BrownianPath p;
  (void)detail::get_f64(is);  // T, implied by dt * count
  p.dt = detail::get_f64(is);
  p.seed = detail::get_u64(is);
  p.level = static_cast<int>(static_cast<std::int64_t>(detail::get_u64(is)));
  const std::uint64_t n = detail::get_u64(is);
  p.increments.resize(n);
  for (double& db : p.increments) db = detail::get_f64(is);
  return p;
}

void write_path_csv(std::ostream& os, const BrownianPath& p) {
  os << "# T,dt,seed,level\n";
  os << "# " << detail::format_double(p.horizon()) << ',' << detail::format_double(p.dt)
     << ',' << p.seed << ',' << p.level << '\n';
  os << "step,dB\n";
  for (std::size_t i = 0; i < p.increments.size(); ++i) {
    os << i << ',' << detail::format_double(p.increments[i]) << '\n';
  }
}

BrownianPath read_path_csv(std::istream& is) {
  std::string line;
  BrownianPath p;
  if (!std::getline(is, line) || !std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw ValidationError("path CSV: missing header");
  }
  {
    std::istringstream hs(line.substr(2));
    std::string field;
    std::getline(hs, field, ',');  // T
    std::getline(hs, field, ',');
    p.dt = detail::parse_double(field);
    std::getline(hs, field, ',');
    p.seed = std::stoull(field);
    std::getline(hs, field, ',');
    p.level = std::stoi(field);
  }
  std::getline(is, line);  // column names
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("path CSV: malformed row");
    p.increments.push_back(detail::parse_double(line.substr(comma + 1)));
  }
  return p;
}

}  // namespace ncd
