#include "ncd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ncd/error.hpp"

namespace ncd {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

void require_same_size(const SpectralField& a, const SpectralField& b) {
  if (a.n_modes() != b.n_modes()) {
    throw ValidationError("spectral fields differ in mode count: " +
                          std::to_string(a.n_modes()) + " vs " +
                          std::to_string(b.n_modes()));
  }
}

}  // namespace

double eigenvalue(int k) {
  if (k < 1) {
    throw ValidationError("eigenvalue: mode index must be >= 1 (got " +
                          std::to_string(k) + ")");
  }
  const double w = k * kPi;
  return w * w;
}

double eval_basis(int k, double x) {
  if (k < 1) {
    throw ValidationError("eval_basis: mode index must be >= 1");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError("eval_basis: x must lie in [0, 1]");
  }
  return kSqrt2 * std::sin(k * kPi * x);
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(std::size_t n_modes) : coeffs_(n_modes, 0.0) {
  if (n_modes == 0) {
    throw ValidationError("SpectralField: n_modes must be positive");
  }
}

SpectralField::SpectralField(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw ValidationError("SpectralField: n_modes must be positive");
  }
  if (!is_finite()) {
    throw ValidationError("SpectralField: coefficients must be finite");
  }
}

SpectralField::SpectralField(std::initializer_list<double> coeffs)
    : SpectralField(std::vector<double>(coeffs)) {}

SpectralField SpectralField::unit(std::size_t n_modes, int k, double c) {
  if (k < 1 || static_cast<std::size_t>(k) > n_modes) {
    throw ValidationError("SpectralField::unit: mode " + std::to_string(k) +
                          " outside 1.." + std::to_string(n_modes));
  }
  SpectralField f(n_modes);
  f.coeffs_[k - 1] = c;
  return f;
}

bool SpectralField::is_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](double c) { return std::isfinite(c); });
}

SpectralField SpectralField::resized(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  std::copy_n(coeffs_.begin(), std::min(n, coeffs_.size()), out.begin());
  return SpectralField(std::move(out));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double inner(const SpectralField& a, const SpectralField& b) {
  require_same_size(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.n_modes(); ++i) acc += a[i] * b[i];
  return acc;
}

// ---------------------------------------------------------------------------
// Grid

double GridField::node(std::size_t j, std::size_t node_count) {
  return static_cast<double>(j) / static_cast<double>(node_count + 1);
}

SobolevSpace parse_sobolev(std::string_view name) {
  if (name == "L2") return SobolevSpace::L2;
  if (name == "H1semi") return SobolevSpace::H1semi;
  if (name == "H1") return SobolevSpace::H1;
  if (name == "H2") return SobolevSpace::H2;
  if (name == "Hneg1") return SobolevSpace::Hneg1;
  if (name == "L4") return SobolevSpace::L4;
  throw ValidationError("unknown Sobolev space '" + std::string(name) +
                        "' (expected L2, H1semi, H1, H2, Hneg1 or L4)");
}

std::string_view to_string(SobolevSpace s) {
  switch (s) {
    case SobolevSpace::L2: return "L2";
    case SobolevSpace::H1semi: return "H1semi";
    case SobolevSpace::H1: return "H1";
    case SobolevSpace::H2: return "H2";
    case SobolevSpace::Hneg1: return "Hneg1";
    case SobolevSpace::L4: return "L4";
  }
  throw ValidationError("unknown Sobolev space tag");
}

SineTransform::SineTransform(std::size_t n_modes, std::size_t node_count)
    : n_(n_modes), m_(node_count), table_(n_modes * node_count) {
  if (n_ == 0 || m_ == 0) {
    throw ValidationError("SineTransform: mode and node counts must be positive");
  }
  // sin(k j pi / (M+1)) through the reduced integer phase (k j) mod 2(M+1)
  // keeps the table accurate for large k j.
  const std::size_t period = 2 * (m_ + 1);
  const double h = kPi / static_cast<double>(m_ + 1);
  for (std::size_t k = 1; k <= n_; ++k) {
    for (std::size_t j = 1; j <= m_; ++j) {
      const std::size_t phase = (k * j) % period;
      table_[(k - 1) * m_ + (j - 1)] = kSqrt2 * std::sin(h * static_cast<double>(phase));
    }
  }
}

void SineTransform::synthesize(std::span<const double> coeffs,
                               std::span<double> values) const {
  std::fill(values.begin(), values.end(), 0.0);
  const std::size_t n = std::min(n_, coeffs.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double c = coeffs[k];
    if (c == 0.0) continue;
    const double* row = table_.data() + k * m_;
    for (std::size_t j = 0; j < m_; ++j) values[j] += c * row[j];
  }
}

void SineTransform::analyze(std::span<const double> values,
                            std::span<double> coeffs) const {
  const double w = 1.0 / static_cast<double>(m_ + 1);
  const std::size_t n = std::min(n_, coeffs.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = table_.data() + k * m_;
    double acc = 0.0;
    for (std::size_t j = 0; j < m_; ++j) acc += values[j] * row[j];
    coeffs[k] = w * acc;
  }
}

const SineTransform& sine_transform(std::size_t n_modes, std::size_t node_count) {
  thread_local std::map<std::pair<std::size_t, std::size_t>, SineTransform> cache;
  const auto key = std::make_pair(n_modes, node_count);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, SineTransform(n_modes, node_count)).first;
  }
  return it->second;
}

GridField synthesize(const SpectralField& f, std::size_t node_count) {
  if (node_count == 0) throw ValidationError("synthesize: node count must be >= 1");
  GridField g{std::vector<double>(node_count)};
  sine_transform(f.n_modes(), node_count).synthesize(f.coeffs(), g.values);
  return g;
}

SpectralField analyze(const GridField& g, std::size_t n_modes) {
  if (n_modes == 0) throw ValidationError("analyze: target mode count must be >= 1");
  if (g.node_count() < 2 * n_modes) {
    throw ValidationError("analyze: " + std::to_string(g.node_count()) +
                          " nodes alias " + std::to_string(n_modes) +
                          " modes (need at least " + std::to_string(2 * n_modes) + ")");
  }
  std::vector<double> coeffs(n_modes);
  sine_transform(n_modes, g.node_count()).analyze(g.values, coeffs);
  return SpectralField(std::move(coeffs));
}

double l4_integral(const SpectralField& f, std::size_t node_count) {
  const GridField g = synthesize(f, node_count);
  double acc = 0.0;
  for (double u : g.values) {
    const double u2 = u * u;
    acc += u2 * u2;
  }
  return acc / static_cast<double>(node_count + 1);
}

double norm_squared(const SpectralField& f, SobolevSpace s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.n_modes(); ++i) {
    const double c2 = f[i] * f[i];
    const double lam = eigenvalue(static_cast<int>(i + 1));
    switch (s) {
      case SobolevSpace::L2: acc += c2; break;
      case SobolevSpace::H1semi: acc += lam * c2; break;
      case SobolevSpace::H1: acc += (1.0 + lam) * c2; break;
      case SobolevSpace::H2: acc += lam * lam * c2; break;
      case SobolevSpace::Hneg1: acc += c2 / lam; break;
      case SobolevSpace::L4:
        throw ValidationError("norm_squared: L4 is grid-computed, use norm()");
    }
  }
  return acc;
}

double norm(const SpectralField& f, SobolevSpace s,
            std::optional<std::size_t> node_count) {
  if (s == SobolevSpace::L4) {
    const std::size_t m = node_count.value_or(4 * f.n_modes());
    if (m < 4 * f.n_modes()) {
      throw ValidationError("norm(L4): need at least 4 n = " +
                            std::to_string(4 * f.n_modes()) + " nodes, got " +
                            std::to_string(m));
    }
    return std::pow(l4_integral(f, m), 0.25);
  }
  return std::sqrt(norm_squared(f, s));
}

SpectralField helmholtz_solve(const SpectralField& f, double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw ValidationError("helmholtz_solve: epsilon must be >= 0");
  }
  SpectralField out = f;
  if (epsilon == 0.0) return out;
  for (std::size_t i = 0; i < out.n_modes(); ++i) {
    out[i] /= 1.0 + epsilon * eigenvalue(static_cast<int>(i + 1));
  }
  return out;
}

}  // namespace ncd
