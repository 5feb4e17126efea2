#pragma once

// Dirichlet sine eigenbasis on [0, 1]: e_k(x) = sqrt(2) sin(k pi x),
// -e_k'' = lambda_k e_k with lambda_k = (k pi)^2.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ncd {

double eigenvalue(int k);
double eval_basis(int k, double x);

/// Coefficients c_1..c_n of u = sum_k c_k e_k.
class SpectralField {
 public:
  explicit SpectralField(std::size_t n_modes);
  explicit SpectralField(std::vector<double> coeffs);
  SpectralField(std::initializer_list<double> coeffs);

  /// c * e_k in an n-mode field (k is 1-based).
  static SpectralField unit(std::size_t n_modes, int k, double c = 1.0);

  std::size_t n_modes() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }

  /// 0-based access; operator[](0) is c_1.
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  bool is_finite() const noexcept;

  /// Copy truncated or zero-padded to n modes.
  SpectralField resized(std::size_t n) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// L2 inner product of the represented functions (coefficient dot product).
double inner(const SpectralField& a, const SpectralField& b);

/// Samples at the interior nodes x_j = j / (M + 1), j = 1..M.
struct GridField {
  std::vector<double> values;

  std::size_t node_count() const noexcept { return values.size(); }
  static double node(std::size_t j, std::size_t node_count);
};

enum class SobolevSpace { L2, H1semi, H1, H2, Hneg1, L4 };

SobolevSpace parse_sobolev(std::string_view name);
std::string_view to_string(SobolevSpace s);

/// Sine table for a fixed (n, M) pair. Synthesis is exact evaluation of the
/// truncated series; analysis is the discrete sine transform, which recovers
/// every mode k <= M exactly from band-limited samples.
class SineTransform {
 public:
  SineTransform(std::size_t n_modes, std::size_t node_count);

  std::size_t n_modes() const noexcept { return n_; }
  std::size_t node_count() const noexcept { return m_; }

  void synthesize(std::span<const double> coeffs, std::span<double> values) const;
  void analyze(std::span<const double> values, std::span<double> coeffs) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> table_;  // row-major [k][j], sqrt(2) sin(k pi x_j)
};

/// Per-thread cached plan.
const SineTransform& sine_transform(std::size_t n_modes, std::size_t node_count);

GridField synthesize(const SpectralField& f, std::size_t node_count);
SpectralField analyze(const GridField& g, std::size_t n_modes);

/// Grid quadrature of the integral of u^4 (exact for band-limited u when
/// node_count >= 2 n).
double l4_integral(const SpectralField& f, std::size_t node_count);

double norm(const SpectralField& f, SobolevSpace s,
            std::optional<std::size_t> node_count = std::nullopt);

/// Squared norm; avoids the sqrt for the coefficient-weighted spaces.
double norm_squared(const SpectralField& f, SobolevSpace s);

/// Solves u - eps u_xx = f: c_k -> c_k / (1 + eps lambda_k).
SpectralField helmholtz_solve(const SpectralField& f, double epsilon);

}  // namespace ncd
