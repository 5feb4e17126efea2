#pragma once

// Reference computations that do not go through the library's transforms.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double basis(int k, double x) { return std::sqrt(2.0) * std::sin(k * pi * x); }

/// u(x) = sum_k c_k sqrt(2) sin(k pi x) by direct summation.
inline double field_at(const std::vector<double>& c, double x) {
  double u = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) u += c[k] * basis(static_cast<int>(k + 1), x);
  return u;
}

/// Composite Simpson rule on [0, 1] with 2 m panels.
inline double simpson(const std::function<double(double)>& fn, int m = 2000) {
  const int panels = 2 * m;
  const double h = 1.0 / panels;
  double acc = fn(0.0) + fn(1.0);
  for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * fn(i * h);
  return acc * h / 3.0;
}

/// (g, e_k) for k = 1..n by quadrature.
inline std::vector<double> project(const std::function<double(double)>& g, int n) {
  std::vector<double> out;
  for (int k = 1; k <= n; ++k) {
    out.push_back(simpson([&](double x) { return g(x) * basis(k, x); }));
  }
  return out;
}

inline double lambda(int k) { return (k * pi) * (k * pi); }

/// Exact OU moments of dc = -mu c dt + sigma dB at time T.
inline double ou_mean(double mu, double c0, double T) { return c0 * std::exp(-mu * T); }
inline double ou_variance(double mu, double sigma, double T) {
  return sigma * sigma * (1.0 - std::exp(-2.0 * mu * T)) / (2.0 * mu);
}

}  // namespace oracle
