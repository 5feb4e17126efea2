#include "ncd/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <type_traits>

#include "detail/binary_io.hpp"

namespace ncd {

using nlohmann::json;

namespace {

json coeffs(const SpectralField& f) {
  return json(std::vector<double>(f.coeffs().begin(), f.coeffs().end()));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json envelope(const char* quantity, json parameters, json value, json series,
              std::uint64_t seed, const std::string& hash) {
  parameters["master_seed"] = seed;
  parameters["config_hash"] = hash;
  return json{{"quantity", quantity},
              {"parameters", std::move(parameters)},
              {"value", std::move(value)},
              {"series", std::move(series)}};
}

json estimate(const Estimate& e) { return json{{"mean", e.mean}, {"std_error", e.std_error}}; }

std::string fmt(double v) { return detail::format_double(v); }

}  // namespace

json to_json(const SimConfig& c) {
  json nl = std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Cubic>) {
          return {{"kind", "cubic"}};
        } else if constexpr (std::is_same_v<M, Truncated>) {
          return {{"kind", "truncated"}, {"radius", m.radius}};
        } else {
          // Only time-independent forcing is representable; record f(0).
          return {{"kind", "linear"},
                  {"forcing", m.forcing ? coeffs(m.forcing(0.0)) : json(nullptr)}};
        }
      },
      c.mode);
  json noise = std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Additive>) {
          return {{"kind", "additive"}, {"gamma", m.gamma}, {"profile", coeffs(m.profile)}};
        } else if constexpr (std::is_same_v<M, LinearMult>) {
          return {{"kind", "linear-multiplicative"}, {"gamma", m.gamma}};
        } else {
          return {{"kind", "sine-multiplicative"}, {"gamma", m.gamma}};
        }
      },
      c.noise);
  return json{{"epsilon", c.epsilon},
              {"n_modes", c.n_modes},
              {"dt", c.dt},
              {"T", c.horizon},
              {"scheme", std::string(to_string(c.scheme))},
              {"save_stride", c.save_stride},
              {"seed", c.seed},
              {"u0", coeffs(c.u0)},
              {"nonlinearity", std::move(nl)},
              {"noise", std::move(noise)}};
}

std::string config_hash(const SimConfig& config) {
  json j = to_json(config);
  j.erase("seed");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ULL;
  return hex64(h);
}

json to_json(const MomentReport& r) {
  json series = json::array();
  double worst = 1.0;
  for (const auto& s : r.series) {
    json by_eps = json::array();
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
      json row = estimate(s.by_epsilon[e]);
      row["epsilon"] = r.epsilons[e];
      by_eps.push_back(std::move(row));
    }
    series.push_back({{"quantity", s.quantity},
                      {"p", s.p},
                      {"uniformity_factor", s.uniformity_factor},
                      {"upward_trend", s.upward_trend},
                      {"by_epsilon", std::move(by_eps)}});
    if (s.quantity == "sup_l2") worst = std::max(worst, s.uniformity_factor);
  }
  json params{{"epsilons", r.epsilons},
              {"ps", r.ps},
              {"samples", r.samples},
              {"excluded", r.excluded},
              {"jensen_ok", r.jensen_ok}};
  return envelope("moments", std::move(params),
                  json{{"max_uniformity_factor_sup_l2", worst}}, std::move(series),
                  r.master_seed, r.config_hash);
}

json to_json(const OuReport& r) {
  json params{{"epsilon", r.epsilon}, {"k", r.k},       {"gamma", r.gamma},
              {"c0", r.c0},           {"T", r.horizon}, {"dt", r.dt},
              {"samples", r.samples}, {"mu", r.mu},     {"sigma", r.sigma}};
  json series = json::array();
  series.push_back({{"statistic", "mean"},
                    {"exact", r.exact_mean},
                    {"estimate", estimate(r.mean)},
                    {"deviation", r.mean_deviation},
                    {"tolerance", r.mean_tolerance}});
  series.push_back({{"statistic", "variance"},
                    {"exact", r.exact_variance},
                    {"estimate", estimate(r.variance)},
                    {"deviation", r.variance_deviation},
                    {"relative_deviation", r.variance_relative_deviation},
                    {"tolerance", r.variance_tolerance}});
  return envelope("ou-check", std::move(params),
                  json{{"tolerance_ratio", r.tolerance_ratio}, {"passed", r.passed}},
                  std::move(series), r.master_seed, r.config_hash);
}

json to_json(const ModulusScalingReport& r) {
  json params{{"deltas", r.deltas},
              {"space", std::string(to_string(r.space))},
              {"boundary", r.boundary == ShiftBoundary::ZeroExtension ? "zero-extension"
                                                                      : "interior"},
              {"samples", r.samples},
              {"excluded", r.excluded}};
  json series = json::array();
  for (std::size_t d = 0; d < r.deltas.size(); ++d) {
    series.push_back({{"delta", r.deltas[d]},
                      {"expected_sup", estimate(r.mean_modulus[d])},
                      {"sup_of_expected", r.sup_of_mean[d]}});
  }
  return envelope("modulus", std::move(params),
                  json{{"slope", r.slope},
                       {"ordering", "expectation-of-sup"},
                       {"slope_sup_of_expected", r.slope_sup_of_mean},
                       {"monotone", r.monotone}},
                  std::move(series), r.master_seed, r.config_hash);
}

json to_json(const ConvergenceReport& r) {
  json params{{"delta", r.delta},
              {"delta_source", r.delta_source},
              {"exceedance_threshold", r.exceedance_threshold},
              {"space", std::string(to_string(r.space))},
              {"samples", r.samples},
              {"excluded", r.excluded},
              {"path_digest", hex64(r.path_digest)}};
  json series = json::array();
  for (std::size_t e = 0; e < r.rows.size(); ++e) {
    json row{{"epsilon", r.rows[e].epsilon},
             {"median", r.rows[e].median},
             {"mean", r.rows[e].mean},
             {"exceedance", r.rows[e].exceedance}};
    if (e > 0) row["pairwise_decrease"] = r.pairwise_decrease[e - 1];
    series.push_back(std::move(row));
  }
  return envelope("converge", std::move(params),
                  json{{"medians_decreasing", r.medians_decreasing},
                       {"final_exceedance", r.rows.back().exceedance},
                       {"final_exceedance_ok", r.final_exceedance_ok},
                       {"passed", r.passed}},
                  std::move(series), r.master_seed, r.config_hash);
}

json to_json(const EnergyCheckReport& r) {
  json series = json::array();
  for (std::size_t l = 0; l < r.dts.size(); ++l) {
    json row{{"dt", r.dts[l]},
             {"deterministic_max_residual", r.deterministic_max_residual[l]},
             {"stochastic_rms_cumulative", r.stochastic_rms_cumulative[l]}};
    if (l > 0) {
      row["deterministic_ratio"] = r.deterministic_ratios[l - 1];
      row["stochastic_ratio"] = r.stochastic_ratios[l - 1];
    }
    series.push_back(std::move(row));
  }
  return envelope("energy-check",
                  json{{"levels", r.dts.size()}, {"samples", r.samples}, {"excluded", r.excluded}},
                  json{{"deterministic_ratios", r.deterministic_ratios},
                       {"stochastic_ratios", r.stochastic_ratios}},
                  std::move(series), r.master_seed, r.config_hash);
}

json to_json(const StrongOrderReport& r, const SimConfig& config) {
  json series = json::array();
  for (std::size_t l = 0; l < r.rms_gaps.size(); ++l) {
    series.push_back({{"dt", r.dts[l]}, {"rms_gap", r.rms_gaps[l]}});
  }
  return envelope("strong-order",
                  json{{"levels", r.dts.size()}, {"samples", r.samples}, {"excluded", r.excluded}},
                  json{{"order", r.order}, {"mean_sample_order", r.mean_sample_order}},
                  std::move(series), config.seed, config_hash(config));
}

std::string to_csv(const MomentReport& r) {
  std::ostringstream os;
  os << "quantity,p,epsilon,mean,std_error\n";
  for (const auto& s : r.series) {
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
      os << s.quantity << ',' << fmt(s.p) << ',' << fmt(r.epsilons[e]) << ','
         << fmt(s.by_epsilon[e].mean) << ',' << fmt(s.by_epsilon[e].std_error) << '\n';
    }
  }
  return os.str();
}

std::string to_csv(const OuReport& r) {
  std::ostringstream os;
  os << "statistic,exact,estimate,std_error,deviation,tolerance\n";
  os << "mean," << fmt(r.exact_mean) << ',' << fmt(r.mean.mean) << ','
     << fmt(r.mean.std_error) << ',' << fmt(r.mean_deviation) << ','
     << fmt(r.mean_tolerance) << '\n';
  os << "variance," << fmt(r.exact_variance) << ',' << fmt(r.variance.mean) << ','
     << fmt(r.variance.std_error) << ',' << fmt(r.variance_deviation) << ','
     << fmt(r.variance_tolerance) << '\n';
  return os.str();
}

std::string to_csv(const ModulusScalingReport& r) {
  std::ostringstream os;
  os << "delta,expected_sup,std_error,sup_of_expected\n";
  for (std::size_t d = 0; d < r.deltas.size(); ++d) {
    os << fmt(r.deltas[d]) << ',' << fmt(r.mean_modulus[d].mean) << ','
       << fmt(r.mean_modulus[d].std_error) << ',' << fmt(r.sup_of_mean[d]) << '\n';
  }
  return os.str();
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "epsilon,median,mean,exceedance\n";
  for (const auto& row : r.rows) {
    os << fmt(row.epsilon) << ',' << fmt(row.median) << ',' << fmt(row.mean) << ','
       << fmt(row.exceedance) << '\n';
  }
  return os.str();
}

std::string to_csv(const EnergyCheckReport& r) {
  std::ostringstream os;
  os << "dt,deterministic_max_residual,stochastic_rms_cumulative\n";
  for (std::size_t l = 0; l < r.dts.size(); ++l) {
    os << fmt(r.dts[l]) << ',' << fmt(r.deterministic_max_residual[l]) << ','
       << fmt(r.stochastic_rms_cumulative[l]) << '\n';
  }
  return os.str();
}

std::string to_csv(const StrongOrderReport& r) {
  std::ostringstream os;
  os << "dt,rms_gap\n";
  for (std::size_t l = 0; l < r.rms_gaps.size(); ++l) {
    os << fmt(r.dts[l]) << ',' << fmt(r.rms_gaps[l]) << '\n';
  }
  return os.str();
}

}  // namespace ncd
