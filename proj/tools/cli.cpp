#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "cli11/CLI11.hpp"
#include "cli_config.hpp"
#include "ncd/error.hpp"
#include "ncd/report.hpp"

namespace ncd::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config_path;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool binary = false;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Collects --dotted.key=value and --dotted.key value pairs left over by the
// option parser.
std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.find('.') == std::string::npos) {
      throw ValidationError("unrecognized argument '" + a + "'");
    }
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw ValidationError("override '" + a + "' has no value");
    }
  }
  return out;
}

RunConfig load(const Options& opt) {
  toml::table table;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ValidationError("cannot read config file '" + opt.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    table = parse_toml(buf.str(), opt.config_path);
  }
  for (const auto& [key, value] : opt.overrides) apply_override(table, key, value);
  if (opt.seed) {
    if (*opt.seed > static_cast<std::uint64_t>(INT64_MAX)) {
      throw ValidationError("--seed must be below 2^63");
    }
    apply_override(table, "sim.seed", std::to_string(*opt.seed));
  }
  return read_config(table);
}

fs::path stem(const Options& opt, const std::string& experiment, const std::string& hash,
             std::uint64_t seed) {
  fs::create_directories(opt.out_dir);
  return fs::path(opt.out_dir) / (experiment + "_" + hash + "_" + std::to_string(seed));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw ValidationError("cannot write '" + path.string() + "'");
}

// Shortest general form, e.g. 1 or 0.05.
std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Writes <stem>.json and <stem>.csv; returns kCheckFailed with a message when
// failure is non-empty.
int emit(const Options& opt, const RunConfig& cfg, const std::string& experiment, json report,
         const std::string& csv, const std::string& failure, std::ostream& out,
         std::ostream& err) {
  report["parameters"]["config"] = to_json(cfg, experiment);
  const json& params = report["parameters"];
  const fs::path base = stem(opt, experiment, params["config_hash"].get<std::string>(),
                             params["master_seed"].get<std::uint64_t>());
  write_text(fs::path(base).concat(".json"), report.dump(2) + "\n");
  write_text(fs::path(base).concat(".csv"), csv);
  out << "wrote " << base.string() << ".json and .csv\n";
  out << experiment << ": " << report["value"].dump() << "\n";
  if (!failure.empty()) {
    std::string text = failure;
    while (!text.empty() && (text.back() == ' ' || text.back() == ';')) text.pop_back();
    err << experiment << ": property check failed: " << text << "\n";
    return kCheckFailed;
  }
  return kOk;
}

int cmd_simulate(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const Trajectory traj = simulate(cfg.sim, sample_brownian_path(cfg.sim, 0));
  const fs::path base = stem(opt, "simulate", config_hash(cfg.sim), cfg.sim.seed);
  {
    std::ofstream os(fs::path(base).concat(".csv"), std::ios::binary);
    write_trajectory_csv(os, traj);
    if (!os) throw ValidationError("cannot write '" + base.string() + ".csv'");
  }
  out << "wrote " << base.string() << ".csv (" << traj.size() << " rows)\n";
  if (opt.binary) {
    std::ofstream os(fs::path(base).concat(".bin"), std::ios::binary);
    write_trajectory_binary(os, traj);
    if (!os) throw ValidationError("cannot write '" + base.string() + ".bin'");
    out << "wrote " << base.string() << ".bin\n";
  }
  return kOk;
}

int cmd_moments(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& m = cfg.moments;
  const MomentReport r = mc_moments(cfg.sim, m.epsilons, m.ps, m.samples, opt.workers);
  std::string failure;
  if (!r.jensen_ok) failure += "Jensen inequality violated across p; ";
  for (std::size_t j = 0; j < m.ps.size(); ++j) {
    const double u = r.find("sup_l2", m.ps[j]).uniformity_factor;
    if (u > m.max_uniformity[j]) {
      failure += "uniformity factor " + num(u) + " above " +
                 num(m.max_uniformity[j]) + " at p = " + num(m.ps[j]) +
                 "; ";
    }
  }
  for (const auto& s : r.series) {
    if (s.upward_trend) {
      failure += s.quantity + " (p = " + num(s.p) +
                 ") trends upward as eps decreases; ";
    }
  }
  return emit(opt, cfg, "moments", to_json(r), to_csv(r), failure, out, err);
}

int cmd_modulus(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& m = cfg.modulus;
  const ModulusScalingReport r =
      modulus_scaling(cfg.sim, m.deltas, m.space, m.samples, opt.workers, m.boundary);
  std::string failure;
  if (!(r.slope >= m.min_slope && r.slope <= m.max_slope)) {
    failure = "slope " + num(r.slope) + " outside [" + num(m.min_slope) +
              ", " + num(m.max_slope) + "]";
  }
  return emit(opt, cfg, "modulus", to_json(r), to_csv(r), failure, out, err);
}

int cmd_converge(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& m = cfg.converge;
  const ConvergenceReport r = convergence_study(cfg.sim, m.epsilons, m.samples, m.delta,
                                                m.exceedance_threshold, m.space, opt.workers);
  std::string failure;
  if (!r.medians_decreasing) failure += "median gap is not strictly decreasing; ";
  if (!r.final_exceedance_ok) {
    failure += "final exceedance " + num(r.rows.back().exceedance) + " above " +
               num(m.exceedance_threshold) + "; ";
  }
  return emit(opt, cfg, "converge", to_json(r), to_csv(r), failure, out, err);
}

int cmd_ou(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto* additive = std::get_if<Additive>(&cfg.sim.noise);
  if (!additive) throw ValidationError("sim.noise.kind: ou-check needs additive noise");
  SimConfig c = ou_config(cfg.sim.epsilon, cfg.ou.k, additive->gamma, cfg.sim.horizon,
                          cfg.sim.dt, cfg.ou.c0);
  c.scheme = cfg.sim.scheme;
  c.seed = cfg.sim.seed;
  const OuReport r = ou_oracle_check(c, cfg.ou.k, cfg.ou.samples, opt.workers);
  std::string failure;
  if (!r.passed) {
    failure = "deviation is " + num(r.tolerance_ratio) + " times the tolerance";
  }
  return emit(opt, cfg, "ou-check", to_json(r), to_csv(r), failure, out, err);
}

int cmd_energy(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& m = cfg.energy;
  const EnergyCheckReport r = energy_check(cfg.sim, m.levels, m.samples, opt.workers);
  std::string failure;
  for (double q : r.deterministic_ratios) {
    if (!(q >= m.min_deterministic_ratio && q <= m.max_deterministic_ratio)) {
      failure += "deterministic ratio " + num(q) + " out of range; ";
    }
  }
  for (double q : r.stochastic_ratios) {
    if (!(q >= m.min_stochastic_ratio)) {
      failure += "stochastic ratio " + num(q) + " below " +
                 num(m.min_stochastic_ratio) + "; ";
    }
  }
  return emit(opt, cfg, "energy-check", to_json(r), to_csv(r), failure, out, err);
}

int cmd_strong(const Options& opt, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& m = cfg.strong;
  const StrongOrderReport r = strong_order(cfg.sim, m.levels, m.samples, opt.workers);
  std::string failure;
  if (m.expected_order && !(std::abs(r.order - *m.expected_order) <= m.tolerance)) {
    failure = "order " + num(r.order) + " not within " + num(m.tolerance) +
              " of " + num(*m.expected_order);
  }
  return emit(opt, cfg, "strong-order", to_json(r, cfg.sim), to_csv(r), failure, out, err);
}

using Command = std::function<int(const Options&, const RunConfig&, std::ostream&, std::ostream&)>;

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"simulate", {"Simulate one trajectory and write it as CSV", cmd_simulate}},
      {"moments", {"Monte Carlo moment bounds across an epsilon grid", cmd_moments}},
      {"modulus", {"Time-shift modulus scaling", cmd_modulus}},
      {"converge", {"Inviscid-limit convergence study", cmd_converge}},
      {"ou-check", {"Ornstein-Uhlenbeck mean and variance check", cmd_ou}},
      {"energy-check", {"Energy balance residuals under dt halving", cmd_energy}},
      {"strong-order", {"Strong convergence order of the time stepper", cmd_strong}},
  };

  CLI::App app{"Galerkin solver and Monte Carlo experiments for a stochastic nonclassical "
               "diffusion equation"};
  app.require_subcommand(1);
  Options opt;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("-c,--config", opt.config_path, "TOML configuration file");
    sub->add_option("-w,--workers", opt.workers, "Parallel sample workers")
        ->check(CLI::PositiveNumber);
    sub->add_option("-s,--seed", opt.seed, "Master seed (overrides sim.seed)");
    sub->add_option("-o,--out", opt.out_dir, "Output directory");
    sub->add_flag("--binary", opt.binary, "Also write a binary trajectory dump");
    sub->allow_extras();
    sub->footer("Any key can be overridden as --section.key=value, e.g. --sim.epsilon=0.05");
    subs[name] = sub;
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailed;
  }

  for (const auto& [name, entry] : commands) {
    CLI::App* sub = subs[name];
    if (!sub->parsed()) continue;
    try {
      opt.overrides = parse_overrides(sub->remaining());
      const RunConfig cfg = load(opt);
      return entry.second(opt, cfg, out, err);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << "\n";
      return kValidationFailed;
    } catch (const BlowUpError& e) {
      err << "error: " << e.what() << "\n";
      return kBlowUp;
    } catch (const ExclusionBudgetError& e) {
      err << "error: " << e.what() << "\n";
      return kBlowUp;
    } catch (const fs::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
      return kValidationFailed;
    }
  }
  return kValidationFailed;
}

}  // namespace ncd::cli
