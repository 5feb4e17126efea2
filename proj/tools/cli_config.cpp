#include "cli_config.hpp"

#include <set>
#include <sstream>

#include "ncd/error.hpp"
#include "ncd/report.hpp"

namespace ncd::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Typed, strict access to one table. Keys that were never read are reported
// by finish().
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  const toml::node* raw(const std::string& key) {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  const toml::table* sub(const std::string& key) {
    const toml::node* n = raw(key);
    if (n && !n->is_table()) fail(key, "expected a table");
    return n ? n->as_table() : nullptr;
  }

  double number(const std::string& key, double fallback) {
    const toml::node* n = raw(key);
    return n ? to_number(key, *n) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    const toml::node* n = raw(key);
    if (!n) return std::nullopt;
    return to_number(key, *n);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t minimum) {
    const toml::node* n = raw(key);
    if (!n) return fallback;
    if (!n->is_integer()) fail(key, "expected an integer");
    const std::int64_t v = n->as_integer()->get();
    if (v < minimum) fail(key, "must be >= " + std::to_string(minimum));
    return v;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(integer(key, static_cast<std::int64_t>(fallback), 1));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const toml::node* n = raw(key);
    if (!n) return fallback;
    if (!n->is_string()) fail(key, "expected a string");
    return n->as_string()->get();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const toml::node* n = raw(key);
    return n ? to_numbers(key, *n) : fallback;
  }

  std::vector<double> to_numbers(const std::string& key, const toml::node& n) {
    if (!n.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const toml::node& item : *n.as_array()) out.push_back(to_number(key, item));
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ValidationError(join(path_, key) + ": " + message);
  }

  // Runs fn, prefixing any ValidationError with the dotted key.
  template <class Fn>
  auto checked(const std::string& key, Fn&& fn) {
    try {
      return fn();
    } catch (const ValidationError& e) {
      fail(key, e.what());
    }
  }

  void finish() const {
    if (!table_) return;
    for (auto&& [k, v] : *table_) {
      const std::string key(k.str());
      if (!seen_.count(key)) fail(key, "unknown key");
    }
  }

 private:
  double to_number(const std::string& key, const toml::node& n) const {
    if (n.is_integer()) return static_cast<double>(n.as_integer()->get());
    if (n.is_floating_point()) return n.as_floating_point()->get();
    fail(key, "expected a number");
  }

  const toml::table* table_;
  std::string path_;
  std::set<std::string> seen_;
};

SpectralField padded(Section& s, const std::string& key, const std::vector<double>& values,
                     std::size_t n) {
  if (values.size() > n) {
    s.fail(key, "has " + std::to_string(values.size()) + " coefficients, n_modes is " +
                    std::to_string(n));
  }
  std::vector<double> c(n, 0.0);
  std::copy(values.begin(), values.end(), c.begin());
  return s.checked(key, [&] { return SpectralField(std::move(c)); });
}

SimConfig read_sim(const toml::table* table) {
  Section s(table, "sim");
  SimConfig c;
  c.n_modes = s.count("n_modes", 32);
  const std::size_t n = c.n_modes;
  c.epsilon = s.number("epsilon", 0.0);
  s.checked("epsilon", [&] { validate_epsilon(c.epsilon); });
  c.dt = s.number("dt", 1e-3);
  if (!(c.dt > 0.0)) s.fail("dt", "must be positive");
  c.horizon = s.number("T", 1.0);
  if (!(c.horizon > 0.0)) s.fail("T", "must be positive");
  s.checked("T", [&] { step_count(c.horizon, c.dt); });
  c.scheme = s.checked("scheme", [&] { return parse_scheme(s.text("scheme", "semi-implicit")); });
  c.save_stride = s.count("save_stride", 1);
  c.seed = static_cast<std::uint64_t>(s.integer("seed", 0, 0));

  c.u0 = default_initial_data(n);
  if (const toml::node* u0 = s.raw("u0")) {
    if (u0->is_string()) {
      const std::string name = u0->as_string()->get();
      if (name == "zero") {
        c.u0 = SpectralField(n);
      } else if (name != "sine") {
        s.fail("u0", "expected \"sine\", \"zero\" or a coefficient array");
      }
    } else {
      c.u0 = padded(s, "u0", s.to_numbers("u0", *u0), n);
    }
  }

  Section nl(s.sub("nonlinearity"), "sim.nonlinearity");
  const std::string kind = nl.text("kind", "cubic");
  const toml::node* radius = nl.raw("radius");
  const toml::node* forcing = nl.raw("forcing");
  if (kind != "truncated" && radius) nl.fail("radius", "only valid with kind = \"truncated\"");
  if (kind != "linear" && forcing) nl.fail("forcing", "only valid with kind = \"linear\"");
  if (kind == "cubic") {
    c.mode = Cubic{};
  } else if (kind == "truncated") {
    if (!radius) nl.fail("radius", "required with kind = \"truncated\"");
    const double r = nl.number("radius", 0.0);
    if (!(r > 0.0)) nl.fail("radius", "must be positive");
    c.mode = Truncated{r};
  } else if (kind == "linear") {
    Linear lin;
    if (forcing) {
      const SpectralField f = padded(nl, "forcing", nl.to_numbers("forcing", *forcing), n);
      lin.forcing = [f](double) { return f; };
    }
    c.mode = lin;
  } else {
    nl.fail("kind", "expected \"cubic\", \"truncated\" or \"linear\" (got \"" + kind + "\")");
  }
  nl.finish();

  Section noise(s.sub("noise"), "sim.noise");
  const std::string nkind = noise.text("kind", "additive");
  const double gamma = noise.number("gamma", 0.3);
  if (!std::isfinite(gamma)) noise.fail("gamma", "must be finite");
  const toml::node* profile = noise.raw("profile");
  if (nkind != "additive" && profile) {
    noise.fail("profile", "only valid with kind = \"additive\"");
  }
  if (nkind == "additive") {
    SpectralField p = profile ? padded(noise, "profile", noise.to_numbers("profile", *profile), n)
                              : SpectralField::unit(n, 1);
    c.noise = Additive{std::move(p), gamma};
  } else if (nkind == "linear-multiplicative") {
    c.noise = LinearMult{gamma};
  } else if (nkind == "sine-multiplicative") {
    c.noise = SineMult{gamma};
  } else {
    noise.fail("kind",
               "expected \"additive\", \"linear-multiplicative\" or \"sine-multiplicative\" (got \"" +
                   nkind + "\")");
  }
  noise.finish();
  s.finish();

  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("sim: ") + e.what());
  }
  return c;
}

void require_epsilons(Section& s, const std::vector<double>& eps) {
  if (eps.empty()) s.fail("epsilons", "must not be empty");
  for (double e : eps) s.checked("epsilons", [&] { validate_epsilon(e); });
}

SobolevSpace read_space(Section& s, SobolevSpace fallback) {
  return s.checked("space", [&] {
    return parse_sobolev(s.text("space", std::string(to_string(fallback))));
  });
}

}  // namespace

toml::table parse_toml(const std::string& text, const std::string& source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ':' << e.source().begin.line << ':' << e.source().begin.column << ": "
       << e.description();
    throw ValidationError(os.str());
  }
}

void apply_override(toml::table& table, const std::string& dotted_key, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted_key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ValidationError("malformed override key '" + dotted_key + "'");
    parts.push_back(part);
  }
  if (parts.empty()) throw ValidationError("empty override key");

  toml::table* target = &table;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* n = target->get(parts[i]);
    if (!n) {
      target->insert(parts[i], toml::table{});
      n = target->get(parts[i]);
    }
    if (!n->is_table()) {
      throw ValidationError(dotted_key + ": '" + parts[i] + "' is not a table");
    }
    target = n->as_table();
  }

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + value);
  } catch (const toml::parse_error&) {
    parsed.insert("v", value);
  }
  parsed.get("v")->visit([&](auto&& v) { target->insert_or_assign(parts.back(), v); });
}

RunConfig read_config(const toml::table& table) {
  static const std::set<std::string> sections{"sim",      "moments",      "modulus",
                                              "converge", "ou-check",     "energy-check",
                                              "strong-order"};
  for (auto&& [k, v] : table) {
    const std::string key(k.str());
    if (!sections.count(key)) throw ValidationError(key + ": unknown key");
    if (!v.is_table()) throw ValidationError(key + ": expected a table");
  }
  auto section = [&](const char* name) {
    const toml::node* n = table.get(name);
    return n ? n->as_table() : nullptr;
  };

  RunConfig c;
  c.sim = read_sim(section("sim"));

  {
    Section s(section("moments"), "moments");
    auto& m = c.moments;
    m.epsilons = s.numbers("epsilons", m.epsilons);
    require_epsilons(s, m.epsilons);
    m.ps = s.numbers("ps", m.ps);
    if (m.ps.empty()) s.fail("ps", "must not be empty");
    for (double p : m.ps) {
      if (!(p > 0.0)) s.fail("ps", "entries must be positive");
    }
    m.samples = s.count("samples", m.samples);
    if (m.samples < 16) s.fail("samples", "must be >= 16");
    std::vector<double> fallback;
    for (double p : m.ps) fallback.push_back(p <= 2.0 ? 2.0 : 3.0);
    m.max_uniformity = s.numbers("max_uniformity", fallback);
    if (m.max_uniformity.size() != m.ps.size()) {
      s.fail("max_uniformity", "needs one entry per p");
    }
    s.finish();
  }
  {
    Section s(section("modulus"), "modulus");
    auto& m = c.modulus;
    m.deltas = s.numbers("deltas", m.deltas);
    if (m.deltas.size() < 3) s.fail("deltas", "needs at least 3 entries");
    for (double d : m.deltas) {
      if (!(d > 0.0 && d <= 1.0)) s.fail("deltas", "entries must lie in (0, 1]");
    }
    m.space = read_space(s, m.space);
    m.samples = s.count("samples", m.samples);
    if (m.samples < 32) s.fail("samples", "must be >= 32");
    const std::string boundary = s.text("boundary", "zero-extension");
    if (boundary == "zero-extension") {
      m.boundary = ShiftBoundary::ZeroExtension;
    } else if (boundary == "interior") {
      m.boundary = ShiftBoundary::Interior;
    } else {
      s.fail("boundary", "expected \"zero-extension\" or \"interior\"");
    }
    m.min_slope = s.number("min_slope", m.min_slope);
    m.max_slope = s.number("max_slope", m.max_slope);
    s.finish();
  }
  {
    Section s(section("converge"), "converge");
    auto& m = c.converge;
    m.epsilons = s.numbers("epsilons", m.epsilons);
    require_epsilons(s, m.epsilons);
    for (std::size_t j = 0; j + 1 < m.epsilons.size(); ++j) {
      if (!(m.epsilons[j + 1] < m.epsilons[j])) s.fail("epsilons", "must be strictly decreasing");
    }
    m.samples = s.count("samples", m.samples);
    if (m.samples < 64) s.fail("samples", "must be >= 64");
    m.delta = s.optional_number("delta");
    if (m.delta && !(*m.delta > 0.0)) s.fail("delta", "must be positive");
    m.exceedance_threshold = s.number("exceedance_threshold", m.exceedance_threshold);
    if (!(m.exceedance_threshold >= 0.0 && m.exceedance_threshold <= 1.0)) {
      s.fail("exceedance_threshold", "must lie in [0, 1]");
    }
    m.space = read_space(s, m.space);
    s.finish();
  }
  {
    Section s(section("ou-check"), "ou-check");
    auto& m = c.ou;
    m.k = static_cast<int>(s.integer("k", m.k, 1));
    m.c0 = s.number("c0", m.c0);
    m.samples = s.count("samples", m.samples);
    if (m.samples < 2) s.fail("samples", "must be >= 2");
    s.finish();
  }
  {
    Section s(section("energy-check"), "energy-check");
    auto& m = c.energy;
    m.levels = static_cast<int>(s.integer("levels", m.levels, 2));
    m.samples = s.count("samples", m.samples);
    m.min_deterministic_ratio = s.number("min_deterministic_ratio", m.min_deterministic_ratio);
    m.max_deterministic_ratio = s.number("max_deterministic_ratio", m.max_deterministic_ratio);
    m.min_stochastic_ratio = s.number("min_stochastic_ratio", m.min_stochastic_ratio);
    s.finish();
  }
  {
    Section s(section("strong-order"), "strong-order");
    auto& m = c.strong;
    m.levels = static_cast<int>(s.integer("levels", m.levels, 3));
    m.samples = s.count("samples", m.samples);
    m.expected_order = s.optional_number("expected_order");
    m.tolerance = s.number("tolerance", m.tolerance);
    if (!(m.tolerance >= 0.0)) s.fail("tolerance", "must be non-negative");
    s.finish();
  }
  return c;
}

json to_json(const RunConfig& c, const std::string& section) {
  json out{{"sim", ncd::to_json(c.sim)}};
  auto space = [](SobolevSpace s) { return std::string(to_string(s)); };
  if (section == "moments") {
    out[section] = {{"epsilons", c.moments.epsilons},
                    {"ps", c.moments.ps},
                    {"samples", c.moments.samples},
                    {"max_uniformity", c.moments.max_uniformity}};
  } else if (section == "modulus") {
    out[section] = {{"deltas", c.modulus.deltas},
                    {"space", space(c.modulus.space)},
                    {"samples", c.modulus.samples},
                    {"boundary", c.modulus.boundary == ShiftBoundary::ZeroExtension
                                     ? "zero-extension"
                                     : "interior"},
                    {"min_slope", c.modulus.min_slope},
                    {"max_slope", c.modulus.max_slope}};
  } else if (section == "converge") {
    out[section] = {{"epsilons", c.converge.epsilons},
                    {"samples", c.converge.samples},
                    {"delta", c.converge.delta ? json(*c.converge.delta) : json(nullptr)},
                    {"exceedance_threshold", c.converge.exceedance_threshold},
                    {"space", space(c.converge.space)}};
  } else if (section == "ou-check") {
    out[section] = {{"k", c.ou.k}, {"c0", c.ou.c0}, {"samples", c.ou.samples}};
  } else if (section == "energy-check") {
    out[section] = {{"levels", c.energy.levels},
                    {"samples", c.energy.samples},
                    {"min_deterministic_ratio", c.energy.min_deterministic_ratio},
                    {"max_deterministic_ratio", c.energy.max_deterministic_ratio},
                    {"min_stochastic_ratio", c.energy.min_stochastic_ratio}};
  } else if (section == "strong-order") {
    out[section] = {
        {"levels", c.strong.levels},
        {"samples", c.strong.samples},
        {"expected_order",
         c.strong.expected_order ? json(*c.strong.expected_order) : json(nullptr)},
        {"tolerance", c.strong.tolerance}};
  }
  return out;
}

}  // namespace ncd::cli
