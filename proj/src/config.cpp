#include "hjlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace hjlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
    throw ValidationError(key, "expected a finite number, got '" + v + "'");
  return x;
}

long parse_int(const std::string& key, const std::string& v) {
  long x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) throw ValidationError(key, "expected an integer, got '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  if (out.empty()) throw ValidationError(key, "expected a comma-separated list");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v, std::function<std::string(const T&)> f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_string(Regime r) { return r == Regime::theorem1 ? "theorem-1" : "theorem-2"; }

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::projected: return "projected";
    case InitialKind::raw: return "raw";
    case InitialKind::zero: return "zero";
  }
  return "?";
}

std::string to_string(TerminalKind k) {
  switch (k) {
    case TerminalKind::orthogonal: return "orthogonal";
    case TerminalKind::polynomial: return "polynomial";
    case TerminalKind::degenerate: return "degenerate";
    case TerminalKind::zero: return "zero";
  }
  return "?";
}

std::string to_string(ForcingKind k) { return k == ForcingKind::none ? "none" : "preset"; }

TerminalKind terminal_kind_from(const std::string& s, const std::string& key) {
  if (s == "orthogonal") return TerminalKind::orthogonal;
  if (s == "polynomial") return TerminalKind::polynomial;
  if (s == "degenerate") return TerminalKind::degenerate;
  if (s == "zero") return TerminalKind::zero;
  throw ValidationError(key, "expected orthogonal|polynomial|degenerate|zero");
}

RunConfig parse_config(const std::string& text) {
  RunConfig rc;
  ScenarioConfig& c = rc.scenario;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"grid.dimension", [&](auto& k, auto& v) { c.dim = static_cast<int>(parse_int(k, v)); }},
      {"grid.velocity.radius", [&](auto& k, auto& v) {
         c.radius = parse_double(k, v);
         if (!(c.radius > 0.0)) throw ValidationError(k, "must be positive");
       }},
      {"grid.velocity.nodes_per_axis", [&](auto& k, auto& v) { c.nodes_per_axis = static_cast<int>(parse_int(k, v)); }},
      {"grid.velocity.refinement_ladder", [&](auto& k, auto& v) {
         for (const auto& s : split_list(v)) {
           const int n = static_cast<int>(parse_int(k, s));
           if (n < 3 || n % 2 == 0) throw ValidationError("grid.velocity.nodes_per_axis", "ladder entries must be odd and >= 3");
           rc.refinement_ladder.push_back(n);
         }
       }},
      {"grid.space.nodes_per_axis", [&](auto& k, auto& v) { c.space_nodes = static_cast<int>(parse_int(k, v)); }},
      {"grid.sphere.order", [&](auto& k, auto& v) { c.sphere_order = static_cast<int>(parse_int(k, v)); }},
      {"equilibrium.alpha", [&](auto& k, auto& v) { c.alpha = parse_double(k, v); }},
      {"norms.beta", [&](auto& k, auto& v) { c.beta = parse_double(k, v); }},
      {"norms.sigma", [&](auto& k, auto& v) {
         c.sigma = parse_double(k, v);
         if (!(c.sigma > 0.0)) throw ValidationError(k, "must be positive");
       }},
      {"scenario.regime", [&](auto& k, auto& v) {
         if (v == "theorem-1")
           c.regime = Regime::theorem1;
         else if (v == "theorem-2")
           c.regime = Regime::theorem2;
         else
           throw ValidationError(k, "expected theorem-1|theorem-2");
       }},
      {"scenario.horizon", [&](auto& k, auto& v) { c.horizon = parse_double(k, v); }},
      {"scenario.perturbation_scale", [&](auto& k, auto& v) { c.perturbation_scale = parse_double(k, v); }},
      {"scenario.perturbation_bound", [&](auto& k, auto& v) { c.perturbation_bound = parse_double(k, v); }},
      {"scenario.initial.kind", [&](auto& k, auto& v) {
         if (v == "projected")
           c.initial_kind = InitialKind::projected;
         else if (v == "raw")
           c.initial_kind = InitialKind::raw;
         else if (v == "zero")
           c.initial_kind = InitialKind::zero;
         else
           throw ValidationError(k, "expected projected|raw|zero");
       }},
      {"scenario.initial.seed", [&](auto& k, auto& v) { c.initial_seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
      {"scenario.initial.modulation", [&](auto& k, auto& v) { c.initial_modulation = parse_double(k, v); }},
      {"scenario.terminal.kind", [&](auto& k, auto& v) { c.terminal_kind = terminal_kind_from(v, k); }},
      {"scenario.terminal.seed", [&](auto& k, auto& v) { c.terminal_seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
      {"scenario.terminal.scale", [&](auto& k, auto& v) { c.terminal_scale = parse_double(k, v); }},
      {"scenario.terminal.a", [&](auto& k, auto& v) { c.terminal_a = parse_double(k, v); }},
      {"scenario.terminal.b", [&](auto& k, auto& v) {
         const auto b = parse_doubles(k, v);
         if (b.size() > 3) throw ValidationError(k, "at most three components");
         c.terminal_b = {0, 0, 0};
         for (std::size_t i = 0; i < b.size(); ++i) c.terminal_b[i] = b[i];
       }},
      {"scenario.terminal.c", [&](auto& k, auto& v) { c.terminal_c = parse_double(k, v); }},
      {"scenario.terminal.modulation", [&](auto& k, auto& v) { c.terminal_modulation = parse_double(k, v); }},
      {"scenario.forcing.kind", [&](auto& k, auto& v) {
         if (v == "none")
           c.forcing = ForcingKind::none;
         else if (v == "preset")
           c.forcing = ForcingKind::preset;
         else
           throw ValidationError(k, "expected none|preset");
       }},
      {"scenario.forcing.epsilon", [&](auto& k, auto& v) { c.forcing_epsilon = parse_double(k, v); }},
      {"scenario.functional.horizons", [&](auto& k, auto& v) { rc.functional_horizons = parse_doubles(k, v); }},
      {"scenario.functional.hj_dt", [&](auto& k, auto& v) {
         rc.hj_dt = parse_double(k, v);
         if (!(rc.hj_dt > 0.0)) throw ValidationError(k, "must be positive");
       }},
      {"scenario.sweep.horizon", [&](auto& k, auto& v) { rc.sweep_horizon = parse_doubles(k, v); }},
      {"scenario.sweep.alpha", [&](auto& k, auto& v) { rc.sweep_alpha = parse_doubles(k, v); }},
      {"scenario.sweep.perturbation_scale", [&](auto& k, auto& v) { rc.sweep_scale = parse_doubles(k, v); }},
      {"scenario.sweep.terminal_kind", [&](auto& k, auto& v) {
         for (const auto& s : split_list(v)) rc.sweep_terminal.push_back(terminal_kind_from(s, k));
       }},
      {"solver.time_step", [&](auto& k, auto& v) { c.time_step = parse_double(k, v); }},
      {"solver.substep", [&](auto& k, auto& v) { c.substep = parse_double(k, v); }},
      {"solver.tolerance", [&](auto& k, auto& v) { c.tolerance = parse_double(k, v); }},
      {"solver.max_iterations", [&](auto& k, auto& v) { c.max_iterations = static_cast<int>(parse_int(k, v)); }},
      {"output.dir", [&](auto&, auto& v) { rc.output_dir = v; }},
  };
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError(key, "unknown configuration key");
    if (!seen.insert(key).second) throw ValidationError(key, "duplicate configuration key");
    if (value.empty()) throw ValidationError(key, "missing value");
    it->second(key, value);
  }
  validate(c);
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("", "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> echo(const RunConfig& rc) {
  const ScenarioConfig& c = rc.scenario;
  std::map<std::string, std::string> m;
  const std::function<std::string(const double&)> fd = [](const double& x) { return format_double(x); };
  const std::function<std::string(const int&)> fi = [](const int& x) { return std::to_string(x); };
  const std::function<std::string(const TerminalKind&)> fk = [](const TerminalKind& k) { return to_string(k); };
  m["grid.dimension"] = std::to_string(c.dim);
  m["grid.velocity.radius"] = format_double(c.resolved_radius());
  m["grid.velocity.nodes_per_axis"] = std::to_string(c.nodes_per_axis);
  m["grid.velocity.refinement_ladder"] = join(rc.refinement_ladder, fi);
  m["grid.space.nodes_per_axis"] = std::to_string(c.space_nodes);
  m["grid.sphere.order"] = std::to_string(c.sphere_order);
  m["equilibrium.alpha"] = format_double(c.alpha);
  m["norms.beta"] = format_double(c.beta);
  m["norms.sigma"] = format_double(c.resolved_sigma());
  m["scenario.regime"] = to_string(c.regime);
  m["scenario.horizon"] = format_double(c.horizon);
  m["scenario.perturbation_scale"] = format_double(c.perturbation_scale);
  m["scenario.perturbation_bound"] = format_double(c.perturbation_bound);
  m["scenario.initial.kind"] = to_string(c.initial_kind);
  m["scenario.initial.seed"] = std::to_string(c.initial_seed);
  m["scenario.initial.modulation"] = format_double(c.initial_modulation);
  m["scenario.terminal.kind"] = to_string(c.terminal_kind);
  m["scenario.terminal.seed"] = std::to_string(c.terminal_seed);
  m["scenario.terminal.scale"] = format_double(c.terminal_scale < 0.0 ? c.perturbation_scale : c.terminal_scale);
  m["scenario.terminal.a"] = format_double(c.terminal_a);
  m["scenario.terminal.b"] = join(std::vector<double>(c.terminal_b.begin(), c.terminal_b.begin() + c.dim), fd);
  m["scenario.terminal.c"] = format_double(c.terminal_c);
  m["scenario.terminal.modulation"] = format_double(c.terminal_modulation);
  m["scenario.forcing.kind"] = to_string(c.forcing);
  m["scenario.forcing.epsilon"] = format_double(c.forcing_epsilon);
  m["scenario.functional.horizons"] = join(rc.functional_horizons, fd);
  m["scenario.functional.hj_dt"] = format_double(rc.hj_dt);
  m["scenario.sweep.horizon"] = join(rc.sweep_horizon, fd);
  m["scenario.sweep.alpha"] = join(rc.sweep_alpha, fd);
  m["scenario.sweep.perturbation_scale"] = join(rc.sweep_scale, fd);
  m["scenario.sweep.terminal_kind"] = join(rc.sweep_terminal, fk);
  m["solver.time_step"] = format_double(c.time_step);
  m["solver.substep"] = format_double(c.substep);
  m["solver.tolerance"] = format_double(c.tolerance);
  m["solver.max_iterations"] = std::to_string(c.max_iterations);
  m["output.dir"] = rc.output_dir;
  return m;
}

}  // namespace hjlab
