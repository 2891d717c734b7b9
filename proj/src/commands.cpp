#include "hjlab/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hjlab/functional.hpp"
#include "hjlab/parallel.hpp"
#include "hjlab/report.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/verify.hpp"

namespace hjlab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCsvFormat = "1";

std::string fmt(double x) { return format_double(x); }

std::string fmt_or_nan(bool ok, double x) { return ok ? format_double(x) : "nan"; }

// Wall-clock time is deliberately absent so reruns stay byte-identical.
std::pair<std::string, std::string> timestamp() {
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) return {e, "SOURCE_DATE_EPOCH"};
  return {"0", "fixed"};
}

void write_manifest(const std::string& dir, const std::string& command, const RunConfig& rc, const std::string& id,
                    std::vector<std::string>& files, const KeyValues& results) {
  KeyValues kv;
  kv.emplace_back("command", command);
  kv.emplace_back("version.hjlab", kVersion);
  kv.emplace_back("version.csv_format", kCsvFormat);
  const auto [ts, source] = timestamp();
  kv.emplace_back("timestamp.start", ts);
  kv.emplace_back("timestamp.source", source);
  kv.emplace_back("threads", std::to_string(thread_count()));
  kv.emplace_back("note.velocity_truncation",
                  "velocities restricted to the ball |v| <= R; collision triples leaving the ball are discarded");
  kv.emplace_back("note.dimension", rc.scenario.dim == 3 ? "d=3 (physical regime)" : "d=2 (numerical mode)");
  for (const auto& [k, v] : echo(rc)) kv.emplace_back("config." + k, v);
  for (const auto& r : results) kv.push_back(r);
  kv.emplace_back("files.count", std::to_string(files.size()));
  for (std::size_t i = 0; i < files.size(); ++i) kv.emplace_back("files." + std::to_string(i), files[i]);
  write_key_values((fs::path(dir) / "manifest.txt").string(), id, kv);
  files.push_back("manifest.txt");
}

std::string prepare_dir(const RunConfig& rc) {
  fs::create_directories(rc.output_dir);
  return rc.output_dir;
}

CsvTable functional_table() {
  CsvTable t;
  t.header = {"t", "i_def", "i_decomp", "discrepancy", "i_inf", "gap", "residual", "status"};
  return t;
}

std::vector<std::string> functional_row(const FunctionalReport& r) {
  const bool ok = r.converged;
  const bool res = ok && std::isfinite(r.residual);
  return {fmt(r.horizon),        fmt_or_nan(ok, r.i_def), fmt_or_nan(ok, r.i_decomp), fmt_or_nan(ok, r.discrepancy),
          fmt(r.i_inf),          fmt_or_nan(ok, r.gap),   fmt_or_nan(res, r.residual), r.status};
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* e = std::getenv("HJLAB_THREADS"); e && *e) {
    char* end = nullptr;
    const long n = std::strtol(e, &end, 10);
    if (*end != '\0' || n < 1) throw ValidationError("HJLAB_THREADS", "must be a positive integer");
    return static_cast<int>(n);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig rc = load_config(opts.config_path);
  if (opts.out_dir) rc.output_dir = *opts.out_dir;
  if (opts.seed) {
    rc.scenario.initial_seed = *opts.seed;
    rc.scenario.terminal_seed = *opts.seed + 1;
  }
  validate(rc.scenario);
  return rc;
}

CommandResult cmd_verify(const RunConfig& rc) {
  CommandResult res;
  res.directory = prepare_dir(rc);
  const std::string id = run_identifier("verify", echo(rc));
  const std::vector<CheckRecord> checks = verify_suite(rc);
  KeyValues kv;
  std::size_t failed = 0;
  for (const CheckRecord& c : checks) {
    kv.emplace_back(c.name + ".measured", fmt(c.measured));
    kv.emplace_back(c.name + ".threshold", fmt(c.threshold));
    kv.emplace_back(c.name + ".relation", c.relation);
    kv.emplace_back(c.name + ".pass", c.pass ? "true" : "false");
    if (!c.pass) ++failed;
  }
  write_key_values((fs::path(res.directory) / "verify_report.txt").string(), id, kv);
  res.files.push_back("verify_report.txt");
  KeyValues summary{{"verify.checks", std::to_string(checks.size())},
                    {"verify.passed", std::to_string(checks.size() - failed)},
                    {"verify.failed", std::to_string(failed)}};
  for (const CheckRecord& c : checks)
    if (!c.pass) summary.emplace_back("verify.failed." + c.name, fmt(c.measured));
  write_manifest(res.directory, "verify", rc, id, res.files, summary);
  res.status = failed == 0 ? kExitOk : kExitValidation;
  res.summary = std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " checks passed";
  return res;
}

CommandResult cmd_solve(const RunConfig& rc) {
  CommandResult res;
  res.directory = prepare_dir(rc);
  const std::string id = run_identifier("solve", echo(rc));
  const Scenario sc = build_scenario(rc.scenario);
  const CoupledSolution sol = solve_coupled(sc);
  const VelocityGrid& vg = sc.grid.velocity;
  const double beta = sc.cfg.beta, sigma = sc.cfg.resolved_sigma(), t = sc.cfg.horizon;

  CsvTable traj;
  traj.header = {"s", "sup_psi_p", "sup_eta_p", "weighted_psi_p", "weighted_eta_p", "scaled_psi_p", "scaled_eta_p"};
  for (std::size_t n = 0; n < sol.pair.psi.size(); ++n) {
    const double s = sc.time(static_cast<int>(n));
    const double wp = weighted_sup_norm(sol.pair.psi[n], vg, beta);
    const double we = weighted_sup_norm(sol.pair.eta[n], vg, beta);
    traj.rows.push_back({fmt(s), fmt(max_abs(sol.pair.psi[n])), fmt(max_abs(sol.pair.eta[n])), fmt(wp), fmt(we),
                         fmt(std::pow(1.0 + s, sigma) * wp), fmt(std::pow(1.0 + (t - s), sigma) * we)});
  }
  write_csv((fs::path(res.directory) / "trajectory.csv").string(), id, traj);
  res.files.push_back("trajectory.csv");

  CsvTable it;
  it.header = {"iterate", "delta_psi", "delta_eta", "ratio"};
  for (const IterationRecord& r : sol.history)
    it.rows.push_back({std::to_string(r.iterate), fmt(r.delta_psi), fmt(r.delta_eta), fmt(r.ratio)});
  write_csv((fs::path(res.directory) / "iterations.csv").string(), id, it);
  res.files.push_back("iterations.csv");

  KeyValues kv{{"solve.status", sol.status},
               {"solve.converged", sol.converged ? "true" : "false"},
               {"solve.iterations", std::to_string(sol.history.size())},
               {"solve.max_ratio_after_first", fmt(sol.max_ratio_after_first)},
               {"solve.fixed_point_residual", fmt(sol.fixed_point_residual)},
               {"solve.positive", sol.positive ? "true" : "false"},
               {"hypothesis.initial_size", fmt(sc.checks.initial_size)},
               {"hypothesis.initial_orthogonality", fmt(sc.checks.initial_orthogonality)},
               {"hypothesis.terminal_size", fmt(sc.checks.terminal_size)},
               {"hypothesis.terminal_orthogonality", fmt(sc.checks.terminal_orthogonality)},
               {"hypothesis.terminal_bound", fmt(sc.checks.terminal_bound)},
               {"hypothesis.forcing_bound", fmt(sc.checks.forcing_bound)}};
  if (!sol.positivity_note.empty()) kv.emplace_back("solve.positivity_note", sol.positivity_note);
  if (sol.converged) {
    const DecayReport dr = decay_report(sol.pair, sc);
    kv.emplace_back("decay.psi_norm", fmt(dr.psi.value));
    kv.emplace_back("decay.eta_norm", fmt(dr.eta.value));
    kv.emplace_back("decay.a_star", fmt(dr.a_star));
  }
  write_manifest(res.directory, "solve", rc, id, res.files, kv);
  res.status = sol.converged ? kExitOk : kExitDivergence;
  res.summary = sol.status + " after " + std::to_string(sol.history.size()) + " iterations";
  return res;
}

CommandResult cmd_functional(const RunConfig& rc) {
  CommandResult res;
  res.directory = prepare_dir(rc);
  const std::string id = run_identifier("functional", echo(rc));
  std::vector<double> ts = rc.functional_horizons;
  if (ts.empty()) ts.push_back(rc.scenario.horizon);
  const std::vector<FunctionalReport> reps = hj_residual(rc.scenario, ts, rc.hj_dt);
  CsvTable tab = functional_table();
  bool all = true;
  double max_abs_i = 0.0;
  for (const FunctionalReport& r : reps) {
    tab.rows.push_back(functional_row(r));
    all = all && r.converged;
    if (r.converged) max_abs_i = std::max(max_abs_i, std::abs(r.i_def));
  }
  write_csv((fs::path(res.directory) / "functional.csv").string(), id, tab);
  res.files.push_back("functional.csv");
  write_manifest(res.directory, "functional", rc, id, res.files,
                 {{"functional.all_converged", all ? "true" : "false"}, {"functional.max_abs", fmt(max_abs_i)}});
  res.status = all ? kExitOk : kExitDivergence;
  res.summary = std::to_string(reps.size()) + " horizons evaluated";
  return res;
}

std::vector<ScenarioConfig> sweep_points(const RunConfig& rc) {
  const ScenarioConfig& base = rc.scenario;
  const std::vector<double> hs = rc.sweep_horizon.empty() ? std::vector<double>{base.horizon} : rc.sweep_horizon;
  const std::vector<double> as = rc.sweep_alpha.empty() ? std::vector<double>{base.alpha} : rc.sweep_alpha;
  const std::vector<double> cs = rc.sweep_scale.empty() ? std::vector<double>{base.perturbation_scale} : rc.sweep_scale;
  const std::vector<TerminalKind> ks =
      rc.sweep_terminal.empty() ? std::vector<TerminalKind>{base.terminal_kind} : rc.sweep_terminal;
  std::vector<ScenarioConfig> points;
  for (double h : hs)
    for (double a : as)
      for (double c : cs)
        for (TerminalKind k : ks) {
          ScenarioConfig p = base;
          p.horizon = h;
          p.alpha = a;
          p.perturbation_scale = c;
          p.terminal_kind = k;
          points.push_back(p);
        }
  return points;
}

CommandResult cmd_sweep(const RunConfig& rc) {
  CommandResult res;
  res.directory = prepare_dir(rc);
  const std::string id = run_identifier("sweep", echo(rc));
  const std::vector<ScenarioConfig> points = sweep_points(rc);

  std::vector<FunctionalReport> reps(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    ThreadLimit limit(1);
    for (std::size_t i = next++; i < points.size(); i = next++) {
      FunctionalReport r;
      r.horizon = points[i].horizon;
      r.i_inf = std::numeric_limits<double>::quiet_NaN();
      try {
        r = hj_residual(points[i], {points[i].horizon}, rc.hj_dt).front();
      } catch (const ValidationError& e) {
        r.status = std::string("invalid: ") + e.what();
      } catch (const std::exception& e) {
        r.status = std::string("diverged: ") + e.what();
      }
      reps[i] = r;
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), points.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CsvTable tab;
  tab.header = {"point", "alpha", "perturbation_scale", "terminal_kind", "t", "i_def", "i_decomp",
                "discrepancy", "i_inf", "gap", "residual", "status"};
  std::size_t converged = 0;
  double max_abs_i = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), fmt(points[i].alpha), fmt(points[i].perturbation_scale),
                                 to_string(points[i].terminal_kind)};
    for (auto& s : functional_row(reps[i])) row.push_back(std::move(s));
    tab.rows.push_back(std::move(row));
    if (reps[i].converged) {
      ++converged;
      max_abs_i = std::max(max_abs_i, std::abs(reps[i].i_def));
    }
  }
  write_csv((fs::path(res.directory) / "sweep.csv").string(), id, tab);
  res.files.push_back("sweep.csv");
  write_manifest(res.directory, "sweep", rc, id, res.files,
                 {{"sweep.points", std::to_string(points.size())},
                  {"sweep.converged", std::to_string(converged)},
                  {"sweep.max_abs_functional", fmt(max_abs_i)}});
  res.summary = std::to_string(converged) + "/" + std::to_string(points.size()) + " points converged";
  return res;
}

int run_command(const std::string& command, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const bool solver_cmd = command == "solve" || command == "functional";
  try {
    set_thread_count(resolve_threads(opts.threads));
    const RunConfig rc = resolve_config(opts);
    CommandResult r;
    if (command == "verify")
      r = cmd_verify(rc);
    else if (command == "solve")
      r = cmd_solve(rc);
    else if (command == "functional")
      r = cmd_functional(rc);
    else if (command == "sweep")
      r = cmd_sweep(rc);
    else
      throw ValidationError("command", "unknown command " + command);
    out << command << ": " << r.summary << "\n";
    for (const auto& f : r.files) out << "  " << (fs::path(r.directory) / f).string() << "\n";
    return r.status;
  } catch (const ValidationError& e) {
    err << "hjlab: invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::overflow_error& e) {
    err << "hjlab: " << e.what() << "\n";
    return solver_cmd ? kExitDivergence : kExitInternal;
  } catch (const std::domain_error& e) {
    err << "hjlab: " << e.what() << "\n";
    return solver_cmd ? kExitDivergence : kExitInternal;
  } catch (const std::exception& e) {
    err << "hjlab: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace hjlab
