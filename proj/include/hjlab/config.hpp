#pragma once

#include <map>
#include <string>
#include <vector>

#include "hjlab/solver.hpp"

namespace hjlab {

struct RunConfig {
  ScenarioConfig scenario;
  std::string output_dir = "hjlab-out";
  std::vector<int> refinement_ladder;     // velocity nodes per axis
  std::vector<double> functional_horizons;  // empty: scenario horizon only
  double hj_dt = 0.05;
  std::vector<double> sweep_horizon;
  std::vector<double> sweep_alpha;
  std::vector<double> sweep_scale;
  std::vector<TerminalKind> sweep_terminal;
};

// Parses "key = value" lines; '#' starts a comment.  Unknown or duplicate keys
// and malformed values throw ValidationError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every resolved parameter as canonical text, sorted by key.
std::map<std::string, std::string> echo(const RunConfig& rc);

std::string format_double(double x);
std::string to_string(Regime r);
std::string to_string(InitialKind k);
std::string to_string(TerminalKind k);
std::string to_string(ForcingKind k);
TerminalKind terminal_kind_from(const std::string& s, const std::string& key);

}  // namespace hjlab
