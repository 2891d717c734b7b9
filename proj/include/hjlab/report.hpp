#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hjlab {

inline constexpr const char* kVersion = "1.0.0";

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Deterministic identifier derived from the command name and resolved config.
std::string run_identifier(const std::string& command, const std::map<std::string, std::string>& echo);

// First line "# run <id>", then the fixed header row, then data rows.
void write_csv(const std::string& path, const std::string& run_id, const CsvTable& table);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(const std::string& path, const std::string& run_id, const KeyValues& kv);

struct CheckRecord {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "in[a,b]", "==" or "info"
  bool pass = true;
};

CheckRecord check_le(std::string name, double measured, double threshold);
CheckRecord check_ge(std::string name, double measured, double threshold);
CheckRecord check_in(std::string name, double measured, double lo, double hi);
CheckRecord check_info(std::string name, double measured);

}  // namespace hjlab
