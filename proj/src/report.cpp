#include "hjlab/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hjlab/config.hpp"

namespace hjlab {

std::string run_identifier(const std::string& command, const std::map<std::string, std::string>& echo) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  mix(command);
  mix(kVersion);
  for (const auto& [k, v] : echo) {
    if (k == "output.dir") continue;
    mix(k);
    mix(v);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(const std::string& path, const std::string& run_id, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# run " << run_id << "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_key_values(const std::string& path, const std::string& run_id, const KeyValues& kv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "run_id = " << run_id << "\n";
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

CheckRecord check_le(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, "<=", measured <= threshold};
}

CheckRecord check_ge(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, ">=", measured >= threshold};
}

CheckRecord check_in(std::string name, double measured, double lo, double hi) {
  CheckRecord r{std::move(name), measured, hi, "in[" + format_double(lo) + "," + format_double(hi) + "]",
                measured >= lo && measured <= hi};
  return r;
}

CheckRecord check_info(std::string name, double measured) {
  return {std::move(name), measured, 0.0, "info", std::isfinite(measured)};
}

}  // namespace hjlab
