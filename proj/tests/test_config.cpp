#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hjlab/commands.hpp"
#include "hjlab/config.hpp"
#include "hjlab/report.hpp"

using namespace hjlab;
namespace fs = std::filesystem;

TEST_CASE("config parsing") {
  const RunConfig rc = parse_config(
      "grid.dimension = 3  # comment\n"
      "grid.velocity.nodes_per_axis = 11\n"
      "scenario.regime = theorem-2\n"
      "scenario.functional.horizons = 2, 4, 8\n"
      "output.dir = somewhere\n");
  CHECK(rc.scenario.nodes_per_axis == 11);
  CHECK(rc.scenario.regime == Regime::theorem2);
  CHECK(rc.functional_horizons == std::vector<double>{2, 4, 8});
  CHECK(rc.output_dir == "somewhere");
}

TEST_CASE("config errors name the key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ValidationError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("solver.bogus = 1\n") == "solver.bogus");
  CHECK(key_of("norms.beta = x\n") == "norms.beta");
  CHECK(key_of("norms.beta = 5\nnorms.beta = 6\n") == "norms.beta");
  CHECK(key_of("grid.velocity.nodes_per_axis = 8\n") == "grid.velocity.nodes_per_axis");
  CHECK(key_of("scenario.regime = theorem-3\n") == "scenario.regime");
}

TEST_CASE("run identifier ignores the output directory") {
  const RunConfig a = parse_config("output.dir = a\n");
  const RunConfig b = parse_config("output.dir = b\n");
  const RunConfig c = parse_config("output.dir = a\nnorms.beta = 6\n");
  CHECK(run_identifier("solve", echo(a)) == run_identifier("solve", echo(b)));
  CHECK(run_identifier("solve", echo(a)) != run_identifier("solve", echo(c)));
  CHECK(run_identifier("solve", echo(a)) != run_identifier("sweep", echo(a)));
}

TEST_CASE("sweep points") {
  const RunConfig rc = parse_config("scenario.sweep.horizon = 1, 2\nscenario.sweep.alpha = 0, 0.1, 0.2\n");
  const auto pts = sweep_points(rc);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].horizon == 1.0);
  CHECK(pts[5].alpha == 0.2);
  CHECK(sweep_points(parse_config("")).size() == 1);
}

TEST_CASE("command exit codes and outputs") {
  const fs::path dir = fs::temp_directory_path() / "hjlab_unit_cmd";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.cfg") << "solver.nope = 1\n";
  }
  std::ostringstream out, err;
  CommandOptions o;
  o.config_path = (dir / "bad.cfg").string();
  CHECK(run_command("solve", o, out, err) == kExitValidation);
  CHECK(err.str().find("solver.nope") != std::string::npos);

  o.config_path = std::string(HJLAB_SOURCE_DIR) + "/configs/smoke.cfg";
  o.out_dir = (dir / "solve").string();
  o.threads = 1;
  CHECK(run_command("solve", o, out, err) == kExitOk);
  for (const char* f : {"trajectory.csv", "iterations.csv", "manifest.txt"}) CHECK(fs::exists(dir / "solve" / f));
  std::ifstream csv(dir / "solve" / "trajectory.csv");
  std::string first, header;
  std::getline(csv, first);
  std::getline(csv, header);
  CHECK(first.rfind("# run ", 0) == 0);
  CHECK(header == "s,sup_psi_p,sup_eta_p,weighted_psi_p,weighted_eta_p,scaled_psi_p,scaled_eta_p");
  o.seed = 7;
  o.out_dir = (dir / "seeded").string();
  CHECK(run_command("solve", o, out, err) == kExitOk);
  std::ifstream man(dir / "seeded" / "manifest.txt");
  const std::string text((std::istreambuf_iterator<char>(man)), std::istreambuf_iterator<char>());
  CHECK(text.find("config.scenario.initial.seed = 7") != std::string::npos);
  CHECK(text.find("config.scenario.terminal.seed = 8") != std::string::npos);
  CHECK(run_command("nonsense", o, out, err) == kExitValidation);
  fs::remove_all(dir);
}
