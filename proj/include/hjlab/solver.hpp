#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hjlab/collision.hpp"
#include "hjlab/equilibria.hpp"
#include "hjlab/grid.hpp"
#include "hjlab/transport.hpp"

namespace hjlab {

enum class Regime { theorem1, theorem2 };
enum class InitialKind { projected, raw, zero };
enum class TerminalKind { orthogonal, polynomial, degenerate, zero };
enum class ForcingKind { none, preset };

struct ScenarioConfig {
  int dim = 3;
  double radius = 0.0;  // 0 selects four standard deviations of G
  int nodes_per_axis = 9;
  int space_nodes = 1;
  int sphere_order = 7;

  double alpha = 0.0;
  double beta = 5.0;
  double sigma = 0.0;  // 0 selects the regime default

  Regime regime = Regime::theorem1;
  double horizon = 4.0;
  double time_step = 0.05;
  double substep = 0.01;

  double perturbation_scale = 0.01;
  double perturbation_bound = 0.1;

  InitialKind initial_kind = InitialKind::projected;
  std::uint64_t initial_seed = 1;
  double initial_modulation = 0.0;

  TerminalKind terminal_kind = TerminalKind::orthogonal;
  std::uint64_t terminal_seed = 2;
  double terminal_scale = -1.0;  // negative selects perturbation_scale
  double terminal_a = 0.0;
  std::array<double, 3> terminal_b{0, 0, 0};
  double terminal_c = 0.0;
  double terminal_modulation = 0.0;

  ForcingKind forcing = ForcingKind::none;
  double forcing_epsilon = 0.01;

  double tolerance = 1e-9;
  int max_iterations = 100;

  double resolved_sigma() const;
  double resolved_radius() const;
  int time_steps() const;
};

// Throws ValidationError naming the offending configuration key.
void validate(const ScenarioConfig& cfg);

struct HypothesisChecks {
  double initial_size = 0.0;         // ||f0 B^-1 - G||_{L^inf_{beta+1}}
  double initial_orthogonality = 0.0;  // max_i |<psi_p(0), f_i>|
  double terminal_size = 0.0;        // ||e^g B - G||_{L^inf_{beta+1}}
  double terminal_orthogonality = 0.0;
  double terminal_bound = 0.0;       // allowed size (e^{-sigma t} scaled for theorem-2)
  double forcing_bound = 0.0;        // L1_t Linf + C0_t Linf of phi
  double mass_f0 = 0.0;
};

// Everything derived from a configuration: grids, equilibria, tables, data.
struct Scenario {
  ScenarioConfig cfg;
  PhaseGrid grid;
  EquilibriumSet eq;
  KernelBasis basis;
  CollisionTable table;
  KOperator K;
  int steps = 0;
  double dt = 0.0;
  Field psi0_p;  // f0 B^-1 - G
  Field etaT_p;  // e^{g(t)} B - G
  Field g_hat;
  Field f0;
  std::vector<Field> forcing;  // phi(s_n), empty when phi = 0
  HypothesisChecks checks;

  double time(int n) const { return n * dt; }
  bool has_forcing() const { return !forcing.empty(); }
  SemigroupStepper stepper(Direction dir) const;
};

Scenario build_scenario(const ScenarioConfig& cfg);

// Seeded velocity polynomial times G, optionally modulated by cos(2 pi x1).
Field preset_perturbation(const PhaseGrid& g, const EquilibriumSet& eq, std::uint64_t seed, double modulation);

struct TrajectoryPair {
  double horizon = 0.0;
  std::vector<Field> psi;  // psi_p(s_n)
  std::vector<Field> eta;  // eta_p(s_n)
};

TrajectoryPair init_picard(const Scenario& sc);
TrajectoryPair apply_gamma(const TrajectoryPair& pair, const Scenario& sc);

// Full-equation sources at one time node: Q_eta(psi,psi) - 2 Q_G(psi_p, G) - psi phi
// and the mirrored backward source.
struct Sources {
  Field forward;
  Field backward;
};
Sources gamma_sources(const Field& psi_p, const Field& eta_p, const Field* phi, const Scenario& sc);

struct RegimeNorm {
  double psi = 0.0;
  double eta = 0.0;
  double total() const { return psi + eta; }
};
// Theorem-1: P_beta^sigma of psi and of eta reversed.  Theorem-2: E_beta^0 of psi and
// e^{sigma t} E_beta^{-sigma} of eta reversed.
RegimeNorm regime_norm(const TrajectoryPair& diff, const Scenario& sc);
TrajectoryPair difference(const TrajectoryPair& a, const TrajectoryPair& b);

struct IterationRecord {
  int iterate = 0;
  double delta_psi = 0.0;
  double delta_eta = 0.0;
  double ratio = 0.0;  // 0 for the first iterate
};

struct CoupledSolution {
  TrajectoryPair pair;
  bool converged = false;
  std::string status;
  std::vector<IterationRecord> history;
  double max_ratio_after_first = 0.0;
  double fixed_point_residual = 0.0;
  bool positive = true;
  std::string positivity_note;
};

CoupledSolution solve_coupled(const Scenario& sc);

// Plain forward Boltzmann integration (bias eta = 1, phi = 0) with the same stepper,
// each step solved to roundoff.
std::vector<Field> integrate_forward_boltzmann(const Scenario& sc);

struct PhysicalTrajectory {
  std::vector<Field> phi;
  std::vector<Field> p;
};
PhysicalTrajectory to_physical_variables(const TrajectoryPair& pair, const Scenario& sc);
void from_physical_variables(const PhysicalTrajectory& phys, const Scenario& sc, std::vector<Field>& psi,
                             std::vector<Field>& eta);

struct DecayReport {
  NormReport psi;
  NormReport eta;
  double a_star = 0.0;
};
DecayReport decay_report(const TrajectoryPair& pair, const Scenario& sc);

}  // namespace hjlab
