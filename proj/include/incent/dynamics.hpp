#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "incent/game.hpp"
#include "incent/incentives.hpp"

namespace incent {

enum class StepMethod { kDiscreteMap, kEuler, kRk4 };
enum class DriftPolicy { kRenormalize, kReject };
enum class TerminalStatus { kMaxSteps, kConverged, kSimplexViolation };

struct IntegratorConfig {
  StepMethod method = StepMethod::kRk4;
  double dt = 0.01;
  int64_t max_steps = 100000;
  double residual_tol = 1e-9;
  double drift_tol = 1e-6;
  DriftPolicy policy = DriftPolicy::kRenormalize;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> points;
  StepMethod method = StepMethod::kRk4;
  double dt = 0.0;
  std::string incentive;
  TerminalStatus status = TerminalStatus::kMaxSteps;
  double final_residual = 0.0;

  std::string status_string() const;
};

// One application of the revision map: player i moves to
// (x_i + phi_i) / (1 + sum_b phi_ib). Throws std::invalid_argument for
// incentives whose map can leave the simplex, std::runtime_error if a
// denominator vanishes.
State t_map_raw(const Game& g, const Incentive& inc, const State& x);
Profile t_map(const Game& g, const Incentive& inc, const Profile& x);

// Vector field of the continuous dynamics: phi_ia - x_ia * sum_b phi_ib.
// The inner sum accumulates left to right so the field is reproducible
// bit for bit.
IncentiveValues dynamics_rhs(const Game& g, const Incentive& inc, const State& x);

double sup_norm(const IncentiveValues& v);

// Gap between the scaled-map secant (T_eps(x) - x) / eps and the vector
// field, where T_eps uses eps * phi. Shrinks linearly in eps.
double derivative_limit_check(const Game& g, const Incentive& inc, const State& x, double eps);

// Repeated revision map. Stops before moving when the next move is already
// within tolerance; final_residual holds the last move's sup-norm. A
// vanishing denominator terminates with simplex-violation status.
Trajectory iterate_map(const Game& g, const Incentive& inc, const Profile& x0,
                       const IntegratorConfig& config);

// Euler or RK4 time stepping of the continuous dynamics.
Trajectory integrate(const Game& g, const Incentive& inc, const Profile& x0,
                     const IntegratorConfig& config);

// Strategy relabelings tying every player to player 0: perms[i][a] is the
// player-0 strategy matching player i's strategy a. States with
// x[0][perms[i][a]] == x[i][a] form an invariant set of the dynamics when
// the incentive respects the symmetry.
struct SymmetryMap {
  std::vector<std::vector<int>> perms;
};

void validate_symmetry(const Game& g, const SymmetryMap& sym);

// Nearest canonical symmetric state: average the per-player pullbacks onto
// player 0's simplex, then spread back out through the relabelings.
State project_symmetric(const Game& g, const State& x, const SymmetryMap& sym);

double symmetry_defect(const Game& g, const State& x, const SymmetryMap& sym);

struct InvariantRegionReport {
  int samples = 0;
  double max_defect = 0.0;
};

// Samples random symmetric states and measures how far one revision-map move
// drifts off the symmetric set; incentives that respect the relabeling
// report defects near zero.
InvariantRegionReport check_invariant_region(const Game& g, const Incentive& inc,
                                             const SymmetryMap& sym, int samples, uint64_t seed);

}  // namespace incent
