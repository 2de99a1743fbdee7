#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "incent/dynamics.hpp"
#include "incent/game.hpp"
#include "incent/incentives.hpp"

namespace incent {

struct EquilibriumReport {
  Profile profile;
  double residual = 0.0;               // sup-norm of the vector field
  std::optional<double> map_residual;  // sup-norm of one revision-map move, when the map applies
  double nash_residual = 0.0;          // best clipped unilateral payoff gain
  bool interior = false;
  bool pure = false;
  std::optional<bool> win_win;  // pure profiles only: every player at their tensor maximum
  int start = -1;               // index of the producing start, -1 for direct checks
  int64_t iterations = 0;
  bool converged = false;
};

struct SearchConfig {
  int random_starts = 24;
  int64_t budget = 10000;
  double tol = 1e-9;
  double dedup_radius = 1e-6;
  uint64_t seed = 0;
};

// Sup-norm of the field phi - x * sum(phi): zero exactly at rest points of
// the dynamics, defined on the boundary too.
double equilibrium_residual(const Game& g, const Incentive& inc, const Profile& x);

// Best unilateral payoff improvement over all players; zero iff x is a Nash
// equilibrium.
double nash_residual(const Game& g, const Profile& x);

// Scores one point: field residual, one-move displacement, best payoff
// deviation, geometry flags. converged means residual <= tol.
EquilibriumReport certify(const Game& g, const Incentive& inc, const Profile& x, double tol = 1e-9);

// Multistart search for rest points of the incentive dynamics. Starts at
// every vertex (small games), the barycenter, and random points; runs the
// revision map (or damped field steps when the map does not apply), then a
// damped residual-descent polish for continuous incentives. Results are
// deduplicated by max-norm distance and sorted by residual.
std::vector<EquilibriumReport> find_equilibria(const Game& g, const Incentive& inc,
                                               const SearchConfig& config = {});

// Scores every pure profile, one report each. Guards against games with
// more than one million pure profiles.
std::vector<EquilibriumReport> enumerate_pure_equilibria(const Game& g, const Incentive& inc,
                                                         double tol = 1e-9);

// Sorts by residual and drops reports within radius (max-norm) of a kept one.
std::vector<EquilibriumReport> dedup_reports(std::vector<EquilibriumReport> reports, double radius);

// Searches inside the symmetric set defined by the relabelings. First
// verifies on random symmetric samples that the field actually preserves the
// set; throws std::runtime_error with the measured defect when it does not.
EquilibriumReport find_symmetric_equilibrium(const Game& g, const Incentive& inc,
                                             const SymmetryMap& sym, const SearchConfig& config = {});

}  // namespace incent
