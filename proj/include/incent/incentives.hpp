#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "incent/game.hpp"

namespace incent {

// Per-player switch propensities, same shape as a State.
using IncentiveValues = std::vector<std::vector<double>>;

// Switch-propensity rule plus the metadata the dynamics layer needs. eval is
// defined on raw states so integrator stages may leave the simplex slightly.
// strict_ok certifies, for the game the rule was built against, that the
// bound commonly needed by the discrete map (total propensity never reaching
// -1, nonnegative propensity on unused strategies) holds; rules that cannot
// certify it still work with the continuous dynamics.
struct Incentive {
  std::string name;
  bool is_continuous = true;
  bool zero_total = false;
  bool strict_ok = true;
  std::string strict_note;
  std::function<IncentiveValues(const Game&, const State&)> eval;

  IncentiveValues operator()(const Game& g, const Profile& x) const { return eval(g, x.coords()); }
};

struct ReplicatorTranslation {
  enum class Kind { kNegUtility, kConstant };
  Kind kind = Kind::kNegUtility;
  double value = 0.0;

  static ReplicatorTranslation neg_utility() { return {}; }
  static ReplicatorTranslation constant(double v) { return {Kind::kConstant, v}; }
};

enum class SsuBenefitRule { kMixedProfile, kPureProfile };
enum class RivalVariant { kHurt, kMargin };

// Switch rates for a single population: rho maps (conditional payoffs, state)
// to an s-by-s nonnegative matrix whose rows all sum to row_sum.
struct SwitchRateTable {
  int size = 0;
  double row_sum = 0.0;
  std::function<std::vector<std::vector<double>>(const std::vector<double>&, const std::vector<double>&)> rates;

  static SwitchRateTable constant(std::vector<std::vector<double>> matrix);
};

IncentiveValues nash_incentive(const Game& g, const Profile& x);
IncentiveValues replicator_incentive(const Game& g, const Profile& x,
                                     ReplicatorTranslation g_spec = {});
IncentiveValues projection_incentive(const Game& g, const Profile& x);
IncentiveValues best_reply_incentive(const Game& g, const Profile& x);
IncentiveValues logit_incentive(const Game& g, const Profile& x, double eta);
IncentiveValues smith_incentive(const Game& g, const Profile& x);
IncentiveValues zero_incentive(const Game& g, const Profile& x);
IncentiveValues epsilon_nash_incentive(const Game& g, const Profile& x, double epsilon);
IncentiveValues su_incentive(const Game& g, const Profile& x);
IncentiveValues ssu_incentive(const Game& g, const Profile& x,
                              SsuBenefitRule rule = SsuBenefitRule::kMixedProfile);
IncentiveValues altruism_incentive(const Game& g, const Profile& x);
IncentiveValues pareto_incentive(const Game& g, const Profile& x);
IncentiveValues coalition_incentive(const Game& g, const Profile& x);
IncentiveValues margin_incentive(const Game& g, const Profile& x);
IncentiveValues rival_incentive(const Game& g, const Profile& x, const std::vector<int>& sigma,
                                RivalVariant variant = RivalVariant::kHurt);
IncentiveValues mean_dynamics_incentive(const Game& g, const Profile& x, const SwitchRateTable& rho);

// i -> i+1 mod n; the default rival assignment
std::vector<int> cyclic_rival_map(int num_players);

Incentive make_nash_incentive();
Incentive make_replicator_incentive(const Game& g, ReplicatorTranslation g_spec = {});
Incentive make_projection_incentive();
Incentive make_best_reply_incentive();
Incentive make_logit_incentive(double eta);
Incentive make_smith_incentive();
Incentive make_zero_incentive();
// epsilon defaults to 0.1 * payoff_spread(g)
Incentive make_epsilon_nash_incentive(const Game& g, std::optional<double> epsilon = std::nullopt);
Incentive make_su_incentive();
Incentive make_ssu_incentive(SsuBenefitRule rule = SsuBenefitRule::kMixedProfile);
Incentive make_altruism_incentive(const Game& g);
Incentive make_pareto_incentive();
Incentive make_coalition_incentive(const Game& g);
Incentive make_margin_incentive(const Game& g);
Incentive make_rival_incentive(const Game& g, std::vector<int> sigma = {},
                               RivalVariant variant = RivalVariant::kHurt);
Incentive make_mean_dynamics_incentive(const Game& g, SwitchRateTable rho);

// phi~ = phi - x * sum(phi): same trajectories under the continuous dynamics,
// zero total propensity per player.
Incentive dyn_equivalent(const Incentive& inner);

// Builds an incentive from a spec string such as "nash", "logit:eta=0.5",
// "replicator:g=const:7", "rival:perm=1,0:variant=margin", "mean:rho=FILE".
Incentive parse_incentive(const std::string& spec, const Game& g);
const std::vector<std::string>& incentive_spec_grammar();

}  // namespace incent
