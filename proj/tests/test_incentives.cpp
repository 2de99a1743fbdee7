#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "incent/game.hpp"
#include "incent/game_io.hpp"
#include "incent/incentives.hpp"
#include "incent/rng.hpp"
#include "oracles.hpp"

using incent::Game;
using incent::Incentive;
using incent::IncentiveValues;
using incent::Profile;
using incent::ReplicatorTranslation;
using incent::Rng;
using incent::RivalVariant;
using incent::SsuBenefitRule;
using incent::State;
using incent::SwitchRateTable;

namespace {

Game random_game(Rng& rng, int max_players = 3, int max_strategies = 4) {
  int n = rng.uniform_int(1, max_players);
  std::vector<int> counts(static_cast<size_t>(n));
  int64_t total = 1;
  for (auto& c : counts) {
    c = rng.uniform_int(2, max_strategies);
    total *= c;
  }
  std::vector<std::vector<double>> payoffs(static_cast<size_t>(n));
  for (auto& t : payoffs) {
    t.resize(static_cast<size_t>(total));
    for (auto& v : t) v = rng.uniform();
  }
  return Game(counts, payoffs);
}

Profile random_profile(const Game& g, Rng& rng) {
  State x(static_cast<size_t>(g.num_players()));
  for (int i = 0; i < g.num_players(); ++i)
    x[static_cast<size_t>(i)] = rng.simplex_point(g.num_strategies(i));
  return Profile(x);
}

// a profile with at least one exactly-zero coordinate per player
Profile random_boundary_profile(const Game& g, Rng& rng) {
  State x(static_cast<size_t>(g.num_players()));
  for (int i = 0; i < g.num_players(); ++i) {
    int s = g.num_strategies(i);
    auto v = rng.simplex_point(s);
    int drop = rng.uniform_int(0, s - 1);
    double keep = 1.0 - v[static_cast<size_t>(drop)];
    v[static_cast<size_t>(drop)] = 0.0;
    if (keep <= 0.0) {
      for (auto& c : v) c = 0.0;
      v[static_cast<size_t>((drop + 1) % s)] = 1.0;
    } else {
      for (auto& c : v) c /= keep;
    }
    x[static_cast<size_t>(i)] = std::move(v);
  }
  return Profile(x);
}

SwitchRateTable random_rate_table(int s, Rng& rng) {
  std::vector<std::vector<double>> m(static_cast<size_t>(s),
                                     std::vector<double>(static_cast<size_t>(s), 0.0));
  double target = 0.0;
  std::vector<double> sums(static_cast<size_t>(s), 0.0);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      m[static_cast<size_t>(i)][static_cast<size_t>(j)] = rng.uniform();
      sums[static_cast<size_t>(i)] += m[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    target = std::fmax(target, sums[static_cast<size_t>(i)]);
  }
  // pad the diagonal so every row reaches the common total
  for (int i = 0; i < s; ++i)
    m[static_cast<size_t>(i)][static_cast<size_t>(i)] += target - sums[static_cast<size_t>(i)];
  return SwitchRateTable::constant(std::move(m));
}

// every catalog rule that can be built for this game
std::vector<Incentive> catalog_for(const Game& g, Rng& rng) {
  std::vector<Incentive> out;
  out.push_back(incent::make_nash_incentive());
  out.push_back(incent::make_replicator_incentive(g));
  out.push_back(incent::make_replicator_incentive(g, ReplicatorTranslation::constant(7.0)));
  out.push_back(incent::make_projection_incentive());
  out.push_back(incent::make_best_reply_incentive());
  out.push_back(incent::make_logit_incentive(1.0));
  out.push_back(incent::make_smith_incentive());
  out.push_back(incent::make_zero_incentive());
  out.push_back(incent::make_epsilon_nash_incentive(g));
  out.push_back(incent::make_su_incentive());
  out.push_back(incent::make_ssu_incentive());
  out.push_back(incent::make_ssu_incentive(SsuBenefitRule::kPureProfile));
  out.push_back(incent::make_pareto_incentive());
  out.push_back(incent::make_coalition_incentive(g));
  if (g.num_players() >= 2) {
    out.push_back(incent::make_altruism_incentive(g));
    out.push_back(incent::make_margin_incentive(g));
    out.push_back(incent::make_rival_incentive(g));
    out.push_back(incent::make_rival_incentive(g, {}, RivalVariant::kMargin));
  }
  if (g.num_players() == 1)
    out.push_back(incent::make_mean_dynamics_incentive(g, random_rate_table(g.num_strategies(0), rng)));
  return out;
}

const Game& pd() {
  static Game g = incent::builtin_game("prisoners_dilemma");
  return g;
}

void check_values(const IncentiveValues& got, const std::vector<std::vector<double>>& want,
                  double tol = 1e-12) {
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < want.size(); ++i) {
    REQUIRE(got[i].size() == want[i].size());
    for (size_t a = 0; a < want[i].size(); ++a)
      CHECK(got[i][a] == doctest::Approx(want[i][a]).epsilon(tol).scale(1.0));
  }
}

}  // namespace

TEST_SUITE("incentive catalog") {

TEST_CASE("positive payoff gaps drive the nash rule") {
  Profile cc(State{{1.0, 0.0}, {1.0, 0.0}});
  check_values(incent::nash_incentive(pd(), cc), {{0.0, 2.0}, {0.0, 2.0}});

  Game mp = incent::builtin_game("matching_pennies");
  check_values(incent::nash_incentive(mp, Profile::barycenter(mp)), {{0.0, 0.0}, {0.0, 0.0}});

  Game rps = incent::builtin_game("rock_paper_scissors");
  check_values(incent::nash_incentive(rps, Profile::barycenter(rps)),
               {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}});
}

TEST_CASE("one revision-map move from mutual cooperation") {
  Incentive nash = incent::make_nash_incentive();
  Profile cc(State{{1.0, 0.0}, {1.0, 0.0}});
  Profile next = incent::t_map(pd(), nash, cc);
  check_values(next.coords(), {{1.0 / 3.0, 2.0 / 3.0}, {1.0 / 3.0, 2.0 / 3.0}}, 1e-15);
}

TEST_CASE("replicator weighs gaps by current usage") {
  Profile x(State{{0.5, 0.5}, {1.0, 0.0}});
  check_values(incent::replicator_incentive(pd(), x), {{-0.5, 0.5}, {0.0, 0.0}});
}

TEST_CASE("replicator translations leave the field unchanged") {
  Rng rng(311);
  for (int trial = 0; trial < 40; ++trial) {
    Game g = random_game(rng);
    Profile x = random_profile(g, rng);
    Incentive a = incent::make_replicator_incentive(g);
    Incentive b = incent::make_replicator_incentive(g, ReplicatorTranslation::constant(0.0));
    Incentive c = incent::make_replicator_incentive(g, ReplicatorTranslation::constant(7.0));
    IncentiveValues fa = incent::dynamics_rhs(g, a, x.coords());
    IncentiveValues fb = incent::dynamics_rhs(g, b, x.coords());
    IncentiveValues fc = incent::dynamics_rhs(g, c, x.coords());
    auto want = oracle::replicator_rhs(g, x.coords());
    for (size_t i = 0; i < fa.size(); ++i)
      for (size_t j = 0; j < fa[i].size(); ++j) {
        CHECK(fa[i][j] == doctest::Approx(fb[i][j]).epsilon(1e-12).scale(1.0));
        CHECK(fa[i][j] == doctest::Approx(fc[i][j]).epsilon(1e-12).scale(1.0));
        CHECK(fa[i][j] == doctest::Approx(want[i][j]).epsilon(1e-12).scale(1.0));
      }
  }
}

TEST_CASE("replicator map certification depends on the translation") {
  // wide payoff spread: the default translation cannot certify the map bound
  CHECK_FALSE(incent::make_replicator_incentive(pd()).strict_ok);
  // narrow spread can
  Game narrow({2, 2}, {{0.2, 0.5, 0.1, 0.4}, {0.3, 0.2, 0.6, 0.1}});
  CHECK(incent::make_replicator_incentive(narrow).strict_ok);
  // constants are certified by the payoff floor
  CHECK(incent::make_replicator_incentive(pd(), ReplicatorTranslation::constant(7.0)).strict_ok);
  CHECK_FALSE(
      incent::make_replicator_incentive(pd(), ReplicatorTranslation::constant(-2.0)).strict_ok);
}

TEST_CASE("projection recenters over the best superset of the support") {
  Game rps = incent::builtin_game("rock_paper_scissors");
  check_values(incent::projection_incentive(rps, Profile::barycenter(rps)),
               {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}});

  // second strategy pays more, so the active set grows and recenters
  Game g({2, 2}, {{1.0, 1.0, 2.0, 2.0}, {0.0, 0.0, 0.0, 0.0}});
  Profile x(State{{1.0, 0.0}, {1.0, 0.0}});
  IncentiveValues phi = incent::projection_incentive(g, x);
  CHECK(phi[0][0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(phi[0][1] == doctest::Approx(0.5).epsilon(1e-15));

  Incentive inc = incent::make_projection_incentive();
  CHECK(inc.zero_total);
  CHECK_FALSE(inc.is_continuous);
  CHECK_FALSE(inc.strict_ok);
}

TEST_CASE("projection agrees with superset enumeration") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    Game g = random_game(rng, 2, 4);
    Profile x = trial % 3 == 0 ? random_boundary_profile(g, rng) : random_profile(g, rng);
    IncentiveValues phi = incent::projection_incentive(g, x);
    for (int i = 0; i < g.num_players(); ++i) {
      auto w = incent::conditional_payoffs(g, i, x.coords());
      auto want = oracle::projection_direction(w, x.coords()[static_cast<size_t>(i)]);
      for (size_t a = 0; a < want.size(); ++a)
        CHECK(phi[static_cast<size_t>(i)][a] ==
              doctest::Approx(want[a]).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("best reply puts all weight on the first maximizer") {
  Game mp = incent::builtin_game("matching_pennies");
  check_values(incent::best_reply_incentive(mp, Profile::barycenter(mp)),
               {{1.0, 0.0}, {1.0, 0.0}});

  Profile heads(State{{1.0, 0.0}, {1.0, 0.0}});
  // matcher stays on heads, mismatcher runs to tails
  check_values(incent::best_reply_incentive(mp, heads), {{1.0, 0.0}, {0.0, 1.0}});
  CHECK_FALSE(incent::make_best_reply_incentive().is_continuous);
}

TEST_CASE("logit smooths toward the softmax of conditional payoffs") {
  Game mp = incent::builtin_game("matching_pennies");
  check_values(incent::logit_incentive(mp, Profile::barycenter(mp), 1.0),
               {{0.5, 0.5}, {0.5, 0.5}});

  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    Game g = random_game(rng);
    Profile x = random_profile(g, rng);
    double eta = rng.uniform(0.1, 5.0);
    IncentiveValues phi = incent::logit_incentive(g, x, eta);
    for (int i = 0; i < g.num_players(); ++i) {
      auto w = oracle::conditional(g, i, x.coords());
      double denom = 0.0;
      for (double v : w) denom += std::exp(v / eta);
      for (size_t a = 0; a < w.size(); ++a)
        CHECK(phi[static_cast<size_t>(i)][a] ==
              doctest::Approx(std::exp(w[a] / eta) / denom).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(incent::make_logit_incentive(0.0), std::invalid_argument);
}

TEST_CASE("smith routes mass from used strategies toward better replies") {
  // conditional payoffs (0, 3) with all weight on the first strategy: the
  // second strategy collects the full gap, the first collects nothing
  Game g({2, 2}, {{0.0, 9.0, 3.0, 7.0}, {0.0, 0.0, 0.0, 0.0}});
  Profile x(State{{1.0, 0.0}, {1.0, 0.0}});
  IncentiveValues phi = incent::smith_incentive(g, x);
  CHECK(phi[0][0] == 0.0);
  CHECK(phi[0][1] == doctest::Approx(3.0).epsilon(1e-15));

  // pairwise-gap sum, checked directly on random instances
  Rng rng(66);
  for (int trial = 0; trial < 30; ++trial) {
    Game h = random_game(rng);
    Profile y = random_profile(h, rng);
    IncentiveValues got = incent::smith_incentive(h, y);
    for (int i = 0; i < h.num_players(); ++i) {
      auto w = oracle::conditional(h, i, y.coords());
      for (size_t a = 0; a < w.size(); ++a) {
        double want = 0.0;
        for (size_t c = 0; c < w.size(); ++c) {
          double gap = w[a] - w[c];
          if (gap > 0.0) want += y[i][c] * gap;
        }
        CHECK(got[static_cast<size_t>(i)][a] == doctest::Approx(want).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("zero rule reports no pressure anywhere") {
  Rng rng(77);
  Game g = random_game(rng);
  Profile x = random_profile(g, rng);
  Incentive inc = incent::make_zero_incentive();
  IncentiveValues phi = inc(g, x);
  for (const auto& row : phi)
    for (double v : row) CHECK(v == 0.0);
  CHECK(inc.zero_total);
  CHECK(inc.strict_ok);
}

TEST_CASE("slack threshold trims the nash gaps") {
  Profile cc(State{{1.0, 0.0}, {1.0, 0.0}});
  check_values(incent::epsilon_nash_incentive(pd(), cc, 0.5), {{0.0, 1.5}, {0.0, 1.5}});

  // the default slack is a tenth of the payoff spread
  Incentive def = incent::make_epsilon_nash_incentive(pd());
  check_values(def(pd(), cc), {{0.0, 1.5}, {0.0, 1.5}});

  CHECK_THROWS_AS(incent::make_epsilon_nash_incentive(pd(), 0.0), std::invalid_argument);
}

TEST_CASE("larger slack never increases the pressure") {
  Rng rng(88);
  for (int trial = 0; trial < 30; ++trial) {
    Game g = random_game(rng);
    Profile x = random_profile(g, rng);
    double spread = incent::payoff_spread(g);
    IncentiveValues prev = incent::nash_incentive(g, x);
    for (double eps : {0.01 * spread + 1e-9, 0.1 * spread + 1e-9, spread + 1e-9}) {
      IncentiveValues cur = incent::epsilon_nash_incentive(g, x, eps);
      for (size_t i = 0; i < cur.size(); ++i)
        for (size_t a = 0; a < cur[i].size(); ++a) {
          CHECK(cur[i][a] <= prev[i][a] + 1e-12);
          CHECK(cur[i][a] >= 0.0);
        }
      prev = std::move(cur);
    }
  }
}

TEST_CASE("joint-move gains accumulate per strategy") {
  Profile dd(State{{0.0, 1.0}, {0.0, 1.0}});
  check_values(incent::su_incentive(pd(), dd), {{2.0, 4.0}, {2.0, 4.0}});

  Profile cc(State{{1.0, 0.0}, {1.0, 0.0}});
  check_values(incent::su_incentive(pd(), cc), {{0.0, 2.0}, {0.0, 2.0}});
}

TEST_CASE("screened joint moves require a better-off opponent") {
  Profile dd(State{{0.0, 1.0}, {0.0, 1.0}});
  check_values(incent::ssu_incentive(pd(), dd), {{2.0, 0.0}, {2.0, 0.0}});
  check_values(incent::ssu_incentive(pd(), dd, SsuBenefitRule::kPureProfile),
               {{2.0, 0.0}, {2.0, 0.0}});
  CHECK_FALSE(incent::make_ssu_incentive().is_continuous);
  CHECK(incent::make_ssu_incentive().name == "ssu");
  CHECK(incent::make_ssu_incentive(SsuBenefitRule::kPureProfile).name == "ssu:gamma-dependent");
  // screening can only remove pressure
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Game g = random_game(rng);
    Profile x = random_profile(g, rng);
    IncentiveValues su = incent::su_incentive(g, x);
    IncentiveValues ssu = incent::ssu_incentive(g, x);
    for (size_t i = 0; i < su.size(); ++i)
      for (size_t a = 0; a < su[i].size(); ++a) CHECK(ssu[i][a] <= su[i][a] + 1e-12);
  }
}

TEST_CASE("altruism rewards the move by the opponents' worst gain") {
  Profile dd(State{{0.0, 1.0}, {0.0, 1.0}});
  check_values(incent::altruism_incentive(pd(), dd), {{4.0, 0.0}, {4.0, 0.0}});
  Game solo({3}, {std::vector<double>(3, 1.0)});
  CHECK_THROWS_AS(incent::make_altruism_incentive(solo), std::invalid_argument);
}

TEST_CASE("pareto pressure multiplies everyone's clipped gains") {
  Profile dd(State{{0.0, 1.0}, {0.0, 1.0}});
  check_values(incent::pareto_incentive(pd(), dd), {{4.0, 0.0}, {4.0, 0.0}});

  // strictly competitive game: no profile improves both players
  Game mp = incent::builtin_game("matching_pennies");
  Rng rng(111);
  for (int k = 0; k < 10; ++k) {
    Profile x = random_profile(mp, rng);
    IncentiveValues phi = incent::pareto_incentive(mp, x);
    for (const auto& row : phi)
      for (double v : row) CHECK(v == 0.0);
  }
}

TEST_CASE("coalition pressure sums products over groups containing the mover") {
  Profile dd(State{{0.0, 1.0}, {0.0, 1.0}});
  check_values(incent::coalition_incentive(pd(), dd), {{6.0, 4.0}, {6.0, 4.0}});
}

TEST_CASE("coalition dominates pareto and collapses to joint gains alone") {
  Rng rng(122);
  for (int trial = 0; trial < 25; ++trial) {
    Game g = random_game(rng);
    Profile x = random_profile(g, rng);
    IncentiveValues co = incent::coalition_incentive(g, x);
    IncentiveValues pa = incent::pareto_incentive(g, x);
    for (size_t i = 0; i < co.size(); ++i)
      for (size_t a = 0; a < co[i].size(); ++a) CHECK(co[i][a] >= pa[i][a] - 1e-12);
  }
  // with one player the only group is the player alone
  for (int trial = 0; trial < 10; ++trial) {
    Game g = random_game(rng, 1, 5);
    Profile x = random_profile(g, rng);
    IncentiveValues co = incent::coalition_incentive(g, x);
    IncentiveValues su = incent::su_incentive(g, x);
    for (size_t a = 0; a < co[0].size(); ++a)
      CHECK(co[0][a] == doctest::Approx(su[0][a]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("margin pays the lead over the best rival after the switch") {
  Profile vs_coop(State{{0.5, 0.5}, {1.0, 0.0}});
  check_values(incent::margin_incentive(pd(), vs_coop), {{0.0, 5.0}, {0.0, 2.5}});
  Game solo({3}, {std::vector<double>(3, 1.0)});
  CHECK_THROWS_AS(incent::make_margin_incentive(solo), std::invalid_argument);
}

TEST_CASE("rival rule scores damage to the assigned opponent") {
  Profile cc(State{{1.0, 0.0}, {1.0, 0.0}});
  check_values(incent::rival_incentive(pd(), cc, {1, 0}), {{0.0, 3.0}, {0.0, 3.0}});

  // with two players the lead variant equals the margin rule
  Rng rng(133);
  for (int trial = 0; trial < 20; ++trial) {
    Game g = random_game(rng, 2, 4);
    if (g.num_players() != 2) continue;
    Profile x = random_profile(g, rng);
    IncentiveValues lead = incent::rival_incentive(g, x, {1, 0}, RivalVariant::kMargin);
    IncentiveValues margin = incent::margin_incentive(g, x);
    for (size_t i = 0; i < lead.size(); ++i)
      for (size_t a = 0; a < lead[i].size(); ++a)
        CHECK(lead[i][a] == doctest::Approx(margin[i][a]).epsilon(1e-12).scale(1.0));
  }

  CHECK(incent::cyclic_rival_map(3) == std::vector<int>{1, 2, 0});
  CHECK(incent::make_rival_incentive(pd()).name == "rival:perm=1,0:variant=hurt");
  CHECK_THROWS_AS(incent::make_rival_incentive(pd(), {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(incent::make_rival_incentive(pd(), {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(incent::make_rival_incentive(pd(), {1}), std::invalid_argument);
}

TEST_CASE("population flow follows the switch-rate table") {
  Game pop({4}, {{0.3, 0.1, 0.4, 0.2}});
  // scaled identity: inflow matches outflow everywhere
  SwitchRateTable ident = SwitchRateTable::constant({{2.0, 0.0, 0.0, 0.0},
                                                     {0.0, 2.0, 0.0, 0.0},
                                                     {0.0, 0.0, 2.0, 0.0},
                                                     {0.0, 0.0, 0.0, 2.0}});
  Incentive inc = incent::make_mean_dynamics_incentive(pop, ident);
  Rng rng(144);
  Profile x = random_profile(pop, rng);
  IncentiveValues rhs = incent::dynamics_rhs(pop, inc, x.coords());
  for (double v : rhs[0]) CHECK(v == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));

  // random tables against the double-sum form
  for (int trial = 0; trial < 25; ++trial) {
    SwitchRateTable table = random_rate_table(4, rng);
    auto m = table.rates({}, {});
    Incentive rule = incent::make_mean_dynamics_incentive(pop, table);
    Profile y = random_profile(pop, rng);
    IncentiveValues f = incent::dynamics_rhs(pop, rule, y.coords());
    auto want = oracle::mean_rhs(m, y.coords()[0]);
    for (size_t a = 0; a < want.size(); ++a)
      CHECK(f[0][a] == doctest::Approx(want[a]).epsilon(1e-12).scale(1.0));
  }

  CHECK_THROWS_AS(incent::make_mean_dynamics_incentive(pd(), ident), std::invalid_argument);
  CHECK_THROWS_AS(
      SwitchRateTable::constant({{1.0, 0.0}, {0.0, 2.0}}),  // unequal row sums
      std::invalid_argument);
  CHECK_THROWS_AS(SwitchRateTable::constant({{1.0, -0.5}, {0.25, 0.25}}), std::invalid_argument);
}

TEST_CASE("unused strategies never carry negative pressure") {
  Rng rng(155);
  for (int trial = 0; trial < 60; ++trial) {
    Game g = random_game(rng);
    std::vector<Incentive> rules = catalog_for(g, rng);
    Profile x = random_boundary_profile(g, rng);
    for (const auto& inc : rules) {
      IncentiveValues phi = inc(g, x);
      for (int i = 0; i < g.num_players(); ++i)
        for (int a = 0; a < g.num_strategies(i); ++a)
          if (x[i][static_cast<size_t>(a)] == 0.0)
            CHECK(phi[static_cast<size_t>(i)][static_cast<size_t>(a)] >= -1e-12);
    }
  }
}

TEST_CASE("declared zero-total rules balance exactly") {
  Rng rng(166);
  for (int trial = 0; trial < 40; ++trial) {
    Game g = random_game(rng);
    std::vector<Incentive> rules = catalog_for(g, rng);
    rules.push_back(incent::dyn_equivalent(incent::make_nash_incentive()));
    Profile x = random_profile(g, rng);
    for (const auto& inc : rules) {
      if (!inc.zero_total) continue;
      IncentiveValues phi = inc(g, x);
      for (const auto& row : phi) {
        double total = 0.0;
        for (double v : row) total += v;
        CHECK(std::fabs(total) <= 1e-10);
      }
    }
  }
}

TEST_CASE("continuous rules move little under small perturbations") {
  Rng rng(177);
  for (int trial = 0; trial < 25; ++trial) {
    Game g = random_game(rng);
    std::vector<Incentive> rules = catalog_for(g, rng);
    Profile x = random_profile(g, rng);
    Profile z = random_profile(g, rng);
    const double t = 1e-6;
    State nudged = x.coords();
    for (size_t i = 0; i < nudged.size(); ++i)
      for (size_t a = 0; a < nudged[i].size(); ++a)
        nudged[i][a] = (1.0 - t) * x.coords()[i][a] + t * z.coords()[i][a];
    Profile y(nudged);
    for (const auto& inc : rules) {
      if (!inc.is_continuous) continue;
      IncentiveValues fx = inc(g, x);
      IncentiveValues fy = inc(g, y);
      for (size_t i = 0; i < fx.size(); ++i)
        for (size_t a = 0; a < fx[i].size(); ++a)
          CHECK(std::fabs(fx[i][a] - fy[i][a]) <= 1e-3);
    }
  }
}

TEST_CASE("recentered rules keep the same field") {
  Rng rng(188);
  for (int trial = 0; trial < 25; ++trial) {
    Game g = random_game(rng);
    Profile x = random_profile(g, rng);
    for (const Incentive& base :
         {incent::make_nash_incentive(), incent::make_smith_incentive(),
          incent::make_logit_incentive(0.7)}) {
      Incentive wrapped = incent::dyn_equivalent(base);
      CHECK(wrapped.zero_total);
      CHECK_FALSE(wrapped.strict_ok);
      IncentiveValues f0 = incent::dynamics_rhs(g, base, x.coords());
      IncentiveValues f1 = incent::dynamics_rhs(g, wrapped, x.coords());
      for (size_t i = 0; i < f0.size(); ++i)
        for (size_t a = 0; a < f0[i].size(); ++a)
          CHECK(f0[i][a] == doctest::Approx(f1[i][a]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("spec strings build the advertised rules") {
  const Game& g = pd();
  CHECK(incent::parse_incentive("nash", g).name == "nash");
  CHECK(incent::parse_incentive("replicator", g).name == "replicator:g=neg_u");
  CHECK(incent::parse_incentive("replicator:g=const:7", g).name == "replicator:g=const:7");
  CHECK(incent::parse_incentive("logit:eta=2.5", g).name == "logit:eta=2.5");
  CHECK(incent::parse_incentive("logit", g).name == "logit:eta=1");
  CHECK(incent::parse_incentive("eps-nash:eps=0.5", g).name == "eps-nash:eps=0.5");
  CHECK(incent::parse_incentive("rival:perm=1,0:variant=margin", g).name ==
        "rival:perm=1,0:variant=margin");
  CHECK(incent::parse_incentive("ssu:gamma-dependent", g).name == "ssu:gamma-dependent");

  CHECK_THROWS_AS(incent::parse_incentive("nash:eta=1", g), std::invalid_argument);
  CHECK_THROWS_AS(incent::parse_incentive("", g), std::invalid_argument);
  try {
    incent::parse_incentive("bogus", g);
    FAIL("expected a parse failure");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("valid specs") != std::string::npos);
    CHECK(msg.find("nash") != std::string::npos);
    CHECK(msg.find("mean:rho=") != std::string::npos);
  }
  CHECK_FALSE(incent::incentive_spec_grammar().empty());
}

}
