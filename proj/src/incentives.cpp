#include "incent/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace incent {

namespace {

IncentiveValues zeros_like(const Game& g) {
  IncentiveValues phi(static_cast<size_t>(g.num_players()));
  for (int i = 0; i < g.num_players(); ++i)
    phi[static_cast<size_t>(i)].assign(static_cast<size_t>(g.num_strategies(i)), 0.0);
  return phi;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// expected payoffs per player from the cached conditional vectors
std::vector<double> expected_payoffs(const State& x, const State& cond) {
  std::vector<double> u(x.size());
  for (size_t i = 0; i < x.size(); ++i) u[i] = dot(x[i], cond[i]);
  return u;
}

IncentiveValues nash_values(const Game& g, const State& x) {
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for (size_t i = 0; i < phi.size(); ++i)
    for (size_t a = 0; a < phi[i].size(); ++a) phi[i][a] = positive_part(cond[i][a] - u[i]);
  return phi;
}

IncentiveValues replicator_values(const Game& g, const State& x, const ReplicatorTranslation& t) {
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for (size_t i = 0; i < phi.size(); ++i) {
    double gi = (t.kind == ReplicatorTranslation::Kind::kNegUtility) ? -u[i] : t.value;
    for (size_t a = 0; a < phi[i].size(); ++a) phi[i][a] = x[i][a] * (cond[i][a] + gi);
  }
  return phi;
}

// Greedy maximal-average set: start from the support, add the best remaining
// conditional payoff while it raises the selected-set average.
std::vector<double> projection_player(const std::vector<double>& w, const std::vector<double>& xi) {
  const size_t s = w.size();
  std::vector<char> in(s, 0);
  double sum = 0.0;
  int count = 0;
  for (size_t a = 0; a < s; ++a) {
    if (xi[a] > 0.0) {
      in[a] = 1;
      sum += w[a];
      ++count;
    }
  }
  if (count == 0) {
    size_t best = 0;
    for (size_t a = 1; a < s; ++a)
      if (w[a] > w[best]) best = a;
    in[best] = 1;
    sum = w[best];
    count = 1;
  }
  std::vector<size_t> rest;
  for (size_t a = 0; a < s; ++a)
    if (!in[a]) rest.push_back(a);
  std::sort(rest.begin(), rest.end(), [&](size_t a, size_t b) {
    if (w[a] != w[b]) return w[a] > w[b];
    return a < b;
  });
  for (size_t a : rest) {
    if (w[a] > sum / count) {
      in[a] = 1;
      sum += w[a];
      ++count;
    } else {
      break;
    }
  }
  double avg = sum / count;
  std::vector<double> out(s, 0.0);
  for (size_t a = 0; a < s; ++a)
    if (in[a]) out[a] = w[a] - avg;
  return out;
}

IncentiveValues projection_values(const Game& g, const State& x) {
  State cond = all_conditional_payoffs(g, x);
  IncentiveValues phi(static_cast<size_t>(g.num_players()));
  for (size_t i = 0; i < phi.size(); ++i) phi[i] = projection_player(cond[i], x[i]);
  return phi;
}

IncentiveValues best_reply_values(const Game& g, const State& x) {
  State cond = all_conditional_payoffs(g, x);
  IncentiveValues phi = zeros_like(g);
  for (size_t i = 0; i < phi.size(); ++i) {
    size_t best = 0;
    for (size_t a = 1; a < cond[i].size(); ++a)
      if (cond[i][a] > cond[i][best]) best = a;  // ties keep the lowest index
    phi[i][best] = 1.0;
  }
  return phi;
}

IncentiveValues logit_values(const Game& g, const State& x, double eta) {
  State cond = all_conditional_payoffs(g, x);
  IncentiveValues phi = zeros_like(g);
  for (size_t i = 0; i < phi.size(); ++i) {
    double hi = *std::max_element(cond[i].begin(), cond[i].end());
    double total = 0.0;
    for (size_t a = 0; a < phi[i].size(); ++a) {
      phi[i][a] = std::exp((cond[i][a] - hi) / eta);
      total += phi[i][a];
    }
    for (size_t a = 0; a < phi[i].size(); ++a) phi[i][a] /= total;
  }
  return phi;
}

IncentiveValues smith_values(const Game& g, const State& x) {
  State cond = all_conditional_payoffs(g, x);
  IncentiveValues phi = zeros_like(g);
  for (size_t i = 0; i < phi.size(); ++i) {
    for (size_t a = 0; a < phi[i].size(); ++a) {
      double total = 0.0;
      for (size_t c = 0; c < phi[i].size(); ++c)
        total += x[i][c] * positive_part(cond[i][a] - cond[i][c]);
      phi[i][a] = total;
    }
  }
  return phi;
}

IncentiveValues epsilon_nash_values(const Game& g, const State& x, double eps) {
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for (size_t i = 0; i < phi.size(); ++i)
    for (size_t a = 0; a < phi[i].size(); ++a) phi[i][a] = positive_part(cond[i][a] - u[i] - eps);
  return phi;
}

IncentiveValues su_values(const Game& g, const State& x) {
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
    for (size_t i = 0; i < phi.size(); ++i) {
      phi[i][static_cast<size_t>(d[i])] +=
          positive_part(g.payoff_tensor(static_cast<int>(i))[static_cast<size_t>(flat)] - u[i]);
    }
  });
  return phi;
}

IncentiveValues ssu_values(const Game& g, const State& x, SsuBenefitRule rule) {
  const int n = g.num_players();
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  if (rule == SsuBenefitRule::kMixedProfile) {
    // benefit judged against the mixed profile (e_ia, x_{-i}); one flag per (i, a)
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < g.num_strategies(i); ++a) {
        std::vector<double> rep = utilities_with_replacement(g, i, a, x);
        bool benefits = false;
        for (int j = 0; j < n && !benefits; ++j) {
          if (j != i && rep[static_cast<size_t>(j)] > u[static_cast<size_t>(j)]) benefits = true;
        }
        if (!benefits) continue;
        double total = 0.0;
        for_each_pure_profile_fixed(g.strategy_counts(), i, a, [&](const std::vector<int>&, int64_t flat) {
          total += positive_part(g.payoff_tensor(i)[static_cast<size_t>(flat)] - u[static_cast<size_t>(i)]);
        });
        phi[static_cast<size_t>(i)][static_cast<size_t>(a)] = total;
      }
    }
  } else {
    // benefit judged at each pure profile separately
    for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
      for (int i = 0; i < n; ++i) {
        bool benefits = false;
        for (int j = 0; j < n && !benefits; ++j) {
          if (j != i && g.payoff_tensor(j)[static_cast<size_t>(flat)] > u[static_cast<size_t>(j)])
            benefits = true;
        }
        if (benefits) {
          phi[static_cast<size_t>(i)][static_cast<size_t>(d[static_cast<size_t>(i)])] +=
              positive_part(g.payoff_tensor(i)[static_cast<size_t>(flat)] - u[static_cast<size_t>(i)]);
        }
      }
    });
  }
  return phi;
}

IncentiveValues altruism_values(const Game& g, const State& x) {
  const int n = g.num_players();
  if (n < 2) throw std::invalid_argument("altruism incentive: needs at least two players");
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < g.num_strategies(i); ++a) {
      std::vector<double> rep = utilities_with_replacement(g, i, a, x);
      double worst = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        worst = std::min(worst, rep[static_cast<size_t>(j)] - u[static_cast<size_t>(j)]);
      }
      phi[static_cast<size_t>(i)][static_cast<size_t>(a)] = positive_part(worst);
    }
  }
  return phi;
}

IncentiveValues pareto_values(const Game& g, const State& x) {
  const int n = g.num_players();
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j)
      prod *= positive_part(g.payoff_tensor(j)[static_cast<size_t>(flat)] - u[static_cast<size_t>(j)]);
    for (int i = 0; i < n; ++i)
      phi[static_cast<size_t>(i)][static_cast<size_t>(d[static_cast<size_t>(i)])] += prod;
  });
  return phi;
}

// sum over coalitions containing i of the product of member excesses equals
// e_i * prod_{j != i} (1 + e_j); computed with prefix/suffix products.
IncentiveValues coalition_values(const Game& g, const State& x) {
  const int n = g.num_players();
  if (n > 12) throw std::invalid_argument("coalition incentive: supports at most 12 players");
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  std::vector<double> e(static_cast<size_t>(n));
  std::vector<double> pre(static_cast<size_t>(n) + 1, 1.0);
  std::vector<double> suf(static_cast<size_t>(n) + 1, 1.0);
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
    for (int j = 0; j < n; ++j)
      e[static_cast<size_t>(j)] =
          positive_part(g.payoff_tensor(j)[static_cast<size_t>(flat)] - u[static_cast<size_t>(j)]);
    for (int j = 0; j < n; ++j)
      pre[static_cast<size_t>(j) + 1] = pre[static_cast<size_t>(j)] * (1.0 + e[static_cast<size_t>(j)]);
    suf[static_cast<size_t>(n)] = 1.0;
    for (int j = n - 1; j >= 0; --j)
      suf[static_cast<size_t>(j)] = (1.0 + e[static_cast<size_t>(j)]) * suf[static_cast<size_t>(j) + 1];
    for (int i = 0; i < n; ++i) {
      double others = pre[static_cast<size_t>(i)] * suf[static_cast<size_t>(i) + 1];
      phi[static_cast<size_t>(i)][static_cast<size_t>(d[static_cast<size_t>(i)])] +=
          e[static_cast<size_t>(i)] * others;
    }
  });
  return phi;
}

IncentiveValues margin_values(const Game& g, const State& x) {
  const int n = g.num_players();
  if (n < 2) throw std::invalid_argument("margin incentive: needs at least two players");
  IncentiveValues phi = zeros_like(g);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < g.num_strategies(i); ++a) {
      std::vector<double> rep = utilities_with_replacement(g, i, a, x);
      double rivals = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        rivals = std::max(rivals, rep[static_cast<size_t>(j)]);
      }
      phi[static_cast<size_t>(i)][static_cast<size_t>(a)] =
          positive_part(rep[static_cast<size_t>(i)] - rivals);
    }
  }
  return phi;
}

void validate_rival_map(const Game& g, const std::vector<int>& sigma) {
  const int n = g.num_players();
  if (n < 2) throw std::invalid_argument("rival incentive: needs at least two players");
  if (static_cast<int>(sigma.size()) != n)
    throw std::invalid_argument("rival incentive: assignment length does not match player count");
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int t = sigma[static_cast<size_t>(i)];
    if (t < 0 || t >= n) throw std::invalid_argument("rival incentive: assignment target out of range");
    if (t == i) throw std::invalid_argument("rival incentive: player " + std::to_string(i) + " is their own rival");
    seen[static_cast<size_t>(t)] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<size_t>(i)])
      throw std::invalid_argument("rival incentive: assignment is not a permutation");
}

IncentiveValues rival_values(const Game& g, const State& x, const std::vector<int>& sigma,
                             RivalVariant variant) {
  validate_rival_map(g, sigma);
  const int n = g.num_players();
  State cond = all_conditional_payoffs(g, x);
  std::vector<double> u = expected_payoffs(x, cond);
  IncentiveValues phi = zeros_like(g);
  for (int i = 0; i < n; ++i) {
    int r = sigma[static_cast<size_t>(i)];
    for (int a = 0; a < g.num_strategies(i); ++a) {
      std::vector<double> rep = utilities_with_replacement(g, i, a, x);
      double v = (variant == RivalVariant::kHurt)
                     ? u[static_cast<size_t>(r)] - rep[static_cast<size_t>(r)]
                     : rep[static_cast<size_t>(i)] - rep[static_cast<size_t>(r)];
      phi[static_cast<size_t>(i)][static_cast<size_t>(a)] = positive_part(v);
    }
  }
  return phi;
}

void validate_rate_matrix(const std::vector<std::vector<double>>& m, int size, double row_sum) {
  if (static_cast<int>(m.size()) != size)
    throw std::invalid_argument("switch rates: expected " + std::to_string(size) + " rows");
  for (int i = 0; i < size; ++i) {
    if (static_cast<int>(m[static_cast<size_t>(i)].size()) != size)
      throw std::invalid_argument("switch rates: row " + std::to_string(i) + " has wrong length");
    double s = 0.0;
    for (double v : m[static_cast<size_t>(i)]) {
      if (v < 0.0) throw std::invalid_argument("switch rates: negative entry in row " + std::to_string(i));
      s += v;
    }
    if (std::abs(s - row_sum) > 1e-10)
      throw std::invalid_argument("switch rates: row " + std::to_string(i) +
                                  " sums to " + std::to_string(s) + ", expected " + std::to_string(row_sum));
  }
}

IncentiveValues mean_dynamics_values(const Game& g, const State& x, const SwitchRateTable& rho) {
  if (g.num_players() != 1)
    throw std::invalid_argument("mean-dynamics incentive: single-population (one-player) games only");
  const int s = g.num_strategies(0);
  if (rho.size != s)
    throw std::invalid_argument("mean-dynamics incentive: table size does not match strategy count");
  if (!rho.rates) throw std::invalid_argument("mean-dynamics incentive: missing rate function");
  std::vector<double> payoffs = conditional_payoffs(g, 0, x);
  auto m = rho.rates(payoffs, x[0]);
  validate_rate_matrix(m, s, rho.row_sum);
  IncentiveValues phi = zeros_like(g);
  for (int a = 0; a < s; ++a) {
    double total = 0.0;
    for (int j = 0; j < s; ++j)
      total += x[0][static_cast<size_t>(j)] * m[static_cast<size_t>(j)][static_cast<size_t>(a)];
    phi[0][static_cast<size_t>(a)] = total;
  }
  return phi;
}

}  // namespace

SwitchRateTable SwitchRateTable::constant(std::vector<std::vector<double>> matrix) {
  if (matrix.empty()) throw std::invalid_argument("switch rates: empty matrix");
  int s = static_cast<int>(matrix.size());
  double r0 = std::accumulate(matrix[0].begin(), matrix[0].end(), 0.0);
  validate_rate_matrix(matrix, s, r0);
  SwitchRateTable t;
  t.size = s;
  t.row_sum = r0;
  t.rates = [m = std::move(matrix)](const std::vector<double>&, const std::vector<double>&) { return m; };
  return t;
}

IncentiveValues nash_incentive(const Game& g, const Profile& x) { return nash_values(g, x.coords()); }

IncentiveValues replicator_incentive(const Game& g, const Profile& x, ReplicatorTranslation t) {
  return replicator_values(g, x.coords(), t);
}

IncentiveValues projection_incentive(const Game& g, const Profile& x) {
  return projection_values(g, x.coords());
}

IncentiveValues best_reply_incentive(const Game& g, const Profile& x) {
  return best_reply_values(g, x.coords());
}

IncentiveValues logit_incentive(const Game& g, const Profile& x, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("logit incentive: eta must be positive");
  return logit_values(g, x.coords(), eta);
}

IncentiveValues smith_incentive(const Game& g, const Profile& x) { return smith_values(g, x.coords()); }

IncentiveValues zero_incentive(const Game& g, const Profile& x) {
  require_shape(g, x.coords());
  return zeros_like(g);
}

IncentiveValues epsilon_nash_incentive(const Game& g, const Profile& x, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon-nash incentive: epsilon must be positive");
  return epsilon_nash_values(g, x.coords(), epsilon);
}

IncentiveValues su_incentive(const Game& g, const Profile& x) { return su_values(g, x.coords()); }

IncentiveValues ssu_incentive(const Game& g, const Profile& x, SsuBenefitRule rule) {
  return ssu_values(g, x.coords(), rule);
}

IncentiveValues altruism_incentive(const Game& g, const Profile& x) {
  return altruism_values(g, x.coords());
}

IncentiveValues pareto_incentive(const Game& g, const Profile& x) {
  return pareto_values(g, x.coords());
}

IncentiveValues coalition_incentive(const Game& g, const Profile& x) {
  return coalition_values(g, x.coords());
}

IncentiveValues margin_incentive(const Game& g, const Profile& x) {
  return margin_values(g, x.coords());
}

IncentiveValues rival_incentive(const Game& g, const Profile& x, const std::vector<int>& sigma,
                                RivalVariant variant) {
  return rival_values(g, x.coords(), sigma, variant);
}

IncentiveValues mean_dynamics_incentive(const Game& g, const Profile& x, const SwitchRateTable& rho) {
  return mean_dynamics_values(g, x.coords(), rho);
}

std::vector<int> cyclic_rival_map(int num_players) {
  if (num_players < 2) throw std::invalid_argument("rival incentive: needs at least two players");
  std::vector<int> sigma(static_cast<size_t>(num_players));
  for (int i = 0; i < num_players; ++i) sigma[static_cast<size_t>(i)] = (i + 1) % num_players;
  return sigma;
}

Incentive make_nash_incentive() {
  Incentive inc;
  inc.name = "nash";
  inc.eval = [](const Game& g, const State& x) { return nash_values(g, x); };
  return inc;
}

Incentive make_replicator_incentive(const Game& g, ReplicatorTranslation t) {
  Incentive inc;
  if (t.kind == ReplicatorTranslation::Kind::kNegUtility) {
    inc.name = "replicator:g=neg_u";
    inc.zero_total = true;
    // map invariance needs x * (1 + cond - u) >= 0, so per-player spread <= 1
    double spread = 0.0;
    for (int i = 0; i < g.num_players(); ++i) {
      auto [lo, hi] = payoff_range(g, i);
      spread = std::max(spread, hi - lo);
    }
    if (spread > 1.0 + 1e-12) {
      inc.strict_ok = false;
      inc.strict_note = "payoff-proportional propensities go below -x when a player's payoff spread (" +
                        std::to_string(spread) + ") exceeds 1";
    }
  } else {
    std::ostringstream os;
    os << "replicator:g=const:" << t.value;
    inc.name = os.str();
    // discrete-map guard: u_i(x) + g must stay above -1; bounded via tensor minima
    double lo = payoff_range(g, 0).first;
    for (int i = 1; i < g.num_players(); ++i) lo = std::min(lo, payoff_range(g, i).first);
    if (!(lo + t.value > -1.0)) {
      inc.strict_ok = false;
      inc.strict_note = "replicator translation can drive total propensity to -1 (min payoff " +
                        std::to_string(lo) + " + " + std::to_string(t.value) + " <= -1)";
    }
  }
  inc.eval = [t](const Game& gg, const State& x) { return replicator_values(gg, x, t); };
  return inc;
}

Incentive make_projection_incentive() {
  Incentive inc;
  inc.name = "projection";
  inc.is_continuous = false;
  inc.zero_total = true;
  inc.strict_ok = false;
  inc.strict_note = "centered propensities can push a coordinate below zero";
  inc.eval = [](const Game& g, const State& x) { return projection_values(g, x); };
  return inc;
}

Incentive make_best_reply_incentive() {
  Incentive inc;
  inc.name = "best-reply";
  inc.is_continuous = false;
  inc.eval = [](const Game& g, const State& x) { return best_reply_values(g, x); };
  return inc;
}

Incentive make_logit_incentive(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("logit incentive: eta must be positive");
  Incentive inc;
  std::ostringstream os;
  os << "logit:eta=" << eta;
  inc.name = os.str();
  inc.eval = [eta](const Game& g, const State& x) { return logit_values(g, x, eta); };
  return inc;
}

Incentive make_smith_incentive() {
  Incentive inc;
  inc.name = "smith";
  inc.eval = [](const Game& g, const State& x) { return smith_values(g, x); };
  return inc;
}

Incentive make_zero_incentive() {
  Incentive inc;
  inc.name = "zero";
  inc.zero_total = true;
  inc.eval = [](const Game& g, const State& x) {
    require_shape(g, x);
    return zeros_like(g);
  };
  return inc;
}

Incentive make_epsilon_nash_incentive(const Game& g, std::optional<double> epsilon) {
  double eps = epsilon.value_or(0.1 * payoff_spread(g));
  if (eps <= 0.0) eps = 1e-12;  // constant games: any positive slack behaves the same
  Incentive inc;
  std::ostringstream os;
  os << "eps-nash:eps=" << eps;
  inc.name = os.str();
  inc.eval = [eps](const Game& gg, const State& x) { return epsilon_nash_values(gg, x, eps); };
  return inc;
}

Incentive make_su_incentive() {
  Incentive inc;
  inc.name = "su";
  inc.eval = [](const Game& g, const State& x) { return su_values(g, x); };
  return inc;
}

Incentive make_ssu_incentive(SsuBenefitRule rule) {
  Incentive inc;
  inc.name = rule == SsuBenefitRule::kMixedProfile ? "ssu" : "ssu:gamma-dependent";
  inc.is_continuous = false;
  inc.eval = [rule](const Game& g, const State& x) { return ssu_values(g, x, rule); };
  return inc;
}

Incentive make_altruism_incentive(const Game& g) {
  if (g.num_players() < 2) throw std::invalid_argument("altruism incentive: needs at least two players");
  Incentive inc;
  inc.name = "altruism";
  inc.eval = [](const Game& gg, const State& x) { return altruism_values(gg, x); };
  return inc;
}

Incentive make_pareto_incentive() {
  Incentive inc;
  inc.name = "pareto";
  inc.eval = [](const Game& g, const State& x) { return pareto_values(g, x); };
  return inc;
}

Incentive make_coalition_incentive(const Game& g) {
  if (g.num_players() > 12)
    throw std::invalid_argument("coalition incentive: supports at most 12 players");
  Incentive inc;
  inc.name = "coalition";
  inc.eval = [](const Game& gg, const State& x) { return coalition_values(gg, x); };
  return inc;
}

Incentive make_margin_incentive(const Game& g) {
  if (g.num_players() < 2) throw std::invalid_argument("margin incentive: needs at least two players");
  Incentive inc;
  inc.name = "margin";
  inc.eval = [](const Game& gg, const State& x) { return margin_values(gg, x); };
  return inc;
}

Incentive make_rival_incentive(const Game& g, std::vector<int> sigma, RivalVariant variant) {
  if (sigma.empty()) sigma = cyclic_rival_map(g.num_players());
  validate_rival_map(g, sigma);
  Incentive inc;
  std::ostringstream os;
  os << "rival:perm=";
  for (size_t i = 0; i < sigma.size(); ++i) {
    if (i) os << ",";
    os << sigma[i];
  }
  os << ":variant=" << (variant == RivalVariant::kHurt ? "hurt" : "margin");
  inc.name = os.str();
  inc.eval = [sigma, variant](const Game& gg, const State& x) {
    return rival_values(gg, x, sigma, variant);
  };
  return inc;
}

Incentive make_mean_dynamics_incentive(const Game& g, SwitchRateTable rho) {
  if (g.num_players() != 1)
    throw std::invalid_argument("mean-dynamics incentive: single-population (one-player) games only");
  if (rho.size != g.num_strategies(0))
    throw std::invalid_argument("mean-dynamics incentive: table size does not match strategy count");
  Incentive inc;
  inc.name = "mean";
  inc.eval = [rho](const Game& gg, const State& x) { return mean_dynamics_values(gg, x, rho); };
  return inc;
}

Incentive dyn_equivalent(const Incentive& inner) {
  Incentive inc;
  inc.name = inner.name + ":equiv";
  inc.is_continuous = inner.is_continuous;
  inc.zero_total = true;
  inc.strict_ok = false;
  inc.strict_note = "recentering can push a coordinate below -x";
  inc.eval = [inner_eval = inner.eval](const Game& g, const State& x) {
    IncentiveValues phi = inner_eval(g, x);
    for (size_t i = 0; i < phi.size(); ++i) {
      double total = 0.0;
      for (size_t a = 0; a < phi[i].size(); ++a) total += phi[i][a];
      for (size_t a = 0; a < phi[i].size(); ++a) phi[i][a] -= x[i][a] * total;
    }
    return phi;
  };
  return inc;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("incentive spec: cannot parse " + what + " from '" + s + "'");
  }
}

SwitchRateTable load_rate_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("incentive spec: cannot open rate table file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("incentive spec: rate table '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_array()) throw std::invalid_argument("incentive spec: rate table must be a JSON matrix");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) {
    if (!row.is_array()) throw std::invalid_argument("incentive spec: rate table must be a JSON matrix");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw std::invalid_argument("incentive spec: rate table entries must be numbers");
      r.push_back(v.get<double>());
    }
    m.push_back(std::move(r));
  }
  return SwitchRateTable::constant(std::move(m));
}

}  // namespace

Incentive parse_incentive(const std::string& spec, const Game& g) {
  if (spec.empty()) throw std::invalid_argument("incentive spec: empty string");
  auto head = spec.find(':');
  std::string name = spec.substr(0, head);
  std::string rest = head == std::string::npos ? "" : spec.substr(head + 1);

  auto single_value = [&](const std::string& key) {
    std::string prefix = key + "=";
    if (rest.rfind(prefix, 0) != 0)
      throw std::invalid_argument("incentive spec: expected '" + name + ":" + key + "=...'");
    return rest.substr(prefix.size());
  };

  Incentive inc;
  if (name == "nash") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'nash' takes no parameters");
    inc = make_nash_incentive();
  } else if (name == "replicator") {
    if (rest.empty()) {
      inc = make_replicator_incentive(g);
    } else {
      std::string v = single_value("g");
      if (v == "neg_u") {
        inc = make_replicator_incentive(g, ReplicatorTranslation::neg_utility());
      } else if (v.rfind("const:", 0) == 0) {
        inc = make_replicator_incentive(
            g, ReplicatorTranslation::constant(parse_number(v.substr(6), "translation constant")));
      } else {
        throw std::invalid_argument("incentive spec: replicator translation must be neg_u or const:<v>");
      }
    }
  } else if (name == "projection") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'projection' takes no parameters");
    inc = make_projection_incentive();
  } else if (name == "best-reply") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'best-reply' takes no parameters");
    inc = make_best_reply_incentive();
  } else if (name == "logit") {
    inc = make_logit_incentive(rest.empty() ? 1.0 : parse_number(single_value("eta"), "eta"));
  } else if (name == "smith") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'smith' takes no parameters");
    inc = make_smith_incentive();
  } else if (name == "zero") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'zero' takes no parameters");
    inc = make_zero_incentive();
  } else if (name == "eps-nash") {
    inc = make_epsilon_nash_incentive(
        g, rest.empty() ? std::optional<double>{} : parse_number(single_value("eps"), "eps"));
  } else if (name == "su") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'su' takes no parameters");
    inc = make_su_incentive();
  } else if (name == "ssu") {
    if (rest.empty()) {
      inc = make_ssu_incentive();
    } else if (rest == "gamma-dependent") {
      inc = make_ssu_incentive(SsuBenefitRule::kPureProfile);
    } else {
      throw std::invalid_argument("incentive spec: unknown ssu option '" + rest + "'");
    }
  } else if (name == "altruism") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'altruism' takes no parameters");
    inc = make_altruism_incentive(g);
  } else if (name == "pareto") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'pareto' takes no parameters");
    inc = make_pareto_incentive();
  } else if (name == "coalition") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'coalition' takes no parameters");
    inc = make_coalition_incentive(g);
  } else if (name == "margin") {
    if (!rest.empty()) throw std::invalid_argument("incentive spec: 'margin' takes no parameters");
    inc = make_margin_incentive(g);
  } else if (name == "rival") {
    std::vector<int> sigma;
    RivalVariant variant = RivalVariant::kHurt;
    for (const std::string& part : split(rest, ':')) {
      if (part.empty()) continue;
      if (part.rfind("perm=", 0) == 0) {
        sigma.clear();
        for (const std::string& tok : split(part.substr(5), ',')) {
          sigma.push_back(static_cast<int>(parse_number(tok, "permutation entry")));
        }
      } else if (part.rfind("variant=", 0) == 0) {
        std::string v = part.substr(8);
        if (v == "hurt") {
          variant = RivalVariant::kHurt;
        } else if (v == "margin") {
          variant = RivalVariant::kMargin;
        } else {
          throw std::invalid_argument("incentive spec: rival variant must be hurt or margin");
        }
      } else {
        throw std::invalid_argument("incentive spec: unknown rival option '" + part + "'");
      }
    }
    inc = make_rival_incentive(g, std::move(sigma), variant);
  } else if (name == "mean") {
    inc = make_mean_dynamics_incentive(g, load_rate_table(single_value("rho")));
  } else {
    std::string msg = "incentive spec: unknown incentive '" + name + "'; valid specs:";
    for (const auto& s : incentive_spec_grammar()) msg += "\n  " + s;
    throw std::invalid_argument(msg);
  }
  inc.name = spec;
  return inc;
}

const std::vector<std::string>& incentive_spec_grammar() {
  static const std::vector<std::string> kSpecs = {
      "nash",
      "replicator[:g=neg_u|const:<v>]",
      "projection",
      "best-reply",
      "logit:eta=<v>",
      "smith",
      "zero",
      "eps-nash:eps=<v>",
      "su",
      "ssu[:gamma-dependent]",
      "altruism",
      "pareto",
      "coalition",
      "margin",
      "rival:perm=<cycle>[:variant=hurt|margin]",
      "mean:rho=<file>",
  };
  return kSpecs;
}

}  // namespace incent
