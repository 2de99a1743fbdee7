#include "incent/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "incent/rng.hpp"

namespace incent {

std::string Trajectory::status_string() const {
  switch (status) {
    case TerminalStatus::kMaxSteps:
      return "max-steps";
    case TerminalStatus::kConverged: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "converged:%.6e", final_residual);
      return buf;
    }
    case TerminalStatus::kSimplexViolation:
      return "simplex-violation";
  }
  return "unknown";
}

State t_map_raw(const Game& g, const Incentive& inc, const State& x) {
  if (!inc.strict_ok)
    throw std::invalid_argument("revision map: incentive '" + inc.name +
                                "' can leave the simplex: " + inc.strict_note);
  require_shape(g, x);
  IncentiveValues phi = inc.eval(g, x);
  State out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double total = 0.0;
    for (size_t a = 0; a < phi[i].size(); ++a) total += phi[i][a];
    double denom = 1.0 + total;
    if (std::abs(denom) <= 1e-12)
      throw std::runtime_error("revision map: denominator vanished for player " + std::to_string(i));
    out[i].resize(x[i].size());
    for (size_t a = 0; a < x[i].size(); ++a) out[i][a] = (x[i][a] + phi[i][a]) / denom;
  }
  return out;
}

Profile t_map(const Game& g, const Incentive& inc, const Profile& x) {
  return Profile(t_map_raw(g, inc, x.coords()));
}

IncentiveValues dynamics_rhs(const Game& g, const Incentive& inc, const State& x) {
  require_shape(g, x);
  IncentiveValues phi = inc.eval(g, x);
  for (size_t i = 0; i < phi.size(); ++i) {
    double total = 0.0;
    for (size_t a = 0; a < phi[i].size(); ++a) total += phi[i][a];
    for (size_t a = 0; a < phi[i].size(); ++a) phi[i][a] -= x[i][a] * total;
  }
  return phi;
}

double sup_norm(const IncentiveValues& v) {
  double m = 0.0;
  for (const auto& row : v)
    for (double e : row) m = std::max(m, std::abs(e));
  return m;
}

double derivative_limit_check(const Game& g, const Incentive& inc, const State& x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("derivative check: eps must be positive");
  require_shape(g, x);
  IncentiveValues phi = inc.eval(g, x);
  double gap = 0.0;
  for (size_t i = 0; i < phi.size(); ++i) {
    double total = 0.0;
    for (size_t a = 0; a < phi[i].size(); ++a) total += phi[i][a];
    double denom = 1.0 + eps * total;
    if (std::abs(denom) <= 1e-12)
      throw std::runtime_error("derivative check: denominator vanished for player " + std::to_string(i));
    for (size_t a = 0; a < phi[i].size(); ++a) {
      double secant = ((x[i][a] + eps * phi[i][a]) / denom - x[i][a]) / eps;
      double field = phi[i][a] - x[i][a] * total;
      gap = std::max(gap, std::abs(secant - field));
    }
  }
  return gap;
}

Trajectory iterate_map(const Game& g, const Incentive& inc, const Profile& x0,
                       const IntegratorConfig& config) {
  Trajectory traj;
  traj.method = StepMethod::kDiscreteMap;
  traj.dt = 1.0;
  traj.incentive = inc.name;

  State x = x0.coords();
  traj.times.push_back(0.0);
  traj.points.push_back(x);
  traj.status = TerminalStatus::kMaxSteps;
  for (int64_t k = 0; k <= config.max_steps; ++k) {
    State tx;
    try {
      tx = t_map_raw(g, inc, x);
    } catch (const std::runtime_error&) {
      traj.status = TerminalStatus::kSimplexViolation;
      break;
    }
    double res = 0.0;
    for (size_t i = 0; i < tx.size(); ++i)
      for (size_t a = 0; a < tx[i].size(); ++a) res = std::max(res, std::abs(tx[i][a] - x[i][a]));
    traj.final_residual = res;
    if (res <= config.residual_tol) {
      traj.status = TerminalStatus::kConverged;
      break;
    }
    if (k == config.max_steps) break;
    x = std::move(tx);
    traj.times.push_back(static_cast<double>(k + 1));
    traj.points.push_back(x);
  }
  return traj;
}

namespace {

// true when the post-step point is acceptable; repairs it under the
// renormalize policy
bool enforce_simplex(State& x, const IntegratorConfig& config) {
  if (config.policy == DriftPolicy::kRenormalize) {
    for (auto& row : x) {
      double sum = 0.0;
      for (double& v : row) {
        if (v < -1e-9) return false;
        if (v < 0.0) v = 0.0;
        sum += v;
      }
      if (std::abs(sum - 1.0) > config.drift_tol) return false;
      for (double& v : row) v /= sum;
    }
    return true;
  }
  double tol = std::min(config.drift_tol, 1e-9);
  for (const auto& row : x) {
    double sum = 0.0;
    for (double v : row) {
      if (v < -1e-12) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

State euler_step(const State& x, double dt, const IncentiveValues& k1) {
  State y = x;
  for (size_t i = 0; i < y.size(); ++i)
    for (size_t a = 0; a < y[i].size(); ++a) y[i][a] += dt * k1[i][a];
  return y;
}

State rk4_step(const Game& g, const Incentive& inc, const State& x, double dt,
               const IncentiveValues& k1) {
  auto shifted = [&](const IncentiveValues& k, double h) {
    State y = x;
    for (size_t i = 0; i < y.size(); ++i)
      for (size_t a = 0; a < y[i].size(); ++a) y[i][a] += h * k[i][a];
    return y;
  };
  IncentiveValues k2 = dynamics_rhs(g, inc, shifted(k1, dt / 2.0));
  IncentiveValues k3 = dynamics_rhs(g, inc, shifted(k2, dt / 2.0));
  IncentiveValues k4 = dynamics_rhs(g, inc, shifted(k3, dt));
  State y = x;
  for (size_t i = 0; i < y.size(); ++i)
    for (size_t a = 0; a < y[i].size(); ++a)
      y[i][a] += dt / 6.0 * (k1[i][a] + 2.0 * k2[i][a] + 2.0 * k3[i][a] + k4[i][a]);
  return y;
}

}  // namespace

Trajectory integrate(const Game& g, const Incentive& inc, const Profile& x0,
                     const IntegratorConfig& config) {
  if (config.method == StepMethod::kDiscreteMap)
    throw std::invalid_argument("integrate: use iterate_map for the discrete protocol");
  if (!(config.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");

  Trajectory traj;
  traj.method = config.method;
  traj.dt = config.dt;
  traj.incentive = inc.name;

  State x = x0.coords();
  traj.times.push_back(0.0);
  traj.points.push_back(x);
  traj.status = TerminalStatus::kMaxSteps;
  for (int64_t k = 0; k <= config.max_steps; ++k) {
    IncentiveValues k1 = dynamics_rhs(g, inc, x);
    double res = sup_norm(k1);
    traj.final_residual = res;
    if (res <= config.residual_tol) {
      traj.status = TerminalStatus::kConverged;
      break;
    }
    if (k == config.max_steps) break;
    State next = config.method == StepMethod::kEuler ? euler_step(x, config.dt, k1)
                                                     : rk4_step(g, inc, x, config.dt, k1);
    if (!enforce_simplex(next, config)) {
      traj.status = TerminalStatus::kSimplexViolation;
      break;
    }
    x = std::move(next);
    traj.times.push_back(static_cast<double>(k + 1) * config.dt);
    traj.points.push_back(x);
  }
  return traj;
}

void validate_symmetry(const Game& g, const SymmetryMap& sym) {
  const int n = g.num_players();
  if (static_cast<int>(sym.perms.size()) != n)
    throw std::invalid_argument("symmetry: need one relabeling per player");
  const int s = g.num_strategies(0);
  for (int i = 0; i < n; ++i) {
    if (g.num_strategies(i) != s)
      throw std::invalid_argument("symmetry: players must share one strategy count");
    const auto& p = sym.perms[static_cast<size_t>(i)];
    if (static_cast<int>(p.size()) != s)
      throw std::invalid_argument("symmetry: relabeling for player " + std::to_string(i) +
                                  " has wrong length");
    std::vector<char> seen(static_cast<size_t>(s), 0);
    for (int v : p) {
      if (v < 0 || v >= s)
        throw std::invalid_argument("symmetry: relabeling for player " + std::to_string(i) +
                                    " is out of range");
      if (seen[static_cast<size_t>(v)])
        throw std::invalid_argument("symmetry: relabeling for player " + std::to_string(i) +
                                    " repeats a strategy");
      seen[static_cast<size_t>(v)] = 1;
    }
  }
}

State project_symmetric(const Game& g, const State& x, const SymmetryMap& sym) {
  validate_symmetry(g, sym);
  require_shape(g, x);
  const int n = g.num_players();
  const int s = g.num_strategies(0);
  std::vector<double> y(static_cast<size_t>(s), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& p = sym.perms[static_cast<size_t>(i)];
    for (int a = 0; a < s; ++a)
      y[static_cast<size_t>(p[static_cast<size_t>(a)])] += x[static_cast<size_t>(i)][static_cast<size_t>(a)] / n;
  }
  // average over the cycles of player 0's relabeling so the canonical point
  // reproduces itself
  const auto& p0 = sym.perms[0];
  std::vector<char> done(static_cast<size_t>(s), 0);
  std::vector<double> z(static_cast<size_t>(s), 0.0);
  for (int a = 0; a < s; ++a) {
    if (done[static_cast<size_t>(a)]) continue;
    std::vector<int> cycle;
    int c = a;
    while (!done[static_cast<size_t>(c)]) {
      done[static_cast<size_t>(c)] = 1;
      cycle.push_back(c);
      c = p0[static_cast<size_t>(c)];
    }
    double avg = 0.0;
    for (int v : cycle) avg += y[static_cast<size_t>(v)];
    avg /= static_cast<double>(cycle.size());
    for (int v : cycle) z[static_cast<size_t>(v)] = avg;
  }
  State out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& p = sym.perms[static_cast<size_t>(i)];
    out[static_cast<size_t>(i)].resize(static_cast<size_t>(s));
    for (int a = 0; a < s; ++a)
      out[static_cast<size_t>(i)][static_cast<size_t>(a)] = z[static_cast<size_t>(p[static_cast<size_t>(a)])];
  }
  return out;
}

namespace {

double relabeling_defect(const std::vector<std::vector<double>>& field, const SymmetryMap& sym) {
  double d = 0.0;
  for (size_t i = 0; i < field.size(); ++i) {
    const auto& p = sym.perms[i];
    for (size_t a = 0; a < field[i].size(); ++a)
      d = std::max(d, std::abs(field[0][static_cast<size_t>(p[a])] - field[i][a]));
  }
  return d;
}

}  // namespace

double symmetry_defect(const Game& g, const State& x, const SymmetryMap& sym) {
  validate_symmetry(g, sym);
  require_shape(g, x);
  return relabeling_defect(x, sym);
}

InvariantRegionReport check_invariant_region(const Game& g, const Incentive& inc,
                                             const SymmetryMap& sym, int samples, uint64_t seed) {
  validate_symmetry(g, sym);
  if (samples <= 0) throw std::invalid_argument("invariant check: needs a positive sample count");
  Rng rng(seed);
  const int n = g.num_players();
  const int s = g.num_strategies(0);
  InvariantRegionReport report;
  report.samples = samples;
  for (int k = 0; k < samples; ++k) {
    State x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = rng.simplex_point(s);
    x = project_symmetric(g, x, sym);
    State tx = t_map_raw(g, inc, x);
    report.max_defect = std::max(report.max_defect, relabeling_defect(tx, sym));
  }
  return report;
}

}  // namespace incent
