#include "incent/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "incent/rng.hpp"

namespace incent {

namespace {

// clip float dust and renormalize; false when a coordinate is too negative
// to repair
bool repair_state(State& x, double neg_tol) {
  for (auto& row : x) {
    double sum = 0.0;
    for (double& v : row) {
      if (v < neg_tol) return false;
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (!(sum > 0.0)) return false;
    for (double& v : row) v /= sum;
  }
  return true;
}

// revision-map phase: run until the field residual stalls or drops under tol
void map_phase(const Game& g, const Incentive& inc, State& x, int64_t cap, double tol,
               int64_t& iters) {
  double best = std::numeric_limits<double>::infinity();
  int64_t since_best = 0;
  for (int64_t k = 0; k < cap; ++k) {
    double res = sup_norm(dynamics_rhs(g, inc, x));
    if (res <= tol) return;
    if (res < 0.99 * best) {
      best = res;
      since_best = 0;
    } else if (++since_best > 250) {
      return;
    }
    x = t_map_raw(g, inc, x);
    ++iters;
  }
}

// damped field steps with simplex repair, for incentives whose map can leave
// the simplex
void damped_phase(const Game& g, const Incentive& inc, State& x, int64_t cap, double tol,
                  int64_t& iters) {
  const double lambda = 0.2;
  double best = std::numeric_limits<double>::infinity();
  int64_t since_best = 0;
  for (int64_t k = 0; k < cap; ++k) {
    IncentiveValues rhs = dynamics_rhs(g, inc, x);
    double res = sup_norm(rhs);
    if (res <= tol) return;
    if (res < 0.99 * best) {
      best = res;
      since_best = 0;
    } else if (++since_best > 250) {
      return;
    }
    State next = x;
    for (size_t i = 0; i < next.size(); ++i)
      for (size_t a = 0; a < next[i].size(); ++a) next[i][a] += lambda * rhs[i][a];
    if (!repair_state(next, -1.0)) return;  // negatives are clipped, never fatal here
    x = std::move(next);
    ++iters;
  }
}

// free coordinates: all but the last per player, last recovered as 1 - rest
struct Reduction {
  std::vector<int> counts;
  int dim = 0;

  explicit Reduction(const std::vector<int>& c) : counts(c) {
    for (int s : counts) dim += s - 1;
  }

  State unpack(const std::vector<double>& y) const {
    State x(counts.size());
    size_t k = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
      int s = counts[i];
      x[i].resize(static_cast<size_t>(s));
      double sum = 0.0;
      for (int a = 0; a + 1 < s; ++a) {
        x[i][static_cast<size_t>(a)] = y[k++];
        sum += x[i][static_cast<size_t>(a)];
      }
      x[i][static_cast<size_t>(s) - 1] = 1.0 - sum;
    }
    return x;
  }

  std::vector<double> pack(const State& x) const {
    std::vector<double> y(static_cast<size_t>(dim));
    size_t k = 0;
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t a = 0; a + 1 < x[i].size(); ++a) y[k++] = x[i][a];
    return y;
  }
};

// the field with each player's last component dropped; those components are
// redundant since the field sums to zero per player
std::vector<double> reduced_field(const Game& g, const Incentive& inc, const Reduction& red,
                                  const std::vector<double>& y) {
  State x = red.unpack(y);
  IncentiveValues rhs = dynamics_rhs(g, inc, x);
  std::vector<double> f(static_cast<size_t>(red.dim));
  size_t k = 0;
  for (size_t i = 0; i < rhs.size(); ++i)
    for (size_t a = 0; a + 1 < rhs[i].size(); ++a) f[k++] = rhs[i][a];
  return f;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

// solves A d = b in place with partial pivoting; false when singular
bool gauss_solve(std::vector<std::vector<double>>& a, std::vector<double>& b,
                 std::vector<double>& d) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
          std::abs(a[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
        piv = r;
    if (std::abs(a[static_cast<size_t>(piv)][static_cast<size_t>(col)]) < 1e-300) return false;
    std::swap(a[static_cast<size_t>(col)], a[static_cast<size_t>(piv)]);
    std::swap(b[static_cast<size_t>(col)], b[static_cast<size_t>(piv)]);
    for (int r = col + 1; r < n; ++r) {
      double f = a[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                 a[static_cast<size_t>(col)][static_cast<size_t>(col)];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c)
        a[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
            f * a[static_cast<size_t>(col)][static_cast<size_t>(c)];
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
    }
  }
  d.assign(static_cast<size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<size_t>(r)];
    for (int c = r + 1; c < n; ++c)
      s -= a[static_cast<size_t>(r)][static_cast<size_t>(c)] * d[static_cast<size_t>(c)];
    d[static_cast<size_t>(r)] = s / a[static_cast<size_t>(r)][static_cast<size_t>(r)];
  }
  return true;
}

// damped residual descent on an m-dimensional field: Gauss-Newton steps with
// an adaptive ridge, central differences for the Jacobian
template <typename Field>
void lm_descend(int m, const Field& field, std::vector<double>& y, int64_t& iters) {
  if (m == 0) return;
  const double h = 1e-7;
  const double target = 1e-13;
  std::vector<double> f = field(y);
  double fnorm = inf_norm(f);
  double lambda = 1e-3;
  for (int it = 0; it < 80 && fnorm > target; ++it) {
    std::vector<std::vector<double>> jac(static_cast<size_t>(m),
                                         std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int j = 0; j < m; ++j) {
      std::vector<double> yp = y;
      std::vector<double> ym = y;
      yp[static_cast<size_t>(j)] += h;
      ym[static_cast<size_t>(j)] -= h;
      std::vector<double> fp = field(yp);
      std::vector<double> fm = field(ym);
      for (int r = 0; r < m; ++r)
        jac[static_cast<size_t>(r)][static_cast<size_t>(j)] =
            (fp[static_cast<size_t>(r)] - fm[static_cast<size_t>(r)]) / (2.0 * h);
    }
    std::vector<std::vector<double>> jtj(static_cast<size_t>(m),
                                         std::vector<double>(static_cast<size_t>(m), 0.0));
    std::vector<double> jtf(static_cast<size_t>(m), 0.0);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
          s += jac[static_cast<size_t>(k)][static_cast<size_t>(r)] *
               jac[static_cast<size_t>(k)][static_cast<size_t>(c)];
        jtj[static_cast<size_t>(r)][static_cast<size_t>(c)] = s;
      }
      double s = 0.0;
      for (int k = 0; k < m; ++k)
        s += jac[static_cast<size_t>(k)][static_cast<size_t>(r)] * f[static_cast<size_t>(k)];
      jtf[static_cast<size_t>(r)] = s;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::vector<std::vector<double>> a = jtj;
      for (int r = 0; r < m; ++r) a[static_cast<size_t>(r)][static_cast<size_t>(r)] += lambda;
      std::vector<double> b(static_cast<size_t>(m));
      for (int r = 0; r < m; ++r) b[static_cast<size_t>(r)] = -jtf[static_cast<size_t>(r)];
      std::vector<double> d;
      if (gauss_solve(a, b, d)) {
        std::vector<double> ytry = y;
        for (int r = 0; r < m; ++r) ytry[static_cast<size_t>(r)] += d[static_cast<size_t>(r)];
        std::vector<double> ftry = field(ytry);
        double ntry = inf_norm(ftry);
        if (ntry < fnorm) {
          y = std::move(ytry);
          f = std::move(ftry);
          fnorm = ntry;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e10) break;
    }
    ++iters;
    if (!accepted) break;
  }
}

void polish(const Game& g, const Incentive& inc, State& x, int64_t& iters) {
  Reduction red(g.strategy_counts());
  if (red.dim == 0) return;
  std::vector<double> y = red.pack(x);
  lm_descend(
      red.dim, [&](const std::vector<double>& z) { return reduced_field(g, inc, red, z); }, y,
      iters);
  State candidate = red.unpack(y);
  if (repair_state(candidate, -1e-7)) x = std::move(candidate);
}

EquilibriumReport run_one_start(const Game& g, const Incentive& inc, const Profile& start,
                                const SearchConfig& config, int index) {
  State x = start.coords();
  int64_t iters = 0;
  if (inc.strict_ok) {
    map_phase(g, inc, x, std::min<int64_t>(config.budget, 5000), config.tol, iters);
  } else {
    damped_phase(g, inc, x, std::min<int64_t>(config.budget, 2000), config.tol, iters);
  }
  if (inc.is_continuous) polish(g, inc, x, iters);
  if (!repair_state(x, -1e-7)) x = start.coords();

  // the map phase escapes rest points that repel the dynamics, so also run the
  // residual descent straight from the start and keep the converged candidate
  // nearer to it; repelling equilibria stay reachable that way
  if (inc.is_continuous) {
    State direct = start.coords();
    polish(g, inc, direct, iters);
    if (repair_state(direct, -1e-7)) {
      Profile pd(direct);
      Profile pm(x);
      double res_direct = equilibrium_residual(g, inc, pd);
      double res_map = equilibrium_residual(g, inc, pm);
      bool ok_direct = res_direct <= config.tol;
      bool ok_map = res_map <= config.tol;
      bool prefer = false;
      if (ok_direct && ok_map) {
        prefer = start.max_distance(pd) < start.max_distance(pm);
      } else if (ok_direct != ok_map) {
        prefer = ok_direct;
      } else {
        prefer = res_direct < res_map;
      }
      if (prefer) x = std::move(direct);
    }
  }
  EquilibriumReport rep = certify(g, inc, Profile(x), config.tol);
  rep.start = index;
  rep.iterations = iters;
  return rep;
}

}  // namespace

std::vector<EquilibriumReport> dedup_reports(std::vector<EquilibriumReport> reports, double radius) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const EquilibriumReport& a, const EquilibriumReport& b) {
                     return a.residual < b.residual;
                   });
  std::vector<EquilibriumReport> kept;
  for (auto& r : reports) {
    bool fresh = true;
    for (const auto& k : kept) {
      if (r.profile.max_distance(k.profile) <= radius) {
        fresh = false;
        break;
      }
    }
    if (fresh) kept.push_back(std::move(r));
  }
  return kept;
}

double equilibrium_residual(const Game& g, const Incentive& inc, const Profile& x) {
  return sup_norm(dynamics_rhs(g, inc, x.coords()));
}

double nash_residual(const Game& g, const Profile& x) {
  State cond = all_conditional_payoffs(g, x.coords());
  double worst = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& c = cond[static_cast<size_t>(i)];
    double best = *std::max_element(c.begin(), c.end());
    double u = 0.0;
    for (size_t a = 0; a < c.size(); ++a) u += x[i][a] * c[a];
    worst = std::max(worst, best - u);
  }
  return worst;
}

EquilibriumReport certify(const Game& g, const Incentive& inc, const Profile& x, double tol) {
  double res = equilibrium_residual(g, inc, x);
  std::optional<double> map_res;
  if (inc.strict_ok) {
    State tx = t_map_raw(g, inc, x.coords());
    double d = 0.0;
    for (size_t i = 0; i < tx.size(); ++i)
      for (size_t a = 0; a < tx[i].size(); ++a) d = std::max(d, std::abs(tx[i][a] - x[static_cast<int>(i)][a]));
    map_res = d;
  }
  double nash_res = nash_residual(g, x);
  bool pure = x.is_pure();
  std::optional<bool> ww;
  if (pure) {
    std::vector<int> digits = x.snap_pure();
    int64_t flat = g.flat_index(digits);
    bool all_best = true;
    for (int i = 0; i < g.num_players(); ++i) {
      double top = payoff_range(g, i).second;
      if (g.payoff_tensor(i)[static_cast<size_t>(flat)] < top - 1e-9) {
        all_best = false;
        break;
      }
    }
    ww = all_best;
  }
  EquilibriumReport rep{x,    res,  map_res, nash_res, x.is_interior(), pure,
                        ww,   -1,   0,       res <= tol};
  return rep;
}

namespace {

void validate_config(const SearchConfig& config) {
  if (config.random_starts <= 0) throw std::invalid_argument("search: start count must be positive");
  if (config.budget <= 0) throw std::invalid_argument("search: iteration budget must be positive");
  if (!(config.tol > 0.0)) throw std::invalid_argument("search: tolerance must be positive");
  if (!(config.dedup_radius > 0.0)) throw std::invalid_argument("search: dedup radius must be positive");
}

}  // namespace

std::vector<EquilibriumReport> find_equilibria(const Game& g, const Incentive& inc,
                                               const SearchConfig& config) {
  validate_config(config);
  std::vector<Profile> starts;
  if (g.num_pure_profiles() <= 256) {
    for_each_pure_profile(g.strategy_counts(),
                          [&](const std::vector<int>& digits, int64_t) {
                            starts.push_back(Profile::vertex(g, digits));
                          });
  }
  starts.push_back(Profile::barycenter(g));
  Rng rng(config.seed);
  for (int k = 0; k < config.random_starts; ++k) {
    State s(static_cast<size_t>(g.num_players()));
    for (int i = 0; i < g.num_players(); ++i) s[static_cast<size_t>(i)] = rng.simplex_point(g.num_strategies(i));
    starts.push_back(Profile(std::move(s)));
  }
  std::vector<EquilibriumReport> reports;
  reports.reserve(starts.size());
  for (size_t idx = 0; idx < starts.size(); ++idx)
    reports.push_back(run_one_start(g, inc, starts[idx], config, static_cast<int>(idx)));
  return dedup_reports(std::move(reports), config.dedup_radius);
}

std::vector<EquilibriumReport> enumerate_pure_equilibria(const Game& g, const Incentive& inc,
                                                         double tol) {
  if (g.num_pure_profiles() > 1000000)
    throw std::invalid_argument("pure enumeration: more than one million pure profiles");
  std::vector<EquilibriumReport> reports;
  reports.reserve(static_cast<size_t>(g.num_pure_profiles()));
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& digits, int64_t) {
    reports.push_back(certify(g, inc, Profile::vertex(g, digits), tol));
  });
  return reports;
}

EquilibriumReport find_symmetric_equilibrium(const Game& g, const Incentive& inc,
                                             const SymmetryMap& sym, const SearchConfig& config) {
  validate_config(config);
  validate_symmetry(g, sym);
  const int n = g.num_players();
  const int s = g.num_strategies(0);

  // hypothesis check: on symmetric states the propensities must respect the
  // relabeling, otherwise the symmetric set is not invariant
  {
    Rng rng(config.seed);
    double defect = 0.0;
    for (int k = 0; k < 256; ++k) {
      State x(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = rng.simplex_point(s);
      x = project_symmetric(g, x, sym);
      IncentiveValues phi = inc.eval(g, x);
      for (size_t i = 0; i < phi.size(); ++i) {
        const auto& p = sym.perms[i];
        for (size_t a = 0; a < phi[i].size(); ++a)
          defect = std::max(defect,
                            std::abs(phi[0][static_cast<size_t>(p[a])] - phi[i][a]));
      }
    }
    if (defect > 1e-10) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6e", defect);
      throw std::runtime_error("symmetric search: propensities break the relabeling (max defect " +
                               std::string(buf) + " over 256 symmetric samples)");
    }
  }

  auto spread = [&](const std::vector<double>& y) {
    State x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<size_t>(i)].resize(static_cast<size_t>(s));
      for (int a = 0; a < s; ++a)
        x[static_cast<size_t>(i)][static_cast<size_t>(a)] =
            y[static_cast<size_t>(sym.perms[static_cast<size_t>(i)][static_cast<size_t>(a)])];
    }
    return project_symmetric(g, x, sym);
  };

  std::vector<std::vector<double>> seeds;
  for (int b = 0; b < s; ++b) {
    std::vector<double> y(static_cast<size_t>(s), 0.0);
    y[static_cast<size_t>(b)] = 1.0;
    seeds.push_back(std::move(y));
  }
  seeds.push_back(std::vector<double>(static_cast<size_t>(s), 1.0 / s));
  Rng rng(config.seed + 1);
  for (int k = 0; k < config.random_starts; ++k) seeds.push_back(rng.simplex_point(s));

  std::optional<EquilibriumReport> best;
  for (size_t idx = 0; idx < seeds.size(); ++idx) {
    State x = spread(seeds[idx]);
    int64_t iters = 0;
    int64_t cap = std::min<int64_t>(config.budget, inc.strict_ok ? 5000 : 2000);
    double bestres = std::numeric_limits<double>::infinity();
    int64_t since_best = 0;
    for (int64_t k = 0; k < cap; ++k) {
      IncentiveValues rhs = dynamics_rhs(g, inc, x);
      double res = sup_norm(rhs);
      if (res <= config.tol) break;
      if (res < 0.99 * bestres) {
        bestres = res;
        since_best = 0;
      } else if (++since_best > 250) {
        break;
      }
      if (inc.strict_ok) {
        x = t_map_raw(g, inc, x);
      } else {
        for (size_t i = 0; i < x.size(); ++i)
          for (size_t a = 0; a < x[i].size(); ++a) x[i][a] += 0.2 * rhs[i][a];
        if (!repair_state(x, -1.0)) break;
      }
      x = project_symmetric(g, x, sym);
      ++iters;
    }
    if (inc.is_continuous && s > 1) {
      // residual descent restricted to the symmetric slice, in the shared frame
      const auto& p0 = sym.perms[0];
      auto lift = [&](const std::vector<double>& zz) {
        std::vector<double> yy(static_cast<size_t>(s), 0.0);
        double head = 0.0;
        for (int k = 0; k + 1 < s; ++k) {
          yy[static_cast<size_t>(k)] = zz[static_cast<size_t>(k)];
          head += zz[static_cast<size_t>(k)];
        }
        yy[static_cast<size_t>(s - 1)] = 1.0 - head;
        return yy;
      };
      std::vector<double> y(static_cast<size_t>(s), 0.0);
      for (int a = 0; a < s; ++a)
        y[static_cast<size_t>(p0[static_cast<size_t>(a)])] = x[0][static_cast<size_t>(a)];
      std::vector<double> z(y.begin(), y.end() - 1);
      auto slice_field = [&](const std::vector<double>& zz) {
        State xs = spread(lift(zz));
        IncentiveValues rhs = dynamics_rhs(g, inc, xs);
        std::vector<double> f(static_cast<size_t>(s - 1), 0.0);
        for (int a = 0; a < s; ++a) {
          int k = p0[static_cast<size_t>(a)];
          if (k + 1 < s) f[static_cast<size_t>(k)] = rhs[0][static_cast<size_t>(a)];
        }
        return f;
      };
      lm_descend(s - 1, slice_field, z, iters);
      State cand = spread(lift(z));
      if (repair_state(cand, -1e-7)) {
        double before = sup_norm(dynamics_rhs(g, inc, x));
        double after = sup_norm(dynamics_rhs(g, inc, cand));
        if (after < before) x = std::move(cand);
      }
    }
    if (!repair_state(x, -1e-7)) x = spread(seeds[idx]);
    EquilibriumReport rep = certify(g, inc, Profile(x), config.tol);
    rep.start = static_cast<int>(idx);
    rep.iterations = iters;
    if (!best || rep.residual < best->residual) best = std::move(rep);
  }
  return *best;
}

}  // namespace incent
