#pragma once

// Brute-force reference computations for the tests. Everything here works
// straight off the payoff tensors with its own enumeration loops so the
// library under test shares no code with the expected values.

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "incent/game.hpp"

namespace oracle {

// walks all pure profiles by odometer, last player fastest
template <typename Fn>
void each_pure(const std::vector<int>& counts, Fn&& fn) {
  std::vector<int> digits(counts.size(), 0);
  while (true) {
    fn(static_cast<const std::vector<int>&>(digits));
    int j = static_cast<int>(counts.size()) - 1;
    for (; j >= 0; --j) {
      if (++digits[static_cast<size_t>(j)] < counts[static_cast<size_t>(j)]) break;
      digits[static_cast<size_t>(j)] = 0;
    }
    if (j < 0) return;
  }
}

inline int64_t flat_of(const std::vector<int>& counts, const std::vector<int>& pure) {
  int64_t f = 0;
  for (size_t j = 0; j < counts.size(); ++j) f = f * counts[j] + pure[j];
  return f;
}

// expected payoff: probability-weighted sum over every pure profile
inline double utility(const incent::Game& g, int player, const incent::State& x) {
  const auto& counts = g.strategy_counts();
  const auto& tensor = g.payoff_tensor(player);
  double total = 0.0;
  each_pure(counts, [&](const std::vector<int>& pure) {
    double p = 1.0;
    for (size_t j = 0; j < pure.size(); ++j) p *= x[j][static_cast<size_t>(pure[j])];
    total += p * tensor[static_cast<size_t>(flat_of(counts, pure))];
  });
  return total;
}

inline double utility_replace(const incent::Game& g, int player, int strategy,
                              const incent::State& x) {
  incent::State y = x;
  auto& row = y[static_cast<size_t>(player)];
  for (auto& c : row) c = 0.0;
  row[static_cast<size_t>(strategy)] = 1.0;
  return utility(g, player, y);
}

inline std::vector<double> conditional(const incent::Game& g, int player, const incent::State& x) {
  std::vector<double> w(static_cast<size_t>(g.num_strategies(player)));
  for (size_t a = 0; a < w.size(); ++a)
    w[a] = utility_replace(g, player, static_cast<int>(a), x);
  return w;
}

// field of the Brown-von Neumann-Nash dynamics, written out directly
inline std::vector<std::vector<double>> bnn_rhs(const incent::Game& g, const incent::State& x) {
  std::vector<std::vector<double>> out(x.size());
  for (int i = 0; i < g.num_players(); ++i) {
    double u = utility(g, i, x);
    std::vector<double> w = conditional(g, i, x);
    std::vector<double> k(w.size());
    double total = 0.0;
    for (size_t a = 0; a < w.size(); ++a) {
      k[a] = w[a] > u ? w[a] - u : 0.0;
      total += k[a];
    }
    out[static_cast<size_t>(i)].resize(w.size());
    for (size_t a = 0; a < w.size(); ++a)
      out[static_cast<size_t>(i)][a] = k[a] - x[static_cast<size_t>(i)][a] * total;
  }
  return out;
}

// field of the replicator dynamics, written out directly
inline std::vector<std::vector<double>> replicator_rhs(const incent::Game& g,
                                                       const incent::State& x) {
  std::vector<std::vector<double>> out(x.size());
  for (int i = 0; i < g.num_players(); ++i) {
    double u = utility(g, i, x);
    std::vector<double> w = conditional(g, i, x);
    out[static_cast<size_t>(i)].resize(w.size());
    for (size_t a = 0; a < w.size(); ++a)
      out[static_cast<size_t>(i)][a] = x[static_cast<size_t>(i)][a] * (w[a] - u);
  }
  return out;
}

// inflow minus outflow for one population under a switch-rate matrix
inline std::vector<double> mean_rhs(const std::vector<std::vector<double>>& rho,
                                    const std::vector<double>& x) {
  const size_t s = x.size();
  std::vector<double> out(s, 0.0);
  for (size_t a = 0; a < s; ++a) {
    double in = 0.0;
    double outflow = 0.0;
    for (size_t j = 0; j < s; ++j) {
      in += x[j] * rho[j][a];
      outflow += rho[a][j];
    }
    out[a] = in - x[a] * outflow;
  }
  return out;
}

// best unilateral improvement over all players; zero iff Nash
inline double nash_regret(const incent::Game& g, const incent::State& x) {
  double worst = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    double u = utility(g, i, x);
    for (double w : conditional(g, i, x))
      if (w - u > worst) worst = w - u;
  }
  return worst;
}

// solves a dense square system with partial pivoting; false when singular
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& out) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
          std::fabs(a[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
        piv = r;
    if (std::fabs(a[static_cast<size_t>(piv)][static_cast<size_t>(col)]) < 1e-12) return false;
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
  out.assign(static_cast<size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<size_t>(r)];
    for (int c = r + 1; c < n; ++c)
      s -= a[static_cast<size_t>(r)][static_cast<size_t>(c)] * out[static_cast<size_t>(c)];
    out[static_cast<size_t>(r)] = s / a[static_cast<size_t>(r)][static_cast<size_t>(r)];
  }
  return true;
}

// All Nash equilibria of a two-player game by support enumeration over
// equal-size supports (exhaustive for nondegenerate games). For each support
// pair, one player's mixture is pinned by the other's indifference
// conditions; candidates are kept when they are distributions and survive a
// full regret check.
inline std::vector<incent::State> nash_2p(const incent::Game& g, double regret_tol = 1e-9) {
  const int s1 = g.num_strategies(0);
  const int s2 = g.num_strategies(1);
  const auto& counts = g.strategy_counts();
  auto pay = [&](int player, int a, int b) {
    return g.payoff_tensor(player)[static_cast<size_t>(flat_of(counts, {a, b}))];
  };

  std::vector<incent::State> found;
  auto seen = [&](const incent::State& x) {
    for (const auto& y : found) {
      double d = 0.0;
      for (size_t i = 0; i < x.size(); ++i)
        for (size_t a = 0; a < x[i].size(); ++a) d = std::fmax(d, std::fabs(x[i][a] - y[i][a]));
      if (d <= 1e-7) return true;
    }
    return false;
  };

  std::vector<std::vector<int>> supports1, supports2;
  for (int mask = 1; mask < (1 << s1); ++mask) {
    std::vector<int> sup;
    for (int a = 0; a < s1; ++a)
      if (mask & (1 << a)) sup.push_back(a);
    supports1.push_back(std::move(sup));
  }
  for (int mask = 1; mask < (1 << s2); ++mask) {
    std::vector<int> sup;
    for (int b = 0; b < s2; ++b)
      if (mask & (1 << b)) sup.push_back(b);
    supports2.push_back(std::move(sup));
  }

  // weights for `owner`'s support making `other` indifferent across theirs
  auto pin = [&](const std::vector<int>& own_sup, const std::vector<int>& other_sup, int owner,
                 std::vector<double>& weights) {
    const int k = static_cast<int>(own_sup.size());
    std::vector<std::vector<double>> a(static_cast<size_t>(k),
                                       std::vector<double>(static_cast<size_t>(k), 0.0));
    std::vector<double> b(static_cast<size_t>(k), 0.0);
    for (int r = 0; r + 1 < k; ++r) {
      for (int c = 0; c < k; ++c) {
        double d;
        if (owner == 0) {
          d = pay(1, own_sup[static_cast<size_t>(c)], other_sup[static_cast<size_t>(r + 1)]) -
              pay(1, own_sup[static_cast<size_t>(c)], other_sup[0]);
        } else {
          d = pay(0, other_sup[static_cast<size_t>(r + 1)], own_sup[static_cast<size_t>(c)]) -
              pay(0, other_sup[0], own_sup[static_cast<size_t>(c)]);
        }
        a[static_cast<size_t>(r)][static_cast<size_t>(c)] = d;
      }
    }
    for (int c = 0; c < k; ++c) a[static_cast<size_t>(k - 1)][static_cast<size_t>(c)] = 1.0;
    b[static_cast<size_t>(k - 1)] = 1.0;
    return solve_linear(a, b, weights);
  };

  for (const auto& sup1 : supports1) {
    for (const auto& sup2 : supports2) {
      if (sup1.size() != sup2.size()) continue;
      std::vector<double> w1, w2;
      if (!pin(sup1, sup2, 0, w1)) continue;
      if (!pin(sup2, sup1, 1, w2)) continue;
      bool ok = true;
      for (double v : w1)
        if (v < -1e-9) ok = false;
      for (double v : w2)
        if (v < -1e-9) ok = false;
      if (!ok) continue;
      incent::State x(2);
      x[0].assign(static_cast<size_t>(s1), 0.0);
      x[1].assign(static_cast<size_t>(s2), 0.0);
      double t1 = 0.0, t2 = 0.0;
      for (size_t j = 0; j < sup1.size(); ++j) t1 += std::fmax(w1[j], 0.0);
      for (size_t j = 0; j < sup2.size(); ++j) t2 += std::fmax(w2[j], 0.0);
      if (t1 <= 0.0 || t2 <= 0.0) continue;
      for (size_t j = 0; j < sup1.size(); ++j)
        x[0][static_cast<size_t>(sup1[j])] = std::fmax(w1[j], 0.0) / t1;
      for (size_t j = 0; j < sup2.size(); ++j)
        x[1][static_cast<size_t>(sup2[j])] = std::fmax(w2[j], 0.0) / t2;
      if (nash_regret(g, x) > regret_tol) continue;
      if (!seen(x)) found.push_back(std::move(x));
    }
  }
  return found;
}

// pure Nash profiles of any game
inline std::vector<std::vector<int>> pure_nash(const incent::Game& g, double tol = 1e-12) {
  std::vector<std::vector<int>> out;
  each_pure(g.strategy_counts(), [&](const std::vector<int>& pure) {
    for (int i = 0; i < g.num_players(); ++i) {
      double here = g.payoff(i, pure);
      std::vector<int> dev = pure;
      for (int a = 0; a < g.num_strategies(i); ++a) {
        dev[static_cast<size_t>(i)] = a;
        if (g.payoff(i, dev) > here + tol) return;
      }
    }
    out.push_back(pure);
  });
  return out;
}

// pure profiles at which every player attains their personal tensor maximum
inline std::vector<std::vector<int>> win_win(const incent::Game& g, double tol = 1e-9) {
  std::vector<double> best(static_cast<size_t>(g.num_players()),
                           -std::numeric_limits<double>::infinity());
  for (int i = 0; i < g.num_players(); ++i)
    for (double v : g.payoff_tensor(i)) best[static_cast<size_t>(i)] = std::fmax(best[static_cast<size_t>(i)], v);
  std::vector<std::vector<int>> out;
  each_pure(g.strategy_counts(), [&](const std::vector<int>& pure) {
    for (int i = 0; i < g.num_players(); ++i)
      if (g.payoff(i, pure) < best[static_cast<size_t>(i)] - tol) return;
    out.push_back(pure);
  });
  return out;
}

// Direction used by the projection rule, recovered by trying every superset
// of the support and keeping the one whose payoff average is largest.
inline std::vector<double> projection_direction(const std::vector<double>& w,
                                                const std::vector<double>& x) {
  const int s = static_cast<int>(w.size());
  int supp_mask = 0;
  for (int a = 0; a < s; ++a)
    if (x[static_cast<size_t>(a)] > 1e-12) supp_mask |= 1 << a;
  double best_avg = -std::numeric_limits<double>::infinity();
  int best_mask = supp_mask;
  int best_size = s + 1;
  for (int mask = 1; mask < (1 << s); ++mask) {
    if ((mask & supp_mask) != supp_mask) continue;
    double sum = 0.0;
    int k = 0;
    for (int a = 0; a < s; ++a)
      if (mask & (1 << a)) {
        sum += w[static_cast<size_t>(a)];
        ++k;
      }
    double avg = sum / k;
    if (avg > best_avg + 1e-15 || (std::fabs(avg - best_avg) <= 1e-15 && k < best_size)) {
      best_avg = avg;
      best_mask = mask;
      best_size = k;
    }
  }
  std::vector<double> f(static_cast<size_t>(s), 0.0);
  for (int a = 0; a < s; ++a)
    if (best_mask & (1 << a)) f[static_cast<size_t>(a)] = w[static_cast<size_t>(a)] - best_avg;
  return f;
}

}  // namespace oracle
