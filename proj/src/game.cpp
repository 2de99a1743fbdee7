#include "incent/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace incent {

Game::Game(std::vector<int> strategy_counts,
           std::vector<std::vector<double>> payoffs,
           std::vector<std::vector<std::string>> labels)
    : counts_(std::move(strategy_counts)),
      payoffs_(std::move(payoffs)),
      labels_(std::move(labels)) {
  if (counts_.empty()) throw std::invalid_argument("game: needs at least one player");
  for (size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 1)
      throw std::invalid_argument("game: player " + std::to_string(i) + " has no strategies");
  }
  strides_.assign(counts_.size(), 1);
  total_ = 1;
  for (int j = static_cast<int>(counts_.size()) - 1; j >= 0; --j) {
    strides_[static_cast<size_t>(j)] = total_;
    total_ *= counts_[static_cast<size_t>(j)];
  }
  if (payoffs_.size() != counts_.size())
    throw std::invalid_argument("game: expected one payoff tensor per player");
  for (size_t i = 0; i < payoffs_.size(); ++i) {
    if (static_cast<int64_t>(payoffs_[i].size()) != total_)
      throw std::invalid_argument("game: payoff tensor for player " + std::to_string(i) +
                                  " has " + std::to_string(payoffs_[i].size()) + " entries, expected " +
                                  std::to_string(total_));
    for (size_t f = 0; f < payoffs_[i].size(); ++f) {
      if (!std::isfinite(payoffs_[i][f]))
        throw std::invalid_argument("game: payoff for player " + std::to_string(i) +
                                    " at flat index " + std::to_string(f) + " is not finite");
    }
  }
  if (!labels_.empty()) {
    if (labels_.size() != counts_.size())
      throw std::invalid_argument("game: expected one label list per player");
    for (size_t i = 0; i < labels_.size(); ++i) {
      if (static_cast<int>(labels_[i].size()) != counts_[i])
        throw std::invalid_argument("game: label count for player " + std::to_string(i) +
                                    " does not match strategy count");
    }
  }
}

int Game::num_strategies(int player) const {
  if (player < 0 || player >= num_players())
    throw std::out_of_range("game: player index " + std::to_string(player) + " out of range");
  return counts_[static_cast<size_t>(player)];
}

int64_t Game::flat_index(const std::vector<int>& pure) const {
  if (pure.size() != counts_.size())
    throw std::invalid_argument("game: pure profile length does not match player count");
  int64_t flat = 0;
  for (size_t j = 0; j < pure.size(); ++j) {
    if (pure[j] < 0 || pure[j] >= counts_[j])
      throw std::out_of_range("game: strategy " + std::to_string(pure[j]) +
                              " out of range for player " + std::to_string(j));
    flat += strides_[j] * pure[j];
  }
  return flat;
}

std::vector<int> Game::pure_at(int64_t flat) const {
  if (flat < 0 || flat >= total_) throw std::out_of_range("game: flat index out of range");
  std::vector<int> pure(counts_.size());
  for (size_t j = 0; j < counts_.size(); ++j) {
    pure[j] = static_cast<int>((flat / strides_[j]) % counts_[j]);
  }
  return pure;
}

int64_t Game::stride(int player) const {
  if (player < 0 || player >= num_players()) throw std::out_of_range("game: player index out of range");
  return strides_[static_cast<size_t>(player)];
}

double Game::payoff(int player, const std::vector<int>& pure) const {
  return payoff_tensor(player)[static_cast<size_t>(flat_index(pure))];
}

const std::vector<double>& Game::payoff_tensor(int player) const {
  if (player < 0 || player >= num_players()) throw std::out_of_range("game: player index out of range");
  return payoffs_[static_cast<size_t>(player)];
}

const std::vector<std::string>& Game::labels(int player) const {
  static const std::vector<std::string> kEmpty;
  if (player < 0 || player >= num_players()) throw std::out_of_range("game: player index out of range");
  if (labels_.empty()) return kEmpty;
  return labels_[static_cast<size_t>(player)];
}

Profile::Profile(State coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("profile: needs at least one player");
  for (size_t i = 0; i < coords_.size(); ++i) {
    auto& xi = coords_[i];
    if (xi.empty()) throw std::invalid_argument("profile: player " + std::to_string(i) + " has no coordinates");
    double sum = 0.0;
    for (auto& c : xi) {
      if (!std::isfinite(c))
        throw std::invalid_argument("profile: non-finite coordinate for player " + std::to_string(i));
      if (c < 0.0) {
        if (c < kNegTol)
          throw std::invalid_argument("profile: negative coordinate for player " + std::to_string(i));
        c = 0.0;
      }
      sum += c;
    }
    if (std::abs(sum - 1.0) > kSumTol)
      throw std::invalid_argument("profile: coordinates of player " + std::to_string(i) +
                                  " sum to " + std::to_string(sum) + ", off the simplex");
    for (auto& c : xi) c /= sum;
  }
}

Profile Profile::barycenter(const Game& g) {
  State coords(static_cast<size_t>(g.num_players()));
  for (int i = 0; i < g.num_players(); ++i) {
    coords[static_cast<size_t>(i)].assign(static_cast<size_t>(g.num_strategies(i)),
                                          1.0 / g.num_strategies(i));
  }
  return Profile(std::move(coords));
}

Profile Profile::vertex(const Game& g, const std::vector<int>& pure) {
  g.flat_index(pure);  // bounds check
  State coords(static_cast<size_t>(g.num_players()));
  for (int i = 0; i < g.num_players(); ++i) {
    coords[static_cast<size_t>(i)].assign(static_cast<size_t>(g.num_strategies(i)), 0.0);
    coords[static_cast<size_t>(i)][static_cast<size_t>(pure[static_cast<size_t>(i)])] = 1.0;
  }
  return Profile(std::move(coords));
}

bool Profile::is_pure(double tol) const {
  for (const auto& xi : coords_) {
    for (double c : xi) {
      if (std::abs(c) > tol && std::abs(c - 1.0) > tol) return false;
    }
  }
  return true;
}

bool Profile::is_interior(double tol) const {
  for (const auto& xi : coords_) {
    for (double c : xi) {
      if (c < tol) return false;
    }
  }
  return true;
}

std::vector<int> Profile::snap_pure() const {
  std::vector<int> pure(coords_.size());
  for (size_t i = 0; i < coords_.size(); ++i) {
    size_t best = 0;
    for (size_t a = 1; a < coords_[i].size(); ++a) {
      if (coords_[i][a] > coords_[i][best]) best = a;
    }
    pure[i] = static_cast<int>(best);
  }
  return pure;
}

double Profile::max_distance(const Profile& other) const {
  if (coords_.size() != other.coords_.size())
    throw std::invalid_argument("profile: shape mismatch in distance");
  double d = 0.0;
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i].size() != other.coords_[i].size())
      throw std::invalid_argument("profile: shape mismatch in distance");
    for (size_t a = 0; a < coords_[i].size(); ++a) {
      d = std::max(d, std::abs(coords_[i][a] - other.coords_[i][a]));
    }
  }
  return d;
}

OpponentIndexCodec::OpponentIndexCodec(const Game& g, int player) : game_(&g), player_(player) {
  if (player < 0 || player >= g.num_players())
    throw std::out_of_range("codec: player index out of range");
  for (int j = 0; j < g.num_players(); ++j) {
    if (j == player) continue;
    players_.push_back(j);
    counts_.push_back(g.num_strategies(j));
  }
  strides_.assign(counts_.size(), 1);
  total_ = 1;
  for (int k = static_cast<int>(counts_.size()) - 1; k >= 0; --k) {
    strides_[static_cast<size_t>(k)] = total_;
    total_ *= counts_[static_cast<size_t>(k)];
  }
}

int64_t OpponentIndexCodec::encode(const std::vector<int>& multi) const {
  if (multi.size() != counts_.size())
    throw std::invalid_argument("codec: multi-index length does not match opponent count");
  int64_t flat = 0;
  for (size_t k = 0; k < multi.size(); ++k) {
    if (multi[k] < 0 || multi[k] >= counts_[k])
      throw std::out_of_range("codec: component " + std::to_string(k) + " out of range");
    flat += strides_[k] * multi[k];
  }
  return flat;
}

std::vector<int> OpponentIndexCodec::decode(int64_t flat) const {
  if (flat < 0 || flat >= total_) throw std::out_of_range("codec: flat index out of range");
  std::vector<int> multi(counts_.size());
  for (size_t k = 0; k < counts_.size(); ++k) {
    multi[k] = static_cast<int>((flat / strides_[k]) % counts_[k]);
  }
  return multi;
}

int64_t OpponentIndexCodec::game_flat(int own_strategy, int64_t opponent_flat) const {
  if (own_strategy < 0 || own_strategy >= game_->num_strategies(player_))
    throw std::out_of_range("codec: own strategy out of range");
  std::vector<int> multi = decode(opponent_flat);
  int64_t flat = game_->stride(player_) * own_strategy;
  for (size_t k = 0; k < players_.size(); ++k) {
    flat += game_->stride(players_[k]) * multi[k];
  }
  return flat;
}

void require_shape(const Game& g, const State& x) {
  if (static_cast<int>(x.size()) != g.num_players())
    throw std::invalid_argument("state: player count does not match game");
  for (int i = 0; i < g.num_players(); ++i) {
    if (static_cast<int>(x[static_cast<size_t>(i)].size()) != g.num_strategies(i))
      throw std::invalid_argument("state: strategy count for player " + std::to_string(i) +
                                  " does not match game");
  }
}

double utility(const Game& g, int player, const State& x) {
  require_shape(g, x);
  if (player < 0 || player >= g.num_players()) throw std::out_of_range("utility: player index out of range");
  const auto& tensor = g.payoff_tensor(player);
  double total = 0.0;
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
    double w = 1.0;
    for (size_t j = 0; j < d.size(); ++j) w *= x[j][static_cast<size_t>(d[j])];
    total += tensor[static_cast<size_t>(flat)] * w;
  });
  return total;
}

double utility(const Game& g, int player, const Profile& x) { return utility(g, player, x.coords()); }

std::vector<double> conditional_payoffs(const Game& g, int player, const State& x) {
  require_shape(g, x);
  if (player < 0 || player >= g.num_players())
    throw std::out_of_range("conditional payoffs: player index out of range");
  const auto& tensor = g.payoff_tensor(player);
  std::vector<double> cond(static_cast<size_t>(g.num_strategies(player)), 0.0);
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
    double w = 1.0;
    for (size_t j = 0; j < d.size(); ++j) {
      if (static_cast<int>(j) == player) continue;
      w *= x[j][static_cast<size_t>(d[j])];
    }
    cond[static_cast<size_t>(d[static_cast<size_t>(player)])] += tensor[static_cast<size_t>(flat)] * w;
  });
  return cond;
}

double utility_replace(const Game& g, int player, int strategy, const State& x) {
  if (player < 0 || player >= g.num_players())
    throw std::out_of_range("utility_replace: player index out of range");
  if (strategy < 0 || strategy >= g.num_strategies(player))
    throw std::out_of_range("utility_replace: strategy index out of range");
  return conditional_payoffs(g, player, x)[static_cast<size_t>(strategy)];
}

double utility_replace(const Game& g, int player, int strategy, const Profile& x) {
  return utility_replace(g, player, strategy, x.coords());
}

State all_conditional_payoffs(const Game& g, const State& x) {
  require_shape(g, x);
  const int n = g.num_players();
  State cond(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) cond[static_cast<size_t>(i)].assign(static_cast<size_t>(g.num_strategies(i)), 0.0);
  // leave-one-out weights via prefix/suffix products, no division
  std::vector<double> prefix(static_cast<size_t>(n) + 1, 1.0);
  std::vector<double> suffix(static_cast<size_t>(n) + 1, 1.0);
  for_each_pure_profile(g.strategy_counts(), [&](const std::vector<int>& d, int64_t flat) {
    for (int j = 0; j < n; ++j) {
      prefix[static_cast<size_t>(j) + 1] =
          prefix[static_cast<size_t>(j)] * x[static_cast<size_t>(j)][static_cast<size_t>(d[static_cast<size_t>(j)])];
    }
    suffix[static_cast<size_t>(n)] = 1.0;
    for (int j = n - 1; j >= 0; --j) {
      suffix[static_cast<size_t>(j)] =
          x[static_cast<size_t>(j)][static_cast<size_t>(d[static_cast<size_t>(j)])] * suffix[static_cast<size_t>(j) + 1];
    }
    for (int i = 0; i < n; ++i) {
      double w = prefix[static_cast<size_t>(i)] * suffix[static_cast<size_t>(i) + 1];
      cond[static_cast<size_t>(i)][static_cast<size_t>(d[static_cast<size_t>(i)])] +=
          g.payoff_tensor(i)[static_cast<size_t>(flat)] * w;
    }
  });
  return cond;
}

std::vector<double> utilities_with_replacement(const Game& g, int player, int strategy, const State& x) {
  require_shape(g, x);
  if (player < 0 || player >= g.num_players())
    throw std::out_of_range("utilities_with_replacement: player index out of range");
  if (strategy < 0 || strategy >= g.num_strategies(player))
    throw std::out_of_range("utilities_with_replacement: strategy index out of range");
  const int n = g.num_players();
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for_each_pure_profile_fixed(g.strategy_counts(), player, strategy,
                              [&](const std::vector<int>& d, int64_t flat) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      w *= x[static_cast<size_t>(j)][static_cast<size_t>(d[static_cast<size_t>(j)])];
    }
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] += g.payoff_tensor(j)[static_cast<size_t>(flat)] * w;
  });
  return out;
}

std::pair<double, double> payoff_range(const Game& g, int player) {
  const auto& tensor = g.payoff_tensor(player);
  double lo = tensor[0], hi = tensor[0];
  for (double v : tensor) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

double payoff_spread(const Game& g) {
  double lo = payoff_range(g, 0).first;
  double hi = payoff_range(g, 0).second;
  for (int i = 1; i < g.num_players(); ++i) {
    auto [l, h] = payoff_range(g, i);
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  return hi - lo;
}

}  // namespace incent
