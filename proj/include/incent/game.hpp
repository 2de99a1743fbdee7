#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace incent {

// Mixed state: one vector of strategy weights per player. Unlike Profile this
// carries no invariants; the multilinear payoff extension is defined on all of
// it, which the integrators rely on for intermediate stages.
using State = std::vector<std::vector<double>>;

// Finite n-player game in normal form. Each player's payoffs are a dense
// tensor over pure-strategy profiles, flattened row-major with the last
// player's strategy varying fastest.
class Game {
 public:
  Game(std::vector<int> strategy_counts,
       std::vector<std::vector<double>> payoffs,
       std::vector<std::vector<std::string>> labels = {});

  int num_players() const { return static_cast<int>(counts_.size()); }
  int num_strategies(int player) const;
  const std::vector<int>& strategy_counts() const { return counts_; }
  int64_t num_pure_profiles() const { return total_; }

  // flat index of a pure profile, last player fastest
  int64_t flat_index(const std::vector<int>& pure) const;
  std::vector<int> pure_at(int64_t flat) const;
  int64_t stride(int player) const;

  double payoff(int player, const std::vector<int>& pure) const;
  const std::vector<double>& payoff_tensor(int player) const;
  const std::vector<std::string>& labels(int player) const;
  bool has_labels() const { return !labels_.empty(); }

 private:
  std::vector<int> counts_;
  std::vector<int64_t> strides_;
  int64_t total_ = 1;
  std::vector<std::vector<double>> payoffs_;
  std::vector<std::vector<std::string>> labels_;
};

// Point of the product of simplices. Construction clips coordinates in
// [-1e-12, 0) to zero, requires per-player sums within 1e-9 of one, and
// normalizes exactly; anything further off is rejected.
class Profile {
 public:
  static constexpr double kSumTol = 1e-9;
  static constexpr double kNegTol = -1e-12;

  explicit Profile(State coords);
  static Profile barycenter(const Game& g);
  static Profile vertex(const Game& g, const std::vector<int>& pure);

  int num_players() const { return static_cast<int>(coords_.size()); }
  const std::vector<double>& operator[](int player) const { return coords_[static_cast<size_t>(player)]; }
  const State& coords() const { return coords_; }

  bool is_pure(double tol = 1e-9) const;
  bool is_interior(double tol = 1e-6) const;
  // nearest pure profile; meaningful when is_pure()
  std::vector<int> snap_pure() const;
  // max-norm over all coordinates; shapes must match
  double max_distance(const Profile& other) const;

 private:
  State coords_;
};

// Row-major identification of opponent pure-strategy combinations: opponents
// taken in increasing player order, the last one varying fastest.
class OpponentIndexCodec {
 public:
  OpponentIndexCodec(const Game& g, int player);

  int64_t size() const { return total_; }
  const std::vector<int>& opponent_players() const { return players_; }
  const std::vector<int>& opponent_counts() const { return counts_; }

  int64_t encode(const std::vector<int>& multi) const;
  std::vector<int> decode(int64_t flat) const;
  // flat index into the game's payoff tensors for (own strategy, opponents)
  int64_t game_flat(int own_strategy, int64_t opponent_flat) const;

 private:
  const Game* game_;
  int player_;
  std::vector<int> players_;
  std::vector<int> counts_;
  std::vector<int64_t> strides_;
  int64_t total_ = 1;
};

// Odometer over pure profiles; fn(digits, flat) is called with flat running
// 0..total-1 in row-major order (last player fastest).
template <typename Fn>
void for_each_pure_profile(const std::vector<int>& counts, Fn&& fn) {
  const int n = static_cast<int>(counts.size());
  std::vector<int> digits(static_cast<size_t>(n), 0);
  int64_t flat = 0;
  while (true) {
    fn(static_cast<const std::vector<int>&>(digits), flat);
    ++flat;
    int j = n - 1;
    for (; j >= 0; --j) {
      if (++digits[static_cast<size_t>(j)] < counts[static_cast<size_t>(j)]) break;
      digits[static_cast<size_t>(j)] = 0;
    }
    if (j < 0) break;
  }
}

// Same walk with one player's strategy pinned.
template <typename Fn>
void for_each_pure_profile_fixed(const std::vector<int>& counts, int player, int strategy, Fn&& fn) {
  std::vector<int> effective = counts;
  effective[static_cast<size_t>(player)] = 1;
  std::vector<int64_t> strides(counts.size());
  int64_t s = 1;
  for (int j = static_cast<int>(counts.size()) - 1; j >= 0; --j) {
    strides[static_cast<size_t>(j)] = s;
    s *= counts[static_cast<size_t>(j)];
  }
  for_each_pure_profile(effective, [&](const std::vector<int>& digits, int64_t) {
    int64_t flat = 0;
    for (size_t j = 0; j < counts.size(); ++j) {
      int d = (static_cast<int>(j) == player) ? strategy : digits[j];
      flat += strides[j] * d;
    }
    fn(digits, flat);
  });
}

void require_shape(const Game& g, const State& x);

// Expected payoff of the multilinear extension.
double utility(const Game& g, int player, const State& x);
double utility(const Game& g, int player, const Profile& x);

// Payoff to `player` when `player` plays `strategy` as a pure strategy and
// everyone else keeps their mixed strategy.
double utility_replace(const Game& g, int player, int strategy, const State& x);
double utility_replace(const Game& g, int player, int strategy, const Profile& x);

// u_i(e_ia, x_{-i}) for all a at once.
std::vector<double> conditional_payoffs(const Game& g, int player, const State& x);

// One pass over the tensors producing every player's conditional-payoff
// vector; same values as conditional_payoffs up to round-off.
State all_conditional_payoffs(const Game& g, const State& x);

// Every player's payoff when `player` switches to pure `strategy`.
std::vector<double> utilities_with_replacement(const Game& g, int player, int strategy, const State& x);

// (min, max) over the player's payoff tensor
std::pair<double, double> payoff_range(const Game& g, int player);
// max - min over all tensors
double payoff_spread(const Game& g);

}  // namespace incent
