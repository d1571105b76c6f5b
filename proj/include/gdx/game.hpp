#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gdx {

/// One strategy index per player.
struct PureProfile {
  std::vector<int> strategies;

  bool operator==(const PureProfile&) const = default;
  auto operator<=>(const PureProfile&) const = default;
};

/// One probability vector per player.
struct MixedProfile {
  std::vector<Eigen::VectorXd> distributions;
};

/// Probability per pure profile, indexed in the game's profile order.
struct ProfileDistribution {
  Eigen::VectorXd probabilities;
};

/// Finite N-player normal-form game with a dense payoff tensor.
///
/// Profiles are indexed row-major with the last player's strategy varying
/// fastest; that order is also the on-disk layout. Utilities are doubles and
/// immutable after construction.
class Game {
 public:
  /// `payoffs` holds num_profiles() * N finite reals, profile-major: the N
  /// utilities of profile 0, then profile 1, ...
  Game(std::vector<std::vector<std::string>> strategy_labels,
       std::vector<double> payoffs);

  int num_players() const { return static_cast<int>(labels_.size()); }
  int num_strategies(int player) const {
    return static_cast<int>(labels_[player].size());
  }
  const std::vector<std::string>& strategy_labels(int player) const {
    return labels_[player];
  }
  int num_profiles() const { return num_profiles_; }

  /// Dimension of payoff space: sum of all players' strategy counts.
  int payoff_dim() const { return payoff_dim_; }
  /// Offset of `player`'s block within a payoff-space vector.
  int block_offset(int player) const { return offsets_[player]; }
  /// Flat payoff-space index of (player, strategy).
  int coord(int player, int strategy) const {
    return offsets_[player] + strategy;
  }

  int profile_index(const PureProfile& p) const;
  PureProfile profile_at(int index) const;

  double utility(int player, int profile_index) const {
    return payoffs_[static_cast<std::size_t>(profile_index) * num_players() +
                    player];
  }
  double utility(int player, const PureProfile& p) const {
    return utility(player, profile_index(p));
  }
  /// u_i(s; p_{-i}): utility of `player` after unilaterally deviating to
  /// `strategy` while everyone else plays as in `p`.
  double deviation_utility(int player, int strategy, const PureProfile& p) const;

  /// Index of the profile reached from `p` when `player` deviates to `strategy`.
  int deviation_index(int player, int strategy, const PureProfile& p) const;

  const std::vector<double>& payoff_tensor() const { return payoffs_; }

  std::string profile_label(const PureProfile& p) const;

  /// Throws std::invalid_argument unless `p` is a valid profile of this game.
  void check_profile(const PureProfile& p) const;
  /// Throws std::invalid_argument unless `x` matches dimensions and each
  /// distribution is nonnegative and sums to 1 within 1e-12.
  void check_mixed(const MixedProfile& x) const;
  /// Throws std::invalid_argument unless `w` has payoff_dim() entries.
  void check_payoff_vector(const Eigen::VectorXd& w) const;

 private:
  std::vector<std::vector<std::string>> labels_;
  std::vector<double> payoffs_;
  std::vector<int> strides_;  // profile-index stride per player
  std::vector<int> offsets_;  // payoff-space block offsets
  int num_profiles_ = 0;
  int payoff_dim_ = 0;
};

/// Expected utility of every player under the product distribution of `x`.
Eigen::VectorXd expected_utility(const Game& game, const MixedProfile& x);

/// z_p = prod_i x^i_{p_i} for every pure profile p.
ProfileDistribution product_distribution(const Game& game, const MixedProfile& x);

/// Payoff accrual rates while `p` is played: coordinate (i, s) holds
/// u_i(s; p_{-i}). Shaped like a payoff-space vector.
Eigen::VectorXd counterfactual_rates(const Game& game, const PureProfile& p);

/// Per-player argmax sets of a payoff-space vector, exact comparison.
std::vector<std::vector<int>> best_response_sets(const Game& game,
                                                 const Eigen::VectorXd& w);

struct SubgameRestriction {
  Game game;
  /// index_maps[i][k] = full-game strategy index of subgame strategy k.
  std::vector<std::vector<int>> index_maps;
};

/// Restricts each player to a nonempty subset of strategies (given as
/// full-game indices, kept in the given order).
SubgameRestriction restrict_subgame(const Game& game,
                                    const std::vector<std::vector<int>>& subsets);

}  // namespace gdx
