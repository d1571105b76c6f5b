#include "gdx/game.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gdx {

Game::Game(std::vector<std::vector<std::string>> strategy_labels,
           std::vector<double> payoffs)
    : labels_(std::move(strategy_labels)), payoffs_(std::move(payoffs)) {
  if (labels_.empty()) {
    throw std::invalid_argument("game needs at least one player");
  }
  num_profiles_ = 1;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].size() < 2) {
      throw std::invalid_argument("player " + std::to_string(i) +
                                  " has fewer than 2 strategies");
    }
    offsets_.push_back(payoff_dim_);
    payoff_dim_ += static_cast<int>(labels_[i].size());
    num_profiles_ *= static_cast<int>(labels_[i].size());
  }
  // Row-major profile order, last player's index varies fastest.
  strides_.assign(labels_.size(), 1);
  for (int i = static_cast<int>(labels_.size()) - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * num_strategies(i + 1);
  }
  const std::size_t expected =
      static_cast<std::size_t>(num_profiles_) * labels_.size();
  if (payoffs_.size() != expected) {
    throw std::invalid_argument(
        "payoff tensor has " + std::to_string(payoffs_.size()) +
        " entries, expected " + std::to_string(expected));
  }
  for (double v : payoffs_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("payoff tensor contains a non-finite value");
    }
  }
}

int Game::profile_index(const PureProfile& p) const {
  check_profile(p);
  int index = 0;
  for (int i = 0; i < num_players(); ++i) {
    index += strides_[i] * p.strategies[i];
  }
  return index;
}

PureProfile Game::profile_at(int index) const {
  if (index < 0 || index >= num_profiles_) {
    throw std::invalid_argument("profile index out of range");
  }
  PureProfile p;
  p.strategies.resize(num_players());
  for (int i = 0; i < num_players(); ++i) {
    p.strategies[i] = (index / strides_[i]) % num_strategies(i);
  }
  return p;
}

double Game::deviation_utility(int player, int strategy,
                               const PureProfile& p) const {
  return utility(player, deviation_index(player, strategy, p));
}

int Game::deviation_index(int player, int strategy, const PureProfile& p) const {
  int index = 0;
  for (int i = 0; i < num_players(); ++i) {
    index += strides_[i] * (i == player ? strategy : p.strategies[i]);
  }
  return index;
}

std::string Game::profile_label(const PureProfile& p) const {
  std::ostringstream out;
  out << "(";
  for (int i = 0; i < num_players(); ++i) {
    if (i > 0) out << ",";
    out << labels_[i][p.strategies[i]];
  }
  out << ")";
  return out.str();
}

void Game::check_profile(const PureProfile& p) const {
  if (static_cast<int>(p.strategies.size()) != num_players()) {
    throw std::invalid_argument("profile has wrong number of players");
  }
  for (int i = 0; i < num_players(); ++i) {
    if (p.strategies[i] < 0 || p.strategies[i] >= num_strategies(i)) {
      throw std::invalid_argument("profile strategy out of range for player " +
                                  std::to_string(i));
    }
  }
}

void Game::check_mixed(const MixedProfile& x) const {
  if (static_cast<int>(x.distributions.size()) != num_players()) {
    throw std::invalid_argument("mixed profile has wrong number of players");
  }
  for (int i = 0; i < num_players(); ++i) {
    const auto& d = x.distributions[i];
    if (d.size() != num_strategies(i)) {
      throw std::invalid_argument("mixed profile dimension mismatch at player " +
                                  std::to_string(i));
    }
    double sum = 0.0;
    for (int s = 0; s < d.size(); ++s) {
      if (d[s] < 0.0 || !std::isfinite(d[s])) {
        throw std::invalid_argument("mixed profile has a negative or non-finite entry");
      }
      sum += d[s];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("mixed profile of player " + std::to_string(i) +
                                  " does not sum to 1");
    }
  }
}

void Game::check_payoff_vector(const Eigen::VectorXd& w) const {
  if (w.size() != payoff_dim_) {
    throw std::invalid_argument("payoff vector has dimension " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(payoff_dim_));
  }
}

Eigen::VectorXd expected_utility(const Game& game, const MixedProfile& x) {
  game.check_mixed(x);
  const int n = game.num_players();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  for (int index = 0; index < game.num_profiles(); ++index) {
    const PureProfile p = game.profile_at(index);
    double z = 1.0;
    for (int i = 0; i < n; ++i) {
      z *= x.distributions[i][p.strategies[i]];
    }
    if (z == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      total[i] += z * game.utility(i, index);
    }
  }
  return total;
}

ProfileDistribution product_distribution(const Game& game,
                                         const MixedProfile& x) {
  game.check_mixed(x);
  ProfileDistribution z;
  z.probabilities.resize(game.num_profiles());
  for (int index = 0; index < game.num_profiles(); ++index) {
    const PureProfile p = game.profile_at(index);
    double prob = 1.0;
    for (int i = 0; i < game.num_players(); ++i) {
      prob *= x.distributions[i][p.strategies[i]];
    }
    z.probabilities[index] = prob;
  }
  return z;
}

Eigen::VectorXd counterfactual_rates(const Game& game, const PureProfile& p) {
  game.check_profile(p);
  Eigen::VectorXd rates(game.payoff_dim());
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_strategies(i); ++s) {
      rates[game.coord(i, s)] = game.deviation_utility(i, s, p);
    }
  }
  return rates;
}

std::vector<std::vector<int>> best_response_sets(const Game& game,
                                                 const Eigen::VectorXd& w) {
  game.check_payoff_vector(w);
  std::vector<std::vector<int>> result(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.block_offset(i);
    double best = w[off];
    for (int s = 1; s < game.num_strategies(i); ++s) {
      best = std::max(best, w[off + s]);
    }
    for (int s = 0; s < game.num_strategies(i); ++s) {
      if (w[off + s] == best) result[i].push_back(s);
    }
  }
  return result;
}

SubgameRestriction restrict_subgame(const Game& game,
                                    const std::vector<std::vector<int>>& subsets) {
  if (static_cast<int>(subsets.size()) != game.num_players()) {
    throw std::invalid_argument("subset list has wrong number of players");
  }
  std::vector<std::vector<std::string>> labels(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    if (subsets[i].empty()) {
      throw std::invalid_argument("empty strategy subset for player " +
                                  std::to_string(i));
    }
    for (int s : subsets[i]) {
      if (s < 0 || s >= game.num_strategies(i)) {
        throw std::invalid_argument("subset strategy out of range for player " +
                                    std::to_string(i));
      }
      labels[i].push_back(game.strategy_labels(i)[s]);
    }
  }

  // Enumerate subgame profiles in the restricted row-major order and copy
  // the matching tensor entries.
  std::vector<double> payoffs;
  int sub_profiles = 1;
  for (const auto& s : subsets) sub_profiles *= static_cast<int>(s.size());
  payoffs.reserve(static_cast<std::size_t>(sub_profiles) * game.num_players());

  std::vector<int> cursor(game.num_players(), 0);
  for (int count = 0; count < sub_profiles; ++count) {
    PureProfile p;
    p.strategies.resize(game.num_players());
    for (int i = 0; i < game.num_players(); ++i) {
      p.strategies[i] = subsets[i][cursor[i]];
    }
    const int index = game.profile_index(p);
    for (int i = 0; i < game.num_players(); ++i) {
      payoffs.push_back(game.utility(i, index));
    }
    for (int i = game.num_players() - 1; i >= 0; --i) {
      if (++cursor[i] < static_cast<int>(subsets[i].size())) break;
      cursor[i] = 0;
    }
  }

  return SubgameRestriction{Game(std::move(labels), std::move(payoffs)), subsets};
}

}  // namespace gdx
