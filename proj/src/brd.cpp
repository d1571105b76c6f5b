#include "gdx/brd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gdx::brd {

std::optional<PureProfile> unique_argmax(const Game& game,
                                         const Eigen::VectorXd& w,
                                         double tie_tol) {
  game.check_payoff_vector(w);
  PureProfile p;
  p.strategies.resize(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.block_offset(i);
    int best = 0;
    for (int s = 1; s < game.num_strategies(i); ++s) {
      if (w[off + s] > w[off + best]) best = s;
    }
    const double top = w[off + best];
    for (int s = 0; s < game.num_strategies(i); ++s) {
      if (s == best) continue;
      if (top - w[off + s] <= tie_tol * (1.0 + std::abs(top))) {
        return std::nullopt;
      }
    }
    p.strategies[i] = best;
  }
  return p;
}

SwitchOutcome next_switch_from(const Game& game, const PayoffPoint& w,
                               const PureProfile& p, const Options& options) {
  game.check_payoff_vector(w.scores);
  game.check_profile(p);
  const Eigen::VectorXd rates = counterfactual_rates(game, p);

  // Minimal crossing time over all strategies gaining on the played one.
  double best_tau = std::numeric_limits<double>::infinity();
  double runner_up = std::numeric_limits<double>::infinity();
  int best_player = -1;
  int best_strategy = -1;
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.block_offset(i);
    const int own = p.strategies[i];
    for (int s = 0; s < game.num_strategies(i); ++s) {
      if (s == own) continue;
      const double rate_gain = rates[off + s] - rates[off + own];
      if (rate_gain <= 0.0) continue;
      const double tau = (w.scores[off + own] - w.scores[off + s]) / rate_gain;
      if (tau < best_tau) {
        runner_up = best_tau;
        best_tau = tau;
        best_player = i;
        best_strategy = s;
      } else if (tau < runner_up) {
        runner_up = tau;
      }
    }
  }

  SwitchOutcome outcome;
  if (best_player < 0) {
    outcome.kind = SwitchOutcome::Kind::ReachedPNE;
    return outcome;
  }
  if (best_tau <= 0.0 ||
      runner_up - best_tau <= options.tie_tol * (1.0 + std::abs(best_tau))) {
    outcome.kind = SwitchOutcome::Kind::HitTie;
    return outcome;
  }

  outcome.kind = SwitchOutcome::Kind::Switch;
  outcome.event.time = w.time + best_tau;
  outcome.event.player = best_player;
  outcome.event.from_strategy = p.strategies[best_player];
  outcome.event.to_strategy = best_strategy;
  outcome.event.profile_before = p;
  outcome.event.profile_after = p;
  outcome.event.profile_after.strategies[best_player] = best_strategy;
  outcome.after.scores = w.scores + best_tau * rates;
  outcome.after.time = w.time + best_tau;
  return outcome;
}

SwitchOutcome next_switch(const Game& game, const PayoffPoint& w,
                          const Options& options) {
  const auto p = unique_argmax(game, w.scores, options.tie_tol);
  if (!p) {
    SwitchOutcome outcome;
    outcome.kind = SwitchOutcome::Kind::AmbiguousArgmax;
    return outcome;
  }
  return next_switch_from(game, w, *p, options);
}

Trajectory simulate(const Game& game, const PayoffPoint& w0, int max_switches,
                    const Options& options) {
  Trajectory trajectory;
  trajectory.start = w0;
  trajectory.terminal = w0;

  const auto start_profile = unique_argmax(game, w0.scores, options.tie_tol);
  if (!start_profile) {
    trajectory.status = TrajectoryStatus::AmbiguousStart;
    return trajectory;
  }
  PureProfile p = *start_profile;
  trajectory.sequence_of_play.push_back(p);

  PayoffPoint w = w0;
  for (int k = 0; k < max_switches; ++k) {
    const SwitchOutcome outcome = next_switch_from(game, w, p, options);
    if (outcome.kind == SwitchOutcome::Kind::ReachedPNE) {
      trajectory.status = TrajectoryStatus::ReachedPNE;
      trajectory.terminal = w;
      return trajectory;
    }
    if (outcome.kind == SwitchOutcome::Kind::HitTie) {
      trajectory.status = TrajectoryStatus::HitTie;
      trajectory.terminal = w;
      return trajectory;
    }
    w = outcome.after;
    p = outcome.event.profile_after;
    trajectory.events.push_back(outcome.event);
    trajectory.sequence_of_play.push_back(p);
  }
  trajectory.status = TrajectoryStatus::Completed;
  trajectory.terminal = w;
  return trajectory;
}

int default_max_switches(const Game& game, int walk_length) {
  return 10 * walk_length * game.num_profiles();
}

bool in_section(const Game& game, const Walk& walk, const Eigen::VectorXd& w,
                const Options& options) {
  game.check_payoff_vector(w);
  const PureProfile& first = walk.profiles.front();
  const PureProfile& last = walk.profiles.back();
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.block_offset(i);
    double top = w[off];
    for (int s = 1; s < game.num_strategies(i); ++s) {
      top = std::max(top, w[off + s]);
    }
    const double tie_band = options.tie_tol * (1.0 + std::abs(top));
    for (int s = 0; s < game.num_strategies(i); ++s) {
      const bool in_profiles =
          s == first.strategies[i] || s == last.strategies[i];
      if (in_profiles) {
        if (top - w[off + s] > tie_band) return false;
      } else {
        if (w[off + s] > top - options.section_margin) return false;
      }
    }
  }
  return true;
}

SectionOutcome section_return(const Game& game, const PayoffPoint& w,
                              const Walk& walk, const Options& options) {
  if (!in_section(game, walk, w.scores, options)) {
    throw std::invalid_argument("point is not in the walk's section");
  }
  PayoffPoint state = w;
  PureProfile p = walk.profiles.front();
  const int k_count = walk.length();
  for (int k = 0; k < k_count; ++k) {
    const SwitchOutcome outcome = next_switch_from(game, state, p, options);
    if (outcome.kind == SwitchOutcome::Kind::ReachedPNE) {
      return SectionOutcome{SectionOutcome::Kind::ReachedPNE, {}, k};
    }
    if (outcome.kind == SwitchOutcome::Kind::HitTie) {
      return SectionOutcome{SectionOutcome::Kind::HitTie, {}, k};
    }
    const PureProfile& expected = walk.profiles[(k + 1) % k_count];
    if (outcome.event.profile_after != expected) {
      return SectionOutcome{SectionOutcome::Kind::Deviated, {}, k};
    }
    state = outcome.after;
    p = outcome.event.profile_after;
  }
  return SectionOutcome{SectionOutcome::Kind::Returned, state, -1};
}

std::optional<std::vector<PureProfile>> detect_period(
    const std::vector<PureProfile>& seq, int min_reps) {
  if (min_reps < 2) {
    throw std::invalid_argument("detect_period needs min_reps >= 2");
  }
  const int n = static_cast<int>(seq.size());
  for (int period = 1; period * min_reps <= n; ++period) {
    bool ok = true;
    for (int j = 0; j < period * (min_reps - 1); ++j) {
      if (!(seq[n - 1 - j] == seq[n - 1 - j - period])) {
        ok = false;
        break;
      }
    }
    if (ok) {
      return std::vector<PureProfile>(seq.end() - period, seq.end());
    }
  }
  return std::nullopt;
}

}  // namespace gdx::brd
