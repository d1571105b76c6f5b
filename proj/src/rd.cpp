#include "gdx/rd.hpp"

#include "gdx/stability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gdx::rd {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,    0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695,
                           393.0 / 640,       -92097.0 / 339200,
                           187.0 / 2100,      1.0 / 40};

struct StepResult {
  Eigen::VectorXd y;     // 5th-order solution
  double error = 0.0;    // scaled error estimate
};

StepResult dopri_step(const Game& game, const Eigen::VectorXd& y, double h,
                      const Options& options) {
  const int dim = static_cast<int>(y.size());
  Eigen::MatrixXd k(dim, 7);
  k.col(0) = field(game, y);
  for (int stage = 1; stage < 7; ++stage) {
    Eigen::VectorXd arg = y;
    for (int j = 0; j < stage; ++j) {
      if (kA[stage][j] != 0.0) arg += (h * kA[stage][j]) * k.col(j);
    }
    k.col(stage) = field(game, arg);
  }
  StepResult result;
  result.y = y;
  Eigen::VectorXd err = Eigen::VectorXd::Zero(dim);
  for (int stage = 0; stage < 7; ++stage) {
    if (kB5[stage] != 0.0) result.y += (h * kB5[stage]) * k.col(stage);
    err += (h * (kB5[stage] - kB4[stage])) * k.col(stage);
  }
  double sum = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double sc = options.abs_tol +
                      options.rel_tol * std::max(std::abs(y[i]),
                                                 std::abs(result.y[i]));
    const double q = err[i] / sc;
    sum += q * q;
  }
  result.error = std::sqrt(sum / dim);
  return result;
}

double initial_step_size(const Game& game, const Eigen::VectorXd& y,
                         double span, const Options& options) {
  if (options.initial_step > 0.0) return options.initial_step;
  const double rate = field(game, y).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  double h = rate > 0.0 ? 0.01 * scale / rate : 0.01 * span;
  return std::min({h, span, options.max_step});
}

// Per-player argmax with the hysteresis margin; nullopt while any player is
// too close to indifference.
std::optional<PureProfile> confirmed_profile(const Game& game,
                                             const Eigen::VectorXd& y,
                                             double delta) {
  PureProfile p;
  p.strategies.resize(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.block_offset(i);
    int best = 0;
    for (int s = 1; s < game.num_strategies(i); ++s) {
      if (y[off + s] > y[off + best]) best = s;
    }
    for (int s = 0; s < game.num_strategies(i); ++s) {
      if (s != best && y[off + best] - y[off + s] <= delta) return std::nullopt;
    }
    p.strategies[i] = best;
  }
  return p;
}

// Integration state with per-player renormalization offsets.
struct RenormalizedState {
  Eigen::VectorXd y;                 // shifted coordinates
  std::vector<double> offsets;       // per player
  double t = 0.0;

  void renormalize(const Game& game) {
    for (int i = 0; i < game.num_players(); ++i) {
      const int off = game.block_offset(i);
      double top = y[off];
      for (int s = 1; s < game.num_strategies(i); ++s) {
        top = std::max(top, y[off + s]);
      }
      for (int s = 0; s < game.num_strategies(i); ++s) y[off + s] -= top;
      offsets[i] += top;
    }
  }

  Eigen::VectorXd unshifted(const Game& game) const {
    Eigen::VectorXd w = y;
    for (int i = 0; i < game.num_players(); ++i) {
      const int off = game.block_offset(i);
      for (int s = 0; s < game.num_strategies(i); ++s) w[off + s] += offsets[i];
    }
    return w;
  }
};

}  // namespace

Eigen::VectorXd field(const Game& game, const Eigen::VectorXd& w) {
  game.check_payoff_vector(w);
  const int n = game.num_players();

  // Per-player softmax with max subtraction.
  std::vector<Eigen::VectorXd> x(n);
  for (int i = 0; i < n; ++i) {
    const int off = game.block_offset(i);
    const int count = game.num_strategies(i);
    Eigen::VectorXd block = w.segment(off, count);
    block.array() -= block.maxCoeff();
    Eigen::VectorXd e = block.array().exp();
    x[i] = e / e.sum();
  }

  Eigen::VectorXd result = Eigen::VectorXd::Zero(game.payoff_dim());
  std::vector<double> prefix(n + 1), suffix(n + 1);
  for (int index = 0; index < game.num_profiles(); ++index) {
    const PureProfile p = game.profile_at(index);
    prefix[0] = 1.0;
    for (int i = 0; i < n; ++i) {
      prefix[i + 1] = prefix[i] * x[i][p.strategies[i]];
    }
    suffix[n] = 1.0;
    for (int i = n - 1; i >= 0; --i) {
      suffix[i] = suffix[i + 1] * x[i][p.strategies[i]];
    }
    for (int i = 0; i < n; ++i) {
      const double opponents = prefix[i] * suffix[i + 1];
      if (opponents == 0.0) continue;
      result[game.coord(i, p.strategies[i])] +=
          opponents * game.utility(i, index);
    }
  }
  return result;
}

MixedProfile payoff_to_strategy(const Game& game, const Eigen::VectorXd& w) {
  game.check_payoff_vector(w);
  MixedProfile x;
  x.distributions.resize(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.block_offset(i);
    Eigen::VectorXd block = w.segment(off, game.num_strategies(i));
    block.array() -= block.maxCoeff();
    Eigen::VectorXd e = block.array().exp();
    x.distributions[i] = e / e.sum();
  }
  return x;
}

Trajectory simulate(const Game& game, const PayoffPoint& w0, double t_end,
                    const Options& options) {
  game.check_payoff_vector(w0.scores);
  if (!(t_end > w0.time)) {
    throw std::invalid_argument("t_end must exceed the start time");
  }

  Trajectory trajectory;
  RenormalizedState state{w0.scores, std::vector<double>(game.num_players(), 0.0),
                          w0.time};
  trajectory.samples.emplace_back(state.t, w0.scores);

  std::optional<PureProfile> open_profile;
  double open_entry = w0.time;
  auto track_play = [&](double t, const Eigen::VectorXd& y) {
    const auto profile = confirmed_profile(game, y, options.hysteresis);
    if (!profile) return;
    if (!open_profile) {
      open_profile = *profile;
      open_entry = t;
    } else if (!(*profile == *open_profile)) {
      trajectory.sequence_of_play.push_back(
          PlayInterval{*open_profile, open_entry, t});
      open_profile = *profile;
      open_entry = t;
    }
  };
  track_play(state.t, state.y);

  double h = initial_step_size(game, state.y, t_end - state.t, options);
  while (state.t < t_end) {
    if (trajectory.stats.accepted + trajectory.stats.rejected >=
        options.max_steps) {
      trajectory.status = RdStatus::MaxStepsExceeded;
      break;
    }
    h = std::min({h, options.max_step, t_end - state.t});
    if (h < 1e-14 * std::max(1.0, std::abs(state.t))) {
      trajectory.status = RdStatus::StepUnderflow;
      break;
    }
    const StepResult step = dopri_step(game, state.y, h, options);
    const double shrink = 0.9 * std::pow(std::max(step.error, 1e-10), -0.2);
    if (step.error > 1.0) {
      ++trajectory.stats.rejected;
      h *= std::max(0.2, shrink);
      continue;
    }
    ++trajectory.stats.accepted;
    trajectory.stats.max_error_estimate =
        std::max(trajectory.stats.max_error_estimate, step.error);
    state.t += h;
    state.y = step.y;
    state.renormalize(game);
    trajectory.samples.emplace_back(state.t, state.unshifted(game));
    track_play(state.t, state.y);
    h *= std::min(5.0, std::max(0.2, shrink));
  }

  if (open_profile) {
    trajectory.sequence_of_play.push_back(
        PlayInterval{*open_profile, open_entry, state.t});
  }
  trajectory.terminal = PayoffPoint{state.unshifted(game), state.t};
  return trajectory;
}

SectionOutcome section_return(const Game& game, const PayoffPoint& w,
                              const Walk& walk, const Options& options) {
  if (!brd::in_section(game, walk, w.scores)) {
    throw std::invalid_argument("point is not in the walk's section");
  }
  const int k_count = walk.length();
  const Arc& closing = walk.arcs.back();
  const int g_new = game.coord(closing.player, closing.to_strategy);
  const int g_old = game.coord(closing.player, closing.from_strategy);

  // BRD dwell times from the same point size the step cap and the time
  // budget; if BRD itself leaves the walk we fall back to generous defaults.
  double time_cap = 0.0;
  double step_cap = options.max_step;
  {
    brd::Options brd_options;
    PayoffPoint probe = w;
    PureProfile p = walk.profiles.front();
    double min_dwell = std::numeric_limits<double>::infinity();
    bool followed = true;
    for (int k = 0; k < k_count; ++k) {
      const auto outcome = brd::next_switch_from(game, probe, p, brd_options);
      if (outcome.kind != brd::SwitchOutcome::Kind::Switch ||
          !(outcome.event.profile_after == walk.profiles[(k + 1) % k_count])) {
        followed = false;
        break;
      }
      min_dwell = std::min(min_dwell, outcome.after.time - probe.time);
      probe = outcome.after;
      p = outcome.event.profile_after;
    }
    if (followed) {
      time_cap = w.time + 20.0 * (probe.time - w.time);
      step_cap = std::min(step_cap, min_dwell / 8.0);
    } else {
      const double scale = std::max(1.0, w.scores.cwiseAbs().maxCoeff());
      time_cap = w.time + 1e4 * scale;
    }
  }

  Options local = options;
  local.max_step = step_cap;

  RenormalizedState state{w.scores, std::vector<double>(game.num_players(), 0.0),
                          w.time};
  int expected = 0;  // index into the walk of the profile being played
  long steps = 0;
  double h = initial_step_size(game, state.y, time_cap - state.t, local);

  while (true) {
    if (++steps > local.max_steps) {
      return SectionOutcome{SectionOutcome::Kind::StepUnderflow, {}, expected};
    }
    if (state.t >= time_cap) {
      return SectionOutcome{SectionOutcome::Kind::Timeout, {}, expected};
    }
    h = std::min({h, local.max_step, time_cap - state.t});
    if (h < 1e-14 * std::max(1.0, std::abs(state.t))) {
      return SectionOutcome{SectionOutcome::Kind::StepUnderflow, {}, expected};
    }
    const StepResult step = dopri_step(game, state.y, h, local);
    const double shrink = 0.9 * std::pow(std::max(step.error, 1e-10), -0.2);
    if (step.error > 1.0) {
      h *= std::max(0.2, shrink);
      continue;
    }

    if (expected == k_count - 1 && step.y[g_new] - step.y[g_old] >= 0.0) {
      // Crossing within this step: bisect on a single fixed-size stage.
      double lo = 0.0, hi = h;
      Eigen::VectorXd y_cross = step.y;
      while (hi - lo > options.event_time_tol * std::max(1.0, state.t)) {
        const double mid = 0.5 * (lo + hi);
        const StepResult trial = dopri_step(game, state.y, mid, local);
        if (trial.y[g_new] - trial.y[g_old] >= 0.0) {
          hi = mid;
          y_cross = trial.y;
        } else {
          lo = mid;
        }
      }
      RenormalizedState crossing{y_cross, state.offsets, state.t + hi};
      return SectionOutcome{
          SectionOutcome::Kind::Returned,
          PayoffPoint{crossing.unshifted(game), crossing.t},
          -1};
    }

    state.t += h;
    state.y = step.y;
    state.renormalize(game);
    h *= std::min(5.0, std::max(0.2, shrink));

    const auto profile = confirmed_profile(game, state.y, local.hysteresis);
    if (profile) {
      if (*profile == walk.profiles[expected]) {
        // still in the expected segment
      } else if (*profile == walk.profiles[(expected + 1) % k_count] &&
                 expected + 1 < k_count) {
        ++expected;
      } else {
        return SectionOutcome{SectionOutcome::Kind::Deviated, {}, expected};
      }
    }
  }
}

std::vector<ProbePoint> asymptotic_linearity_probe(
    const Game& game, const Walk& walk, const PayoffPoint& w_unit,
    const std::vector<double>& scales, const Options& options) {
  if (!brd::in_section(game, walk, w_unit.scores)) {
    throw std::invalid_argument("probe point is not in the walk's section");
  }
  const PoincareMatrix pm = poincare_matrix(game, walk);

  std::vector<ProbePoint> results;
  for (double scale : scales) {
    if (!(scale > 0.0)) {
      throw std::invalid_argument("probe scales must be positive");
    }
    ProbePoint point;
    point.scale = scale;

    Options local = options;
    local.rel_tol = std::min(options.rel_tol, 1e-9 / scale);
    local.abs_tol = std::min(options.abs_tol, 1e-11);

    const PayoffPoint start{scale * w_unit.scores, 0.0};
    const SectionOutcome outcome = section_return(game, start, walk, local);
    if (outcome.kind != SectionOutcome::Kind::Returned) {
      point.deviated = true;
      point.deviated_step = outcome.deviated_step;
    } else {
      const Eigen::VectorXd predicted = pm.matrix * start.scores;
      point.relative_error = (outcome.point.scores - predicted).norm() / scale;
    }
    results.push_back(point);
  }
  return results;
}

}  // namespace gdx::rd
