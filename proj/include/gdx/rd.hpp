#pragma once

#include "gdx/brd.hpp"
#include "gdx/game.hpp"
#include "gdx/preference_graph.hpp"

#include <vector>

namespace gdx::rd {

struct Options {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  /// Margin a leading strategy must hold before a play interval is recorded.
  double hysteresis = 1e-6;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 -> heuristic
  long max_steps = 2'000'000;
  /// Time accuracy of the bisected section crossing.
  double event_time_tol = 1e-10;
};

struct PlayInterval {
  PureProfile profile;
  double entry_time = 0.0;
  double exit_time = 0.0;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  double max_error_estimate = 0.0;  // scaled local error, <= 1 on accepted steps
};

enum class RdStatus { ReachedEnd, StepUnderflow, MaxStepsExceeded };

struct Trajectory {
  std::vector<std::pair<double, Eigen::VectorXd>> samples;  // unshifted coords
  std::vector<PlayInterval> sequence_of_play;
  IntegratorStats stats;
  RdStatus status = RdStatus::ReachedEnd;
  PayoffPoint terminal;
};

/// Payoff-space replicator field: coordinate (i, s) is the expected payoff of
/// s against the softmax mixtures of all other players.
Eigen::VectorXd field(const Game& game, const Eigen::VectorXd& w);

/// Per-player softmax of w.
MixedProfile payoff_to_strategy(const Game& game, const Eigen::VectorXd& w);

/// Adaptive Dormand-Prince 5(4) integration of the field from w0.time to
/// t_end. After every accepted step the state is renormalized per player
/// (max coordinate subtracted); the accumulated offsets are re-applied when
/// reporting, so samples and terminal are in unshifted coordinates.
Trajectory simulate(const Game& game, const PayoffPoint& w0, double t_end,
                    const Options& options = {});

struct SectionOutcome {
  enum class Kind { Returned, Deviated, StepUnderflow, Timeout };
  Kind kind;
  PayoffPoint point;       // valid when kind == Returned
  int deviated_step = -1;  // walk index where play left the walk
};

/// Integrates RD through one lap of the walk from a section point and locates
/// the re-entry into the section by bisection. Throws std::invalid_argument
/// when w is not in the section.
SectionOutcome section_return(const Game& game, const PayoffPoint& w,
                              const Walk& walk, const Options& options = {});

struct ProbePoint {
  double scale = 0.0;
  double relative_error = 0.0;  // ||RD_H(scale*w) - M_c*scale*w|| / scale
  bool deviated = false;
  int deviated_step = -1;
};

/// Per-scale error of the RD return map against the walk's linear return map.
/// No judgment, raw numbers; a scale that leaves the walk reports deviated.
/// Integrator tolerances are tightened with the scale so the measurement is
/// not floored by integration error.
std::vector<ProbePoint> asymptotic_linearity_probe(
    const Game& game, const Walk& walk, const PayoffPoint& w_unit,
    const std::vector<double>& scales, const Options& options = {});

}  // namespace gdx::rd
