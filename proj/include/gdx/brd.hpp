#pragma once

#include "gdx/game.hpp"
#include "gdx/preference_graph.hpp"

#include <optional>
#include <vector>

namespace gdx {

/// A point in payoff space: one cumulative score per (player, strategy).
struct PayoffPoint {
  Eigen::VectorXd scores;
  double time = 0.0;
};

struct SwitchEvent {
  double time = 0.0;
  int player = -1;
  int from_strategy = -1;
  int to_strategy = -1;
  PureProfile profile_before;
  PureProfile profile_after;
};

namespace brd {

struct Options {
  /// Two crossing times within tie_tol*(1+|t|) of each other stop the run.
  double tie_tol = 1e-9;
  /// Strict margin required of non-argmax strategies at a section point.
  double section_margin = 1e-12;
};

enum class TrajectoryStatus { Completed, ReachedPNE, HitTie, AmbiguousStart };

struct Trajectory {
  PayoffPoint start;
  std::vector<SwitchEvent> events;
  std::vector<PureProfile> sequence_of_play;  // one more entry than events
  PayoffPoint terminal;
  TrajectoryStatus status = TrajectoryStatus::Completed;
};

struct SwitchOutcome {
  enum class Kind { Switch, ReachedPNE, HitTie, AmbiguousArgmax };
  Kind kind;
  SwitchEvent event;  // valid when kind == Switch
  PayoffPoint after;  // state at the switch, valid when kind == Switch
};

/// The argmax profile of w if it is unique within tie tolerance.
std::optional<PureProfile> unique_argmax(const Game& game,
                                         const Eigen::VectorXd& w,
                                         double tie_tol = 1e-9);

/// Closed-form first crossing from `w`, whose argmax must be unique.
SwitchOutcome next_switch(const Game& game, const PayoffPoint& w,
                          const Options& options = {});

/// First crossing while profile `p` is played; entry ties with lower-rate
/// strategies are allowed (this is the state right after a switch).
SwitchOutcome next_switch_from(const Game& game, const PayoffPoint& w,
                               const PureProfile& p,
                               const Options& options = {});

/// Event-driven run: advances w += rates * tau switch by switch.
Trajectory simulate(const Game& game, const PayoffPoint& w0, int max_switches,
                    const Options& options = {});

/// The default switch budget used by the analysis pipeline: 10 * K * profiles.
int default_max_switches(const Game& game, int walk_length);

/// Membership test for the walk's section H: the first and last profiles are
/// both argmaxes of w (tied within tie_tol) and every other strategy is
/// strictly lower by section_margin.
bool in_section(const Game& game, const Walk& walk, const Eigen::VectorXd& w,
                const Options& options = {});

struct SectionOutcome {
  enum class Kind { Returned, Deviated, ReachedPNE, HitTie };
  Kind kind;
  PayoffPoint point;       // valid when kind == Returned
  int deviated_step = -1;  // valid when kind == Deviated
};

/// Follows one lap of the walk from a section point; returns the next
/// intersection with the section. Throws std::invalid_argument when w is not
/// in the section.
SectionOutcome section_return(const Game& game, const PayoffPoint& w,
                              const Walk& walk, const Options& options = {});

/// Smallest suffix period repeated at least min_reps times, if any.
std::optional<std::vector<PureProfile>> detect_period(
    const std::vector<PureProfile>& seq, int min_reps);

}  // namespace brd
}  // namespace gdx
