#pragma once

#include "gdx/game.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gdx {

/// Unilateral deviation from one pure profile to a weakly better one.
struct Arc {
  int from = -1;  // profile indices
  int to = -1;
  int player = -1;
  int from_strategy = -1;
  int to_strategy = -1;
  double weight = 0.0;  // u_player(to) - u_player(from), >= 0
  bool tie = false;     // weight 0; emitted in both directions
};

/// Directed graph on pure profiles whose arcs are weakly improving
/// unilateral deviations. Immutable after build.
class PreferenceGraph {
 public:
  static PreferenceGraph build(const Game& game);

  const Game& game() const { return *game_; }
  int num_nodes() const { return game_->num_profiles(); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  /// Arc ids leaving `profile_index`, in deterministic (player, strategy) order.
  const std::vector<int>& arcs_from(int profile_index) const {
    return out_[profile_index];
  }
  const Arc* find_arc(int from, int to) const;
  int out_degree(int profile_index) const {
    return static_cast<int>(out_[profile_index].size());
  }

 private:
  explicit PreferenceGraph(const Game& game) : game_(&game) {}

  const Game* game_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
};

inline PreferenceGraph build_graph(const Game& game) {
  return PreferenceGraph::build(game);
}

/// One sink strongly connected component.
struct SinkComponent {
  std::vector<int> profiles;  // sorted profile indices
  bool is_singleton = false;
};

/// All SCCs with no outgoing arc. Tie arcs are bidirectional by construction,
/// so every arc leaving an SCC has positive weight.
std::vector<SinkComponent> sink_equilibria(const PreferenceGraph& graph);

/// SCC partition of the graph (helper shared with the sink computation);
/// each component is a sorted list of profile indices.
std::vector<std::vector<int>> strongly_connected_components(
    const PreferenceGraph& graph);

/// Periodic walk: profiles p_1..p_K with arcs a_i from p_i to p_{i+1 mod K}.
struct Walk {
  std::vector<PureProfile> profiles;
  std::vector<Arc> arcs;

  int length() const { return static_cast<int>(profiles.size()); }
  bool is_simple() const;  // no repeated profiles
};

enum class WalkErrorKind { TooShort, NonAdjacent, MissingArc, WrongDirection };

struct WalkError {
  WalkErrorKind kind;
  int index;  // first offending transition
  std::string message;
};

/// Resolves an ordered profile list (wrapping) against the graph.
std::variant<Walk, WalkError> validate_walk(
    const PreferenceGraph& graph, const std::vector<PureProfile>& profiles);

/// True iff every node on the cycle has exactly one outgoing arc, that arc is
/// the cycle arc, and its weight is positive. Throws std::invalid_argument on
/// a non-simple cycle.
bool is_sink_cycle(const PreferenceGraph& graph, const Walk& walk);

/// Enumerates simple directed cycles of length 4..max_len, each exactly once,
/// rotated to start at its smallest profile index. Single consumer.
class CycleEnumerator {
 public:
  CycleEnumerator(const PreferenceGraph& graph, int max_len);

  std::optional<Walk> next();

  /// Drains the enumerator.
  std::vector<Walk> all();

 private:
  struct Frame {
    int node;
    std::size_t next_arc;
  };

  bool advance();
  Walk materialize() const;

  const PreferenceGraph* graph_;
  int max_len_;
  int start_ = 0;
  std::vector<Frame> stack_;
  std::vector<bool> on_path_;
};

}  // namespace gdx
