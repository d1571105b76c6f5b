#include "gdx/preference_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace gdx {

PreferenceGraph PreferenceGraph::build(const Game& game) {
  PreferenceGraph graph(game);
  graph.out_.resize(game.num_profiles());
  for (int index = 0; index < game.num_profiles(); ++index) {
    const PureProfile p = game.profile_at(index);
    for (int i = 0; i < game.num_players(); ++i) {
      const double own = game.utility(i, index);
      for (int s = 0; s < game.num_strategies(i); ++s) {
        if (s == p.strategies[i]) continue;
        const int to = game.deviation_index(i, s, p);
        const double diff = game.utility(i, to) - own;
        if (diff < 0.0) continue;  // the reverse arc is emitted from `to`
        Arc arc;
        arc.from = index;
        arc.to = to;
        arc.player = i;
        arc.from_strategy = p.strategies[i];
        arc.to_strategy = s;
        arc.weight = diff;
        arc.tie = (diff == 0.0);
        graph.out_[index].push_back(static_cast<int>(graph.arcs_.size()));
        graph.arcs_.push_back(arc);
      }
    }
  }
  return graph;
}

const Arc* PreferenceGraph::find_arc(int from, int to) const {
  for (int id : out_[from]) {
    if (arcs_[id].to == to) return &arcs_[id];
  }
  return nullptr;
}

namespace {

struct TarjanState {
  const PreferenceGraph& graph;
  std::vector<int> index;
  std::vector<int> lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;

  explicit TarjanState(const PreferenceGraph& g)
      : graph(g),
        index(g.num_nodes(), -1),
        lowlink(g.num_nodes(), -1),
        on_stack(g.num_nodes(), false) {}

  void visit(int v) {
    index[v] = lowlink[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int arc_id : graph.arcs_from(v)) {
      const int w = graph.arcs()[arc_id].to;
      if (index[w] == -1) {
        visit(w);
        lowlink[v] = std::min(lowlink[v], lowlink[w]);
      } else if (on_stack[w]) {
        lowlink[v] = std::min(lowlink[v], index[w]);
      }
    }
    if (lowlink[v] == index[v]) {
      std::vector<int> component;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.push_back(w);
      } while (w != v);
      std::sort(component.begin(), component.end());
      components.push_back(std::move(component));
    }
  }
};

}  // namespace

std::vector<std::vector<int>> strongly_connected_components(
    const PreferenceGraph& graph) {
  TarjanState state(graph);
  for (int v = 0; v < graph.num_nodes(); ++v) {
    if (state.index[v] == -1) state.visit(v);
  }
  std::sort(state.components.begin(), state.components.end());
  return state.components;
}

std::vector<SinkComponent> sink_equilibria(const PreferenceGraph& graph) {
  const auto components = strongly_connected_components(graph);
  std::vector<int> component_of(graph.num_nodes(), -1);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (int v : components[c]) component_of[v] = static_cast<int>(c);
  }
  std::vector<SinkComponent> sinks;
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool sink = true;
    for (int v : components[c]) {
      for (int arc_id : graph.arcs_from(v)) {
        if (component_of[graph.arcs()[arc_id].to] != static_cast<int>(c)) {
          sink = false;
          break;
        }
      }
      if (!sink) break;
    }
    if (sink) {
      sinks.push_back(SinkComponent{components[c], components[c].size() == 1});
    }
  }
  return sinks;
}

bool Walk::is_simple() const {
  auto sorted = profiles;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::variant<Walk, WalkError> validate_walk(
    const PreferenceGraph& graph, const std::vector<PureProfile>& profiles) {
  if (profiles.size() < 2) {
    return WalkError{WalkErrorKind::TooShort, 0, "walk needs at least 2 profiles"};
  }
  const Game& game = graph.game();
  Walk walk;
  walk.profiles = profiles;
  const int k_count = static_cast<int>(profiles.size());
  for (int k = 0; k < k_count; ++k) {
    const PureProfile& p = profiles[k];
    const PureProfile& q = profiles[(k + 1) % k_count];
    game.check_profile(p);
    game.check_profile(q);
    int deviators = 0;
    for (int i = 0; i < game.num_players(); ++i) {
      if (p.strategies[i] != q.strategies[i]) ++deviators;
    }
    if (deviators != 1) {
      return WalkError{WalkErrorKind::NonAdjacent, k,
                       "profiles " + game.profile_label(p) + " and " +
                           game.profile_label(q) + " differ in " +
                           std::to_string(deviators) + " players"};
    }
    const int from = game.profile_index(p);
    const int to = game.profile_index(q);
    if (const Arc* arc = graph.find_arc(from, to)) {
      walk.arcs.push_back(*arc);
    } else if (graph.find_arc(to, from) != nullptr) {
      return WalkError{WalkErrorKind::WrongDirection, k,
                       "arc runs " + game.profile_label(q) + " -> " +
                           game.profile_label(p) + ", not the walk direction"};
    } else {
      return WalkError{WalkErrorKind::MissingArc, k,
                       "no arc between " + game.profile_label(p) + " and " +
                           game.profile_label(q)};
    }
  }
  return walk;
}

bool is_sink_cycle(const PreferenceGraph& graph, const Walk& walk) {
  if (!walk.is_simple()) {
    throw std::invalid_argument("is_sink_cycle requires a simple cycle");
  }
  const Game& game = graph.game();
  for (int k = 0; k < walk.length(); ++k) {
    const int node = game.profile_index(walk.profiles[k]);
    const auto& out = graph.arcs_from(node);
    if (out.size() != 1) return false;
    const Arc& only = graph.arcs()[out[0]];
    if (only.to != walk.arcs[k].to || only.weight <= 0.0) return false;
  }
  return true;
}

CycleEnumerator::CycleEnumerator(const PreferenceGraph& graph, int max_len)
    : graph_(&graph), max_len_(max_len) {
  if (max_len < 4) {
    throw std::invalid_argument("cycle enumeration needs max_len >= 4");
  }
  on_path_.assign(graph.num_nodes(), false);
}

// Bounded DFS rooted at each node in increasing index order; only nodes with
// a larger index may join the path, so every cycle is produced exactly once,
// rotated to start at its smallest profile index.
bool CycleEnumerator::advance() {
  const int n = graph_->num_nodes();
  while (true) {
    if (stack_.empty()) {
      if (start_ >= n) return false;
      std::fill(on_path_.begin(), on_path_.end(), false);
      stack_.push_back(Frame{start_, 0});
      on_path_[start_] = true;
      ++start_;
      continue;
    }
    Frame& frame = stack_.back();
    const auto& out = graph_->arcs_from(frame.node);
    if (frame.next_arc >= out.size()) {
      on_path_[frame.node] = false;
      stack_.pop_back();
      continue;
    }
    const Arc& arc = graph_->arcs()[out[frame.next_arc++]];
    const int root = stack_.front().node;
    if (arc.to == root) {
      if (static_cast<int>(stack_.size()) >= 4) return true;
      continue;
    }
    if (arc.to > root && !on_path_[arc.to] &&
        static_cast<int>(stack_.size()) < max_len_) {
      stack_.push_back(Frame{arc.to, 0});
      on_path_[arc.to] = true;
    }
  }
}

Walk CycleEnumerator::materialize() const {
  const Game& game = graph_->game();
  Walk walk;
  const int k_count = static_cast<int>(stack_.size());
  for (const Frame& f : stack_) {
    walk.profiles.push_back(game.profile_at(f.node));
  }
  for (int k = 0; k < k_count; ++k) {
    const Arc* arc =
        graph_->find_arc(stack_[k].node, stack_[(k + 1) % k_count].node);
    walk.arcs.push_back(*arc);
  }
  return walk;
}

std::optional<Walk> CycleEnumerator::next() {
  if (!advance()) return std::nullopt;
  return materialize();
}

std::vector<Walk> CycleEnumerator::all() {
  std::vector<Walk> walks;
  while (auto walk = next()) {
    walks.push_back(std::move(*walk));
  }
  return walks;
}

}  // namespace gdx
