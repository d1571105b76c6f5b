#pragma once

#include "gdx/brd.hpp"
#include "gdx/game.hpp"
#include "gdx/preference_graph.hpp"
#include "gdx/rd.hpp"
#include "gdx/stability.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gdx {

struct AnalysisOptions {
  int max_cycle_len = 6;
  bool simulate = false;
  std::vector<double> scales = {10.0, 100.0, 1000.0};
  /// 0 -> GDX_THREADS env var, else 1.
  int threads = 0;
};

struct WalkReport {
  std::vector<PureProfile> profiles;
  StabilityVerdict verdict;
  bool is_sink = false;
  bool attractor_claim = false;
  std::optional<FourCycleReport> four_cycle;
  /// Simulation confirmations, present when AnalysisOptions::simulate is set
  /// and the verdict is Stable.
  std::optional<bool> brd_confirmed;
  std::vector<rd::ProbePoint> rd_probe;
  std::string error;  // per-stage failure, empty when clean
};

struct AnalysisReport {
  std::vector<int> dims;
  int num_profiles = 0;
  int num_arcs = 0;
  std::vector<SinkComponent> sinks;
  std::vector<WalkReport> walks;
  struct Timings {
    double graph_seconds = 0.0;
    double walks_seconds = 0.0;
    double total_seconds = 0.0;
  } timings;
};

/// Builds the graph, lists sink equilibria, tests every simple cycle up to
/// max_cycle_len, certifies cyclic sinks, and (optionally) confirms Stable
/// verdicts by BRD section return and an RD linearity probe.
AnalysisReport run_analysis(const Game& game, const AnalysisOptions& options = {});

std::string report_to_text(const AnalysisReport& report, const Game& game);
/// Machine format: byte-identical across runs except the "timings" object.
nlohmann::json report_to_json(const AnalysisReport& report, const Game& game);

/// DOT with weight-labeled arcs; sink-component nodes drawn bold.
std::string export_dot(const PreferenceGraph& graph);

/// One row per switch: time, player, from, to, then the w coordinates.
std::string export_csv(const Game& game, const brd::Trajectory& trajectory);
/// One row per sample: time, w coordinates, softmax coordinates.
std::string export_csv(const Game& game, const rd::Trajectory& trajectory);
/// One row per play interval: profile, entry, exit.
std::string export_play_csv(const Game& game, const rd::Trajectory& trajectory);

/// Worker cap: explicit option, else GDX_THREADS, else 1.
int resolve_thread_count(int requested);

}  // namespace gdx
