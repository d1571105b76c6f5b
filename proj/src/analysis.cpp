#include "gdx/analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <sstream>

namespace gdx {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string status_name(StabilityStatus status) {
  switch (status) {
    case StabilityStatus::Stable: return "stable";
    case StabilityStatus::Unstable: return "unstable";
    case StabilityStatus::Marginal: return "marginal";
  }
  return "?";
}

std::string failure_name(StabilityFailure failure) {
  switch (failure) {
    case StabilityFailure::None: return "none";
    case StabilityFailure::NotDominant: return "not_dominant";
    case StabilityFailure::NotSimple: return "not_simple";
    case StabilityFailure::ComplexDominant: return "complex_dominant";
    case StabilityFailure::LambdaNotAboveOne: return "lambda_not_above_one";
    case StabilityFailure::ArgmaxViolation: return "argmax_violation";
    case StabilityFailure::SectionViolation: return "section_violation";
  }
  return "?";
}

WalkReport analyze_walk(const Game& game, const Walk& walk,
                        const AnalysisOptions& options) {
  WalkReport report;
  report.profiles = walk.profiles;
  try {
    SinkCertificate cert = certify_sink_cycle(game, walk);
    report.verdict = std::move(cert.verdict);
    report.is_sink = cert.is_sink;
    report.attractor_claim = cert.attractor_claim;
    report.four_cycle = std::move(cert.four_cycle);
  } catch (const std::exception& e) {
    report.error = e.what();
    return report;
  }

  if (options.simulate && report.verdict.stable() && report.verdict.eigvec) {
    try {
      const PayoffPoint& vec = *report.verdict.eigvec;
      const auto outcome = brd::section_return(game, vec, walk);
      bool confirmed = outcome.kind == brd::SectionOutcome::Kind::Returned;
      if (confirmed) {
        const Eigen::VectorXd expected =
            *report.verdict.lambda * vec.scores;
        confirmed = (outcome.point.scores - expected).norm() <=
                    1e-8 * expected.norm();
      }
      report.brd_confirmed = confirmed;
      report.rd_probe = rd::asymptotic_linearity_probe(
          game, walk, vec, options.scales);
    } catch (const std::exception& e) {
      report.error = e.what();
    }
  }
  return report;
}

}  // namespace

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GDX_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

AnalysisReport run_analysis(const Game& game, const AnalysisOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  AnalysisReport report;
  for (int i = 0; i < game.num_players(); ++i) {
    report.dims.push_back(game.num_strategies(i));
  }
  report.num_profiles = game.num_profiles();

  const PreferenceGraph graph = build_graph(game);
  report.num_arcs = static_cast<int>(graph.arcs().size());
  report.sinks = sink_equilibria(graph);
  report.timings.graph_seconds = seconds_since(t_start);

  const auto t_walks = std::chrono::steady_clock::now();
  std::vector<Walk> walks = CycleEnumerator(graph, options.max_cycle_len).all();
  report.walks.resize(walks.size());

  const int threads =
      std::min<int>(resolve_thread_count(options.threads),
                    std::max<std::size_t>(walks.size(), 1));
  if (threads <= 1) {
    for (std::size_t k = 0; k < walks.size(); ++k) {
      report.walks[k] = analyze_walk(game, walks[k], options);
    }
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::future<void>> workers;
    for (int t = 0; t < threads; ++t) {
      workers.push_back(std::async(std::launch::async, [&]() {
        for (std::size_t k = cursor.fetch_add(1); k < walks.size();
             k = cursor.fetch_add(1)) {
          report.walks[k] = analyze_walk(game, walks[k], options);
        }
      }));
    }
    for (auto& worker : workers) worker.get();
  }
  report.timings.walks_seconds = seconds_since(t_walks);
  report.timings.total_seconds = seconds_since(t_start);
  return report;
}

std::string report_to_text(const AnalysisReport& report, const Game& game) {
  std::ostringstream out;
  out << "game: ";
  for (std::size_t i = 0; i < report.dims.size(); ++i) {
    if (i > 0) out << "x";
    out << report.dims[i];
  }
  out << ", " << report.num_profiles << " profiles, " << report.num_arcs
      << " arcs\n";

  out << "sink equilibria: " << report.sinks.size() << "\n";
  for (const auto& sink : report.sinks) {
    out << "  {";
    for (std::size_t i = 0; i < sink.profiles.size(); ++i) {
      if (i > 0) out << ", ";
      out << game.profile_label(game.profile_at(sink.profiles[i]));
    }
    out << "}" << (sink.is_singleton ? " (pure equilibrium)" : "") << "\n";
  }

  out << "cycles tested: " << report.walks.size() << "\n";
  for (const auto& walk : report.walks) {
    out << "  ";
    for (std::size_t i = 0; i < walk.profiles.size(); ++i) {
      if (i > 0) out << " -> ";
      out << game.profile_label(walk.profiles[i]);
    }
    out << "\n    verdict: " << status_name(walk.verdict.status);
    if (walk.verdict.lambda) out << ", lambda " << *walk.verdict.lambda;
    if (walk.verdict.status == StabilityStatus::Unstable) {
      out << ", " << failure_name(walk.verdict.failure);
      if (walk.verdict.failed_step >= 0) {
        out << " at step " << walk.verdict.failed_step;
      }
    }
    if (walk.is_sink) {
      out << "; sink cycle"
          << (walk.attractor_claim ? ", attractor" : "");
    }
    out << "\n";
    if (walk.four_cycle) {
      const auto& fc = *walk.four_cycle;
      out << "    4-cycle fixed point: player " << fc.first_player + 1 << " (";
      for (int k = 0; k < 2; ++k) {
        if (k) out << ", ";
        out << fc.fixed_point.distributions[0][k];
      }
      out << "), player " << fc.second_player + 1 << " (";
      for (int k = 0; k < 2; ++k) {
        if (k) out << ", ";
        out << fc.fixed_point.distributions[1][k];
      }
      out << "); " << (fc.persistent ? "persistent" : "not persistent");
      if (fc.witness) {
        out << ", better reply: player " << fc.witness->first + 1 << " strategy "
            << game.strategy_labels(fc.witness->first)[fc.witness->second];
      }
      out << "\n";
    }
    if (walk.brd_confirmed) {
      out << "    brd confirmation: " << (*walk.brd_confirmed ? "ok" : "FAILED")
          << "\n";
    }
    if (!walk.rd_probe.empty()) {
      out << "    rd linearity probe:";
      for (const auto& point : walk.rd_probe) {
        out << " [" << point.scale << ": ";
        if (point.deviated) {
          out << "deviated@" << point.deviated_step;
        } else {
          out << std::scientific << std::setprecision(3)
              << point.relative_error << std::defaultfloat;
        }
        out << "]";
      }
      out << "\n";
    }
    if (!walk.error.empty()) {
      out << "    error: " << walk.error << "\n";
    }
  }
  return out.str();
}

nlohmann::json report_to_json(const AnalysisReport& report, const Game& game) {
  using nlohmann::json;
  json doc;
  doc["dims"] = report.dims;
  doc["num_profiles"] = report.num_profiles;
  doc["num_arcs"] = report.num_arcs;

  json sinks = json::array();
  for (const auto& sink : report.sinks) {
    json entry;
    entry["profiles"] = json::array();
    for (int p : sink.profiles) {
      entry["profiles"].push_back(game.profile_at(p).strategies);
    }
    entry["is_singleton"] = sink.is_singleton;
    sinks.push_back(std::move(entry));
  }
  doc["sink_equilibria"] = std::move(sinks);

  json walks = json::array();
  for (const auto& walk : report.walks) {
    json entry;
    entry["profiles"] = json::array();
    for (const auto& p : walk.profiles) entry["profiles"].push_back(p.strategies);
    entry["status"] = status_name(walk.verdict.status);
    entry["failure"] = failure_name(walk.verdict.failure);
    if (walk.verdict.failed_step >= 0) {
      entry["failed_step"] = walk.verdict.failed_step;
    }
    if (walk.verdict.lambda) entry["lambda"] = *walk.verdict.lambda;
    if (walk.verdict.eigvec) {
      entry["eigenvector"] = std::vector<double>(
          walk.verdict.eigvec->scores.data(),
          walk.verdict.eigvec->scores.data() + walk.verdict.eigvec->scores.size());
    }
    if (!walk.verdict.dwell_times.empty()) {
      entry["dwell_times"] = walk.verdict.dwell_times;
    }
    entry["dominance_gap"] = walk.verdict.dominance_gap;
    entry["detail"] = walk.verdict.detail;
    entry["is_sink"] = walk.is_sink;
    entry["attractor_claim"] = walk.attractor_claim;
    if (walk.four_cycle) {
      const auto& fc = *walk.four_cycle;
      json fixed;
      fixed["players"] = {fc.first_player, fc.second_player};
      fixed["strategies"] = {fc.first_strategies, fc.second_strategies};
      fixed["distributions"] = {
          std::vector<double>{fc.fixed_point.distributions[0][0],
                              fc.fixed_point.distributions[0][1]},
          std::vector<double>{fc.fixed_point.distributions[1][0],
                              fc.fixed_point.distributions[1][1]}};
      fixed["persistent"] = fc.persistent;
      if (fc.witness) {
        fixed["witness"] = {fc.witness->first, fc.witness->second};
      }
      entry["four_cycle"] = std::move(fixed);
    }
    if (walk.brd_confirmed) entry["brd_confirmed"] = *walk.brd_confirmed;
    if (!walk.rd_probe.empty()) {
      json probe = json::array();
      for (const auto& point : walk.rd_probe) {
        json item;
        item["scale"] = point.scale;
        if (point.deviated) {
          item["deviated_step"] = point.deviated_step;
        } else {
          item["relative_error"] = point.relative_error;
        }
        probe.push_back(std::move(item));
      }
      entry["rd_probe"] = std::move(probe);
    }
    if (!walk.error.empty()) entry["error"] = walk.error;
    walks.push_back(std::move(entry));
  }
  doc["walks"] = std::move(walks);

  doc["timings"] = {{"graph_seconds", report.timings.graph_seconds},
                    {"walks_seconds", report.timings.walks_seconds},
                    {"total_seconds", report.timings.total_seconds}};
  return doc;
}

std::string export_dot(const PreferenceGraph& graph) {
  const Game& game = graph.game();
  std::vector<bool> in_sink(graph.num_nodes(), false);
  for (const auto& sink : sink_equilibria(graph)) {
    for (int p : sink.profiles) in_sink[p] = true;
  }
  std::ostringstream out;
  out << "digraph preference_graph {\n";
  for (int p = 0; p < graph.num_nodes(); ++p) {
    out << "  n" << p << " [label=\""
        << game.profile_label(game.profile_at(p)) << "\"";
    if (in_sink[p]) out << ", style=bold, color=red";
    out << "];\n";
  }
  for (const Arc& arc : graph.arcs()) {
    out << "  n" << arc.from << " -> n" << arc.to << " [label=\"" << arc.weight
        << "\"";
    if (arc.tie) out << ", style=dashed";
    if (in_sink[arc.from] && in_sink[arc.to]) out << ", color=red";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

void csv_header(std::ostringstream& out, const Game& game,
                const std::string& prefix) {
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_strategies(i); ++s) {
      out << "," << prefix << i + 1 << "_" << game.strategy_labels(i)[s];
    }
  }
}

}  // namespace

std::string export_csv(const Game& game, const brd::Trajectory& trajectory) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "time,player,from,to";
  csv_header(out, game, "w");
  out << "\n";
  // The starting point appears as a pseudo-event with no switch.
  out << trajectory.start.time << ",,,";
  for (int k = 0; k < trajectory.start.scores.size(); ++k) {
    out << "," << trajectory.start.scores[k];
  }
  out << "\n";
  PayoffPoint state = trajectory.start;
  for (const SwitchEvent& event : trajectory.events) {
    const Eigen::VectorXd rates =
        counterfactual_rates(game, event.profile_before);
    state.scores += (event.time - state.time) * rates;
    state.time = event.time;
    out << event.time << "," << event.player + 1 << ","
        << game.strategy_labels(event.player)[event.from_strategy] << ","
        << game.strategy_labels(event.player)[event.to_strategy];
    for (int k = 0; k < state.scores.size(); ++k) out << "," << state.scores[k];
    out << "\n";
  }
  return out.str();
}

std::string export_csv(const Game& game, const rd::Trajectory& trajectory) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "time";
  csv_header(out, game, "w");
  csv_header(out, game, "x");
  out << "\n";
  for (const auto& [time, w] : trajectory.samples) {
    out << time;
    for (int k = 0; k < w.size(); ++k) out << "," << w[k];
    const MixedProfile x = rd::payoff_to_strategy(game, w);
    for (const auto& dist : x.distributions) {
      for (int k = 0; k < dist.size(); ++k) out << "," << dist[k];
    }
    out << "\n";
  }
  return out.str();
}

std::string export_play_csv(const Game& game, const rd::Trajectory& trajectory) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "profile,entry,exit\n";
  for (const auto& interval : trajectory.sequence_of_play) {
    out << game.profile_label(interval.profile) << "," << interval.entry_time
        << "," << interval.exit_time << "\n";
  }
  return out.str();
}

}  // namespace gdx
