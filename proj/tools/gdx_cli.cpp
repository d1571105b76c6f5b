#include "gdx/analysis.hpp"
#include "gdx/brd.hpp"
#include "gdx/game_io.hpp"
#include "gdx/rd.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;

struct GameSource {
  std::string path;
  std::string builtin;
  std::vector<double> builtin_params;

  gdx::Game resolve() const {
    if (!builtin.empty()) return gdx::builtin_game(builtin, builtin_params);
    if (!path.empty()) return gdx::load_game(path);
    throw gdx::SchemaError("no game given: pass a file or --builtin");
  }
};

void add_game_options(CLI::App* cmd, GameSource& source) {
  cmd->add_option("game", source.path, "game file (JSON)");
  cmd->add_option("--builtin", source.builtin,
                  "builtin instance: shapley, jordan, jordan_weighted, "
                  "matching_pennies, matching_pennies_asym, rps");
  cmd->add_option("--params", source.builtin_params,
                  "builtin parameters (jordan_weighted win payoffs)");
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<double> parse_scales(const std::string& csv) {
  std::vector<double> scales;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    scales.push_back(std::stod(token));
  }
  return scales;
}

gdx::PayoffPoint starting_point(const gdx::Game& game,
                                const std::string& start_csv,
                                std::uint64_t seed) {
  gdx::PayoffPoint w;
  w.scores.resize(game.payoff_dim());
  if (!start_csv.empty()) {
    std::stringstream stream(start_csv);
    std::string token;
    int k = 0;
    while (std::getline(stream, token, ',')) {
      if (k >= game.payoff_dim()) break;
      w.scores[k++] = std::stod(token);
    }
    if (k != game.payoff_dim()) {
      throw gdx::SchemaError("--start needs " +
                             std::to_string(game.payoff_dim()) +
                             " comma-separated values");
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < game.payoff_dim(); ++k) w.scores[k] = g(rng);
  }
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability analysis of periodic play in normal-form games"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "full stability report");
  GameSource analyze_source;
  add_game_options(analyze, analyze_source);
  int max_cycle_len = 6;
  bool simulate = false;
  std::string scales_csv = "10,100,1000";
  std::string format = "text";
  std::string out_path;
  analyze->add_option("--max-cycle-len", max_cycle_len, "cycle length bound");
  analyze->add_flag("--simulate", simulate,
                    "confirm stable verdicts by BRD and RD simulation");
  analyze->add_option("--scales", scales_csv, "RD probe scales, comma separated");
  analyze->add_option("--format", format, "text or machine");
  analyze->add_option("-o,--output", out_path, "output file (default stdout)");

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "DOT export of the preference graph");
  GameSource graph_source;
  add_game_options(graph_cmd, graph_source);
  std::string dot_path;
  graph_cmd->add_option("-o,--output", dot_path, "output file (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a dynamic and export CSV");
  GameSource sim_source;
  add_game_options(sim, sim_source);
  std::string dynamic = "brd";
  int switches = 0;
  double t_end = 100.0;
  std::string start_csv;
  std::uint64_t sim_seed = 1;
  std::string csv_path;
  std::string play_path;
  sim->add_option("--dynamic", dynamic, "brd or rd");
  sim->add_option("--switches", switches,
                  "BRD switch budget (default 10 * 6 * profiles)");
  sim->add_option("--t-end", t_end, "RD end time");
  sim->add_option("--start", start_csv, "starting payoff point, comma separated");
  sim->add_option("--seed", sim_seed, "seed for a random start");
  sim->add_option("-o,--output", csv_path, "trajectory CSV (default stdout)");
  sim->add_option("--play-output", play_path, "RD play-interval CSV");

  // builtin
  auto* builtin_cmd = app.add_subcommand("builtin", "write a builtin game file");
  std::string builtin_name;
  std::vector<double> builtin_params;
  std::string builtin_out;
  builtin_cmd->add_option("name", builtin_name, "builtin name")->required();
  builtin_cmd->add_option("--params", builtin_params, "builtin parameters");
  builtin_cmd->add_option("-o,--output", builtin_out, "output file (default stdout)");

  // random
  auto* random_cmd = app.add_subcommand("random", "write a random generic game");
  std::vector<int> dims;
  std::uint64_t seed = 1;
  std::string dist = "uniform01";
  std::string random_out;
  random_cmd->add_option("--dims", dims, "strategy counts, one per player")
      ->required();
  random_cmd->add_option("--seed", seed, "RNG seed");
  random_cmd->add_option("--dist", dist, "uniform01 or gauss");
  random_cmd->add_option("-o,--output", random_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const gdx::Game game = analyze_source.resolve();
      gdx::AnalysisOptions options;
      options.max_cycle_len = max_cycle_len;
      options.simulate = simulate;
      options.scales = parse_scales(scales_csv);
      const gdx::AnalysisReport report = gdx::run_analysis(game, options);
      if (format == "machine") {
        write_output(gdx::report_to_json(report, game).dump(2) + "\n", out_path);
      } else {
        write_output(gdx::report_to_text(report, game), out_path);
      }
    } else if (*graph_cmd) {
      const gdx::Game game = graph_source.resolve();
      write_output(gdx::export_dot(gdx::build_graph(game)), dot_path);
    } else if (*sim) {
      const gdx::Game game = sim_source.resolve();
      const gdx::PayoffPoint w0 = starting_point(game, start_csv, sim_seed);
      if (dynamic == "brd") {
        const int budget =
            switches > 0 ? switches : gdx::brd::default_max_switches(game, 6);
        const auto trajectory = gdx::brd::simulate(game, w0, budget);
        write_output(gdx::export_csv(game, trajectory), csv_path);
      } else if (dynamic == "rd") {
        const auto trajectory = gdx::rd::simulate(game, w0, t_end);
        if (trajectory.status == gdx::rd::RdStatus::StepUnderflow) {
          std::cerr << "integrator step underflow\n";
          return kExitNumerical;
        }
        write_output(gdx::export_csv(game, trajectory), csv_path);
        if (!play_path.empty()) {
          write_output(gdx::export_play_csv(game, trajectory), play_path);
        }
      } else {
        std::cerr << "unknown dynamic: " << dynamic << "\n";
        return kExitSchema;
      }
    } else if (*builtin_cmd) {
      const gdx::Game game = gdx::builtin_game(builtin_name, builtin_params);
      write_output(gdx::game_to_json(game).dump(2) + "\n", builtin_out);
    } else if (*random_cmd) {
      gdx::PayoffDistribution distribution = gdx::PayoffDistribution::Uniform01;
      if (dist == "gauss") {
        distribution = gdx::PayoffDistribution::Gauss;
      } else if (dist != "uniform01") {
        std::cerr << "unknown distribution: " << dist << "\n";
        return kExitSchema;
      }
      const gdx::Game game = gdx::random_game(dims, seed, distribution);
      write_output(gdx::game_to_json(game).dump(2) + "\n", random_out);
    }
  } catch (const gdx::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const gdx::RetriesExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
