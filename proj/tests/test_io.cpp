#include "gdx/game_io.hpp"

#include "gdx/analysis.hpp"
#include "gdx/brd.hpp"
#include "gdx/rd.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using namespace gdx;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("game files round-trip bitwise") {
  TempFile file("gdx_roundtrip.json");
  for (const std::string& name :
       {"matching_pennies", "shapley", "jordan", "rps"}) {
    const Game game = builtin_game(name);
    save_game(game, file.path);
    const Game loaded = load_game(file.path);
    CHECK(loaded.payoff_tensor() == game.payoff_tensor());
    CHECK(loaded.num_players() == game.num_players());
  }
  // Awkward doubles survive the trip.
  const Game awkward({{"a", "b"}, {"x", "y"}},
                     {0.1, -1.0 / 3, 1e-17, 2.5e300, 3.3333333333333335, -0.0,
                      1.0000000000000002, 7});
  save_game(awkward, file.path);
  CHECK(load_game(file.path).payoff_tensor() == awkward.payoff_tensor());
}

TEST_CASE("schema violations are reported with the offending field") {
  using nlohmann::json;
  auto parse = [](json doc) { return game_from_json(doc); };

  json good = game_to_json(builtin_game("matching_pennies"));
  CHECK_NOTHROW(parse(good));

  SUBCASE("wrong payoff count") {
    json doc = good;
    doc["payoffs"].erase(3);
    CHECK_THROWS_WITH_AS(parse(doc),
                         doctest::Contains("'payoffs' has 3 profiles"),
                         SchemaError);
  }

  SUBCASE("non-finite payoff") {
    json doc = good;
    doc["payoffs"][0][0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(parse(doc), doctest::Contains("non-finite"),
                         SchemaError);
    doc["payoffs"][0][0] = "nan";
    CHECK_THROWS_AS(parse(doc), SchemaError);
  }

  SUBCASE("missing schema version") {
    json doc = good;
    doc.erase("schema_version");
    CHECK_THROWS_WITH_AS(parse(doc), doctest::Contains("schema_version"),
                         SchemaError);
  }

  SUBCASE("one-strategy player") {
    json doc = good;
    doc["strategies"][0] = json::array({"only"});
    CHECK_THROWS_AS(parse(doc), SchemaError);
  }

  SUBCASE("players/strategies mismatch") {
    json doc = good;
    doc["players"] = 3;
    CHECK_THROWS_AS(parse(doc), SchemaError);
  }
}

TEST_CASE("builtins satisfy their structural claims") {
  // The graph-shape assertions behind the canonical instances.
  const Game shapley = builtin_game("shapley");
  const auto shapley_sinks = sink_equilibria(build_graph(shapley));
  REQUIRE(shapley_sinks.size() == 1);
  CHECK(shapley_sinks[0].profiles.size() == 6);

  const Game jordan = builtin_game("jordan");
  const auto jordan_sinks = sink_equilibria(build_graph(jordan));
  REQUIRE(jordan_sinks.size() == 1);
  CHECK(jordan_sinks[0].profiles.size() == 6);
  // The excluded profiles are (H,T,H) and (T,H,T).
  const std::vector<int> excluded = {jordan.profile_index({{0, 1, 0}}),
                                     jordan.profile_index({{1, 0, 1}})};
  for (int node : excluded) {
    CHECK(std::find(jordan_sinks[0].profiles.begin(),
                    jordan_sinks[0].profiles.end(),
                    node) == jordan_sinks[0].profiles.end());
  }

  const Game weighted = builtin_game("jordan_weighted", {1, 2, 3});
  const PreferenceGraph wg = build_graph(weighted);
  const auto weighted_sinks = sink_equilibria(wg);
  REQUIRE(weighted_sinks.size() == 1);
  CHECK(weighted_sinks[0].profiles == jordan_sinks[0].profiles);
  std::set<double> weights;
  for (const Arc& arc : wg.arcs()) weights.insert(arc.weight);
  CHECK(weights == std::set<double>{1.0, 2.0, 3.0});

  const auto pennies_sinks =
      sink_equilibria(build_graph(builtin_game("matching_pennies")));
  REQUIRE(pennies_sinks.size() == 1);
  CHECK(pennies_sinks[0].profiles.size() == 4);

  CHECK_THROWS_AS(builtin_game("nope"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_game("jordan_weighted", {1}), std::invalid_argument);
}

TEST_CASE("random games") {
  SUBCASE("same seed, same tensor") {
    const Game a = random_game({3, 3}, 42);
    const Game b = random_game({3, 3}, 42);
    CHECK(a.payoff_tensor() == b.payoff_tensor());
    const Game c = random_game({3, 3}, 43);
    CHECK(a.payoff_tensor() != c.payoff_tensor());
  }

  SUBCASE("every draw is generic") {
    for (int seed = 0; seed < 300; ++seed) {
      CHECK(is_generic(random_game({2, 2}, seed)));
    }
  }

  SUBCASE("bad dimensions rejected") {
    CHECK_THROWS_AS(random_game({1, 2}, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_game({}, 1), std::invalid_argument);
  }
}

TEST_CASE("dot export") {
  const Game pennies = builtin_game("matching_pennies");
  const std::string dot = export_dot(build_graph(pennies));
  CHECK(dot.find("digraph") != std::string::npos);
  // 4 nodes, 4 arcs, all labeled with weight 2 and drawn as sink.
  std::size_t arc_count = 0, pos = 0;
  while ((pos = dot.find("label=\"2\"", pos)) != std::string::npos) {
    ++arc_count;
    pos += 1;
  }
  CHECK(arc_count == 4);
  CHECK(dot.find("style=bold") != std::string::npos);

  const Game shapley = builtin_game("shapley");
  const std::string sdot = export_dot(build_graph(shapley));
  std::size_t bold = 0;
  pos = 0;
  while ((pos = sdot.find("style=bold", pos)) != std::string::npos) {
    ++bold;
    pos += 1;
  }
  CHECK(bold == 6);  // exactly the 6-cycle nodes
}

TEST_CASE("csv exports") {
  const Game pennies = builtin_game("matching_pennies");

  SUBCASE("brd trajectory csv") {
    PayoffPoint w0;
    w0.scores.resize(4);
    w0.scores << 1, 0, 0.5, 0;
    const auto run = brd::simulate(pennies, w0, 8);
    const std::string csv = export_csv(pennies, run);
    CHECK(csv.rfind("time,player,from,to,w1_H,w1_T,w2_H,w2_T", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + start + 8
  }

  SUBCASE("empty trajectory gives a header-only play csv") {
    rd::Trajectory empty;
    CHECK(export_play_csv(pennies, empty) == "profile,entry,exit\n");
  }

  SUBCASE("rd trajectory csv has w and softmax columns") {
    PayoffPoint w0;
    w0.scores.resize(4);
    w0.scores << 0.5, 0, 0.25, 0;
    const auto run = rd::simulate(pennies, w0, 1.0);
    const std::string csv = export_csv(pennies, run);
    CHECK(csv.rfind("time,w1_H,w1_T,w2_H,w2_T,x1_H,x1_T,x2_H,x2_T", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
  }
}

TEST_CASE("run_analysis") {
  SUBCASE("shapley full report") {
    const Game shapley = builtin_game("shapley");
    AnalysisOptions options;
    options.max_cycle_len = 6;
    options.simulate = true;
    options.scales = {10.0, 100.0};
    const AnalysisReport report = run_analysis(shapley, options);
    REQUIRE(report.sinks.size() == 1);
    REQUIRE(report.walks.size() == 1);
    const WalkReport& walk = report.walks[0];
    CHECK(walk.verdict.stable());
    CHECK(walk.is_sink);
    CHECK(walk.attractor_claim);
    REQUIRE(walk.brd_confirmed.has_value());
    CHECK(*walk.brd_confirmed);
    REQUIRE(walk.rd_probe.size() == 2);
    CHECK(walk.rd_probe[1].relative_error < walk.rd_probe[0].relative_error);
  }

  SUBCASE("dominance-solvable game reports a singleton sink and no cycles") {
    const Game dominant({{"a", "b"}, {"x", "y"}}, {0, 0, 1, 1, 2, 0, 3, 1});
    const AnalysisReport report = run_analysis(dominant);
    REQUIRE(report.sinks.size() == 1);
    CHECK(report.sinks[0].is_singleton);
    CHECK(report.walks.empty());
  }

  SUBCASE("pennies reports the persistent 4-cycle") {
    const AnalysisReport report = run_analysis(builtin_game("matching_pennies"));
    REQUIRE(report.walks.size() == 1);
    CHECK(report.walks[0].verdict.status == StabilityStatus::Marginal);
    REQUIRE(report.walks[0].four_cycle.has_value());
    CHECK(report.walks[0].four_cycle->persistent);
    CHECK(report.walks[0].attractor_claim);
  }

  SUBCASE("worker count comes from the option or GDX_THREADS") {
    CHECK(resolve_thread_count(3) == 3);
    setenv("GDX_THREADS", "5", 1);
    CHECK(resolve_thread_count(0) == 5);
    CHECK(resolve_thread_count(2) == 2);
    unsetenv("GDX_THREADS");
    CHECK(resolve_thread_count(0) == 1);
  }

  SUBCASE("reports are deterministic modulo timings") {
    const Game game = random_game({3, 3}, 77);
    AnalysisOptions options;
    options.max_cycle_len = 6;
    auto strip = [&](const AnalysisReport& report) {
      nlohmann::json doc = report_to_json(report, game);
      doc.erase("timings");
      return doc.dump();
    };
    const std::string a = strip(run_analysis(game, options));
    const std::string b = strip(run_analysis(game, options));
    CHECK(a == b);

    AnalysisOptions threaded = options;
    threaded.threads = 4;
    const std::string c = strip(run_analysis(game, threaded));
    CHECK(a == c);
  }
}
