#include "gdx/brd.hpp"

#include "gdx/game_io.hpp"
#include "gdx/stability.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace gdx;

namespace {

PayoffPoint point(std::initializer_list<double> values) {
  PayoffPoint w;
  w.scores.resize(static_cast<int>(values.size()));
  int k = 0;
  for (double v : values) w.scores[k++] = v;
  return w;
}

Walk pennies_cycle(const Game& pennies) {
  const PreferenceGraph graph = build_graph(pennies);
  return std::get<Walk>(
      validate_walk(graph, {{{0, 0}}, {{0, 1}}, {{1, 1}}, {{1, 0}}}));
}

Walk shapley_cycle(const Game& shapley) {
  const PreferenceGraph graph = build_graph(shapley);
  return std::get<Walk>(validate_walk(
      graph, {{{0, 2}}, {{1, 2}}, {{1, 0}}, {{2, 0}}, {{2, 1}}, {{0, 1}}}));
}

}  // namespace

TEST_CASE("next_switch") {
  const Game pennies = builtin_game("matching_pennies");

  SUBCASE("tied argmax at entry is ambiguous") {
    const auto outcome = brd::next_switch(pennies, point({0, 0, 1, 0}));
    CHECK(outcome.kind == brd::SwitchOutcome::Kind::AmbiguousArgmax);
  }

  SUBCASE("pennies crossing at tau = 1/2") {
    const auto outcome = brd::next_switch(pennies, point({1, 0, 1, 0}));
    REQUIRE(outcome.kind == brd::SwitchOutcome::Kind::Switch);
    CHECK(outcome.event.time == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(outcome.event.player == 1);
    CHECK(outcome.event.from_strategy == 0);
    CHECK(outcome.event.to_strategy == 1);
    // Crossing leaves the switching player's two strategies equal.
    CHECK(outcome.after.scores[2] == doctest::Approx(outcome.after.scores[3]));
  }

  SUBCASE("strict dominant profile reaches a PNE") {
    const Game dominant({{"a", "b"}, {"x", "y"}}, {0, 0, 1, 1, 2, 0, 3, 1});
    const PureProfile best{{1, 1}};
    const PayoffPoint w{counterfactual_rates(dominant, best), 0.0};
    const auto outcome = brd::next_switch(dominant, w);
    CHECK(outcome.kind == brd::SwitchOutcome::Kind::ReachedPNE);
  }

  SUBCASE("agrees with a dense time-stepping run") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const Game game = random_game({2, 3}, 1300 + trial);
      PayoffPoint w;
      w.scores.resize(game.payoff_dim());
      for (int k = 0; k < w.scores.size(); ++k) w.scores[k] = g(rng);
      const auto outcome = brd::next_switch(game, w);
      if (outcome.kind != brd::SwitchOutcome::Kind::Switch) continue;
      const double tau = outcome.event.time;
      const auto dense = oracle::dense_brd(game, w.scores, 1.2 * tau, tau * 1e-5);
      REQUIRE_FALSE(dense.switch_times.empty());
      CHECK(dense.switch_times.front() == doctest::Approx(tau).epsilon(1e-3));
      CHECK(dense.profiles[1] == outcome.event.profile_after);
      ++checked;
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("simulate") {
  const Game pennies = builtin_game("matching_pennies");

  SUBCASE("pennies cycles through the four profiles") {
    const auto run = brd::simulate(pennies, point({1, 0, 0.5, 0}), 12);
    CHECK(run.status == brd::TrajectoryStatus::Completed);
    REQUIRE(run.events.size() == 12);
    REQUIRE(run.sequence_of_play.size() == 13);
    const std::vector<PureProfile> lap = {{{0, 0}}, {{0, 1}}, {{1, 1}}, {{1, 0}}};
    for (std::size_t k = 0; k < run.sequence_of_play.size(); ++k) {
      CHECK(run.sequence_of_play[k] == lap[k % 4]);
    }
    // Event times strictly increase.
    for (std::size_t k = 1; k < run.events.size(); ++k) {
      CHECK(run.events[k].time > run.events[k - 1].time);
    }
  }

  SUBCASE("shapley converges to three identical laps of the 6-cycle") {
    const Game shapley = builtin_game("shapley");
    const auto run =
        brd::simulate(shapley, point({1.0, 0.1, 0.0, 0.2, 0.0, 0.6}), 60);
    CHECK(run.status == brd::TrajectoryStatus::Completed);
    const auto period = brd::detect_period(run.sequence_of_play, 3);
    REQUIRE(period.has_value());
    CHECK(period->size() == 6);
    // The detected period is a rotation of the sink 6-cycle.
    const Walk cycle = shapley_cycle(shapley);
    CHECK(std::count(cycle.profiles.begin(), cycle.profiles.end(),
                     period->front()) == 1);
  }

  SUBCASE("strict PNE run terminates") {
    const Game dominant({{"a", "b"}, {"x", "y"}}, {0, 0, 1, 1, 2, 0, 3, 1});
    const auto run = brd::simulate(dominant, point({0, 1, 0, 2}), 50);
    CHECK(run.status == brd::TrajectoryStatus::ReachedPNE);
    CHECK(run.events.size() < 4);
  }

  SUBCASE("sequence of play always validates as a preference-graph walk") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const Game game = random_game({3, 3}, 1400 + trial);
      const PreferenceGraph graph = build_graph(game);
      PayoffPoint w;
      w.scores.resize(game.payoff_dim());
      for (int k = 0; k < w.scores.size(); ++k) w.scores[k] = g(rng);
      const auto run = brd::simulate(game, w, 40);
      if (run.sequence_of_play.size() < 2) continue;
      // Open walks: check each consecutive transition is a graph arc.
      for (std::size_t k = 0; k + 1 < run.sequence_of_play.size(); ++k) {
        const int from = game.profile_index(run.sequence_of_play[k]);
        const int to = game.profile_index(run.sequence_of_play[k + 1]);
        CHECK(graph.find_arc(from, to) != nullptr);
      }
    }
  }

  SUBCASE("scale equivariance") {
    const Game shapley = builtin_game("shapley");
    const PayoffPoint w0 = point({1.0, 0.1, 0.0, 0.2, 0.0, 0.6});
    const auto base = brd::simulate(shapley, w0, 30);
    for (double theta : {0.5, 3.0, 250.0}) {
      PayoffPoint scaled{theta * w0.scores, 0.0};
      const auto run = brd::simulate(shapley, scaled, 30);
      REQUIRE(run.events.size() == base.events.size());
      for (std::size_t k = 0; k < run.events.size(); ++k) {
        CHECK(run.events[k].time ==
              doctest::Approx(theta * base.events[k].time).epsilon(1e-10));
        CHECK(run.sequence_of_play[k] == base.sequence_of_play[k]);
      }
      CHECK((run.terminal.scores - theta * base.terminal.scores).norm() <=
            1e-10 * base.terminal.scores.norm() * theta);
    }
  }

  SUBCASE("per-player shifts do not change the play or the time gaps") {
    const Game shapley = builtin_game("shapley");
    const PayoffPoint w0 = point({1.0, 0.1, 0.0, 0.2, 0.0, 0.6});
    const auto base = brd::simulate(shapley, w0, 25);
    PayoffPoint shifted = w0;
    for (int s = 0; s < 3; ++s) shifted.scores[s] += 2.5;        // player 1
    for (int s = 3; s < 6; ++s) shifted.scores[s] += -1.25;      // player 2
    const auto run = brd::simulate(shapley, shifted, 25);
    REQUIRE(run.events.size() == base.events.size());
    for (std::size_t k = 1; k < run.events.size(); ++k) {
      CHECK(run.sequence_of_play[k] == base.sequence_of_play[k]);
      const double base_gap = base.events[k].time - base.events[k - 1].time;
      const double gap = run.events[k].time - run.events[k - 1].time;
      CHECK(gap == doctest::Approx(base_gap).epsilon(1e-9));
    }
  }
}

TEST_CASE("post-switch state equals the arc-matrix image") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Game game = random_game({3, 3}, 1500 + trial);
    const PreferenceGraph graph = build_graph(game);
    PayoffPoint w;
    w.scores.resize(game.payoff_dim());
    for (int k = 0; k < w.scores.size(); ++k) w.scores[k] = g(rng);
    const auto outcome = brd::next_switch(game, w);
    if (outcome.kind != brd::SwitchOutcome::Kind::Switch) continue;
    const int from = game.profile_index(outcome.event.profile_before);
    const int to = game.profile_index(outcome.event.profile_after);
    const Arc* arc = graph.find_arc(from, to);
    REQUIRE(arc != nullptr);
    const ArcMatrix am = arc_matrix(game, *arc);
    const Eigen::VectorXd mapped = am.matrix * w.scores;
    CHECK((mapped - outcome.after.scores).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, mapped.cwiseAbs().maxCoeff()));
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("section return") {
  const Game pennies = builtin_game("matching_pennies");
  const Walk cycle = pennies_cycle(pennies);

  SUBCASE("pennies return map is the identity") {
    const PayoffPoint w0 = point({0, 0, 1, 0});
    REQUIRE(brd::in_section(pennies, cycle, w0.scores));
    const auto outcome = brd::section_return(pennies, w0, cycle);
    REQUIRE(outcome.kind == brd::SectionOutcome::Kind::Returned);
    CHECK((outcome.point.scores - w0.scores).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(outcome.point.time == doctest::Approx(2.0));  // 4 segments of 1/2
  }

  SUBCASE("membership is enforced") {
    CHECK_FALSE(brd::in_section(pennies, cycle, point({1, 0, 1, 0}).scores));
    CHECK_THROWS_AS(brd::section_return(pennies, point({1, 0, 1, 0}), cycle),
                    std::invalid_argument);
  }

  SUBCASE("a point in another basin deviates") {
    const Game rps = builtin_game("rps");
    const PreferenceGraph rg = build_graph(rps);
    const Walk diag = std::get<Walk>(validate_walk(
        rg, {{{0, 0}}, {{1, 0}}, {{1, 1}}, {{2, 1}}, {{2, 2}}, {{0, 2}}}));
    // Section of `diag`: (R,R) and (R,S) argmax-tied for player 2 (R vs S),
    // player 1 strictly on R. The big R lead for player 1 makes the walk's
    // second switch (player 1 to P) happen later than player 2's next move.
    PayoffPoint w = point({5, 0, 0, 2, 0, 2});
    REQUIRE(brd::in_section(rps, diag, w.scores));
    const auto outcome = brd::section_return(rps, w, diag);
    CHECK(outcome.kind == brd::SectionOutcome::Kind::Deviated);
  }
}

TEST_CASE("detect_period") {
  const PureProfile a{{0, 0}};
  const PureProfile b{{0, 1}};
  const PureProfile c{{1, 1}};

  SUBCASE("simple alternation") {
    const auto period = brd::detect_period({a, b, a, b, a, b}, 3);
    REQUIRE(period.has_value());
    CHECK(*period == std::vector<PureProfile>{a, b});
  }

  SUBCASE("aperiodic prefix is ignored") {
    const auto period = brd::detect_period({c, c, a, b, a, b, a, b, a, b}, 3);
    REQUIRE(period.has_value());
    CHECK(period->size() == 2);
  }

  SUBCASE("no period") {
    CHECK_FALSE(brd::detect_period({a, b, c, a, c, b}, 2).has_value());
  }

  SUBCASE("constant sequence has period 1") {
    const auto period = brd::detect_period({a, a, a, a}, 4);
    REQUIRE(period.has_value());
    CHECK(period->size() == 1);
  }
}
