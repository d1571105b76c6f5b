#include "gdx/game_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <random>

namespace gdx {

namespace {

using nlohmann::json;

std::vector<std::string> default_labels(int count) {
  std::vector<std::string> labels;
  for (int s = 0; s < count; ++s) labels.push_back("s" + std::to_string(s + 1));
  return labels;
}

Game pennies_like(double top_left) {
  // Zero-sum 2x2: A = [[top_left, -1], [-1, 1]], B = -A.
  const double a = top_left;
  std::vector<double> payoffs = {
      a, -a,   // (H,H)
      -1, 1,   // (H,T)
      -1, 1,   // (T,H)
      1, -1,   // (T,T)
  };
  return Game({{"H", "T"}, {"H", "T"}}, std::move(payoffs));
}

Game shapley_game() {
  // Cyclic win/draw/lose pattern with levels {0,1,2} per player.
  const double row[3][3] = {{0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
  const double col[3][3] = {{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
  std::vector<double> payoffs;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      payoffs.push_back(row[r][c]);
      payoffs.push_back(col[r][c]);
    }
  }
  return Game({{"r1", "r2", "r3"}, {"c1", "c2", "c3"}}, std::move(payoffs));
}

Game jordan_game(double w1, double w2, double w3) {
  // Three-player matching-pennies triangle: player 1 wants to match player 2,
  // player 2 wants to match player 3, player 3 wants to differ from player 1.
  std::vector<double> payoffs;
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      for (int s3 = 0; s3 < 2; ++s3) {
        payoffs.push_back(s1 == s2 ? w1 : 0.0);
        payoffs.push_back(s2 == s3 ? w2 : 0.0);
        payoffs.push_back(s3 != s1 ? w3 : 0.0);
      }
    }
  }
  return Game({{"H", "T"}, {"H", "T"}, {"H", "T"}}, std::move(payoffs));
}

Game rps_game() {
  std::vector<double> payoffs;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double u = 0.0;
      if ((r + 1) % 3 == c) u = -1.0;  // c beats r
      if ((c + 1) % 3 == r) u = 1.0;   // r beats c
      payoffs.push_back(u);
      payoffs.push_back(-u);
    }
  }
  return Game({{"R", "P", "S"}, {"R", "P", "S"}}, std::move(payoffs));
}

}  // namespace

Game game_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("game file: top level must be an object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw SchemaError("game file: missing integer field 'schema_version'");
  }
  if (doc["schema_version"].get<int>() != kGameSchemaVersion) {
    throw SchemaError("game file: unsupported schema_version " +
                      doc["schema_version"].dump() + ", expected " +
                      std::to_string(kGameSchemaVersion));
  }
  if (!doc.contains("players") || !doc["players"].is_number_integer()) {
    throw SchemaError("game file: missing integer field 'players'");
  }
  const int players = doc["players"].get<int>();
  if (!doc.contains("strategies") || !doc["strategies"].is_array()) {
    throw SchemaError("game file: missing array field 'strategies'");
  }
  const auto& strategies = doc["strategies"];
  if (static_cast<int>(strategies.size()) != players) {
    throw SchemaError("game file: 'strategies' lists " +
                      std::to_string(strategies.size()) + " players, 'players' says " +
                      std::to_string(players));
  }
  std::vector<std::vector<std::string>> labels;
  int num_profiles = 1;
  for (const auto& entry : strategies) {
    if (!entry.is_array() || entry.size() < 2) {
      throw SchemaError("game file: each 'strategies' entry needs >= 2 labels");
    }
    std::vector<std::string> player_labels;
    for (const auto& label : entry) {
      if (!label.is_string()) {
        throw SchemaError("game file: strategy labels must be strings");
      }
      player_labels.push_back(label.get<std::string>());
    }
    num_profiles *= static_cast<int>(player_labels.size());
    labels.push_back(std::move(player_labels));
  }
  if (!doc.contains("payoffs") || !doc["payoffs"].is_array()) {
    throw SchemaError("game file: missing array field 'payoffs'");
  }
  const auto& rows = doc["payoffs"];
  if (static_cast<int>(rows.size()) != num_profiles) {
    throw SchemaError("game file: 'payoffs' has " + std::to_string(rows.size()) +
                      " profiles, expected " + std::to_string(num_profiles));
  }
  std::vector<double> payoffs;
  payoffs.reserve(static_cast<std::size_t>(num_profiles) * players);
  for (std::size_t p = 0; p < rows.size(); ++p) {
    const auto& row = rows[p];
    if (!row.is_array() || static_cast<int>(row.size()) != players) {
      throw SchemaError("game file: payoffs[" + std::to_string(p) + "] needs " +
                        std::to_string(players) + " entries");
    }
    for (const auto& value : row) {
      if (!value.is_number()) {
        throw SchemaError("game file: payoffs[" + std::to_string(p) +
                          "] has a non-numeric entry");
      }
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        throw SchemaError("game file: payoffs[" + std::to_string(p) +
                          "] has a non-finite entry");
      }
      payoffs.push_back(v);
    }
  }
  try {
    return Game(std::move(labels), std::move(payoffs));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("game file: ") + e.what());
  }
}

json game_to_json(const Game& game) {
  json doc;
  doc["schema_version"] = kGameSchemaVersion;
  doc["players"] = game.num_players();
  json strategies = json::array();
  for (int i = 0; i < game.num_players(); ++i) {
    strategies.push_back(game.strategy_labels(i));
  }
  doc["strategies"] = std::move(strategies);
  json payoffs = json::array();
  for (int p = 0; p < game.num_profiles(); ++p) {
    json row = json::array();
    for (int i = 0; i < game.num_players(); ++i) {
      row.push_back(game.utility(i, p));
    }
    payoffs.push_back(std::move(row));
  }
  doc["payoffs"] = std::move(payoffs);
  return doc;
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open game file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("game file " + path + ": " + e.what());
  }
  return game_from_json(doc);
}

void save_game(const Game& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file: " + path);
  out << game_to_json(game).dump(2) << "\n";
}

Game builtin_game(const std::string& name, const std::vector<double>& params) {
  if (name == "shapley") return shapley_game();
  if (name == "jordan") return jordan_game(1, 1, 1);
  if (name == "jordan_weighted") {
    if (params.size() != 3) {
      throw std::invalid_argument("jordan_weighted needs 3 win payoffs");
    }
    return jordan_game(params[0], params[1], params[2]);
  }
  if (name == "matching_pennies") return pennies_like(1.0);
  if (name == "matching_pennies_asym") return pennies_like(3.0);
  if (name == "rps") return rps_game();
  throw std::invalid_argument("unknown builtin game: " + name);
}

std::vector<std::string> builtin_names() {
  return {"shapley",          "jordan", "jordan_weighted",
          "matching_pennies", "matching_pennies_asym", "rps"};
}

bool is_generic(const Game& game) {
  for (int index = 0; index < game.num_profiles(); ++index) {
    const PureProfile p = game.profile_at(index);
    for (int i = 0; i < game.num_players(); ++i) {
      for (int s = 0; s < game.num_strategies(i); ++s) {
        if (s == p.strategies[i]) continue;
        if (game.deviation_utility(i, s, p) == game.utility(i, index)) {
          return false;
        }
      }
    }
  }
  return true;
}

Game random_game(const std::vector<int>& dims, std::uint64_t seed,
                 PayoffDistribution distribution) {
  if (dims.empty()) throw std::invalid_argument("random_game needs dimensions");
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("every player needs >= 2 strategies");
  }
  constexpr int kMaxRetries = 64;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<std::vector<std::string>> labels;
    int num_profiles = 1;
    for (int d : dims) {
      labels.push_back(default_labels(d));
      num_profiles *= d;
    }
    const std::size_t total =
        static_cast<std::size_t>(num_profiles) * dims.size();
    std::vector<double> payoffs;
    payoffs.reserve(total);
    if (distribution == PayoffDistribution::Uniform01) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t k = 0; k < total; ++k) payoffs.push_back(u(rng));
    } else {
      std::normal_distribution<double> g(0.0, 1.0);
      for (std::size_t k = 0; k < total; ++k) payoffs.push_back(g(rng));
    }
    Game game(std::move(labels), std::move(payoffs));
    if (is_generic(game)) return game;
  }
  throw RetriesExhausted("random_game: no generic draw after " +
                         std::to_string(kMaxRetries) + " seeds");
}

}  // namespace gdx
