#pragma once

#include "gdx/game.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdx {

/// Game-file violation; the message names the offending field.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kGameSchemaVersion = 1;

/// JSON game file: schema_version, players, strategies (per-player label
/// lists), payoffs (one N-vector per profile, row-major, last player
/// fastest). Round-trips the tensor bitwise.
Game load_game(const std::string& path);
void save_game(const Game& game, const std::string& path);

Game game_from_json(const nlohmann::json& doc);
nlohmann::json game_to_json(const Game& game);

/// Canonical instances: shapley, jordan, jordan_weighted(a,b,c),
/// matching_pennies, matching_pennies_asym, rps.
Game builtin_game(const std::string& name, const std::vector<double>& params = {});
std::vector<std::string> builtin_names();

enum class PayoffDistribution { Uniform01, Gauss };

struct RetriesExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic i.i.d. game; regenerates with an incremented seed until no
/// player has exactly tied unilateral-deviation payoffs (bounded retries).
Game random_game(const std::vector<int>& dims, std::uint64_t seed,
                 PayoffDistribution distribution = PayoffDistribution::Uniform01);

/// True when no player's unilateral deviations ever tie exactly.
bool is_generic(const Game& game);

}  // namespace gdx
