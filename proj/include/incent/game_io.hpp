#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "incent/dynamics.hpp"
#include "incent/game.hpp"
#include "incent/search.hpp"

namespace incent {

inline constexpr int kGameFileVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Document layout: {"version": 1, "players": n, "strategies": counts or
// label lists, "payoffs": one nested array per player, indices in player
// order with the last player fastest}.
nlohmann::json game_to_json(const Game& g);
Game game_from_json(const nlohmann::json& doc);

Game load_game_text(const std::string& text);
Game load_game_stream(std::istream& in);
Game load_game_file(const std::string& path);
std::string save_game_text(const Game& g);

std::vector<std::string> builtin_game_names();
bool is_builtin_game(const std::string& name);
Game builtin_game(const std::string& name);

// Resolution order: "-" reads standard input, then builtin names (with the
// pd/mp/rps shorthands), then a filesystem path, then
// $INCENT_CATALOG_DIR/<name>.json.
Game resolve_game(const std::string& spec);

// Stamped into every output so a run can be reproduced from the file alone.
struct RunManifest {
  std::string game_source;
  std::string incentive;
  nlohmann::json config;
  uint64_t seed = 0;
  std::string tool_version = kToolVersion;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& doc);
};

// Literal grammar: players separated by ';', coordinates by ','.
Profile parse_profile(const std::string& text, const Game& g);
std::string format_profile(const Profile& x);

std::string format_double(double v);
std::string step_method_name(StepMethod method);

// CSV starts with a '#' comment line holding the manifest, then the header
// t,player,strategy,value in long form.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const RunManifest& manifest);
nlohmann::json trajectory_to_json(const Trajectory& traj, const RunManifest& manifest);

// CSV summary columns: start,converged,residual,nash_residual,interior,
// pure,win_win (win_win empty for mixed points). JSON keeps the profiles.
void write_reports_csv(std::ostream& out, const std::vector<EquilibriumReport>& reports,
                       const RunManifest& manifest);
nlohmann::json reports_to_json(const std::vector<EquilibriumReport>& reports,
                               const RunManifest& manifest);

}  // namespace incent
