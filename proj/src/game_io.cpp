#include "incent/game_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace incent {

namespace {

using nlohmann::json;

void flatten_payoffs(const json& node, const std::vector<int>& counts, size_t depth, int player,
                     std::vector<double>& out) {
  if (!node.is_array())
    throw std::invalid_argument("game file: payoffs for player " + std::to_string(player) +
                                " are not nested to depth " + std::to_string(counts.size()));
  if (static_cast<int>(node.size()) != counts[depth])
    throw std::invalid_argument("game file: payoffs for player " + std::to_string(player) +
                                " have " + std::to_string(node.size()) + " entries at depth " +
                                std::to_string(depth) + ", expected " + std::to_string(counts[depth]));
  if (depth + 1 == counts.size()) {
    for (const auto& v : node) {
      if (!v.is_number())
        throw std::invalid_argument("game file: payoff entry " + std::to_string(out.size()) +
                                    " for player " + std::to_string(player) + " is not a number");
      double d = v.get<double>();
      if (!std::isfinite(d))
        throw std::invalid_argument("game file: payoff entry " + std::to_string(out.size()) +
                                    " for player " + std::to_string(player) + " is not finite");
      out.push_back(d);
    }
  } else {
    for (const auto& child : node) flatten_payoffs(child, counts, depth + 1, player, out);
  }
}

json nest_payoffs(const std::vector<double>& flat, const std::vector<int>& counts, size_t depth,
                  int64_t& cursor) {
  json arr = json::array();
  if (depth + 1 == counts.size()) {
    for (int a = 0; a < counts[depth]; ++a) arr.push_back(flat[static_cast<size_t>(cursor++)]);
  } else {
    for (int a = 0; a < counts[depth]; ++a) arr.push_back(nest_payoffs(flat, counts, depth + 1, cursor));
  }
  return arr;
}

Game make_game(std::vector<int> counts, std::vector<std::vector<double>> payoffs,
               std::vector<std::vector<std::string>> labels = {}) {
  return Game(std::move(counts), std::move(payoffs), std::move(labels));
}

Game make_prisoners_dilemma() {
  return make_game({2, 2},
                   {{3, 0, 5, 1}, {3, 5, 0, 1}},
                   {{"Cooperate", "Defect"}, {"Cooperate", "Defect"}});
}

Game make_matching_pennies() {
  return make_game({2, 2},
                   {{1, -1, -1, 1}, {-1, 1, 1, -1}},
                   {{"Heads", "Tails"}, {"Heads", "Tails"}});
}

Game make_rock_paper_scissors() {
  std::vector<double> p1 = {0, -1, 1, 1, 0, -1, -1, 1, 0};
  std::vector<double> p2(p1.size());
  for (size_t k = 0; k < p1.size(); ++k) p2[k] = -p1[k];
  return make_game({3, 3}, {p1, p2},
                   {{"Rock", "Paper", "Scissors"}, {"Rock", "Paper", "Scissors"}});
}

Game make_coordination_2x2() {
  return make_game({2, 2}, {{2, 0, 0, 1}, {2, 0, 0, 1}}, {{"A", "B"}, {"A", "B"}});
}

// claims 2..5 with reward/penalty 2 for undercutting
Game make_travelers_dilemma_small() {
  const int lo = 2;
  const int s = 4;
  const double bonus = 2.0;
  std::vector<double> p1(static_cast<size_t>(s) * s);
  std::vector<double> p2(static_cast<size_t>(s) * s);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      double ca = lo + a;
      double cb = lo + b;
      double low = std::min(ca, cb);
      double u1 = ca == cb ? ca : (ca < cb ? low + bonus : low - bonus);
      double u2 = ca == cb ? cb : (cb < ca ? low + bonus : low - bonus);
      p1[static_cast<size_t>(a) * s + b] = u1;
      p2[static_cast<size_t>(a) * s + b] = u2;
    }
  }
  std::vector<std::string> names;
  for (int a = 0; a < s; ++a) names.push_back("Claim" + std::to_string(lo + a));
  return make_game({s, s}, {p1, p2}, {names, names});
}

Game make_three_player_majority() {
  std::vector<int> counts = {2, 2, 2};
  std::vector<std::vector<double>> payoffs(3, std::vector<double>(8, 0.0));
  for (int flat = 0; flat < 8; ++flat) {
    int d0 = (flat >> 2) & 1;
    int d1 = (flat >> 1) & 1;
    int d2 = flat & 1;
    int ones = d0 + d1 + d2;
    int majority = ones >= 2 ? 1 : 0;
    payoffs[0][static_cast<size_t>(flat)] = d0 == majority ? 1.0 : 0.0;
    payoffs[1][static_cast<size_t>(flat)] = d1 == majority ? 1.0 : 0.0;
    payoffs[2][static_cast<size_t>(flat)] = d2 == majority ? 1.0 : 0.0;
  }
  return make_game(counts, payoffs, {{"A", "B"}, {"A", "B"}, {"A", "B"}});
}

std::string canonical_builtin(const std::string& name) {
  if (name == "pd") return "prisoners_dilemma";
  if (name == "mp") return "matching_pennies";
  if (name == "rps") return "rock_paper_scissors";
  return name;
}

}  // namespace

nlohmann::json game_to_json(const Game& g) {
  json doc;
  doc["version"] = kGameFileVersion;
  doc["players"] = g.num_players();
  if (g.has_labels()) {
    json strategies = json::array();
    for (int i = 0; i < g.num_players(); ++i) strategies.push_back(g.labels(i));
    doc["strategies"] = strategies;
  } else {
    doc["strategies"] = g.strategy_counts();
  }
  json payoffs = json::array();
  for (int i = 0; i < g.num_players(); ++i) {
    int64_t cursor = 0;
    payoffs.push_back(nest_payoffs(g.payoff_tensor(i), g.strategy_counts(), 0, cursor));
  }
  doc["payoffs"] = payoffs;
  return doc;
}

Game game_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("game file: document is not an object");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kGameFileVersion)
    throw std::invalid_argument("game file: missing or unsupported version (expected " +
                                std::to_string(kGameFileVersion) + ")");
  if (!doc.contains("players") || !doc["players"].is_number_integer())
    throw std::invalid_argument("game file: missing player count");
  int n = doc["players"].get<int>();
  if (n <= 0) throw std::invalid_argument("game file: player count must be positive");
  if (!doc.contains("strategies") || !doc["strategies"].is_array() ||
      static_cast<int>(doc["strategies"].size()) != n)
    throw std::invalid_argument("game file: strategies must list one entry per player");

  std::vector<int> counts;
  std::vector<std::vector<std::string>> labels;
  bool labeled = false;
  for (int i = 0; i < n; ++i) {
    const json& entry = doc["strategies"][static_cast<size_t>(i)];
    if (entry.is_number_integer()) {
      counts.push_back(entry.get<int>());
    } else if (entry.is_array()) {
      labeled = true;
      std::vector<std::string> names;
      for (const auto& lbl : entry) {
        if (!lbl.is_string())
          throw std::invalid_argument("game file: strategy labels for player " + std::to_string(i) +
                                      " must be strings");
        names.push_back(lbl.get<std::string>());
      }
      counts.push_back(static_cast<int>(names.size()));
      labels.push_back(std::move(names));
    } else {
      throw std::invalid_argument("game file: strategies entry for player " + std::to_string(i) +
                                  " must be a count or a label list");
    }
  }
  if (labeled && static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("game file: mixing counts and label lists is not supported");

  if (!doc.contains("payoffs") || !doc["payoffs"].is_array() ||
      static_cast<int>(doc["payoffs"].size()) != n)
    throw std::invalid_argument("game file: payoffs must hold one tensor per player");
  std::vector<std::vector<double>> payoffs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> flat;
    flatten_payoffs(doc["payoffs"][static_cast<size_t>(i)], counts, 0, i, flat);
    payoffs.push_back(std::move(flat));
  }
  return Game(std::move(counts), std::move(payoffs), std::move(labels));
}

Game load_game_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("game file: invalid JSON: ") + e.what());
  }
  return game_from_json(doc);
}

Game load_game_stream(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_game_text(buf.str());
}

Game load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("game file: cannot open '" + path + "'");
  return load_game_stream(in);
}

std::string save_game_text(const Game& g) { return game_to_json(g).dump(2) + "\n"; }

std::vector<std::string> builtin_game_names() {
  return {"coordination_2x2",  "matching_pennies",       "prisoners_dilemma",
          "rock_paper_scissors", "three_player_majority", "travelers_dilemma_small"};
}

bool is_builtin_game(const std::string& name) {
  std::string canon = canonical_builtin(name);
  for (const auto& k : builtin_game_names())
    if (k == canon) return true;
  return false;
}

Game builtin_game(const std::string& name) {
  std::string canon = canonical_builtin(name);
  if (canon == "prisoners_dilemma") return make_prisoners_dilemma();
  if (canon == "matching_pennies") return make_matching_pennies();
  if (canon == "rock_paper_scissors") return make_rock_paper_scissors();
  if (canon == "coordination_2x2") return make_coordination_2x2();
  if (canon == "travelers_dilemma_small") return make_travelers_dilemma_small();
  if (canon == "three_player_majority") return make_three_player_majority();
  std::string msg = "unknown builtin game '" + name + "'; available:";
  for (const auto& k : builtin_game_names()) msg += " " + k;
  throw std::invalid_argument(msg);
}

Game resolve_game(const std::string& spec) {
  if (spec == "-") return load_game_stream(std::cin);
  if (is_builtin_game(spec)) return builtin_game(spec);
  {
    std::ifstream in(spec);
    if (in) return load_game_stream(in);
  }
  if (const char* dir = std::getenv("INCENT_CATALOG_DIR")) {
    std::string path = std::string(dir) + "/" + spec + ".json";
    std::ifstream in(path);
    if (in) return load_game_stream(in);
  }
  std::string msg = "cannot resolve game '" + spec + "': not a builtin, not a readable file";
  if (std::getenv("INCENT_CATALOG_DIR") == nullptr)
    msg += " (INCENT_CATALOG_DIR is unset)";
  msg += "; builtins:";
  for (const auto& k : builtin_game_names()) msg += " " + k;
  throw std::invalid_argument(msg);
}

nlohmann::json RunManifest::to_json() const {
  json doc;
  doc["game"] = game_source;
  doc["incentive"] = incentive;
  doc["config"] = config;
  doc["seed"] = seed;
  doc["tool_version"] = tool_version;
  return doc;
}

RunManifest RunManifest::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("game") || !doc.contains("incentive") ||
      !doc.contains("config") || !doc.contains("seed") || !doc.contains("tool_version"))
    throw std::invalid_argument("manifest: missing fields");
  RunManifest m;
  m.game_source = doc["game"].get<std::string>();
  m.incentive = doc["incentive"].get<std::string>();
  m.config = doc["config"];
  m.seed = doc["seed"].get<uint64_t>();
  m.tool_version = doc["tool_version"].get<std::string>();
  return m;
}

Profile parse_profile(const std::string& text, const Game& g) {
  std::vector<std::vector<double>> coords;
  std::vector<double> current;
  std::string token;
  auto flush_token = [&]() {
    if (token.empty()) throw std::invalid_argument("profile literal: empty coordinate");
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("profile literal: cannot parse '" + token + "'");
    }
    if (pos != token.size())
      throw std::invalid_argument("profile literal: cannot parse '" + token + "'");
    current.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush_token();
    } else if (c == ';') {
      flush_token();
      coords.push_back(std::move(current));
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      token += c;
    }
  }
  flush_token();
  coords.push_back(std::move(current));
  if (static_cast<int>(coords.size()) != g.num_players())
    throw std::invalid_argument("profile literal: found " + std::to_string(coords.size()) +
                                " players, game has " + std::to_string(g.num_players()));
  for (int i = 0; i < g.num_players(); ++i)
    if (static_cast<int>(coords[static_cast<size_t>(i)].size()) != g.num_strategies(i))
      throw std::invalid_argument("profile literal: player " + std::to_string(i) + " has " +
                                  std::to_string(coords[static_cast<size_t>(i)].size()) +
                                  " coordinates, expected " + std::to_string(g.num_strategies(i)));
  return Profile(std::move(coords));
}

std::string format_profile(const Profile& x) {
  std::string out;
  for (int i = 0; i < x.num_players(); ++i) {
    if (i) out += ";";
    for (size_t a = 0; a < x[i].size(); ++a) {
      if (a) out += ",";
      out += format_double(x[i][a]);
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string step_method_name(StepMethod method) {
  switch (method) {
    case StepMethod::kDiscreteMap:
      return "discrete-map";
    case StepMethod::kEuler:
      return "euler";
    case StepMethod::kRk4:
      return "rk4";
  }
  return "unknown";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const RunManifest& manifest) {
  out << "# " << manifest.to_json().dump() << "\n";
  out << "t,player,strategy,value\n";
  for (size_t k = 0; k < traj.points.size(); ++k) {
    const State& x = traj.points[k];
    std::string t = format_double(traj.times[k]);
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t a = 0; a < x[i].size(); ++a)
        out << t << "," << i << "," << a << "," << format_double(x[i][a]) << "\n";
  }
}

nlohmann::json trajectory_to_json(const Trajectory& traj, const RunManifest& manifest) {
  json doc;
  doc["manifest"] = manifest.to_json();
  doc["method"] = step_method_name(traj.method);
  doc["dt"] = traj.dt;
  doc["incentive"] = traj.incentive;
  doc["status"] = traj.status_string();
  doc["final_residual"] = traj.final_residual;
  doc["times"] = traj.times;
  json points = json::array();
  for (const State& x : traj.points) points.push_back(x);
  doc["points"] = points;
  return doc;
}

void write_reports_csv(std::ostream& out, const std::vector<EquilibriumReport>& reports,
                       const RunManifest& manifest) {
  out << "# " << manifest.to_json().dump() << "\n";
  out << "start,converged,residual,nash_residual,interior,pure,win_win\n";
  for (const auto& r : reports) {
    out << r.start << "," << (r.converged ? 1 : 0) << "," << format_double(r.residual) << ","
        << format_double(r.nash_residual) << "," << (r.interior ? 1 : 0) << ","
        << (r.pure ? 1 : 0) << ",";
    if (r.win_win.has_value()) out << (*r.win_win ? 1 : 0);
    out << "\n";
  }
}

nlohmann::json reports_to_json(const std::vector<EquilibriumReport>& reports,
                               const RunManifest& manifest) {
  json doc;
  doc["manifest"] = manifest.to_json();
  json arr = json::array();
  for (const auto& r : reports) {
    json item;
    item["profile"] = r.profile.coords();
    item["residual"] = r.residual;
    item["map_residual"] = r.map_residual.has_value() ? json(*r.map_residual) : json(nullptr);
    item["nash_residual"] = r.nash_residual;
    item["interior"] = r.interior;
    item["pure"] = r.pure;
    item["win_win"] = r.win_win.has_value() ? json(*r.win_win) : json(nullptr);
    item["start"] = r.start;
    item["iterations"] = r.iterations;
    item["converged"] = r.converged;
    arr.push_back(item);
  }
  doc["reports"] = arr;
  return doc;
}

}  // namespace incent
