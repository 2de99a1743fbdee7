#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "incent/dynamics.hpp"
#include "incent/game.hpp"
#include "incent/game_io.hpp"
#include "incent/incentives.hpp"
#include "incent/search.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSimplexViolation = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitVerifyFailed = 4;

struct CommonArgs {
  std::string game;
  std::string incentive;
  std::string output = "-";
  std::string format = "csv";
  uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--game", args.game, "builtin name, file path, or - for standard input")
      ->required();
  cmd->add_option("--incentive", args.incentive, "incentive spec string, e.g. nash or logit:eta=0.5")
      ->required();
  cmd->add_option("--output", args.output, "output file, - for standard output")
      ->capture_default_str();
  cmd->add_option("--output-format", args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "random seed recorded in the manifest")
      ->capture_default_str();
}

int write_output(const std::string& path, const std::string& body) {
  if (path == "-") {
    std::cout << body;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return kExitUsage;
  }
  out << body;
  return kExitOk;
}

struct SimulateArgs {
  CommonArgs common;
  std::string method = "rk4";
  double dt = 0.01;
  double t_max = 100.0;
  double residual_tol = 1e-9;
  double drift_tol = 1e-6;
  std::string drift_policy = "renormalize";
  std::string x0;
};

int run_simulate(const SimulateArgs& args) {
  incent::Game game = incent::resolve_game(args.common.game);
  incent::Incentive inc = incent::parse_incentive(args.common.incentive, game);
  incent::Profile start = args.x0.empty() ? incent::Profile::barycenter(game)
                                          : incent::parse_profile(args.x0, game);

  incent::IntegratorConfig config;
  config.dt = args.method == "discrete-map" || args.method == "map" ? 1.0 : args.dt;
  config.method = args.method == "euler" ? incent::StepMethod::kEuler
                  : args.method == "rk4" ? incent::StepMethod::kRk4
                                         : incent::StepMethod::kDiscreteMap;
  config.max_steps = static_cast<int64_t>(args.t_max / config.dt + 0.5);
  config.residual_tol = args.residual_tol;
  config.drift_tol = args.drift_tol;
  config.policy = args.drift_policy == "reject" ? incent::DriftPolicy::kReject
                                                : incent::DriftPolicy::kRenormalize;

  incent::Trajectory traj = config.method == incent::StepMethod::kDiscreteMap
                                ? incent::iterate_map(game, inc, start, config)
                                : incent::integrate(game, inc, start, config);

  incent::RunManifest manifest;
  manifest.game_source = args.common.game;
  manifest.incentive = args.common.incentive;
  manifest.seed = args.common.seed;
  manifest.config = {{"command", "simulate"},
                     {"method", incent::step_method_name(config.method)},
                     {"dt", config.dt},
                     {"t_max", args.t_max},
                     {"max_steps", config.max_steps},
                     {"residual_tol", config.residual_tol},
                     {"drift_tol", config.drift_tol},
                     {"drift_policy", args.drift_policy},
                     {"x0", args.x0.empty() ? "barycenter" : args.x0}};

  std::string body;
  if (args.common.format == "csv") {
    std::ostringstream os;
    incent::write_trajectory_csv(os, traj, manifest);
    body = os.str();
  } else {
    body = incent::trajectory_to_json(traj, manifest).dump(2) + "\n";
  }
  int rc = write_output(args.common.output, body);
  if (rc != kExitOk) return rc;
  if (traj.status == incent::TerminalStatus::kSimplexViolation) {
    std::cerr << "simulate: trajectory left the simplex after " << traj.points.size() - 1
              << " steps\n";
    return kExitSimplexViolation;
  }
  return kExitOk;
}

struct SolveArgs {
  CommonArgs common;
  int starts = 24;
  int64_t budget = 10000;
  double tol = 1e-9;
  double dedup_radius = 1e-6;
  bool enumerate_pure = false;
};

int run_solve(const SolveArgs& args) {
  incent::Game game = incent::resolve_game(args.common.game);
  incent::Incentive inc = incent::parse_incentive(args.common.incentive, game);

  incent::SearchConfig config;
  config.random_starts = args.starts;
  config.budget = args.budget;
  config.tol = args.tol;
  config.dedup_radius = args.dedup_radius;
  config.seed = args.common.seed;

  std::vector<incent::EquilibriumReport> reports = incent::find_equilibria(game, inc, config);
  if (args.enumerate_pure) {
    std::vector<incent::EquilibriumReport> vertices =
        incent::enumerate_pure_equilibria(game, inc, args.tol);
    for (auto& v : vertices) reports.push_back(std::move(v));
    reports = incent::dedup_reports(std::move(reports), config.dedup_radius);
  }

  incent::RunManifest manifest;
  manifest.game_source = args.common.game;
  manifest.incentive = args.common.incentive;
  manifest.seed = args.common.seed;
  manifest.config = {{"command", "solve"},
                     {"random_starts", config.random_starts},
                     {"budget", config.budget},
                     {"tol", config.tol},
                     {"dedup_radius", config.dedup_radius},
                     {"enumerate_pure", args.enumerate_pure}};

  std::string body;
  if (args.common.format == "csv") {
    std::ostringstream os;
    incent::write_reports_csv(os, reports, manifest);
    body = os.str();
  } else {
    body = incent::reports_to_json(reports, manifest).dump(2) + "\n";
  }
  int rc = write_output(args.common.output, body);
  if (rc != kExitOk) return rc;
  for (const auto& r : reports)
    if (r.converged) return kExitOk;
  std::cerr << "solve: no start converged within tolerance\n";
  return kExitNoConvergence;
}

struct VerifyArgs {
  std::string game;
  std::string incentive;
  std::string profile;
  double tol = 1e-9;
};

int run_verify(const VerifyArgs& args) {
  incent::Game game = incent::resolve_game(args.game);
  incent::Incentive inc = incent::parse_incentive(args.incentive, game);
  incent::Profile x = incent::parse_profile(args.profile, game);
  incent::EquilibriumReport rep = incent::certify(game, inc, x, args.tol);
  std::cout << "parallel-residual " << incent::format_double(rep.residual) << "\n";
  if (rep.map_residual.has_value())
    std::cout << "map-residual " << incent::format_double(*rep.map_residual) << "\n";
  std::cout << "nash-residual " << incent::format_double(rep.nash_residual) << "\n";
  return rep.residual <= args.tol ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-game incentive dynamics: simulate, solve, verify"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate the incentive dynamics or iterate the revision map");
  add_common(simulate, sim.common);
  simulate->add_option("--method", sim.method, "map (revision protocol), euler, or rk4")
      ->check(CLI::IsMember({"map", "discrete-map", "euler", "rk4"}))
      ->capture_default_str();
  simulate->add_option("--dt", sim.dt, "step size (the map always steps by 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--t-max", sim.t_max, "time horizon")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--residual-tol", sim.residual_tol, "stop when the residual drops below this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--drift-tol", sim.drift_tol, "allowed per-player drift off the simplex")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--drift-policy", sim.drift_policy, "renormalize or reject")
      ->check(CLI::IsMember({"renormalize", "reject"}))
      ->capture_default_str();
  simulate->add_option("--x0", sim.x0, "start profile literal, e.g. 0.5,0.5;0.5,0.5 (default barycenter)");

  SolveArgs sol;
  CLI::App* solve = app.add_subcommand("solve", "search for incentive equilibria");
  add_common(solve, sol.common);
  solve->add_option("--starts", sol.starts, "number of random starts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--budget", sol.budget, "iteration budget per start")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--tol", sol.tol, "residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--dedup-radius", sol.dedup_radius, "max-norm radius for merging reports")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_flag("--enumerate-pure", sol.enumerate_pure,
                  "also score every pure profile and merge the reports");

  VerifyArgs ver;
  CLI::App* verify = app.add_subcommand("verify", "check one profile against the equilibrium condition");
  verify->add_option("--game", ver.game, "builtin name, file path, or - for standard input")
      ->required();
  verify->add_option("--incentive", ver.incentive, "incentive spec string")->required();
  verify->add_option("--profile", ver.profile, "profile literal, players split by ';'")->required();
  verify->add_option("--tol", ver.tol, "residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (solve->parsed()) return run_solve(sol);
    return run_verify(ver);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
