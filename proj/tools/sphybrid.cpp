// Command-line front end: validate, certify, simulate, sweep, reproduce.

#include "sph/commands.hpp"
#include "sph/config.hpp"
#include "sph/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const sph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == sph::ErrorCode::Parse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dwell-time certification of singularly perturbed linear hybrid systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<double> eps;
  bool strict_b3 = false;
  double tau = 0.0;
  std::string schedule_path;
  std::string label = "trajectory";
  int example_id = 0;
  std::string out_dir;

  auto* validate = app.add_subcommand("validate", "check the system and the decoupling assumptions");
  validate->add_option("config", config_path, "configuration file")->required();

  auto* certify = app.add_subcommand("certify", "compute dwell-time certificates");
  certify->add_option("config", config_path, "configuration file")->required();
  certify->add_option("--eps", eps, "epsilon values")->expected(1, -1);
  certify->add_flag("--strict-b3", strict_b3, "use the b3 weighting with the extra Qf factor");

  auto* simulate = app.add_subcommand("simulate", "simulate under a periodic or supplied schedule");
  simulate->add_option("config", config_path, "configuration file")->required();
  auto* tau_opt = simulate->add_option("--tau", tau, "periodic dwell time in seconds");
  auto* sched_opt = simulate->add_option("--schedule", schedule_path, "schedule file");
  tau_opt->excludes(sched_opt);
  simulate->add_option("--label", label, "output file stem");

  auto* sweep = app.add_subcommand("sweep", "certificates over a list of epsilon values");
  sweep->add_option("config", config_path, "configuration file")->required();
  sweep->add_option("--eps", eps, "epsilon values")->expected(0, -1);

  auto* reproduce = app.add_subcommand("reproduce", "run the bundled example 1 or 2");
  reproduce->add_option("id", example_id, "example id")->required();
  reproduce->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return run_guarded([&]() -> int {
    if (*reproduce) {
      std::optional<std::filesystem::path> dir;
      if (!out_dir.empty()) dir = out_dir;
      return sph::cli::cmd_reproduce(example_id, dir, std::cout);
    }
    const auto cfg = sph::config::load(config_path);
    if (*validate) return sph::cli::cmd_validate(cfg, std::cout);
    if (*certify) return sph::cli::cmd_certify(cfg, {eps, strict_b3}, std::cout);
    if (*sweep) return sph::cli::cmd_sweep(cfg, eps.empty() ? cfg.eps : eps, std::cout);
    sph::cli::SimulateArgs args;
    if (*tau_opt) args.tau = tau;
    if (*sched_opt) args.schedule_file = schedule_path;
    args.label = label;
    return sph::cli::cmd_simulate(cfg, args, std::cout);
  });
}
