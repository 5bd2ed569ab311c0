// stlrl: train, evaluate and monitor STL-constrained policies on the robot benchmark.
//
// Exit codes: 0 ok, 1 usage, 2 configuration or formula, 3 runtime failure.

#include <CLI11.hpp>

#include <iostream>

#include "stlrl/commands.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STL-constrained deep reinforcement learning"};
  app.require_subcommand(1);

  std::string config, ckpt, trace, formula;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;

  auto* train = app.add_subcommand("train", "Train one run per configured seed");
  train->add_option("--config", config, "Run configuration file")->required();
  train->add_option("--seed", seed, "Train only this seed");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with the deterministic policy");
  eval->add_option("--ckpt", ckpt, "Checkpoint file")->required();
  eval->add_option("--config", config, "Run configuration file")->required();
  eval->add_option("--episodes", episodes, "Number of rollouts (default: eval_episodes)");

  auto* monitor = app.add_subcommand("monitor", "Robustness of a recorded trace");
  monitor->add_option("--trace", trace, "CSV trace with header x0,x1,...")->required();
  monitor->add_option("--formula", formula, "Formula text or a file holding it")->required();

  auto* check = app.add_subcommand("check", "Horizon, tau and flag eligibility of a formula");
  check->add_option("--formula", formula, "Formula text or a file holding it")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) stlrl::cmd_train(config, seed, std::cout);
    if (*eval) stlrl::cmd_eval(ckpt, config, episodes, std::cout);
    if (*monitor) stlrl::cmd_monitor(trace, formula, std::cout);
    if (*check) stlrl::cmd_check(formula, std::cout);
  } catch (const stlrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const stlrl::stl::ParseError& e) {
    std::cerr << "formula error: " << e.what() << '\n';
    return kConfig;
  } catch (const stlrl::stl::FragmentError& e) {
    std::cerr << "formula error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
