#pragma once

// The command-line verbs, usable as a library. Configuration problems raise
// ConfigError; everything else raises ordinary exceptions.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "stlrl/config.hpp"
#include "stlrl/evaluation.hpp"

namespace stlrl {

inline constexpr const char* kMetricsHeader =
    "step,episode,sum_reward,sum_stl_reward,kappa,alpha,actor_loss,critic_r_loss,critic_s_loss";
inline constexpr const char* kEvalHeader =
    "step,episodes,mean_return,std_return,mean_stl_return,std_stl_return,success_rate";

struct RunSummary {
  std::filesystem::path directory;
  EvalReport final_eval;
  double seconds = 0.0;
};

/// Trains one seed into `dir`: metrics.csv, eval.csv, checkpoint.bin (plus
/// checkpoint_<step>.bin at the configured interval) and config.txt.
RunSummary train_run(const RunConfig& config, std::uint64_t seed, const std::filesystem::path& dir,
                     std::ostream& log);

/// Every configured seed (or only `seed`), each into <output_dir>/seed_<k>.
std::vector<RunSummary> cmd_train(const std::filesystem::path& config_path,
                                  std::optional<std::uint64_t> seed, std::ostream& out);

EvalReport cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& config_path,
                    std::optional<std::size_t> episodes, std::ostream& out);

/// Prints robustness, verdict and the window series; returns the robustness.
double cmd_monitor(const std::filesystem::path& trace_csv, const std::string& formula_arg,
                   std::ostream& out);

stl::FragmentInfo cmd_check(const std::string& formula_arg, std::ostream& out);

/// A formula argument is the formula itself, or a path to a file holding it.
std::string resolve_formula(const std::string& arg);

/// Trace CSV with a header x0,x1,... and one row per step.
Trace read_trace_csv(const std::filesystem::path& path);

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config, const Trainer& trainer);
/// Loads the agent stored in a checkpoint; the formula and dimensions must
/// match the configuration.
std::unique_ptr<Agent> load_checkpoint_agent(const std::filesystem::path& path, const RunConfig& config);

/// Shortest round-trip text for a double.
std::string format_number(double v);

}  // namespace stlrl
