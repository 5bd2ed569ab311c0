#pragma once

// Flat `key = value` run configuration. Defaults are the benchmark's
// hyperparameters; `formula` and `l_stl` have no default.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stlrl/agent.hpp"
#include "stlrl/cmdp.hpp"
#include "stlrl/robot_env.hpp"
#include "stlrl/trainer.hpp"

namespace stlrl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string formula;
  double beta = 100.0;
  bool preprocess = true;
  AgentConfig agent;  // obs/action sizes are filled in from the environment
  TrainConfig train;
  EnvConfig env;
  std::vector<std::uint64_t> seeds{0};
  std::size_t eval_episodes = 100;
  std::size_t eval_threads = 1;
  std::size_t checkpoint_interval = 0;  // steps; 0 keeps only the final checkpoint
  std::string output_dir = "runs";

  /// Range and consistency checks that need the parsed formula.
  void validate() const;
};

/// Parses configuration text. Unknown keys, duplicates, malformed values and
/// a missing `formula` or `l_stl` raise ConfigError naming the line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every recognised key with its current value, one `key = value` per line.
std::string dump_config(const RunConfig& config);

/// The parsed and fragment-checked constraint of a configuration.
stl::FragmentInfo config_fragment(const RunConfig& config);

/// The robot tau-CMDP described by a configuration.
TauCmdp make_cmdp(const RunConfig& config);

}  // namespace stlrl
