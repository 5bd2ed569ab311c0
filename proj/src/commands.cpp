#include "stlrl/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace stlrl {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

static constexpr const char* kCheckpointMagic = "stlrl-checkpoint";
static constexpr std::uint64_t kCheckpointVersion = 1;

void save_checkpoint(const fs::path& path, const RunConfig& config, const Trainer& trainer) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint '" + tmp.string() + "'");
    nn::write_string(os, kCheckpointMagic);
    nn::write_u64(os, kCheckpointVersion);
    nn::write_string(os, stl::print(config_fragment(config).formula));
    nn::write_u64(os, config.preprocess ? 1 : 0);
    trainer.save(os);
    if (!os) throw std::runtime_error("writing checkpoint '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

std::unique_ptr<Agent> load_checkpoint_agent(const fs::path& path, const RunConfig& config) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
  if (nn::read_string(is) != kCheckpointMagic)
    throw std::runtime_error("'" + path.string() + "' is not a checkpoint");
  const auto version = nn::read_u64(is);
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const std::string formula = nn::read_string(is);
  const std::string expected = stl::print(config_fragment(config).formula);
  if (formula != expected)
    throw std::runtime_error("checkpoint was trained on '" + formula + "', configuration has '" +
                             expected + "'");
  const bool preprocess = nn::read_u64(is) != 0;
  if (preprocess != config.preprocess)
    throw std::runtime_error("checkpoint and configuration disagree on preprocessing");
  const TauCmdp env = make_cmdp(config);
  AgentConfig ac = config.agent;
  ac.obs_dim = env.observation_dim();
  ac.action_dim = env.action_dim();
  Rng unused;
  auto agent = make_agent(ac, unused);
  Trainer::load_agent(is, *agent);
  return agent;
}

static std::string metrics_line(const MetricsRow& r) {
  return std::to_string(r.step) + "," + std::to_string(r.episode) + "," + format_number(r.sum_reward) +
         "," + format_number(r.sum_stl_reward) + "," + format_number(r.kappa) + "," +
         format_number(r.alpha) + "," + format_number(r.actor_loss) + "," +
         format_number(r.critic_r_loss) + "," + format_number(r.critic_s_loss);
}

static std::string eval_line(std::size_t step, const EvalReport& e) {
  return std::to_string(step) + "," + std::to_string(e.episodes()) + "," + format_number(e.mean_return) +
         "," + format_number(e.std_return) + "," + format_number(e.mean_stl_return) + "," +
         format_number(e.std_stl_return) + "," + format_number(e.success_rate());
}

static EvalOptions eval_options(const RunConfig& config, std::uint64_t seed, std::size_t episodes) {
  EvalOptions eo;
  eo.episodes = episodes;
  eo.episode_length = config.train.episode_length;
  eo.gamma = config.agent.gamma;
  eo.seed = derive_seed(seed, "evaluation");
  eo.threads = config.eval_threads;
  return eo;
}

RunSummary train_run(const RunConfig& config, std::uint64_t seed, const fs::path& dir, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(dir);
  {
    RunConfig used = config;
    used.seeds = {seed};
    std::ofstream(dir / "config.txt") << dump_config(used);
  }
  Trainer trainer(make_cmdp(config), config.agent, config.train, seed);
  std::ofstream metrics(dir / "metrics.csv");
  std::ofstream evals(dir / "eval.csv");
  if (!metrics || !evals) throw std::runtime_error("cannot write into '" + dir.string() + "'");
  metrics << kMetricsHeader << '\n';
  evals << kEvalHeader << '\n';

  RunSummary summary;
  summary.directory = dir;
  std::size_t last_eval = 0;
  const EvalOptions eo = eval_options(config, seed, config.eval_episodes);
  auto run_eval = [&](std::size_t step, const Agent& agent) {
    summary.final_eval = evaluate(agent, trainer.env(), eo);
    evals << eval_line(step, summary.final_eval) << '\n' << std::flush;
    last_eval = step;
  };

  TrainHooks hooks;
  hooks.on_metrics = [&](const MetricsRow& r) { metrics << metrics_line(r) << '\n'; };
  hooks.on_eval = run_eval;
  if (config.checkpoint_interval)
    hooks.on_step = [&](std::size_t step, const Agent&) {
      if (step % config.checkpoint_interval == 0)
        save_checkpoint(dir / ("checkpoint_" + std::to_string(step) + ".bin"), config, trainer);
    };
  try {
    trainer.run(hooks);
  } catch (const DivergenceError&) {
    metrics.flush();
    save_checkpoint(dir / "diverged.bin", config, trainer);
    throw;
  }
  metrics.flush();
  if (last_eval != trainer.steps() || trainer.steps() == 0) run_eval(trainer.steps(), trainer.agent());
  save_checkpoint(dir / "checkpoint.bin", config, trainer);
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "seed " << seed << ": " << trainer.steps() << " steps, " << trainer.episodes()
      << " episodes, kappa " << format_number(trainer.agent().kappa()) << ", success rate "
      << format_number(summary.final_eval.success_rate()) << ", "
      << format_number(std::round(summary.seconds * 10) / 10) << " s -> " << dir.string() << '\n';
  return summary;
}

std::vector<RunSummary> cmd_train(const fs::path& config_path, std::optional<std::uint64_t> seed,
                                  std::ostream& out) {
  const RunConfig config = load_config(config_path);
  std::vector<std::uint64_t> seeds = seed ? std::vector<std::uint64_t>{*seed} : config.seeds;
  std::vector<RunSummary> runs;
  for (auto s : seeds)
    runs.push_back(train_run(config, s, fs::path(config.output_dir) / ("seed_" + std::to_string(s)), out));
  return runs;
}

EvalReport cmd_eval(const fs::path& checkpoint, const fs::path& config_path,
                    std::optional<std::size_t> episodes, std::ostream& out) {
  const RunConfig config = load_config(config_path);
  const std::size_t n = episodes.value_or(config.eval_episodes);
  if (n == 0) throw ConfigError("--episodes must be at least 1");
  const auto agent = load_checkpoint_agent(checkpoint, config);
  const EvalReport r = evaluate(*agent, make_cmdp(config), eval_options(config, config.seeds.front(), n));
  out << "episodes: " << r.episodes() << '\n'
      << "return: " << format_number(r.mean_return) << " +- " << format_number(r.std_return) << '\n'
      << "stl_return: " << format_number(r.mean_stl_return) << " +- " << format_number(r.std_stl_return) << '\n'
      << "successes: " << r.successes << '\n'
      << "success_rate: " << format_number(r.success_rate()) << '\n';
  return r;
}

std::string resolve_formula(const std::string& arg) {
  std::error_code ec;
  if (!arg.empty() && fs::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::ostringstream text;
    text << in.rdbuf();
    std::string s = text.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  }
  return arg;
}

Trace read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace '" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t dim = 0;
  {
    std::istringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) {
      if (col != "x" + std::to_string(dim))
        throw std::runtime_error("trace header column " + std::to_string(dim + 1) + " is '" + col +
                                 "', expected 'x" + std::to_string(dim) + "'");
      ++dim;
    }
  }
  if (dim == 0) throw std::runtime_error("trace header has no columns");
  Trace trace(dim);
  std::size_t line_no = 1;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    row.clear();
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      const char* b = cell.data();
      while (*b == ' ') ++b;
      const auto res = std::from_chars(b, cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != dim)
      throw std::runtime_error("trace line " + std::to_string(line_no) + " has " +
                               std::to_string(row.size()) + " columns, header has " + std::to_string(dim));
    trace.push_back(row);
  }
  return trace;
}

double cmd_monitor(const fs::path& trace_csv, const std::string& formula_arg, std::ostream& out) {
  const Trace trace = read_trace_csv(trace_csv);
  const stl::Formula f = stl::parse(resolve_formula(formula_arg), trace.dim());
  const std::size_t need = stl::horizon(f) + 1;
  if (trace.size() < need)
    throw std::runtime_error("trace has " + std::to_string(trace.size()) + " rows, the formula needs " +
                             std::to_string(need));
  const double rho = stl::robustness(trace, 0, f);
  const bool verdict = stl::eval_boolean(trace, 0, f);
  out << "formula: " << stl::print(f) << '\n'
      << "robustness: " << format_number(rho) << '\n'
      << "verdict: " << (verdict ? "satisfied" : "violated") << '\n';
  try {
    const auto info = stl::validate_fragment(f);
    const auto series = window_robustness_series(trace.slice(0, need), info);
    out << "tau: " << info.tau << '\n' << "window,robustness\n";
    for (std::size_t k = 0; k < series.size(); ++k) out << k << ',' << format_number(series[k]) << '\n';
  } catch (const stl::FragmentError& e) {
    out << "window series unavailable: " << e.what() << '\n';
  }
  return rho;
}

stl::FragmentInfo cmd_check(const std::string& formula_arg, std::ostream& out) {
  const std::string text = resolve_formula(formula_arg);
  const stl::Formula f = stl::parse(text, 3);
  const auto info = stl::validate_fragment(f);
  out << "formula: " << stl::print(info.formula) << '\n'
      << "outer: " << (info.outer == stl::Outer::Globally ? "G" : "F") << "[0," << info.k_end << "]\n"
      << "horizon: " << stl::horizon(info.formula) << '\n'
      << "tau: " << info.tau << '\n'
      << "subformulae: " << info.subformulae.size() << '\n';
  for (std::size_t i = 0; i < info.subformulae.size(); ++i)
    out << "  phi" << i + 1 << ": " << stl::print(info.subformulae[i]) << '\n';
  out << "flag_eligible: " << (info.flag_eligible ? "yes" : "no") << '\n'
      << "input_dim_flags: " << 3 + info.subformulae.size() << '\n'
      << "input_dim_window: " << 3 * info.tau << '\n';
  return info;
}

}  // namespace stlrl
