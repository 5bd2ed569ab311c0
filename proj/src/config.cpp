#include "stlrl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace stlrl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? p : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

double to_double(std::string_view v) {
  double d = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(d))
    throw ConfigError("expected a finite number, got '" + std::string(v) + "'");
  return d;
}

std::uint64_t to_count(std::string_view v) {
  std::uint64_t n = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), n);
  if (res.ec == std::errc() && res.ptr == v.data() + v.size()) return n;
  // Scientific notation such as 6e5 is accepted when it denotes an integer.
  const double d = to_double(v);
  if (d < 0.0 || d != std::floor(d) || d > 9.0e15)
    throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
  return static_cast<std::uint64_t>(d);
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> to_doubles(std::string_view v, std::size_t expected) {
  std::vector<double> out;
  for (auto part : split(v, ',')) out.push_back(to_double(part));
  if (expected && out.size() != expected)
    throw ConfigError("expected " + std::to_string(expected) + " comma-separated numbers, got '" +
                      std::string(v) + "'");
  return out;
}

Box2 to_box(std::string_view v) {
  const auto d = to_doubles(v, 4);
  return {d[0], d[1], d[2], d[3]};
}

std::vector<std::uint64_t> to_seeds(std::string_view v) {
  std::vector<std::uint64_t> out;
  for (auto part : split(v, ',')) {
    const auto dots = part.find("..");
    if (dots != std::string_view::npos) {
      const auto lo = to_count(trim(part.substr(0, dots))), hi = to_count(trim(part.substr(dots + 2)));
      if (hi < lo) throw ConfigError("empty seed range '" + std::string(part) + "'");
      if (hi - lo > 100000) throw ConfigError("seed range too long");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(to_count(part));
    }
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class Range>
std::string join(const Range& r, auto&& fmt) {
  std::string s;
  for (const auto& x : r) {
    if (!s.empty()) s += ",";
    s += fmt(x);
  }
  return s;
}

std::string box_value(const Box2& b) {
  return num(b.x_lo) + "," + num(b.x_hi) + "," + num(b.y_lo) + "," + num(b.y_hi);
}

struct Key {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Field>
Key real(Field field) {
  return {[field](RunConfig& c, std::string_view v) { field(c) = to_double(v); },
          [field](const RunConfig& c) { return num(field(const_cast<RunConfig&>(c))); }};
}

template <class Field>
Key count(Field field) {
  return {[field](RunConfig& c, std::string_view v) { field(c) = to_count(v); },
          [field](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); }};
}

template <class Field>
Key flag(Field field) {
  return {[field](RunConfig& c, std::string_view v) { field(c) = to_bool(v); },
          [field](const RunConfig& c) { return std::string(field(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <class Field>
Key box(Field field) {
  return {[field](RunConfig& c, std::string_view v) { field(c) = to_box(v); },
          [field](const RunConfig& c) { return box_value(field(const_cast<RunConfig&>(c))); }};
}

const std::map<std::string, Key, std::less<>>& keys() {
  static const std::map<std::string, Key, std::less<>> table = {
      {"algorithm", {[](RunConfig& c, std::string_view v) {
                       try {
                         c.agent.algorithm = parse_algorithm(v);
                       } catch (const std::invalid_argument& e) {
                         throw ConfigError(e.what());
                       }
                     },
                     [](const RunConfig& c) { return to_string(c.agent.algorithm); }}},
      {"formula", {[](RunConfig& c, std::string_view v) { c.formula = std::string(v); },
                   [](const RunConfig& c) { return c.formula; }}},
      {"beta", real([](RunConfig& c) -> double& { return c.beta; })},
      {"l_stl", real([](RunConfig& c) -> double& { return c.agent.l_stl; })},
      {"preprocess", flag([](RunConfig& c) -> bool& { return c.preprocess; })},
      {"gamma", real([](RunConfig& c) -> double& { return c.agent.gamma; })},
      {"xi", real([](RunConfig& c) -> double& { return c.agent.xi; })},
      {"lr", real([](RunConfig& c) -> double& { return c.agent.lr; })},
      {"alpha_lr", real([](RunConfig& c) -> double& { return c.agent.alpha_lr; })},
      {"kappa_lr", real([](RunConfig& c) -> double& { return c.agent.kappa_lr; })},
      {"kappa0", real([](RunConfig& c) -> double& { return c.agent.kappa0; })},
      {"alpha0", real([](RunConfig& c) -> double& { return c.agent.alpha0; })},
      {"target_entropy", real([](RunConfig& c) -> double& { return c.agent.target_entropy; })},
      {"target_noise", real([](RunConfig& c) -> double& { return c.agent.target_noise; })},
      {"target_noise_clip", real([](RunConfig& c) -> double& { return c.agent.target_noise_clip; })},
      {"policy_delay", count([](RunConfig& c) -> std::size_t& { return c.agent.policy_delay; })},
      {"ou_p1", real([](RunConfig& c) -> double& { return c.agent.ou.p1; })},
      {"ou_p2", real([](RunConfig& c) -> double& { return c.agent.ou.p2; })},
      {"ou_p3", real([](RunConfig& c) -> double& { return c.agent.ou.p3; })},
      {"hidden", {[](RunConfig& c, std::string_view v) {
                    c.agent.hidden.clear();
                    for (auto part : split(v, ',')) c.agent.hidden.push_back(to_count(part));
                  },
                  [](const RunConfig& c) {
                    return join(c.agent.hidden, [](std::size_t h) { return std::to_string(h); });
                  }}},
      {"total_steps", count([](RunConfig& c) -> std::size_t& { return c.train.total_steps; })},
      {"pretrain_steps", count([](RunConfig& c) -> std::size_t& { return c.train.pretrain_steps; })},
      {"episode_length", count([](RunConfig& c) -> std::size_t& { return c.train.episode_length; })},
      {"batch_size", count([](RunConfig& c) -> std::size_t& { return c.train.batch_size; })},
      {"buffer_capacity", count([](RunConfig& c) -> std::size_t& { return c.train.buffer_capacity; })},
      {"metrics_interval", count([](RunConfig& c) -> std::size_t& { return c.train.metrics_interval; })},
      {"eval_interval", count([](RunConfig& c) -> std::size_t& { return c.train.eval_interval; })},
      {"eval_episodes", count([](RunConfig& c) -> std::size_t& { return c.eval_episodes; })},
      {"eval_threads", count([](RunConfig& c) -> std::size_t& { return c.eval_threads; })},
      {"checkpoint_interval", count([](RunConfig& c) -> std::size_t& { return c.checkpoint_interval; })},
      {"seeds", {[](RunConfig& c, std::string_view v) { c.seeds = to_seeds(v); },
                 [](const RunConfig& c) {
                   return join(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
                 }}},
      {"output_dir", {[](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
                      [](const RunConfig& c) { return c.output_dir; }}},
      {"env.delta", real([](RunConfig& c) -> double& { return c.env.delta; })},
      {"env.noise_scale", real([](RunConfig& c) -> double& { return c.env.noise_scale; })},
      {"env.noise", flag([](RunConfig& c) -> bool& { return c.env.noise; })},
      {"env.initial_heading", real([](RunConfig& c) -> double& { return c.env.initial_heading; })},
      {"env.working_area", box([](RunConfig& c) -> Box2& { return c.env.working_area; })},
      {"env.region1", box([](RunConfig& c) -> Box2& { return c.env.region1; })},
      {"env.region2", box([](RunConfig& c) -> Box2& { return c.env.region2; })},
      {"env.initial_area", box([](RunConfig& c) -> Box2& { return c.env.initial_area; })},
      {"env.input_offsets", {[](RunConfig& c, std::string_view v) {
                               const auto d = to_doubles(v, 3);
                               c.env.input_offsets = {d[0], d[1], d[2]};
                             },
                             [](const RunConfig& c) { return join(c.env.input_offsets, num); }}},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + std::string(key) + "'");
    try {
      it->second.set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + std::string(key) + ": " + e.what());
    }
  }
  if (!seen.contains("formula")) throw ConfigError("missing required key 'formula'");
  if (!seen.contains("l_stl")) throw ConfigError("missing required key 'l_stl'");
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const RunConfig& config) {
  std::string out;
  for (const auto& [name, key] : keys()) out += name + " = " + key.get(config) + "\n";
  return out;
}

stl::FragmentInfo config_fragment(const RunConfig& config) {
  try {
    return stl::validate_fragment(stl::parse(config.formula, 3));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("formula: ") + e.what());
  }
}

void RunConfig::validate() const {
  try {
    agent.validate_rates();
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (eval_episodes == 0) throw ConfigError("eval_episodes must be at least 1");
  if (eval_threads == 0) throw ConfigError("eval_threads must be at least 1");
  const auto info = config_fragment(*this);
  try {
    train.validate(info.tau);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto hrz = stl::horizon(info.formula);
  if (train.episode_length < hrz)
    throw ConfigError("episode_length " + std::to_string(train.episode_length) +
                      " cannot cover the formula horizon " + std::to_string(hrz));
  if (preprocess && !info.flag_eligible)
    throw ConfigError("formula is not flag-eligible (every sub-formula must end at tau - 1 = " +
                      std::to_string(info.tau - 1) + "); set preprocess = false to train on the raw window");
}

TauCmdp make_cmdp(const RunConfig& config) {
  return TauCmdp(std::make_shared<RobotEnv>(config.env), config_fragment(config), config.beta,
                 config.preprocess);
}

}  // namespace stlrl
