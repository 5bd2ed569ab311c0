#include "stlrl/evaluation.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace stlrl {

static Trace constraint_prefix(const Trace& trace, const stl::FragmentInfo& info) {
  const std::size_t need = stl::horizon(info.formula) + 1;
  if (trace.size() < need)
    throw std::invalid_argument("trace of " + std::to_string(trace.size()) +
                                " states is shorter than the constraint horizon + 1 = " +
                                std::to_string(need));
  return trace.slice(0, need);
}

double constraint_robustness(const Trace& trace, const stl::FragmentInfo& info) {
  return trajectory_robustness(constraint_prefix(trace, info), info);
}

Rollout rollout(const Agent& agent, TauCmdp& env, std::span<const double> x0, std::size_t steps,
                double gamma, Rng& rng) {
  Rollout r;
  std::vector<double> obs = env.reset_to(x0);
  double discount = 1.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<double> a = agent.act(obs);
    Transition tr = env.step(a, rng);
    r.discounted_return += discount * tr.reward;
    r.discounted_stl_return += discount * tr.stl_reward;
    discount *= gamma;
    obs = std::move(tr.next_observation);
  }
  const Trace prefix = constraint_prefix(env.history(), env.fragment());
  r.robustness = trajectory_robustness(prefix, env.fragment());
  r.satisfied = stl::eval_boolean(prefix, 0, env.fragment().formula);
  if (r.robustness != 0.0 && (r.robustness > 0.0) != r.satisfied)
    throw std::logic_error("robustness and Boolean verdict disagree on an evaluation rollout");
  return r;
}

EvalReport evaluate(const Agent& agent, const TauCmdp& env, const EvalOptions& options) {
  if (options.episodes == 0) throw std::invalid_argument("evaluation needs at least one episode");
  EvalReport report;
  report.rollouts.resize(options.episodes);
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, options.episodes));

  auto work = [&](std::size_t w, const Agent& policy) {
    TauCmdp local = env;
    for (std::size_t i = w; i < options.episodes; i += workers) {
      Rng rng(derive_seed(options.seed, "eval", i));
      const auto x0 = local.plant().reset(rng);
      report.rollouts[i] = rollout(policy, local, x0, options.episode_length, options.gamma, rng);
    }
  };

  if (workers == 1) {
    work(0, agent);
  } else {
    std::vector<std::unique_ptr<Agent>> snapshots;
    for (std::size_t w = 0; w < workers; ++w) snapshots.push_back(agent.clone());
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w, *snapshots[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  const double n = static_cast<double>(options.episodes);
  for (const auto& r : report.rollouts) {
    report.mean_return += r.discounted_return / n;
    report.mean_stl_return += r.discounted_stl_return / n;
    if (r.robustness >= 0.0) ++report.successes;
  }
  for (const auto& r : report.rollouts) {
    report.std_return += std::pow(r.discounted_return - report.mean_return, 2) / n;
    report.std_stl_return += std::pow(r.discounted_stl_return - report.mean_stl_return, 2) / n;
  }
  report.std_return = std::sqrt(report.std_return);
  report.std_stl_return = std::sqrt(report.std_stl_return);
  return report;
}

}  // namespace stlrl
