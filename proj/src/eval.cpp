// Copyright 2026 The stochgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stochgrasp/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>

#include "stochgrasp/normal.hpp"
#include "stochgrasp/rng.hpp"

namespace stochgrasp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Seed streams under the master seed.
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kPlannerStream = 2;
constexpr std::uint64_t kMonteCarloStream = 3;

TrialRecord make_record(int trial, std::uint64_t env_seed, PlannerKind planner, int mc_samples) {
  TrialRecord r;
  r.trial = trial;
  r.env_seed = env_seed;
  r.planner = planner;
  r.mc_samples = mc_samples;
  return r;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

McEstimate monte_carlo_success(std::span<const GraspConfiguration> configs,
                               const Environment& env, const RobotModel& robot, int n_samples,
                               std::uint64_t seed) {
  if (n_samples < kMinMonteCarloSamples) {
    throw std::invalid_argument("monte_carlo_success: n_samples must be at least " +
                                std::to_string(kMinMonteCarloSamples));
  }
  const auto episodes = build_episodes(configs, env, robot);
  Rng rng(seed);
  long successes = 0;
  for (int s = 0; s < n_samples; ++s) {
    bool ok = true;
    for (const auto& ep : episodes) {
      // Draw even when the outcome is already known so the stream position
      // depends only on the sample index.
      const double z = rng.normal();
      if (!ok) continue;
      if (ep.out_of_surface) {
        ok = false;
        continue;
      }
      for (std::size_t t = 0; t < ep.force.size(); ++t) {
        if (ep.force[t] > ep.mu[t] + ep.sigma[t] * z) {
          ok = false;
          break;
        }
      }
    }
    if (ok) ++successes;
  }
  McEstimate est;
  est.rate = static_cast<double>(successes) / n_samples;
  est.std_error = std::sqrt(est.rate * (1.0 - est.rate) / n_samples);
  return est;
}

McEstimate monte_carlo_success(const PlanResult& result, const Environment& env,
                               const RobotModel& robot, int n_samples, std::uint64_t seed) {
  if (!result.complete) throw ContractError("monte_carlo_success: plan result is incomplete");
  const auto configs = result.configurations(env, robot);
  return monte_carlo_success(configs, env, robot, n_samples, seed);
}

const char* to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::rbp:
      return "rbp";
    case PlannerKind::naive:
      return "naive";
  }
  return "?";
}

std::pair<Vec2, Vec2> corridor_endpoints(const Environment& env) {
  const double mid = 0.5 * (env.bounds.min.y() + env.bounds.max.y());
  return {Vec2(env.bounds.min.x() + 0.8, mid), Vec2(env.bounds.max.x() - 0.8, mid)};
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* v = std::getenv("STOCHGRASP_THREADS")) {
    const int n = std::atoi(v);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrialRecord> run_environment_trial(int trial, const Environment& env,
                                               const TrialConfig& config,
                                               std::uint64_t master_seed,
                                               const TrialObserver& observer) {
  TrialRecord rbp = make_record(trial, env.rng_seed, PlannerKind::rbp, config.mc_samples);
  TrialRecord naive = make_record(trial, env.rng_seed, PlannerKind::naive, config.mc_samples);

  PlannerConfig planner = config.planner;
  planner.rng_seed = derive_seed(master_seed, kPlannerStream, static_cast<std::uint64_t>(trial));
  const auto [start_target, goal] = corridor_endpoints(env);
  const auto start = find_start_stance(start_target, env, config.robot, planner);
  if (!start) {
    rbp.note = naive.note = "no start stance";
    if (observer) observer(trial, env, nullptr);
    return {rbp, naive};
  }

  const std::uint64_t mc_base = derive_seed(master_seed, kMonteCarloStream,
                                            static_cast<std::uint64_t>(trial));
  try {
    auto t0 = Clock::now();
    const auto plan = plan_footsteps(start->first, goal, env, config.robot, planner);
    rbp.timings["footstep"] = seconds_since(t0);
    if (!plan) {
      rbp.note = "no footstep plan";
      if (observer) observer(trial, env, nullptr);
    } else {
      const PlanResult res = plan_full(*plan, env, config.robot, config.scp, planner);
      rbp.transitions = plan->transitions();
      std::vector<double> seed_s, body_s, ee_s;
      for (const auto& ph : res.phases) {
        seed_s.push_back(ph.seed_seconds);
        (ph.phase == Phase::body ? body_s : ee_s).push_back(ph.scp_seconds);
        if (ph.degraded) ++rbp.degraded_phases;
      }
      if (!seed_s.empty()) {
        rbp.timings["seed"] = mean_of(seed_s);
        rbp.timings["scp_body"] = mean_of(body_s);
        rbp.timings["scp_end_effector"] = mean_of(ee_s);
      }
      if (res.complete) {
        rbp.plan_found = true;
        rbp.analytic_log_prob = res.success_log_prob;
        const McEstimate mc =
            monte_carlo_success(res, env, config.robot, config.mc_samples, mix64(mc_base));
        rbp.mc_success_rate = mc.rate;
        rbp.mc_std_error = mc.std_error;
      } else {
        rbp.note = "trajectory failure: " + res.failure;
      }
      if (observer) observer(trial, env, &res);
    }
  } catch (const std::exception& e) {
    rbp.plan_found = false;
    rbp.note = std::string("error: ") + e.what();
  }

  try {
    auto t0 = Clock::now();
    const auto plan = plan_footsteps_naive(start->first, goal, env, config.robot, planner);
    naive.timings["footstep"] = seconds_since(t0);
    if (!plan) {
      naive.note = "no footstep plan";
    } else {
      naive.plan_found = true;
      naive.transitions = plan->transitions();
      naive.analytic_log_prob = plan->est_success_log_prob;
      const auto configs = witness_configurations(*plan, env, config.robot);
      const McEstimate mc = monte_carlo_success(configs, env, config.robot, config.mc_samples,
                                                mix64(mc_base ^ 1));
      naive.mc_success_rate = mc.rate;
      naive.mc_std_error = mc.std_error;
    }
  } catch (const std::exception& e) {
    naive.plan_found = false;
    naive.note = std::string("error: ") + e.what();
  }
  return {rbp, naive};
}

std::vector<TrialRecord> run_trials(int n_trials, const TrialConfig& config,
                                    std::uint64_t master_seed, const TrialObserver& observer) {
  if (n_trials < 1) throw std::invalid_argument("run_trials: n_trials must be at least 1");
  config.envgen.validate();
  config.robot.validate();
  config.planner.validate();
  config.scp.validate();
  if (config.mc_samples < kMinMonteCarloSamples) {
    throw std::invalid_argument("run_trials: mc_samples must be at least " +
                                std::to_string(kMinMonteCarloSamples));
  }

  std::vector<std::vector<TrialRecord>> per_trial(n_trials);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n_trials; i = next++) {
      const std::uint64_t env_seed =
          derive_seed(master_seed, kEnvStream, static_cast<std::uint64_t>(i));
      try {
        const Environment env = generate_random_environment(config.envgen, env_seed);
        per_trial[i] = run_environment_trial(i, env, config, master_seed, observer);
      } catch (const std::exception& e) {
        for (PlannerKind k : {PlannerKind::rbp, PlannerKind::naive}) {
          TrialRecord r = make_record(i, env_seed, k, config.mc_samples);
          r.note = std::string("error: ") + e.what();
          per_trial[i].push_back(r);
        }
      }
    }
  };
  const int threads = std::min(resolve_thread_count(config.threads), n_trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<TrialRecord> out;
  for (auto& v : per_trial) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Histogram success_histogram(std::span<const TrialRecord> records, int bins) {
  if (bins < 1) throw std::invalid_argument("success_histogram: bins must be positive");
  Histogram h;
  for (int i = 0; i <= bins; ++i) h.edges.push_back(static_cast<double>(i) / bins);
  for (PlannerKind k : {PlannerKind::rbp, PlannerKind::naive}) h.counts[k].assign(bins, 0);
  for (const auto& r : records) {
    if (!r.plan_found) continue;
    const double p = std::exp(r.analytic_log_prob);
    const int b = std::clamp(static_cast<int>(p * bins), 0, bins - 1);
    ++h.counts[r.planner][b];
  }
  return h;
}

std::vector<TimingSummary> timing_summary(std::span<const TrialRecord> records) {
  std::map<std::string, std::vector<double>> samples;
  for (const auto& r : records) {
    if (!r.plan_found) continue;
    for (const auto& [key, v] : r.timings) {
      samples[std::string(to_string(r.planner)) + "_" + key].push_back(v);
    }
  }
  std::vector<TimingSummary> out;
  for (const auto& [key, v] : samples) {
    TimingSummary t{key, mean_of(v), 0.0, static_cast<int>(v.size())};
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - t.mean) * (x - t.mean);
      t.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    out.push_back(t);
  }
  return out;
}

double median_success(std::span<const TrialRecord> records, PlannerKind planner) {
  std::vector<double> p;
  for (const auto& r : records) {
    if (r.planner == planner && r.plan_found) p.push_back(std::exp(r.analytic_log_prob));
  }
  if (p.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(p.begin(), p.end());
  const std::size_t n = p.size();
  return n % 2 ? p[n / 2] : 0.5 * (p[n / 2 - 1] + p[n / 2]);
}

ForceLogAnalysis analyze_force_log(std::span<const ForceLogEntry> log,
                                   const std::array<Anchor, kNumBooms>& anchors) {
  ForceLogAnalysis out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const ForceLogEntry& e = log[i];
    if (i > 0 && !(e.time > log[i - 1].time)) {
      throw std::invalid_argument("analyze_force_log: timestamps must strictly increase (entry " +
                                  std::to_string(i) + ")");
    }
    std::array<double, kNumBooms> psi{}, prob{};
    std::array<bool, kNumBooms> out_of{};
    for (int a = 0; a < kNumBooms; ++a) {
      const Vec2 dir(std::cos(e.angle[a]), std::sin(e.angle[a]));
      const Vec2& n = anchors[a].normal;
      psi[a] = std::atan2(cross2(n, dir), n.dot(dir));
      const GraspProbability p = grasp_success_prob({&anchors[a], dir, e.force[a]});
      prob[a] = p.value;
      out_of[a] = p.out_of_surface;
    }
    out.time.push_back(e.time);
    out.psi.push_back(psi);
    out.probability.push_back(prob);
    out.out_of_surface.push_back(out_of);
  }
  return out;
}

}  // namespace stochgrasp
