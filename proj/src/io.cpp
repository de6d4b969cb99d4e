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

#include "stochgrasp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stochgrasp/normal.hpp"

namespace stochgrasp {

using nlohmann::json;

namespace {

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string(what) + ": line " + std::to_string(line) + ": " + e.what(),
                     line);
  }
}

// Typed access with the key path in the error.
template <typename T>
T get(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(ctx + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(ctx + "." + key + ": " + e.what());
  }
}

template <typename T>
void maybe(const json& j, const char* key, const std::string& ctx, T* out) {
  if (j.is_object() && j.contains(key)) *out = get<T>(j, key, ctx);
}

json vec2(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 to_vec2(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(ctx + ": expected [x, y]");
  }
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

Vec2 get_vec2(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(ctx + ": missing key '" + key + "'");
  return to_vec2(j.at(key), ctx + "." + key);
}

json range(const Range& r) { return json::array({r.lo, r.hi}); }

void maybe_range(const json& j, const char* key, const std::string& ctx, Range* out) {
  if (!j.contains(key)) return;
  const Vec2 v = to_vec2(j.at(key), ctx + "." + key);
  *out = Range{v.x(), v.y()};
}

json pose(const Pose& p) { return json::array({p.x, p.y, p.phi}); }

Pose to_pose(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 3) throw ParseError(ctx + ": expected [x, y, phi]");
  try {
    return Pose{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception& e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

json stance(const Stance& s) {
  json a = json::array();
  for (const auto& id : s.anchor_ids) a.push_back(id ? json(*id) : json(nullptr));
  return a;
}

Stance to_stance(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != kNumBooms) throw ParseError(ctx + ": expected 4 slots");
  Stance s;
  for (int i = 0; i < kNumBooms; ++i) {
    if (j[i].is_null()) continue;
    if (!j[i].is_number_integer()) throw ParseError(ctx + ": slot ids must be integers or null");
    s.anchor_ids[i] = j[i].get<int>();
  }
  return s;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> to_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

// JSON has no NaN/inf; non-finite values are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename F>
auto wrap_errors(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void csv_cell(std::ostringstream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << format_number(*v);
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

// ------------------------------------------------------------- environment

std::string environment_to_json(const Environment& env) {
  json j;
  j["version"] = kFileFormatVersion;
  j["seed"] = env.rng_seed;
  j["gravity"] = vec2(env.gravity);
  j["bounds"] = {{"min", vec2(env.bounds.min)}, {"max", vec2(env.bounds.max)}};
  json walls = json::array();
  for (const auto& w : env.walls) {
    json pts = json::array();
    for (const auto& p : w) pts.push_back(vec2(p));
    walls.push_back(pts);
  }
  j["walls"] = walls;
  json anchors = json::array();
  for (const auto& a : env.anchors) {
    anchors.push_back({{"id", a.id},
                       {"position", vec2(a.position)},
                       {"normal", vec2(a.normal)},
                       {"mu_major", a.limit.mu_major},
                       {"mu_minor", a.limit.mu_minor},
                       {"sigma0", a.limit.sigma0},
                       {"sigma_slope", a.limit.sigma_slope}});
  }
  j["anchors"] = anchors;
  return j.dump(2) + "\n";
}

Environment environment_from_json(const std::string& text) {
  const json j = parse(text, "environment");
  const std::string ctx = "environment";
  const int version = get<int>(j, "version", ctx);
  if (version != kFileFormatVersion) {
    throw ParseError(ctx + ": unsupported version " + std::to_string(version));
  }
  Environment env;
  env.rng_seed = get<std::uint64_t>(j, "seed", ctx);
  env.gravity = get_vec2(j, "gravity", ctx);
  const json& b = j.at("bounds");
  env.bounds.min = get_vec2(b, "min", ctx + ".bounds");
  env.bounds.max = get_vec2(b, "max", ctx + ".bounds");
  const json walls = get<json>(j, "walls", ctx);
  if (!walls.is_array()) throw ParseError(ctx + ".walls: expected an array");
  for (std::size_t w = 0; w < walls.size(); ++w) {
    const std::string wctx = ctx + ".walls[" + std::to_string(w) + "]";
    if (!walls[w].is_array()) throw ParseError(wctx + ": expected an array of points");
    std::vector<Vec2> pts;
    for (const auto& p : walls[w]) pts.push_back(to_vec2(p, wctx));
    env.walls.push_back(std::move(pts));
  }
  const json anchors = get<json>(j, "anchors", ctx);
  if (!anchors.is_array()) throw ParseError(ctx + ".anchors: expected an array");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const std::string actx = ctx + ".anchors[" + std::to_string(i) + "]";
    const json& aj = anchors[i];
    Anchor a;
    a.id = get<int>(aj, "id", actx);
    a.position = get_vec2(aj, "position", actx);
    a.normal = get_vec2(aj, "normal", actx);
    a.limit.mu_major = get<double>(aj, "mu_major", actx);
    a.limit.mu_minor = get<double>(aj, "mu_minor", actx);
    a.limit.sigma0 = get<double>(aj, "sigma0", actx);
    a.limit.sigma_slope = get<double>(aj, "sigma_slope", actx);
    env.anchors.push_back(a);
  }
  env.validate();
  return env;
}

// ------------------------------------------------------------------ configs

std::string envgen_to_json(const EnvGenConfig& c) {
  json j = {{"length", range(c.length)},
            {"width", range(c.width)},
            {"vertex_spacing", c.vertex_spacing},
            {"vertex_jitter", c.vertex_jitter},
            {"anchor_density", c.anchor_density},
            {"mu_major", range(c.mu_major)},
            {"mu_minor", range(c.mu_minor)},
            {"sigma0", range(c.sigma0)},
            {"sigma_slope", range(c.sigma_slope)},
            {"gravity", vec2(c.gravity)},
            {"bounds_margin", c.bounds_margin}};
  return j.dump(2) + "\n";
}

EnvGenConfig envgen_from_json(const std::string& text) {
  const json j = parse(text, "envgen");
  const std::string ctx = "envgen";
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  EnvGenConfig c;
  maybe_range(j, "length", ctx, &c.length);
  maybe_range(j, "width", ctx, &c.width);
  maybe(j, "vertex_spacing", ctx, &c.vertex_spacing);
  maybe(j, "vertex_jitter", ctx, &c.vertex_jitter);
  maybe(j, "anchor_density", ctx, &c.anchor_density);
  maybe_range(j, "mu_major", ctx, &c.mu_major);
  maybe_range(j, "mu_minor", ctx, &c.mu_minor);
  maybe_range(j, "sigma0", ctx, &c.sigma0);
  maybe_range(j, "sigma_slope", ctx, &c.sigma_slope);
  if (j.contains("gravity")) c.gravity = get_vec2(j, "gravity", ctx);
  maybe(j, "bounds_margin", ctx, &c.bounds_margin);
  c.validate();
  return c;
}

std::string robot_to_json(const RobotModel& r) {
  json shoulders = json::array();
  for (const auto& s : r.shoulder_offsets) shoulders.push_back(vec2(s));
  json j = {{"masses", {{"body", r.body_mass}, {"gripper", r.gripper_mass}}},
            {"inertia", r.body_inertia},
            {"geometry",
             {{"body_half_width", r.body_half_width},
              {"body_half_height", r.body_half_height},
              {"shoulder_offsets", shoulders},
              {"shoulder_equilibrium_angles", r.shoulder_equilibrium_angles}}},
            {"limits",
             {{"b_min", r.b_min},
              {"b_max", r.b_max},
              {"theta_max", r.theta_max},
              {"f_min", r.f_min},
              {"f_max", r.f_max},
              {"t_max", r.t_max}}}};
  return j.dump(2) + "\n";
}

RobotModel robot_from_json(const std::string& text) {
  const json j = parse(text, "robot");
  const std::string ctx = "robot";
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  RobotModel r;
  if (j.contains("masses")) {
    maybe(j["masses"], "body", ctx + ".masses", &r.body_mass);
    maybe(j["masses"], "gripper", ctx + ".masses", &r.gripper_mass);
  }
  maybe(j, "inertia", ctx, &r.body_inertia);
  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    const std::string gctx = ctx + ".geometry";
    maybe(g, "body_half_width", gctx, &r.body_half_width);
    maybe(g, "body_half_height", gctx, &r.body_half_height);
    if (g.contains("shoulder_offsets")) {
      const json& s = g["shoulder_offsets"];
      if (!s.is_array() || s.size() != kNumBooms) {
        throw ParseError(gctx + ".shoulder_offsets: expected 4 points");
      }
      for (int i = 0; i < kNumBooms; ++i) r.shoulder_offsets[i] = to_vec2(s[i], gctx);
    }
    wrap_errors("robot", [&] {
      maybe(g, "shoulder_equilibrium_angles", gctx, &r.shoulder_equilibrium_angles);
      return 0;
    });
  }
  if (j.contains("limits")) {
    const json& l = j["limits"];
    const std::string lctx = ctx + ".limits";
    maybe(l, "b_min", lctx, &r.b_min);
    maybe(l, "b_max", lctx, &r.b_max);
    maybe(l, "theta_max", lctx, &r.theta_max);
    maybe(l, "f_min", lctx, &r.f_min);
    maybe(l, "f_max", lctx, &r.f_max);
    maybe(l, "t_max", lctx, &r.t_max);
  }
  r.validate();
  return r;
}

std::string planner_to_json(const PlannerConfig& c) {
  json j = {{"r_min", c.r_min},
            {"pose_samples", c.pose_samples},
            {"local_opt_iters", c.local_opt_iters},
            {"perturbation_std", {c.perturbation_std.x(), c.perturbation_std.y(),
                                  c.perturbation_std.z()}},
            {"rng_seed", c.rng_seed},
            {"sample_inflation", c.sample_inflation},
            {"sample_phi_range", c.sample_phi_range},
            {"seed_samples", c.seed_samples},
            {"goal_tolerance", c.goal_tolerance},
            {"neighbor_cap", c.neighbor_cap},
            {"node_budget", c.node_budget}};
  return j.dump(2) + "\n";
}

PlannerConfig planner_from_json(const std::string& text) {
  const json j = parse(text, "planner");
  const std::string ctx = "planner";
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  PlannerConfig c;
  maybe(j, "r_min", ctx, &c.r_min);
  maybe(j, "pose_samples", ctx, &c.pose_samples);
  maybe(j, "local_opt_iters", ctx, &c.local_opt_iters);
  if (j.contains("perturbation_std")) {
    const auto v = get<std::vector<double>>(j, "perturbation_std", ctx);
    if (v.size() != 3) throw ParseError(ctx + ".perturbation_std: expected 3 values");
    c.perturbation_std = Vec3(v[0], v[1], v[2]);
  }
  maybe(j, "rng_seed", ctx, &c.rng_seed);
  maybe(j, "sample_inflation", ctx, &c.sample_inflation);
  maybe(j, "sample_phi_range", ctx, &c.sample_phi_range);
  maybe(j, "seed_samples", ctx, &c.seed_samples);
  maybe(j, "goal_tolerance", ctx, &c.goal_tolerance);
  maybe(j, "neighbor_cap", ctx, &c.neighbor_cap);
  maybe(j, "node_budget", ctx, &c.node_budget);
  c.validate();
  return c;
}

std::string scp_to_json(const ScpConfig& c) {
  json j = {{"kappa", c.kappa},
            {"alpha", c.alpha},
            {"beta", c.beta},
            {"rho_s", {c.rho_s.x(), c.rho_s.y(), c.rho_s.z()}},
            {"rho_u", c.rho_u},
            {"rho_torque", c.rho_torque},
            {"max_iters", c.max_iters},
            {"convergence_tol", c.convergence_tol},
            {"N", c.N},
            {"dt", c.dt},
            {"resid_tol", c.resid_tol},
            {"radius_floor", c.radius_floor},
            {"qp_tol", c.qp_tol},
            {"qp_max_iters", c.qp_max_iters}};
  return j.dump(2) + "\n";
}

ScpConfig scp_from_json(const std::string& text) {
  const json j = parse(text, "scp");
  const std::string ctx = "scp";
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  ScpConfig c;
  maybe(j, "kappa", ctx, &c.kappa);
  maybe(j, "alpha", ctx, &c.alpha);
  maybe(j, "beta", ctx, &c.beta);
  if (j.contains("rho_s")) {
    const auto v = get<std::vector<double>>(j, "rho_s", ctx);
    if (v.size() != 3) throw ParseError(ctx + ".rho_s: expected 3 values");
    c.rho_s = Vec3(v[0], v[1], v[2]);
  }
  maybe(j, "rho_u", ctx, &c.rho_u);
  maybe(j, "rho_torque", ctx, &c.rho_torque);
  maybe(j, "max_iters", ctx, &c.max_iters);
  maybe(j, "convergence_tol", ctx, &c.convergence_tol);
  maybe(j, "N", ctx, &c.N);
  maybe(j, "dt", ctx, &c.dt);
  maybe(j, "resid_tol", ctx, &c.resid_tol);
  maybe(j, "radius_floor", ctx, &c.radius_floor);
  maybe(j, "qp_tol", ctx, &c.qp_tol);
  maybe(j, "qp_max_iters", ctx, &c.qp_max_iters);
  c.validate();
  return c;
}

// ---------------------------------------------------------------- footstep

std::string footstep_plan_to_json(const FootstepPlan& plan, const Environment& env,
                                  const RobotModel& robot) {
  json j;
  j["version"] = kFileFormatVersion;
  json stances = json::array();
  for (const auto& s : plan.stances) stances.push_back(stance(s));
  j["stances"] = stances;
  j["start_pose"] = pose(plan.start_pose);
  json witnesses = json::array();
  for (const auto& p : plan.transition_witness_poses) witnesses.push_back(pose(p));
  j["witness_poses"] = witnesses;
  j["moving_booms"] = plan.moving_boom_indices;
  j["est_success_log_prob"] = finite_or_null(plan.est_success_log_prob);
  json episodes = json::array();
  const auto configs = witness_configurations(plan, env, robot);
  for (const auto& ep : build_episodes(configs, env, robot)) {
    episodes.push_back({{"slot", ep.slot},
                        {"anchor", ep.anchor_id},
                        {"steps", ep.force.size()},
                        {"out_of_surface", ep.out_of_surface},
                        {"probability", normal_cdf(ep.min_margin())}});
  }
  j["episodes"] = episodes;
  return j.dump(2) + "\n";
}

FootstepPlan footstep_plan_from_json(const std::string& text) {
  const json j = parse(text, "footstep plan");
  const std::string ctx = "plan";
  FootstepPlan plan;
  for (const auto& s : get<json>(j, "stances", ctx)) plan.stances.push_back(to_stance(s, ctx));
  plan.start_pose = to_pose(get<json>(j, "start_pose", ctx), ctx + ".start_pose");
  for (const auto& p : get<json>(j, "witness_poses", ctx)) {
    plan.transition_witness_poses.push_back(to_pose(p, ctx + ".witness_poses"));
  }
  plan.moving_boom_indices = get<std::vector<int>>(j, "moving_booms", ctx);
  const json lp = get<json>(j, "est_success_log_prob", ctx);
  plan.est_success_log_prob = lp.is_null() ? kNegInf : lp.get<double>();
  try {
    plan.validate();
  } catch (const ContractError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  return plan;
}

// -------------------------------------------------------------- trajectory

std::string trajectory_to_json(const Trajectory& traj, const Environment& env,
                               const RobotModel& robot) {
  traj.validate();
  json j;
  j["version"] = kFileFormatVersion;
  j["phase"] = to_string(traj.phase);
  j["stance"] = stance(traj.stance);
  j["dt"] = traj.dt;
  j["degraded"] = traj.degraded;
  if (traj.free_end_path) {
    json path = json::array();
    for (const auto& p : *traj.free_end_path) path.push_back(vec2(p));
    j["free_end_path"] = path;
  }
  json steps = json::array();
  for (int k = 0; k < traj.size(); ++k) {
    const TrajState& s = traj.states[k];
    const ControlInput& u = traj.controls[k];
    const StepGrasps g = evaluate_step(traj, k, env, robot);
    json forces = json::array(), psi = json::array(), prob = json::array();
    for (int i = 0; i < kNumBooms; ++i) {
      forces.push_back(optional_number(u.boom_forces[i]));
      psi.push_back(optional_number(g.psi[i]));
      prob.push_back(g.log_prob[i] ? finite_or_null(std::exp(*g.log_prob[i])) : json(nullptr));
    }
    steps.push_back({{"state", {s.pose.x, s.pose.y, s.pose.phi, s.xdot, s.ydot, s.phidot}},
                     {"boom_forces", forces},
                     {"free_boom_force", optional_number(u.free_boom_force)},
                     {"free_boom_torque", optional_number(u.free_boom_torque)},
                     {"psi", psi},
                     {"probability", prob},
                     {"step_probability", std::exp(g.robustness)}});
  }
  j["steps"] = steps;
  j["min_probability"] = std::exp(trajectory_min_log_prob(traj, env, robot));
  return j.dump(1) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  const json j = parse(text, "trajectory");
  const std::string ctx = "trajectory";
  return wrap_errors("trajectory", [&] {
    Trajectory t;
    const auto phase = get<std::string>(j, "phase", ctx);
    if (phase == "body") {
      t.phase = Phase::body;
    } else if (phase == "end_effector") {
      t.phase = Phase::end_effector;
    } else {
      throw ParseError(ctx + ".phase: unknown phase '" + phase + "'");
    }
    t.stance = to_stance(get<json>(j, "stance", ctx), ctx + ".stance");
    t.dt = get<double>(j, "dt", ctx);
    t.degraded = get<bool>(j, "degraded", ctx);
    if (j.contains("free_end_path")) {
      std::vector<Vec2> path;
      for (const auto& p : j["free_end_path"]) path.push_back(to_vec2(p, ctx + ".free_end_path"));
      t.free_end_path = std::move(path);
    }
    const json steps = get<json>(j, "steps", ctx);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::string sctx = ctx + ".steps[" + std::to_string(k) + "]";
      const auto sv = get<std::vector<double>>(steps[k], "state", sctx);
      if (sv.size() != 6) throw ParseError(sctx + ".state: expected 6 values");
      StateVec v;
      for (int c = 0; c < 6; ++c) v[c] = sv[c];
      t.states.push_back(TrajState::from_vec(v));
      ControlInput u;
      const json f = get<json>(steps[k], "boom_forces", sctx);
      if (!f.is_array() || f.size() != kNumBooms) {
        throw ParseError(sctx + ".boom_forces: expected 4 entries");
      }
      for (int i = 0; i < kNumBooms; ++i) u.boom_forces[i] = to_optional(f[i]);
      u.free_boom_force = to_optional(get<json>(steps[k], "free_boom_force", sctx));
      u.free_boom_torque = to_optional(get<json>(steps[k], "free_boom_torque", sctx));
      t.controls.push_back(u);
    }
    const json mp = get<json>(j, "min_probability", ctx);
    t.min_log_prob = mp.is_null() ? kNegInf : std::log(mp.get<double>());
    try {
      t.validate();
    } catch (const ContractError& e) {
      throw ParseError(ctx + ": " + e.what());
    }
    return t;
  });
}

StoredTrajectoryColumns trajectory_columns_from_json(const std::string& text) {
  const json j = parse(text, "trajectory");
  return wrap_errors("trajectory", [&] {
    StoredTrajectoryColumns out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& step : get<json>(j, "steps", "trajectory")) {
      std::array<double, kNumBooms> f{}, p{};
      for (int i = 0; i < kNumBooms; ++i) {
        f[i] = step["boom_forces"][i].is_null() ? nan : step["boom_forces"][i].get<double>();
        p[i] = step["probability"][i].is_null() ? nan : step["probability"][i].get<double>();
      }
      out.force.push_back(f);
      out.probability.push_back(p);
      out.step_probability.push_back(step["step_probability"].get<double>());
    }
    return out;
  });
}

std::string trajectory_csv(const Trajectory& traj, const Environment& env,
                           const RobotModel& robot) {
  std::ostringstream os;
  os << "k,x,y,phi,xdot,ydot,phidot,f0,f1,f2,f3,free_force,free_torque,"
        "psi0,psi1,psi2,psi3,p0,p1,p2,p3,p_step\n";
  for (int k = 0; k < traj.size(); ++k) {
    const StateVec s = traj.states[k].vec();
    const ControlInput& u = traj.controls[k];
    const StepGrasps g = evaluate_step(traj, k, env, robot);
    os << k;
    for (int c = 0; c < 6; ++c) os << ',' << format_number(s[c]);
    for (int i = 0; i < kNumBooms; ++i) csv_cell(os, u.boom_forces[i]);
    csv_cell(os, u.free_boom_force);
    csv_cell(os, u.free_boom_torque);
    for (int i = 0; i < kNumBooms; ++i) csv_cell(os, g.psi[i]);
    for (int i = 0; i < kNumBooms; ++i) {
      csv_cell(os, g.log_prob[i] ? std::optional<double>(std::exp(*g.log_prob[i]))
                                 : std::nullopt);
    }
    os << ',' << format_number(std::exp(g.robustness)) << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------------ reports

std::string scp_log_csv(std::span<const PhaseRecord> phases) {
  std::ostringstream os;
  os << "phase_index,transition,phase,iter,merit,min_probability,trust_rho_s,trust_rho_u,"
        "accepted\n";
  for (std::size_t p = 0; p < phases.size(); ++p) {
    for (const auto& it : phases[p].log) {
      os << p << ',' << phases[p].transition << ',' << to_string(phases[p].phase) << ','
         << it.iter << ',' << format_number(it.merit) << ','
         << format_number(it.true_min_probability) << ',' << format_number(it.trust_rho_s)
         << ',' << format_number(it.trust_rho_u) << ',' << (it.accepted ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string phase_timings_csv(std::span<const PhaseRecord> phases) {
  std::ostringstream os;
  os << "phase_index,transition,phase,seed_seconds,scp_seconds\n";
  for (std::size_t p = 0; p < phases.size(); ++p) {
    os << p << ',' << phases[p].transition << ',' << to_string(phases[p].phase) << ','
       << format_number(phases[p].seed_seconds) << ',' << format_number(phases[p].scp_seconds)
       << '\n';
  }
  return os.str();
}

std::string plan_report_json(const PlanResult& result, const Environment& env,
                             const RobotModel& robot) {
  json j;
  j["complete"] = result.complete;
  j["transitions"] = result.plan.transitions();
  j["success_probability"] = std::exp(result.success_log_prob);
  j["footstep_estimate"] = std::exp(result.plan.est_success_log_prob);
  if (result.failed_transition) {
    j["failed_transition"] = *result.failed_transition;
    j["failure"] = result.failure;
  }
  json phases = json::array();
  for (const auto& ph : result.phases) {
    json p = {{"phase", to_string(ph.phase)},
              {"transition", ph.transition},
              {"seed_min_probability", std::exp(trajectory_min_log_prob(ph.seed, env, robot))},
              {"min_probability", std::exp(trajectory_min_log_prob(ph.optimized, env, robot))},
              {"seed_mean_force", mean_abs_force(ph.seed)},
              {"mean_force", mean_abs_force(ph.optimized)},
              {"iterations", ph.log.size()},
              {"degraded", ph.degraded}};
    if (ph.degraded) p["degraded_reason"] = ph.degraded_reason;
    phases.push_back(p);
  }
  j["phases"] = phases;
  return j.dump(2) + "\n";
}

std::string trials_csv(std::span<const TrialRecord> records) {
  std::ostringstream os;
  os << "trial,env_seed,planner,plan_found,transitions,degraded_phases,analytic_log_prob,"
        "analytic_probability,mc_success_rate,mc_std_error,mc_samples,note\n";
  for (const auto& r : records) {
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    std::replace(note.begin(), note.end(), '\n', ' ');
    os << r.trial << ',' << r.env_seed << ',' << to_string(r.planner) << ','
       << (r.plan_found ? 1 : 0) << ',' << r.transitions << ',' << r.degraded_phases << ','
       << format_number(r.analytic_log_prob) << ','
       << format_number(std::exp(r.analytic_log_prob)) << ','
       << format_number(r.mc_success_rate) << ',' << format_number(r.mc_std_error) << ','
       << r.mc_samples << ',' << note << '\n';
  }
  return os.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,rbp,naive\n";
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    auto count = [&](PlannerKind k) {
      const auto it = h.counts.find(k);
      return it == h.counts.end() ? 0 : it->second[b];
    };
    os << format_number(h.edges[b]) << ',' << format_number(h.edges[b + 1]) << ','
       << count(PlannerKind::rbp) << ',' << count(PlannerKind::naive) << '\n';
  }
  return os.str();
}

std::string timings_csv(std::span<const TimingSummary> timings) {
  std::ostringstream os;
  os << "phase,mean_seconds,std_seconds,count\n";
  for (const auto& t : timings) {
    os << t.phase << ',' << format_number(t.mean) << ',' << format_number(t.stddev) << ','
       << t.count << '\n';
  }
  return os.str();
}

// ----------------------------------------------------------------- force log

std::vector<ForceLogEntry> parse_force_log_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<ForceLogEntry> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (!header) {
      const std::vector<std::string> expect{"time", "f1", "f2", "f3", "f4",
                                            "a1",   "a2", "a3", "a4"};
      if (cells != expect) {
        throw ParseError("force log: line " + std::to_string(lineno) +
                             ": expected header time,f1,f2,f3,f4,a1,a2,a3,a4",
                         lineno);
      }
      header = true;
      continue;
    }
    if (cells.size() != 9) {
      throw ParseError("force log: line " + std::to_string(lineno) + ": expected 9 fields, got " +
                           std::to_string(cells.size()),
                       lineno);
    }
    double v[9];
    for (int c = 0; c < 9; ++c) {
      std::size_t used = 0;
      try {
        v[c] = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size() || !std::isfinite(v[c])) {
        throw ParseError("force log: line " + std::to_string(lineno) + ": field " +
                             std::to_string(c + 1) + " is not a number",
                         lineno);
      }
    }
    ForceLogEntry e;
    e.time = v[0];
    for (int a = 0; a < kNumBooms; ++a) {
      e.force[a] = v[1 + a];
      e.angle[a] = v[5 + a];
    }
    if (!out.empty() && !(e.time > out.back().time)) {
      throw ParseError("force log: line " + std::to_string(lineno) +
                           ": timestamps must strictly increase",
                       lineno);
    }
    out.push_back(e);
  }
  if (!header) throw ParseError("force log: missing header", lineno);
  return out;
}

std::string force_log_csv(std::span<const ForceLogEntry> log) {
  std::ostringstream os;
  os << "time,f1,f2,f3,f4,a1,a2,a3,a4\n";
  for (const auto& e : log) {
    os << format_number(e.time);
    for (double f : e.force) os << ',' << format_number(f);
    for (double a : e.angle) os << ',' << format_number(a);
    os << '\n';
  }
  return os.str();
}

std::string force_log_analysis_csv(const ForceLogAnalysis& a) {
  std::ostringstream os;
  os << "time,psi1,psi2,psi3,psi4,p1,p2,p3,p4,flag1,flag2,flag3,flag4\n";
  for (std::size_t i = 0; i < a.time.size(); ++i) {
    os << format_number(a.time[i]);
    for (double v : a.psi[i]) os << ',' << format_number(v);
    for (double v : a.probability[i]) os << ',' << format_number(v);
    for (bool f : a.out_of_surface[i]) os << ',' << (f ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

}  // namespace stochgrasp
