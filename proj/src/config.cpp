#include "sph/config.hpp"

#include "sph/error.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sph::config {

using nlohmann::json;
using linalg::Mat;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::Parse, what); }

Mat matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) fail(where + ": rows must be non-empty arrays");
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(where + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(where + ": non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("field '") + key + "': " + e.what());
  }
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

model::Speed speed_from(const json& j) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "slow") return model::Speed::Slow;
  if (s == "fast") return model::Speed::Fast;
  fail("mask entries must be \"slow\" or \"fast\"");
}

ScheduleConfig schedule_from(const json& j) {
  ScheduleConfig s;
  s.kind = get_or<std::string>(j, "kind", "periodic");
  if (s.kind == "periodic") {
    s.tau = get_or(j, "tau", 0.0);
    s.mode_cycle = get_or(j, "mode_cycle", std::vector<std::size_t>{});
    s.jump_cycle = get_or(j, "jump_cycle", std::vector<std::size_t>{});
  } else if (s.kind == "explicit") {
    for (const json& e : require(j, "events")) {
      model::Event ev;
      ev.t = require(e, "t").get<double>();
      ev.mode = require(e, "mode").get<std::size_t>();
      if (e.contains("jump") && !e.at("jump").is_null()) ev.jump = e.at("jump").get<std::size_t>();
      s.events.push_back(ev);
    }
  } else if (s.kind == "random") {
    s.min_gap = require(j, "min_gap").get<double>();
    s.max_gap = require(j, "max_gap").get<double>();
    s.initial_mode = get_or<std::size_t>(j, "initial_mode", 0);
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
  } else {
    fail("unknown schedule kind '" + s.kind + "'");
  }
  return s;
}

json schedule_to(const ScheduleConfig& s) {
  json j{{"kind", s.kind}};
  if (s.kind == "periodic") {
    j["tau"] = s.tau;
    j["mode_cycle"] = s.mode_cycle;
    j["jump_cycle"] = s.jump_cycle;
  } else if (s.kind == "explicit") {
    json events = json::array();
    for (const auto& e : s.events) {
      json ej{{"t", e.t}, {"mode", e.mode}};
      ej["jump"] = e.jump ? json(*e.jump) : json(nullptr);
      events.push_back(std::move(ej));
    }
    j["events"] = std::move(events);
  } else {
    j["min_gap"] = s.min_gap;
    j["max_gap"] = s.max_gap;
    j["initial_mode"] = s.initial_mode;
    j["seed"] = s.seed;
  }
  return j;
}

RunConfig from_json(const json& root) {
  if (!root.is_object()) fail("top level must be an object");
  RunConfig cfg;
  auto& sys = cfg.system;
  sys.epsilon = require(root, "epsilon").get<double>();

  for (const json& m : require(root, "modes")) {
    model::Mode mode;
    mode.name = get_or<std::string>(m, "name", "");
    for (const json& s : require(m, "mask")) mode.mask.push_back(speed_from(s));
    mode.flow = matrix_from(require(m, "A"), "mode '" + mode.name + "' A");
    sys.modes.push_back(std::move(mode));
  }
  for (const json& jj : require(root, "jumps")) {
    model::Jump jump;
    jump.name = get_or<std::string>(jj, "name", "");
    jump.matrix = matrix_from(require(jj, "J"), "jump '" + jump.name + "' J");
    sys.jumps.push_back(std::move(jump));
  }
  if (root.contains("transitions")) {
    for (const json& t : root.at("transitions")) {
      sys.transitions.push_back({require(t, "from").get<std::size_t>(), require(t, "jump").get<std::size_t>(),
                                 require(t, "to").get<std::size_t>()});
    }
  }
  sys.augment = get_or(root, "augment", false);
  if (root.contains("augment_lambda") && !root.at("augment_lambda").is_null()) {
    cfg.augment_lambda = root.at("augment_lambda").get<double>();
  }

  if (root.contains("lyapunov")) {
    const json& l = root.at("lyapunov");
    auto& o = cfg.lyapunov;
    o.kappa = get_or(l, "kappa", o.kappa);
    o.exact_scalar = get_or(l, "exact_scalar", o.exact_scalar);
    o.scalar_optimal_q = get_or(l, "scalar_optimal_q", o.scalar_optimal_q);
    o.strict_b3 = get_or(l, "strict_b3", o.strict_b3);
    if (l.contains("overrides")) {
      for (const json& ov : l.at("overrides")) {
        certify::ModeOverride mo;
        if (ov.contains("q_s")) mo.q_s = matrix_from(ov.at("q_s"), "override q_s");
        if (ov.contains("lambda_s")) mo.lambda_s = ov.at("lambda_s").get<double>();
        if (ov.contains("q_f")) mo.q_f = matrix_from(ov.at("q_f"), "override q_f");
        if (ov.contains("lambda_f")) mo.lambda_f = ov.at("lambda_f").get<double>();
        o.overrides[require(ov, "mode").get<std::size_t>()] = std::move(mo);
      }
    }
  }
  cfg.eps = get_or(root, "eps", std::vector<double>{});

  if (root.contains("simulate")) {
    const json& s = root.at("simulate");
    auto& sc = cfg.simulate;
    sc.x0 = get_or(s, "x0", std::vector<double>{});
    if (s.contains("schedule")) sc.schedule = schedule_from(s.at("schedule"));
    if (s.contains("horizon") && !s.at("horizon").is_null()) sc.horizon = s.at("horizon").get<double>();
    sc.sample_dt = get_or(s, "sample_dt", sc.sample_dt);
    sc.delta = get_or(s, "delta", sc.delta);
    sc.divergence_factor = get_or(s, "divergence_factor", sc.divergence_factor);
  }
  cfg.output_dir = get_or<std::string>(root, "output_dir", cfg.output_dir);
  return cfg;
}

}  // namespace

RunConfig parse(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("malformed configuration: ") + e.what());
  }
  try {
    return from_json(root);
  } catch (const json::exception& e) {
    fail(std::string("invalid configuration: ") + e.what());
  }
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string emit(const RunConfig& cfg) {
  const auto& sys = cfg.system;
  json root;
  root["epsilon"] = sys.epsilon;
  json modes = json::array();
  for (const auto& m : sys.modes) {
    json mask = json::array();
    for (auto s : m.mask) mask.push_back(s == model::Speed::Slow ? "slow" : "fast");
    modes.push_back({{"name", m.name}, {"mask", mask}, {"A", matrix_to(m.flow)}});
  }
  root["modes"] = std::move(modes);
  json jumps = json::array();
  for (const auto& j : sys.jumps) jumps.push_back({{"name", j.name}, {"J", matrix_to(j.matrix)}});
  root["jumps"] = std::move(jumps);
  json transitions = json::array();
  for (const auto& t : sys.transitions) transitions.push_back({{"from", t.from}, {"jump", t.jump}, {"to", t.to}});
  root["transitions"] = std::move(transitions);
  root["augment"] = sys.augment;
  root["augment_lambda"] = cfg.augment_lambda ? json(*cfg.augment_lambda) : json(nullptr);

  const auto& o = cfg.lyapunov;
  json overrides = json::array();
  for (const auto& [mode, mo] : o.overrides) {
    json ov{{"mode", mode}};
    if (mo.q_s) ov["q_s"] = matrix_to(*mo.q_s);
    if (mo.lambda_s) ov["lambda_s"] = *mo.lambda_s;
    if (mo.q_f) ov["q_f"] = matrix_to(*mo.q_f);
    if (mo.lambda_f) ov["lambda_f"] = *mo.lambda_f;
    overrides.push_back(std::move(ov));
  }
  root["lyapunov"] = {{"kappa", o.kappa},
                      {"exact_scalar", o.exact_scalar},
                      {"scalar_optimal_q", o.scalar_optimal_q},
                      {"strict_b3", o.strict_b3},
                      {"overrides", std::move(overrides)}};
  root["eps"] = cfg.eps;

  const auto& sc = cfg.simulate;
  root["simulate"] = {{"x0", sc.x0},
                      {"schedule", schedule_to(sc.schedule)},
                      {"horizon", sc.horizon ? json(*sc.horizon) : json(nullptr)},
                      {"sample_dt", sc.sample_dt},
                      {"delta", sc.delta},
                      {"divergence_factor", sc.divergence_factor}};
  root["output_dir"] = cfg.output_dir;
  return root.dump(2);
}

std::filesystem::path output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("SPH_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

model::EventSchedule make_schedule(const ScheduleConfig& sc, const std::vector<model::Transition>& transitions,
                                   std::size_t mode_count, double horizon) {
  if (sc.kind == "periodic") {
    std::vector<std::size_t> cycle = sc.mode_cycle;
    if (cycle.empty()) {
      for (std::size_t i = 0; i < mode_count; ++i) cycle.push_back(i);
    }
    return model::periodic_schedule(transitions, sc.tau, horizon, cycle, sc.jump_cycle);
  }
  if (sc.kind == "explicit") {
    model::EventSchedule s{sc.events, horizon};
    model::validate_schedule(transitions, mode_count, s);
    return s;
  }
  if (sc.kind == "random") {
    return model::random_schedule(transitions, sc.min_gap, sc.max_gap, horizon, sc.initial_mode, sc.seed);
  }
  throw Error(ErrorCode::ScheduleIncompatible, "unknown schedule kind '" + sc.kind + "'");
}

RunConfig example(int id) {
  if (id != 1 && id != 2) throw Error(ErrorCode::InvalidSpec, "unknown example " + std::to_string(id));
  using model::Speed;
  Mat a1(2, 2), a2(2, 2);
  if (id == 1) {
    a1 << -1, 0.5, -1, -2;
    a2 << -2.5, -2, 3, 1;
  } else {
    a1 << -1, 0.5, -3, -2;
    a2 << -2.5, -4, 1, 0.5;
  }
  RunConfig cfg;
  auto& sys = cfg.system;
  sys.epsilon = 1e-3;
  sys.modes = {{"mode1", {Speed::Slow, Speed::Fast}, a1}, {"mode2", {Speed::Fast, Speed::Slow}, a2}};
  sys.jumps = {{"identity", Mat::Identity(2, 2)}};
  sys.transitions = {{0, 0, 1}, {1, 0, 0}};
  cfg.eps = {1e-2, 1e-3, 1e-4};
  cfg.simulate.x0 = {2.0, 1.0};
  cfg.simulate.schedule.tau = id == 1 ? 6.16e-4 : 0.406;
  cfg.simulate.horizon = 40.0;
  cfg.output_dir = "example" + std::to_string(id);
  return cfg;
}

}  // namespace sph::config
