#include "sph/model.hpp"

#include "sph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace sph::model {

std::size_t Mode::fast_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), Speed::Fast));
}

const char* to_string(FindingKind kind) noexcept {
  switch (kind) {
    case FindingKind::NoModes: return "NoModes";
    case FindingKind::EpsilonRange: return "EpsilonRange";
    case FindingKind::MaskLength: return "MaskLength";
    case FindingKind::NonFinite: return "NonFinite";
    case FindingKind::ShapeMismatch: return "ShapeMismatch";
    case FindingKind::UnknownIndex: return "UnknownIndex";
    case FindingKind::NonConstantDimension: return "NonConstantDimension";
    case FindingKind::NonConstantFastCount: return "NonConstantFastCount";
    case FindingKind::DegenerateSplit: return "DegenerateSplit";
  }
  return "Unknown";
}

namespace {

bool jump_fits(const Mat& j, const Mode& from, const Mode& to) {
  return static_cast<std::size_t>(j.cols()) == from.dim() && static_cast<std::size_t>(j.rows()) == to.dim();
}

std::string shape(const Mat& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

std::vector<Transition> effective_transitions(const HybridSystemSpec& spec) {
  if (!spec.transitions.empty()) return spec.transitions;
  std::vector<Transition> out;
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    for (std::size_t j = 0; j < spec.jumps.size(); ++j) {
      for (std::size_t k = 0; k < spec.modes.size(); ++k) {
        if (jump_fits(spec.jumps[j].matrix, spec.modes[i], spec.modes[k])) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

Mat selector_matrix(const Mode& mode, double epsilon) {
  Vec diag(static_cast<Eigen::Index>(mode.dim()));
  for (std::size_t h = 0; h < mode.dim(); ++h) diag(static_cast<Eigen::Index>(h)) = mode.mask[h] == Speed::Fast ? epsilon : 1.0;
  return diag.asDiagonal();
}

std::vector<Finding> validate(const HybridSystemSpec& spec) {
  std::vector<Finding> findings;
  auto add = [&](FindingKind kind, std::string msg) { findings.push_back({kind, std::move(msg)}); };

  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    add(FindingKind::EpsilonRange, "epsilon = " + std::to_string(spec.epsilon) + " is outside (0, 1)");
  }
  if (spec.modes.empty()) {
    add(FindingKind::NoModes, "system has no modes");
    return findings;
  }

  bool shapes_ok = true;
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    const Mode& m = spec.modes[i];
    if (m.flow.rows() != m.flow.cols() || static_cast<std::size_t>(m.flow.rows()) != m.dim()) {
      add(FindingKind::MaskLength, "mode " + std::to_string(i) + ": flow matrix " + shape(m.flow) +
                                       " does not match mask length " + std::to_string(m.dim()));
      shapes_ok = false;
    } else if (!m.flow.allFinite()) {
      add(FindingKind::NonFinite, "mode " + std::to_string(i) + ": non-finite flow entries");
    }
  }
  for (std::size_t j = 0; j < spec.jumps.size(); ++j) {
    if (!spec.jumps[j].matrix.allFinite()) add(FindingKind::NonFinite, "jump " + std::to_string(j) + ": non-finite entries");
  }

  if (!spec.transitions.empty()) {
    for (const Transition& t : spec.transitions) {
      const std::string label = "transition " + std::to_string(t.from) + " -(" + std::to_string(t.jump) + ")-> " +
                                std::to_string(t.to);
      if (t.from >= spec.modes.size() || t.to >= spec.modes.size() || t.jump >= spec.jumps.size()) {
        add(FindingKind::UnknownIndex, label + " references an unknown mode or jump");
        continue;
      }
      if (!jump_fits(spec.jumps[t.jump].matrix, spec.modes[t.from], spec.modes[t.to])) {
        add(FindingKind::ShapeMismatch, label + ": jump is " + shape(spec.jumps[t.jump].matrix) + ", expected " +
                                            std::to_string(spec.modes[t.to].dim()) + "x" +
                                            std::to_string(spec.modes[t.from].dim()));
      }
    }
  } else if (shapes_ok) {
    for (std::size_t j = 0; j < spec.jumps.size(); ++j) {
      bool fits = false;
      for (const Mode& a : spec.modes) {
        for (const Mode& b : spec.modes) fits = fits || jump_fits(spec.jumps[j].matrix, a, b);
      }
      if (!fits) {
        add(FindingKind::ShapeMismatch,
            "jump " + std::to_string(j) + " (" + shape(spec.jumps[j].matrix) + ") fits no pair of modes");
      }
    }
  }

  std::set<std::size_t> dims, fast_counts;
  std::size_t max_slow = 0, max_fast = 0, min_slow = std::numeric_limits<std::size_t>::max(),
              min_fast = std::numeric_limits<std::size_t>::max();
  for (const Mode& m : spec.modes) {
    dims.insert(m.dim());
    fast_counts.insert(m.fast_count());
    max_slow = std::max(max_slow, m.slow_count());
    max_fast = std::max(max_fast, m.fast_count());
    min_slow = std::min(min_slow, m.slow_count());
    min_fast = std::min(min_fast, m.fast_count());
  }
  if (!spec.augment) {
    if (dims.size() > 1) add(FindingKind::NonConstantDimension, "state dimension differs across modes; enable augmentation");
    if (fast_counts.size() > 1) {
      add(FindingKind::NonConstantFastCount, "number of fast coordinates differs across modes; enable augmentation");
    }
  }
  const bool degenerate = spec.augment ? (max_slow == 0 || max_fast == 0) : (min_slow == 0 || min_fast == 0);
  if (degenerate) add(FindingKind::DegenerateSplit, "every mode needs at least one slow and one fast coordinate");
  return findings;
}

Mat build_permutation(const std::vector<Speed>& mask) {
  const auto n = static_cast<Eigen::Index>(mask.size());
  Mat s = Mat::Zero(n, n);
  Eigen::Index row = 0;
  for (Speed wanted : {Speed::Slow, Speed::Fast}) {
    for (Eigen::Index h = 0; h < n; ++h) {
      if (mask[static_cast<std::size_t>(h)] == wanted) s(row++, h) = 1.0;
    }
  }
  return s;
}

Blocks partition(const Mat& m, std::size_t n_x) {
  const auto nx = static_cast<Eigen::Index>(n_x);
  const Eigen::Index nz = m.rows() - nx;
  return {m.topLeftCorner(nx, nx), m.topRightCorner(nx, nz), m.bottomLeftCorner(nz, nx), m.bottomRightCorner(nz, nz)};
}

ReorderedSystem reorder(const HybridSystemSpec& spec) {
  auto findings = validate(spec);
  if (!findings.empty()) {
    std::string msg;
    for (const auto& f : findings) msg += std::string(to_string(f.kind)) + ": " + f.message + "; ";
    throw Error(ErrorCode::InvalidSpec, msg);
  }
  if (spec.augment) {
    std::set<std::size_t> dims;
    for (const Mode& m : spec.modes) dims.insert(m.dim());
    if (dims.size() > 1) throw Error(ErrorCode::InvalidSpec, "apply augment() before reorder()");
  }

  ReorderedSystem out;
  out.epsilon = spec.epsilon;
  out.n_z = spec.modes.front().fast_count();
  out.n_x = spec.modes.front().dim() - out.n_z;
  for (const Mode& m : spec.modes) {
    Mat s = build_permutation(m.mask);
    out.flows.push_back(s * m.flow * s.transpose());
    out.permutations.push_back(std::move(s));
  }
  for (const Transition& t : effective_transitions(spec)) {
    out.jumps.emplace(t, out.permutations[t.to] * spec.jumps[t.jump].matrix * out.permutations[t.from].transpose());
  }
  return out;
}

HybridSystemSpec augment(const HybridSystemSpec& spec, double lambda) {
  std::size_t n_x = 0, n_z = 0;
  for (const Mode& m : spec.modes) {
    n_x = std::max(n_x, m.slow_count());
    n_z = std::max(n_z, m.fast_count());
  }
  const std::size_t n = n_x + n_z;

  HybridSystemSpec out = spec;
  out.augment = false;
  for (Mode& m : out.modes) {
    const std::size_t extra_slow = n_x - m.slow_count();
    const std::size_t extra_fast = n_z - m.fast_count();
    if (extra_slow + extra_fast == 0) continue;
    const auto old_n = static_cast<Eigen::Index>(m.dim());
    Mat flow = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    flow.topLeftCorner(old_n, old_n) = m.flow;
    flow.bottomRightCorner(flow.rows() - old_n, flow.cols() - old_n).diagonal().setConstant(-lambda);
    m.flow = std::move(flow);
    m.mask.insert(m.mask.end(), extra_slow, Speed::Slow);
    m.mask.insert(m.mask.end(), extra_fast, Speed::Fast);
  }
  for (Jump& j : out.jumps) {
    if (static_cast<std::size_t>(j.matrix.rows()) == n && static_cast<std::size_t>(j.matrix.cols()) == n) continue;
    Mat padded = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    padded.topLeftCorner(j.matrix.rows(), j.matrix.cols()) = j.matrix;
    j.matrix = std::move(padded);
  }
  // Shapes are uniform after padding, so the compatible set would grow;
  // keep the original transitions explicitly.
  out.transitions = effective_transitions(spec);
  return out;
}

double default_augment_lambda(double epsilon, std::optional<double> lambda_s, std::optional<double> lambda_f) {
  if (lambda_s && lambda_f) return 10.0 * std::max(*lambda_s, *lambda_f);
  return 10.0 / epsilon;
}

double EventSchedule::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < events.size(); ++k) gap = std::min(gap, events[k].t - events[k - 1].t);
  return gap;
}

void validate_schedule(const std::vector<Transition>& transitions, std::size_t mode_count,
                       const EventSchedule& schedule) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::ScheduleIncompatible, msg); };
  if (schedule.events.empty()) fail("schedule has no events");
  if (schedule.events.front().t != 0.0) fail("first event must be at t = 0");
  if (!(schedule.horizon > 0.0) || !std::isfinite(schedule.horizon)) fail("horizon must be positive and finite");
  const std::set<Transition> allowed(transitions.begin(), transitions.end());
  for (std::size_t k = 0; k < schedule.events.size(); ++k) {
    const Event& e = schedule.events[k];
    if (e.mode >= mode_count) fail("event " + std::to_string(k) + " has unknown mode " + std::to_string(e.mode));
    if (k == 0) continue;
    const Event& prev = schedule.events[k - 1];
    if (!(e.t > prev.t)) fail("event times must be strictly increasing (event " + std::to_string(k) + ")");
    if (!e.jump) fail("event " + std::to_string(k) + " has no jump index");
    if (!allowed.contains(Transition{prev.mode, *e.jump, e.mode})) {
      fail("event " + std::to_string(k) + ": transition " + std::to_string(prev.mode) + " -(" +
           std::to_string(*e.jump) + ")-> " + std::to_string(e.mode) + " is not allowed");
    }
  }
}

void validate_schedule(const HybridSystemSpec& spec, const EventSchedule& schedule) {
  validate_schedule(effective_transitions(spec), spec.modes.size(), schedule);
}

EventSchedule periodic_schedule(const std::vector<Transition>& transitions, double tau, double horizon,
                                std::vector<std::size_t> mode_cycle, std::vector<std::size_t> jump_cycle) {
  if (!(tau > 0.0)) throw Error(ErrorCode::ScheduleIncompatible, "periodic schedule needs tau > 0");
  if (mode_cycle.empty()) throw Error(ErrorCode::ScheduleIncompatible, "empty mode cycle");
  EventSchedule out;
  out.horizon = horizon;
  out.events.push_back({0.0, mode_cycle.front(), std::nullopt});
  for (std::size_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * tau;
    if (!(t < horizon)) break;
    const std::size_t from = out.events.back().mode;
    const std::size_t to = mode_cycle[k % mode_cycle.size()];
    std::optional<std::size_t> jump;
    if (!jump_cycle.empty()) {
      jump = jump_cycle[(k - 1) % jump_cycle.size()];
    } else {
      for (const Transition& tr : transitions) {
        if (tr.from == from && tr.to == to) {
          jump = tr.jump;
          break;
        }
      }
      if (!jump) {
        throw Error(ErrorCode::ScheduleIncompatible,
                    "no transition from mode " + std::to_string(from) + " to mode " + std::to_string(to));
      }
    }
    out.events.push_back({t, to, jump});
  }
  return out;
}

EventSchedule random_schedule(const std::vector<Transition>& transitions, double min_gap, double max_gap,
                              double horizon, std::size_t initial_mode, std::uint64_t seed) {
  if (!(min_gap > 0.0) || max_gap < min_gap) throw Error(ErrorCode::ScheduleIncompatible, "bad gap range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gap(min_gap, max_gap);
  EventSchedule out;
  out.horizon = horizon;
  out.events.push_back({0.0, initial_mode, std::nullopt});
  double t = 0.0;
  while (true) {
    t += gap(rng);
    if (!(t < horizon)) break;
    std::vector<const Transition*> options;
    for (const Transition& tr : transitions) {
      if (tr.from == out.events.back().mode) options.push_back(&tr);
    }
    if (options.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const Transition& tr = *options[pick(rng)];
    out.events.push_back({t, tr.to, tr.jump});
  }
  return out;
}

}  // namespace sph::model
