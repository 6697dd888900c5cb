#include "sph/simulate.hpp"

#include "sph/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace sph::simulate {

const char* to_string(Frame f) noexcept {
  switch (f) {
    case Frame::Original: return "original";
    case Frame::Reordered: return "reordered";
    case Frame::Decoupled: return "decoupled";
    case Frame::Reduced: return "reduced";
  }
  return "unknown";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Converging: return "Converging";
    case Verdict::Diverging: return "Diverging";
    case Verdict::Undecided: return "Undecided";
  }
  return "unknown";
}

FlowSystem from_spec(const model::HybridSystemSpec& spec) {
  FlowSystem out;
  out.frame = Frame::Original;
  for (const auto& m : spec.modes) {
    const Vec d_inv = model::selector_matrix(m, spec.epsilon).diagonal().cwiseInverse();
    out.generators.push_back(d_inv.asDiagonal() * m.flow);
  }
  for (const Transition& t : model::effective_transitions(spec)) out.jumps.emplace(t, spec.jumps.at(t.jump).matrix);
  return out;
}

FlowSystem from_reordered(const model::ReorderedSystem& sys) {
  FlowSystem out;
  out.frame = Frame::Reordered;
  const auto nx = static_cast<Eigen::Index>(sys.n_x);
  for (const Mat& a : sys.flows) {
    Mat f = a;
    f.bottomRows(a.rows() - nx) /= sys.epsilon;
    out.generators.push_back(std::move(f));
  }
  out.jumps = sys.jumps;
  return out;
}

FlowSystem from_decoupled(const decouple::DecoupledSystem& sys) {
  FlowSystem out;
  out.frame = Frame::Decoupled;
  for (std::size_t i = 0; i < sys.modes.size(); ++i) out.generators.push_back(sys.generator(i));
  for (const auto& kv : sys.jumps) out.jumps.emplace(kv.first, sys.jump_matrix(kv.first));
  return out;
}

FlowSystem from_reduced(const decouple::ReducedOrderModel& rom) {
  FlowSystem out;
  out.frame = Frame::Reduced;
  out.generators = rom.flows;
  out.jumps = rom.jumps;
  return out;
}

namespace {

class ExpCache {
 public:
  explicit ExpCache(const FlowSystem& sys) : sys_(sys) {}

  const Mat& get(std::size_t mode, double t) {
    const auto key = std::make_pair(mode, t);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 4096) cache_.clear();
    return cache_.emplace(key, linalg::expm(sys_.generators.at(mode), t)).first->second;
  }

 private:
  const FlowSystem& sys_;
  std::map<std::pair<std::size_t, double>, Mat> cache_;
};

}  // namespace

Trajectory simulate(const FlowSystem& sys, const model::EventSchedule& schedule, const Vec& x0,
                    const SimulateOptions& options) {
  if (!(options.sample_dt > 0.0)) throw Error(ErrorCode::ScheduleIncompatible, "sample_dt must be positive");
  std::vector<Transition> transitions;
  for (const auto& kv : sys.jumps) transitions.push_back(kv.first);
  model::validate_schedule(transitions, sys.generators.size(), schedule);

  const std::size_t first_mode = schedule.events.front().mode;
  if (x0.size() != sys.generators.at(first_mode).rows()) {
    throw Error(ErrorCode::DimensionMismatch, "initial state has dimension " + std::to_string(x0.size()) +
                                                  ", mode " + std::to_string(first_mode) + " needs " +
                                                  std::to_string(sys.generators.at(first_mode).rows()));
  }

  Trajectory traj;
  traj.frame = sys.frame;
  traj.horizon = schedule.horizon;
  ExpCache cache(sys);
  const auto blown = [&](const Vec& v) { return !v.allFinite() || v.norm() > options.overflow_magnitude; };

  Vec start = x0;
  const auto& events = schedule.events;
  try {
    for (std::size_t k = 0; k < events.size(); ++k) {
      const std::size_t mode = events[k].mode;
      const double t0 = events[k].t;
      const double t1 = k + 1 < events.size() ? events[k + 1].t : schedule.horizon;
      traj.samples.push_back({t0, mode, start, k > 0});
      if (!(t1 > t0)) break;

      const double guard = 1e-12 * std::max(1.0, std::abs(t1));
      Vec x = start;
      for (std::size_t m = 1;; ++m) {
        const double t = t0 + static_cast<double>(m) * options.sample_dt;
        if (!(t < t1 - guard)) break;
        x = cache.get(mode, options.sample_dt) * x;
        if (blown(x)) {
          traj.diverged = true;
          return traj;
        }
        traj.samples.push_back({t, mode, x, false});
      }
      const Vec end = cache.get(mode, t1 - t0) * start;
      if (blown(end)) {
        traj.diverged = true;
        return traj;
      }
      traj.samples.push_back({t1, mode, end, false});
      if (k + 1 == events.size()) break;

      const Transition tr{mode, *events[k + 1].jump, events[k + 1].mode};
      start = sys.jumps.at(tr) * end;
      if (blown(start)) {
        traj.diverged = true;
        return traj;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Overflow) throw;
    traj.diverged = true;
  }
  return traj;
}

Vec to_decoupled(const decouple::DecoupledSystem& sys, Frame frame, std::size_t mode, const Vec& state) {
  const auto nx = static_cast<Eigen::Index>(sys.n_x());
  const auto nz = static_cast<Eigen::Index>(sys.n_z());
  const Eigen::Index expected = frame == Frame::Reduced ? nx : nx + nz;
  if (state.size() != expected || mode >= sys.modes.size()) {
    throw Error(ErrorCode::DimensionMismatch, "state of size " + std::to_string(state.size()) + " in mode " +
                                                  std::to_string(mode) + " does not fit the decoupled system");
  }
  switch (frame) {
    case Frame::Decoupled: return state;
    case Frame::Reduced: {
      // The reduced model carries no fast part.
      Vec out = Vec::Zero(nx + nz);
      out.head(nx) = state;
      return out;
    }
    case Frame::Original:
    case Frame::Reordered: {
      Vec xz = frame == Frame::Original ? Vec(sys.reordered.permutations.at(mode) * state) : state;
      return sys.p.at(mode) * xz;
    }
  }
  return state;
}

void witnesses(Trajectory& traj, const certify::LyapunovData& lyap, const decouple::DecoupledSystem& sys) {
  const auto nx = static_cast<Eigen::Index>(sys.n_x());
  const auto nz = static_cast<Eigen::Index>(sys.n_z());
  std::vector<std::pair<Mat, Mat>> roots;
  for (const auto& m : lyap.modes) {
    roots.emplace_back(linalg::principal_sqrt(m.q_s).mat(), linalg::principal_sqrt(m.q_f).mat());
  }
  traj.witness.clear();
  traj.witness.reserve(traj.samples.size());
  for (const Sample& s : traj.samples) {
    const Vec xy = to_decoupled(sys, traj.frame, s.mode, s.state);
    const auto& [rs, rf] = roots.at(s.mode);
    traj.witness.push_back({(rs * xy.head(nx)).norm(), (rf * xy.tail(nz)).norm()});
  }
}

Verdict classify(const Trajectory& traj, const ClassifyOptions& options) {
  if (traj.samples.empty()) return Verdict::Undecided;
  const double n0 = traj.samples.front().state.norm();
  if (traj.diverged) return Verdict::Diverging;
  double tail_max = 0.0;
  const double tail_start = traj.horizon * (1.0 - options.tail_fraction);
  for (const Sample& s : traj.samples) {
    const double n = s.state.norm();
    if (n > options.divergence_factor * n0) return Verdict::Diverging;
    if (s.t >= tail_start) tail_max = std::max(tail_max, n);
  }
  if (n0 == 0.0) return Verdict::Converging;
  const double limit = options.delta * n0;
  const bool reached_end = traj.samples.back().t >= traj.horizon;
  if (reached_end && traj.samples.back().state.norm() <= limit && tail_max <= limit) return Verdict::Converging;
  return Verdict::Undecided;
}

}  // namespace sph::simulate
