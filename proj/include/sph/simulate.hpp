#pragma once

#include "sph/certify.hpp"
#include "sph/decouple.hpp"
#include "sph/model.hpp"

#include <map>
#include <vector>

namespace sph::simulate {

using linalg::Mat;
using linalg::Vec;
using model::Transition;

/// Coordinates a trajectory is expressed in.
enum class Frame { Original, Reordered, Decoupled, Reduced };

const char* to_string(Frame f) noexcept;

/// Linear flows dX/dt = F_i X and the jump matrices of every transition.
struct FlowSystem {
  Frame frame = Frame::Original;
  std::vector<Mat> generators;
  std::map<Transition, Mat> jumps;
};

/// F_i = (D^i)^{-1} A^i; jumps are the raw J^j of each effective transition.
FlowSystem from_spec(const model::HybridSystemSpec& spec);
FlowSystem from_reordered(const model::ReorderedSystem& sys);
FlowSystem from_decoupled(const decouple::DecoupledSystem& sys);
FlowSystem from_reduced(const decouple::ReducedOrderModel& rom);

struct Sample {
  double t = 0.0;
  std::size_t mode = 0;
  Vec state;
  bool is_post_jump = false;
};

struct WitnessSample {
  double w_s = 0.0;
  double w_f = 0.0;
};

struct Trajectory {
  Frame frame = Frame::Original;
  double horizon = 0.0;
  std::vector<Sample> samples;
  /// One entry per sample once witnesses() has run.
  std::vector<WitnessSample> witness;
  bool diverged = false;
};

struct SimulateOptions {
  double sample_dt = 0.01;
  /// The run stops, flagged as diverged, past this state norm.
  double overflow_magnitude = 1e300;
};

/// Exact piecewise evolution. Interior samples step by a cached e^{F dt};
/// each interval end is e^{F tau_k} applied to the state at t_k, so event
/// states do not depend on sample_dt. Throws ScheduleIncompatible.
Trajectory simulate(const FlowSystem& sys, const model::EventSchedule& schedule, const Vec& x0,
                    const SimulateOptions& options = {});

/// Fills traj.witness with W_s = |Qs^{1/2} x|, W_f = |Qf^{1/2} y| of the active
/// mode, mapping the stored states to (x, y) first. Throws DimensionMismatch.
void witnesses(Trajectory& traj, const certify::LyapunovData& lyap, const decouple::DecoupledSystem& sys);

/// Converts one state of `frame` in `mode` to decoupled (x, y) coordinates.
Vec to_decoupled(const decouple::DecoupledSystem& sys, Frame frame, std::size_t mode, const Vec& state);

enum class Verdict { Converging, Diverging, Undecided };

const char* to_string(Verdict v) noexcept;

struct ClassifyOptions {
  double delta = 1e-3;
  double divergence_factor = 1e6;
  double tail_fraction = 0.1;
};

Verdict classify(const Trajectory& traj, const ClassifyOptions& options = {});

}  // namespace sph::simulate
