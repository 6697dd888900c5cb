#pragma once

#include "sph/linalg.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sph::model {

using linalg::Mat;
using linalg::Vec;

enum class Speed { Slow, Fast };

struct Mode {
  std::string name;
  std::vector<Speed> mask;  // one entry per coordinate
  Mat flow;                 // A^i in  D^i dX/dt = A^i X

  std::size_t dim() const noexcept { return mask.size(); }
  std::size_t fast_count() const noexcept;
  std::size_t slow_count() const noexcept { return dim() - fast_count(); }
};

struct Jump {
  std::string name;
  Mat matrix;  // rows = target mode dim, cols = source mode dim
};

/// A declared event type: leave mode `from` through jump `jump` into mode `to`.
struct Transition {
  std::size_t from = 0;
  std::size_t jump = 0;
  std::size_t to = 0;

  auto operator<=>(const Transition&) const = default;
};

struct HybridSystemSpec {
  double epsilon = 0.0;
  std::vector<Mode> modes;
  std::vector<Jump> jumps;
  /// Empty means every (from, jump, to) with compatible shapes.
  std::vector<Transition> transitions;
  /// Mode-dependent dimensions are allowed and resolved through augment().
  bool augment = false;
};

/// Transitions actually in force: the declared list, or all compatible triples.
std::vector<Transition> effective_transitions(const HybridSystemSpec& spec);

/// Diagonal selector D^i: 1 for slow coordinates, epsilon for fast ones.
Mat selector_matrix(const Mode& mode, double epsilon);

enum class FindingKind {
  NoModes,
  EpsilonRange,
  MaskLength,
  NonFinite,
  ShapeMismatch,
  UnknownIndex,
  NonConstantDimension,
  NonConstantFastCount,
  DegenerateSplit,
};

const char* to_string(FindingKind kind) noexcept;

struct Finding {
  FindingKind kind;
  std::string message;
};

std::vector<Finding> validate(const HybridSystemSpec& spec);

/// Permutation moving slow coordinates first, then fast ones, each group in
/// original order.
Mat build_permutation(const std::vector<Speed>& mask);

struct Blocks {
  Mat a11, a12, a21, a22;
};

Blocks partition(const Mat& m, std::size_t n_x);

/// System with slow/fast coordinates in fixed positions: (x, z) = S_i X.
struct ReorderedSystem {
  double epsilon = 0.0;
  std::size_t n_x = 0;
  std::size_t n_z = 0;
  std::vector<Mat> permutations;  // S_i
  std::vector<Mat> flows;         // S_i A^i S_i^T
  std::map<Transition, Mat> jumps;  // S_{i'} J^j S_i^T

  std::size_t mode_count() const noexcept { return flows.size(); }
  Blocks blocks(std::size_t mode) const { return partition(flows.at(mode), n_x); }
};

/// Throws InvalidSpec when validate() reports findings.
ReorderedSystem reorder(const HybridSystemSpec& spec);

/// Pads every mode to the maximal slow and fast counts with artificial
/// coordinates flowing as -lambda (epsilon-scaled when fast) and reset to 0
/// at events. Original coordinates stay first in each mode.
HybridSystemSpec augment(const HybridSystemSpec& spec, double lambda);

/// 10 * max(lambda_s, lambda_f) when known, otherwise 10 / epsilon.
double default_augment_lambda(double epsilon, std::optional<double> lambda_s = std::nullopt,
                              std::optional<double> lambda_f = std::nullopt);

// ---------------------------------------------------------------------------
// Event schedules

struct Event {
  double t = 0.0;
  std::size_t mode = 0;
  std::optional<std::size_t> jump;  // absent for the initial event only
};

struct EventSchedule {
  std::vector<Event> events;
  double horizon = 0.0;

  /// Smallest gap between consecutive events (infinity with fewer than 2).
  double min_gap() const;
};

/// Throws ScheduleIncompatible.
void validate_schedule(const HybridSystemSpec& spec, const EventSchedule& schedule);
void validate_schedule(const std::vector<Transition>& transitions, std::size_t mode_count,
                       const EventSchedule& schedule);

/// Events every `tau` seconds cycling through `mode_cycle`; the jump of each
/// event is the first allowed transition between the two modes unless
/// `jump_cycle` is given.
EventSchedule periodic_schedule(const std::vector<Transition>& transitions, double tau, double horizon,
                                std::vector<std::size_t> mode_cycle,
                                std::vector<std::size_t> jump_cycle = {});

/// Gaps drawn uniformly in [min_gap, max_gap]; each event picks uniformly
/// among the transitions leaving the current mode.
EventSchedule random_schedule(const std::vector<Transition>& transitions, double min_gap, double max_gap,
                              double horizon, std::size_t initial_mode, std::uint64_t seed);

}  // namespace sph::model
