#pragma once

#include "sph/certify.hpp"
#include "sph/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sph::config {

struct ScheduleConfig {
  std::string kind = "periodic";  // periodic | explicit | random
  // periodic
  double tau = 0.0;
  std::vector<std::size_t> mode_cycle;  // empty: 0, 1, ..., m-1
  std::vector<std::size_t> jump_cycle;  // empty: first matching transition
  // explicit
  std::vector<model::Event> events;
  // random
  double min_gap = 0.0;
  double max_gap = 0.0;
  std::size_t initial_mode = 0;
  std::uint64_t seed = 0;
};

struct SimulateConfig {
  std::vector<double> x0;
  ScheduleConfig schedule;
  std::optional<double> horizon;  // default 50 / lambda_s, or 10 s without Lyapunov data
  double sample_dt = 0.01;
  double delta = 1e-3;
  double divergence_factor = 1e6;
};

struct RunConfig {
  model::HybridSystemSpec system;
  std::optional<double> augment_lambda;
  certify::LyapunovOptions lyapunov;
  std::vector<double> eps;  // empty: system.epsilon only
  SimulateConfig simulate;
  std::string output_dir = "out";
};

/// Throws Error(Parse) on malformed text or schema violations.
RunConfig parse(const std::string& text);
RunConfig load(const std::filesystem::path& path);
std::string emit(const RunConfig& cfg);

/// SPH_OUTPUT_DIR when set, the configured directory otherwise.
std::filesystem::path output_dir(const RunConfig& cfg);

/// Builds the configured schedule over the given transitions.
model::EventSchedule make_schedule(const ScheduleConfig& sc, const std::vector<model::Transition>& transitions,
                                   std::size_t mode_count, double horizon);

/// The two bundled two-mode scalar examples (id 1 or 2). Throws InvalidSpec.
RunConfig example(int id);

}  // namespace sph::config
