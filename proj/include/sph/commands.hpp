#pragma once

#include "sph/certify.hpp"
#include "sph/config.hpp"
#include "sph/decouple.hpp"
#include "sph/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sph::cli {

/// Everything derived from a configuration before certification.
struct Analysis {
  model::HybridSystemSpec spec;  // augmented when requested
  model::ReorderedSystem reordered;
  decouple::DecoupledSystem decoupled;
  certify::LyapunovData lyap;
};

/// Throws InvalidSpec, SingularA22, NotHurwitz, SuppliedDataInvalid.
Analysis analyze(const config::RunConfig& cfg);

/// Spec with augmentation applied when the configuration asks for it.
model::HybridSystemSpec effective_spec(const config::RunConfig& cfg);

/// Exit codes: 0 success, 1 domain failure, 2 usage or parse error.
int cmd_validate(const config::RunConfig& cfg, std::ostream& out);

struct CertifyArgs {
  std::vector<double> eps;  // overrides the configured list when non-empty
  bool strict_b3 = false;
};

int cmd_certify(const config::RunConfig& cfg, const CertifyArgs& args, std::ostream& out);

struct SimulateArgs {
  std::optional<double> tau;
  std::optional<std::filesystem::path> schedule_file;
  std::string label = "trajectory";
};

int cmd_simulate(const config::RunConfig& cfg, const SimulateArgs& args, std::ostream& out);

int cmd_sweep(const config::RunConfig& cfg, const std::vector<double>& eps, std::ostream& out);

int cmd_reproduce(int id, const std::optional<std::filesystem::path>& out_dir, std::ostream& out);

/// Machine-readable record of one certificate.
std::string certificate_record(const certify::LyapunovData& lyap, const certify::DwellTimeCertificate& c);

/// Rebuilds Gamma M_tau from a record and checks that the recorded Schur
/// verdicts at the certified dwell times are reproduced.
bool reverify_certificate(const std::string& record);

/// Writes `t,mode,is_post_jump,u1..un,W_s,W_f` rows.
void write_trajectory_csv(const simulate::Trajectory& traj, const std::filesystem::path& path);

void write_plot_script(const std::filesystem::path& csv, const std::filesystem::path& script,
                       const std::string& title);

}  // namespace sph::cli
