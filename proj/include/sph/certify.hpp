#pragma once

#include "sph/decouple.hpp"
#include "sph/linalg.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sph::certify {

using linalg::Mat;
using linalg::SymPD;
using linalg::Vec;

/// User-supplied Lyapunov data for one mode. Each block is overridden only
/// when both its matrix and its rate are given.
struct ModeOverride {
  std::optional<Mat> q_s;
  std::optional<double> lambda_s;
  std::optional<Mat> q_f;
  std::optional<double> lambda_f;
};

struct LyapunovOptions {
  /// Decay rate taken as kappa times the distance of the spectral abscissa to 0.
  double kappa = 0.9;
  /// 1x1 blocks use the exact rate -a with Q = 1 (the inequality is tight).
  bool exact_scalar = true;
  /// Rescale Q_s of a two-mode scalar system to minimize gamma11.
  bool scalar_optimal_q = true;
  /// Use ||Qf^{1/2} Qf B3 Qf^{-1/2}|| instead of ||Qf^{1/2} B3 Qf^{-1/2}||.
  bool strict_b3 = false;
  std::map<std::size_t, ModeOverride> overrides;
};

struct ModeLyapunov {
  SymPD q_s;
  double lambda_s;
  SymPD q_f;
  double lambda_f;
};

/// Minimum eigenvalue of -(A^T Q + Q A + 2 lambda Q); nonnegative when the
/// decay inequality holds.
double lyapunov_slack(const Mat& a, const Mat& q, double lambda);

/// Throws NotHurwitz (naming mode and block) or SuppliedDataInvalid.
std::vector<ModeLyapunov> mode_lyapunov(const decouple::DecoupledSystem& sys, const LyapunovOptions& options = {});

struct ScalarQ {
  double q = 1.0;        // sqrt(Qs^2 / Qs^1)
  double gamma11 = 0.0;  // gamma11 obtained with that ratio
};

bool is_scalar_two_mode(const decouple::DecoupledSystem& sys);

/// Ratio of the two slow weights minimizing gamma11 for n_x = n_z = 1 and two
/// modes. Throws NotScalarTwoMode.
ScalarQ scalar_optimal_q(const decouple::DecoupledSystem& sys);

/// Sets Qs so that sqrt(Qs^2/Qs^1) = q with the smaller weight equal to 1.
void apply_scalar_q(std::vector<ModeLyapunov>& modes, double q);

struct Couplings {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  std::vector<std::array<double, 3>> per_mode;
};

Couplings coupling_constants(const decouple::DecoupledSystem& sys, const std::vector<ModeLyapunov>& modes,
                             bool strict_b3 = false);

struct EpsilonThresholds {
  double eps1 = 0.0;  // +inf when the denominator vanishes
  double eps2 = 0.0;
};

EpsilonThresholds epsilon_thresholds(double lambda_s, double lambda_f, const Couplings& b);

struct Betas {
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
};

Betas compute_betas(double lambda_s, double lambda_f, double eps2, const Couplings& b);

struct Gammas {
  double g11 = 0.0, g12 = 0.0, g21 = 0.0, g22 = 0.0;
  Mat matrix() const;
};

Gammas gammas(const decouple::DecoupledSystem& sys, const std::vector<ModeLyapunov>& modes);

struct LyapunovData {
  std::vector<ModeLyapunov> modes;
  double lambda_s = 0.0;
  double lambda_f = 0.0;
  Couplings b;
  double eps1 = 0.0;
  double eps2 = 0.0;
  Betas beta;
  Gammas gamma;
  std::array<double, 4> delta{};  // delta1..delta4
  std::optional<double> scalar_q;
  bool strict_b3 = false;
};

/// Runs the whole constant pipeline on a decoupled system.
LyapunovData build_lyapunov_data(const decouple::DecoupledSystem& sys, const LyapunovOptions& options = {});

/// Recomputes every derived constant (b, eps1/eps2, beta, gamma, delta) from
/// the per-mode data already stored in `data.modes`.
void refresh_constants(LyapunovData& data, const decouple::DecoupledSystem& sys);

/// Checks eps in (0, eps2]; throws EpsilonOutOfRange.
Betas betas(const LyapunovData& data, double eps);

/// M_tau; throws EpsilonOutOfRange.
Mat build_M_tau(const LyapunovData& data, double eps, double tau);

/// Gamma * M_tau.
Mat gamma_m(const LyapunovData& data, double eps, double tau);

/// Smallest tau with spectral_radius(Gamma M_tau) < 1. Throws Infeasible.
double min_dwell_bisection(const LyapunovData& data, double eps);

enum class Gamma11Case { GT1, EQ1_G12NZ, EQ1_G12Z, LT1, LT1_NODWELL };

const char* to_string(Gamma11Case c) noexcept;

struct DwellTimeCertificate {
  Gamma11Case gamma11_case = Gamma11Case::LT1;
  double epsilon = 0.0;
  double epsilon_star = 0.0;
  std::optional<double> tau_closed_form;
  std::optional<double> tau_bisection;
  double reduced_order_tau = 0.0;
  /// Scalar a of the witness; the witness is (1, a eps) for GT1/EQ1 and (1, a) otherwise.
  double a_param = 0.0;
  bool witness_scaled_by_eps = false;
  double constant_part = 0.0;  // ln(g11)/ls for GT1, -(eps/lf) ln eps for EQ1_G12NZ
  double eta = 0.0;            // eta_1..eta_4 of the case at eps
  std::map<std::string, double> thresholds;
  bool witness_verified = false;
  std::string closed_form_error;
  std::string bisection_error;

  Vec witness() const;
};

/// Case dispatch on gamma11 plus a-parameter search. Throws
/// EpsilonOutOfRange, EpsilonAboveThreshold or NoFeasibleA.
DwellTimeCertificate closed_form_certificate(const LyapunovData& data, double eps);

double reduced_order_certificate(const LyapunovData& data);

/// Closed form, bisection and reduced-order bound together; failures of
/// either route are recorded in the *_error fields instead of thrown.
DwellTimeCertificate certify(const LyapunovData& data, double eps);

/// Componentwise (Gamma M_tau)^T p < p.
bool witness_holds(const Mat& gm, const Vec& p);

}  // namespace sph::certify
