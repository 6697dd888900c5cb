#include "sph/certify.hpp"

#include "sph/error.hpp"
#include "sph/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace sph::certify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}

// -scale * ln(num / den) with the conventions needed by the dwell bounds:
// num <= 0 makes the inequality unsatisfiable, den == 0 makes it trivial.
double neg_log_bound(double scale, double num, double den) {
  if (!(num > 0.0)) return kInf;
  if (den <= 0.0) return -kInf;
  return -scale * std::log(num / den);
}

std::string mode_block(std::size_t mode, const char* block) {
  return "mode " + std::to_string(mode) + " block " + block;
}

struct BlockLyapunov {
  SymPD q;
  double lambda;
};

BlockLyapunov block_lyapunov(const Mat& a, std::size_t mode, const char* block, const LyapunovOptions& opt) {
  if (!linalg::is_hurwitz(a)) throw Error(ErrorCode::NotHurwitz, mode_block(mode, block) + " is not Hurwitz");
  if (a.rows() == 1 && opt.exact_scalar) return {SymPD(Mat::Identity(1, 1)), -a(0, 0)};
  const double lambda = opt.kappa * -linalg::spectral_abscissa(a);
  const Eigen::Index n = a.rows();
  const Mat shifted = a + lambda * Mat::Identity(n, n);
  Mat q = linalg::solve_lyapunov(shifted, SymPD(Mat::Identity(n, n))).mat();
  q /= SymPD(q).min_eigenvalue();
  return {SymPD(std::move(q)), lambda};
}

BlockLyapunov supplied_block(const Mat& a, const Mat& q, double lambda, std::size_t mode, const char* block) {
  const std::string where = mode_block(mode, block);
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw Error(ErrorCode::SuppliedDataInvalid, where + ": Q has the wrong shape");
  }
  if (!(lambda > 0.0)) throw Error(ErrorCode::SuppliedDataInvalid, where + ": lambda must be positive");
  std::optional<SymPD> spd;
  try {
    spd.emplace(q);
  } catch (const Error& e) {
    throw Error(ErrorCode::SuppliedDataInvalid, where + ": " + e.what());
  }
  if (spd->min_eigenvalue() < 1.0 - tol::kQLowerBound) {
    throw Error(ErrorCode::SuppliedDataInvalid, where + ": Q must satisfy Q >= I");
  }
  if (lyapunov_slack(a, q, lambda) < -tol::kLyapunovVerify) {
    throw Error(ErrorCode::SuppliedDataInvalid, where + ": A^T Q + Q A <= -2 lambda Q does not hold");
  }
  return {std::move(*spd), lambda};
}

double weighted_norm(const Mat& left_q, const Mat& m, const Mat& right_q) {
  return linalg::spectral_norm(linalg::principal_sqrt(SymPD(left_q)).mat() * m *
                               linalg::principal_inv_sqrt(SymPD(right_q)).mat());
}

}  // namespace

double lyapunov_slack(const Mat& a, const Mat& q, double lambda) {
  const Mat lhs = -(a.transpose() * q + q * a + 2.0 * lambda * q);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (lhs + lhs.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<ModeLyapunov> mode_lyapunov(const decouple::DecoupledSystem& sys, const LyapunovOptions& options) {
  std::vector<ModeLyapunov> out;
  for (std::size_t i = 0; i < sys.modes.size(); ++i) {
    const auto& m = sys.modes[i];
    // Assumption: both blocks Hurwitz, checked before any override is used.
    if (!linalg::is_hurwitz(m.a0)) throw Error(ErrorCode::NotHurwitz, mode_block(i, "A0") + " is not Hurwitz");
    if (!linalg::is_hurwitz(m.a22)) throw Error(ErrorCode::NotHurwitz, mode_block(i, "A22") + " is not Hurwitz");

    const auto ov = options.overrides.find(i);
    const ModeOverride* o = ov == options.overrides.end() ? nullptr : &ov->second;
    BlockLyapunov slow = (o && o->q_s && o->lambda_s) ? supplied_block(m.a0, *o->q_s, *o->lambda_s, i, "A0")
                                                      : block_lyapunov(m.a0, i, "A0", options);
    BlockLyapunov fast = (o && o->q_f && o->lambda_f) ? supplied_block(m.a22, *o->q_f, *o->lambda_f, i, "A22")
                                                      : block_lyapunov(m.a22, i, "A22", options);
    out.push_back({std::move(slow.q), slow.lambda, std::move(fast.q), fast.lambda});
  }
  return out;
}

bool is_scalar_two_mode(const decouple::DecoupledSystem& sys) {
  return sys.modes.size() == 2 && sys.n_x() == 1 && sys.n_z() == 1;
}

ScalarQ scalar_optimal_q(const decouple::DecoupledSystem& sys) {
  if (!is_scalar_two_mode(sys)) {
    throw Error(ErrorCode::NotScalarTwoMode, "scalar_optimal_q needs two modes with n_x = n_z = 1");
  }
  double forward = -1.0, backward = -1.0, self = 0.0;
  for (const auto& [t, r] : sys.jumps) {
    const double v = std::abs(r.r11(0, 0));
    if (t.from == 0 && t.to == 1) forward = std::max(forward, v);
    else if (t.from == 1 && t.to == 0) backward = std::max(backward, v);
    else self = std::max(self, v);
  }
  if (forward < 0.0 || backward < 0.0) {
    throw Error(ErrorCode::NotScalarTwoMode, "scalar_optimal_q needs transitions in both directions");
  }
  // gamma11 = max(q |r_fwd|, |r_bwd| / q) is minimal where both terms agree.
  ScalarQ out;
  if (forward > 0.0 && backward > 0.0) {
    out.q = std::sqrt(backward / forward);
    out.gamma11 = std::max(std::sqrt(forward * backward), self);
  } else {
    out.q = 1.0;
    out.gamma11 = std::max({forward, backward, self});
  }
  return out;
}

void apply_scalar_q(std::vector<ModeLyapunov>& modes, double q) {
  const double ratio = q * q;
  if (ratio >= 1.0) {
    modes[0].q_s = SymPD(Mat::Constant(1, 1, 1.0));
    modes[1].q_s = SymPD(Mat::Constant(1, 1, ratio));
  } else {
    modes[0].q_s = SymPD(Mat::Constant(1, 1, 1.0 / ratio));
    modes[1].q_s = SymPD(Mat::Constant(1, 1, 1.0));
  }
}

Couplings coupling_constants(const decouple::DecoupledSystem& sys, const std::vector<ModeLyapunov>& modes,
                             bool strict_b3) {
  Couplings out;
  for (std::size_t i = 0; i < sys.modes.size(); ++i) {
    const auto& m = sys.modes[i];
    const Mat& qs = modes[i].q_s.mat();
    const Mat& qf = modes[i].q_f.mat();
    const double b1 = weighted_norm(qs, m.b1, qf);
    const double b2 = weighted_norm(qf, m.b2, qs);
    const double b3 = strict_b3 ? weighted_norm(qf, qf * m.b3, qf) : weighted_norm(qf, m.b3, qf);
    out.per_mode.push_back({b1, b2, b3});
    out.b1 = std::max(out.b1, b1);
    out.b2 = std::max(out.b2, b2);
    out.b3 = std::max(out.b3, b3);
  }
  return out;
}

EpsilonThresholds epsilon_thresholds(double lambda_s, double lambda_f, const Couplings& b) {
  EpsilonThresholds out;
  const double den = (b.b1 + b.b2) * (b.b1 + b.b2) / (4.0 * lambda_s) + b.b3;
  out.eps1 = den > 0.0 ? lambda_f / den : kInf;
  out.eps2 = std::min(out.eps1, tol::kEpsilon2Factor * lambda_f / lambda_s);
  return out;
}

Betas compute_betas(double lambda_s, double lambda_f, double eps2, const Couplings& b) {
  Betas out;
  out.beta1 = std::hypot(b.b2, b.b3) / lambda_f;
  out.beta2 = b.b1 / (lambda_f - eps2 * lambda_s);
  out.beta3 = b.b1 * out.beta1 / lambda_s;
  return out;
}

Mat Gammas::matrix() const {
  Mat g(2, 2);
  g << g11, g12, g21, g22;
  return g;
}

Gammas gammas(const decouple::DecoupledSystem& sys, const std::vector<ModeLyapunov>& modes) {
  Gammas g;
  for (const auto& [t, r] : sys.jumps) {
    const Mat& qs_from = modes[t.from].q_s.mat();
    const Mat& qf_from = modes[t.from].q_f.mat();
    const Mat& qs_to = modes[t.to].q_s.mat();
    const Mat& qf_to = modes[t.to].q_f.mat();
    g.g11 = std::max(g.g11, weighted_norm(qs_to, r.r11, qs_from));
    g.g12 = std::max(g.g12, weighted_norm(qs_to, r.r12, qf_from));
    g.g21 = std::max(g.g21, weighted_norm(qf_to, r.r21, qs_from));
    g.g22 = std::max(g.g22, weighted_norm(qf_to, r.r22, qf_from));
  }
  return g;
}

void refresh_constants(LyapunovData& d, const decouple::DecoupledSystem& sys) {
  d.lambda_s = kInf;
  d.lambda_f = kInf;
  for (const auto& m : d.modes) {
    d.lambda_s = std::min(d.lambda_s, m.lambda_s);
    d.lambda_f = std::min(d.lambda_f, m.lambda_f);
  }
  d.b = coupling_constants(sys, d.modes, d.strict_b3);
  const auto th = epsilon_thresholds(d.lambda_s, d.lambda_f, d.b);
  d.eps1 = th.eps1;
  d.eps2 = th.eps2;
  d.beta = compute_betas(d.lambda_s, d.lambda_f, d.eps2, d.b);
  d.gamma = gammas(sys, d.modes);
  const auto& [b1, b2, b3] = d.beta;
  const auto& g = d.gamma;
  d.delta = {g.g11 * b3 + g.g12 * b1, g.g11 * (b2 + b3) + g.g12 * b1, g.g21 * b3 + g.g22 * b1,
             g.g21 * (b2 + b3) + g.g22 * b1};
}

LyapunovData build_lyapunov_data(const decouple::DecoupledSystem& sys, const LyapunovOptions& options) {
  LyapunovData d;
  d.modes = mode_lyapunov(sys, options);
  d.strict_b3 = options.strict_b3;
  const bool slow_overridden = std::any_of(options.overrides.begin(), options.overrides.end(),
                                           [](const auto& kv) { return kv.second.q_s.has_value(); });
  if (options.scalar_optimal_q && is_scalar_two_mode(sys) && !slow_overridden) {
    try {
      const ScalarQ sq = scalar_optimal_q(sys);
      apply_scalar_q(d.modes, sq.q);
      d.scalar_q = sq.q;
    } catch (const Error&) {
      // No transitions in both directions: keep the default weights.
    }
  }
  refresh_constants(d, sys);
  return d;
}

Betas betas(const LyapunovData& data, double eps) {
  if (!(eps > 0.0 && eps <= data.eps2)) {
    throw Error(ErrorCode::EpsilonOutOfRange,
                "epsilon " + std::to_string(eps) + " outside (0, eps2 = " + std::to_string(data.eps2) + "]");
  }
  return data.beta;
}

Mat build_M_tau(const LyapunovData& data, double eps, double tau) {
  const Betas b = betas(data, eps);
  Mat m(2, 2);
  m << std::exp(-data.lambda_s * tau) + eps * b.beta3, eps * (b.beta2 + b.beta3), eps * b.beta1,
      std::exp(-data.lambda_f * tau / eps) + eps * b.beta1;
  return m;
}

Mat gamma_m(const LyapunovData& data, double eps, double tau) {
  return data.gamma.matrix() * build_M_tau(data, eps, tau);
}

double min_dwell_bisection(const LyapunovData& data, double eps) {
  const Mat gamma = data.gamma.matrix();
  const auto schur_at = [&](double tau) { return linalg::is_schur_positive(gamma * build_M_tau(data, eps, tau)).schur; };

  const Betas b = betas(data, eps);
  Mat limit(2, 2);
  limit << eps * b.beta3, eps * (b.beta2 + b.beta3), eps * b.beta1, eps * b.beta1;
  const auto limit_test = linalg::is_schur_positive(gamma * limit);
  if (!limit_test.schur) {
    throw Error(ErrorCode::Infeasible, "spectral radius of Gamma M_inf is " + std::to_string(limit_test.radius) +
                                           " >= 1 at epsilon " + std::to_string(eps));
  }
  if (schur_at(0.0)) return 0.0;

  double lo = 0.0;
  double hi = std::max(eps / data.lambda_f, 1e-12);
  while (!schur_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) throw Error(ErrorCode::Infeasible, "no finite dwell time found");
  }
  for (int it = 0; it < tol::kBisectionMaxIterations && hi - lo > tol::kBisectionRelTol * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (schur_at(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

const char* to_string(Gamma11Case c) noexcept {
  switch (c) {
    case Gamma11Case::GT1: return "GT1";
    case Gamma11Case::EQ1_G12NZ: return "EQ1_G12NZ";
    case Gamma11Case::EQ1_G12Z: return "EQ1_G12Z";
    case Gamma11Case::LT1: return "LT1";
    case Gamma11Case::LT1_NODWELL: return "LT1_NODWELL";
  }
  return "Unknown";
}

Vec DwellTimeCertificate::witness() const {
  Vec p(2);
  p << 1.0, witness_scaled_by_eps ? a_param * epsilon : a_param;
  return p;
}

bool witness_holds(const Mat& gm, const Vec& p) {
  return ((gm.transpose() * p).array() < p.array()).all();
}

namespace {

// Dwell-time requirements from (Gamma M_tau)^T p < p with p = (1, w):
//   slow row:  (g11 + w g21) e^{-ls tau} + eps (d1 + w d3) < 1
//   fast row:  (g12 + w g22) e^{-lf tau/eps} + eps (d2 + w d4) < w
struct WitnessBounds {
  const LyapunovData& d;
  double eps;

  double slow(double w) const {
    const auto& g = d.gamma;
    return neg_log_bound(1.0 / d.lambda_s, 1.0 - eps * (d.delta[0] + w * d.delta[2]), g.g11 + w * g.g21);
  }
  double fast(double w) const {
    const auto& g = d.gamma;
    return neg_log_bound(eps / d.lambda_f, w - eps * (d.delta[1] + w * d.delta[3]), g.g12 + w * g.g22);
  }
  double required(double w) const { return std::max(slow(w), fast(w)); }
};

struct SearchResult {
  double a = 0.0;
  double value = kInf;
};

// At the optimum both witness rows are tight and the fast row barely moves
// with tau, so a probe on tau alone can miss. Push a inward until the
// witness holds strictly at the probe.
SearchResult settle_witness(const LyapunovData& d, double eps, bool scaled, SearchResult best, double hi,
                            const std::function<double(double)>& objective) {
  double step = 1e-12 * std::max(1.0, std::abs(best.a));
  for (int k = 0; k < 80; ++k) {
    const double tau = std::max(best.value, 0.0) + tol::kCertificateProbe;
    Vec p(2);
    p << 1.0, scaled ? best.a * eps : best.a;
    if (witness_holds(gamma_m(d, eps, tau), p)) break;
    const double a = best.a + step;
    if (!(a < hi)) break;
    const double v = objective(a);
    if (!std::isfinite(v)) break;
    best = {a, v};
    step *= 2.0;
  }
  return best;
}

// Minimizes a quasi-convex f over the open interval (lo, hi), hi possibly
// infinite, parameterized by log(a - lo): coarse scan then golden section.
template <typename F>
SearchResult minimize_quasiconvex(F&& f, double lo, double hi) {
  const double span = std::isfinite(hi) ? hi - lo : 1e8 * std::max(1.0, std::abs(lo));
  if (!(span > 0.0)) return {};
  const double s_hi = std::log(span);
  const double s_lo = s_hi - 45.0;
  const auto at = [&](double s) { return lo + std::exp(s); };
  const auto eval = [&](double s) {
    const double a = at(s);
    return (a > lo && a < hi) ? f(a) : kInf;
  };

  const int n = tol::kGoldenPrescan;
  std::vector<double> grid(static_cast<std::size_t>(n));
  std::size_t best = 0;
  for (int k = 0; k < n; ++k) {
    grid[static_cast<std::size_t>(k)] = eval(s_lo + (s_hi - s_lo) * (k + 0.5) / n);
    if (grid[static_cast<std::size_t>(k)] < grid[best]) best = static_cast<std::size_t>(k);
  }
  double left = s_lo + (s_hi - s_lo) * (std::max<double>(static_cast<double>(best), 0.5) - 0.5) / n;
  double right = s_lo + (s_hi - s_lo) * (std::min<double>(static_cast<double>(best) + 1.5, n)) / n;
  if (best == 0) left = s_lo;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = right - inv_phi * (right - left);
  double x2 = left + inv_phi * (right - left);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < tol::kGoldenIterations; ++it) {
    if (f1 <= f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - inv_phi * (right - left);
      f1 = eval(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + inv_phi * (right - left);
      f2 = eval(x2);
    }
  }
  SearchResult out{at(x1), f1};
  if (f2 < out.value) out = {at(x2), f2};
  const double s_best = s_lo + (s_hi - s_lo) * (static_cast<double>(best) + 0.5) / n;
  if (grid[best] < out.value) out = {at(s_best), grid[best]};
  return out;
}

double positive_or_inf(double num, double den) {
  if (den <= 0.0) return kInf;
  return num / den;
}

}  // namespace

DwellTimeCertificate closed_form_certificate(const LyapunovData& d, double eps) {
  if (!(eps > 0.0 && eps <= d.eps2)) {
    throw Error(ErrorCode::EpsilonAboveThreshold,
                "epsilon " + std::to_string(eps) + " exceeds eps2 = " + std::to_string(d.eps2));
  }
  const auto& g = d.gamma;
  const auto& [d1, d2, d3, d4] = d.delta;
  const WitnessBounds bounds{d, eps};

  DwellTimeCertificate c;
  c.epsilon = eps;
  c.reduced_order_tau = reduced_order_certificate(d);

  const bool band_one = std::abs(g.g11 - 1.0) <= tol::kGamma11Band;
  if (g.g11 > 1.0 || band_one) {
    // Witness (1, a eps): a ranges over a > d2 / (1 - eps d4) and
    // 1 - eps d1 - a eps^2 d3 > 0.
    if (!(1.0 - eps * d4 > 0.0) || !(1.0 - eps * d1 > 0.0)) {
      throw Error(ErrorCode::NoFeasibleA, "no admissible a: epsilon too large for delta1/delta4");
    }
    const double lo = d2 / (1.0 - eps * d4);
    const double hi = d3 > 0.0 ? (1.0 - eps * d1) / (eps * eps * d3) : kInf;
    const auto objective = [&](double a) { return bounds.required(a * eps); };
    SearchResult best = minimize_quasiconvex(objective, lo, hi);
    if (!std::isfinite(best.value)) throw Error(ErrorCode::NoFeasibleA, "no a gives a finite dwell time");
    best = settle_witness(d, eps, true, best, hi, objective);
    const double a = best.a;
    c.a_param = a;
    c.witness_scaled_by_eps = true;
    c.tau_closed_form = std::max(best.value, 0.0);

    const double eps3 = d3 > 0.0 ? (-d1 + std::sqrt(d1 * d1 + 4.0 * a * d3)) / (2.0 * a * d3)
                                 : (d1 > 0.0 ? 1.0 / d1 : kInf);
    const double eps5 = positive_or_inf(a - d2, a * d4);
    c.thresholds = {{"eps3", eps3}, {"eps5", eps5}};
    c.epsilon_star = std::min({d.eps2, eps3, eps5});

    const double tau_slow = bounds.slow(a * eps);
    const double fast_log = std::log(safe_ratio(g.g12 + a * eps * g.g22, a - d2 - a * eps * d4));
    if (!band_one) {
      c.gamma11_case = Gamma11Case::GT1;
      c.constant_part = std::log(g.g11) / d.lambda_s;
      c.eta = tau_slow - c.constant_part;
    } else if (g.g12 > tol::kGamma12Zero) {
      c.gamma11_case = Gamma11Case::EQ1_G12NZ;
      c.constant_part = -(eps / d.lambda_f) * std::log(eps);
      c.eta = (eps / d.lambda_f) * fast_log;
    } else {
      c.gamma11_case = Gamma11Case::EQ1_G12Z;
      const double eta1 = tau_slow - std::log(g.g11) / d.lambda_s;
      const double fast = neg_log_bound(eps / d.lambda_f, a - d2 - a * eps * d4, a * g.g22);
      c.eta = std::max(eta1, fast);
    }
  } else {
    // Witness (1, a): a > eps d2 / (1 - eps d4) keeps the fast row defined,
    // a < (1 - g11 - eps d1) / (g21 + eps d3) makes the slow row hold for any tau.
    if (!(1.0 - eps * d4 > 0.0)) throw Error(ErrorCode::NoFeasibleA, "epsilon too large for delta4");
    const double lo = eps * d2 / (1.0 - eps * d4);
    const double hi_num = 1.0 - g.g11 - eps * d1;
    const double hi_den = g.g21 + eps * d3;
    const double hi = hi_den > 0.0 ? hi_num / hi_den : (hi_num > 0.0 ? kInf : -kInf);
    if (!(hi > lo)) {
      throw Error(ErrorCode::EpsilonAboveThreshold, "epsilon " + std::to_string(eps) +
                                                        " leaves no admissible a for the gamma11 < 1 bound");
    }
    const auto objective = [&](double a) { return bounds.required(a); };
    SearchResult best = minimize_quasiconvex(objective, lo, hi);
    if (!std::isfinite(best.value)) throw Error(ErrorCode::NoFeasibleA, "no a gives a finite dwell time");
    best = settle_witness(d, eps, false, best, hi, objective);
    const double a = best.a;
    c.a_param = a;
    c.witness_scaled_by_eps = false;
    c.eta = bounds.fast(a);
    c.tau_closed_form = std::max(best.value, 0.0);

    const double eps6 = positive_or_inf(1.0 - g.g11 - a * g.g21, a * d3 + d1);
    const double eps7 = positive_or_inf(a, d2 + a * d4);
    const double eps7_printed = positive_or_inf(a, a * d3 + d1);
    const double eps8 = positive_or_inf(a - g.g12 - a * g.g22, d2 + a * d4);
    c.thresholds = {{"eps6", eps6}, {"eps7", eps7}, {"eps7_printed", eps7_printed}, {"eps8", eps8}};

    const bool thm5_shape = g.g22 < 1.0 && g.g12 * g.g21 < (1.0 - g.g11) * (1.0 - g.g22);
    if (thm5_shape && best.value < 0.0) {
      c.gamma11_case = Gamma11Case::LT1_NODWELL;
      c.tau_closed_form = 0.0;
      c.epsilon_star = std::min({d.eps2, eps6, eps8});
    } else {
      c.gamma11_case = Gamma11Case::LT1;
      c.epsilon_star = std::min({d.eps2, eps6, eps7});
    }
  }

  const double probe = *c.tau_closed_form + tol::kCertificateProbe;
  const Mat gm = gamma_m(d, eps, probe);
  c.witness_verified = witness_holds(gm, c.witness()) && linalg::is_schur_positive(gm).schur;
  return c;
}

double reduced_order_certificate(const LyapunovData& d) {
  return d.gamma.g11 > 1.0 ? std::log(d.gamma.g11) / d.lambda_s : 0.0;
}

DwellTimeCertificate certify(const LyapunovData& d, double eps) {
  DwellTimeCertificate c;
  try {
    c = closed_form_certificate(d, eps);
  } catch (const Error& e) {
    c = DwellTimeCertificate{};
    c.epsilon = eps;
    c.reduced_order_tau = reduced_order_certificate(d);
    const auto& g = d.gamma;
    if (std::abs(g.g11 - 1.0) <= tol::kGamma11Band) {
      c.gamma11_case = g.g12 > tol::kGamma12Zero ? Gamma11Case::EQ1_G12NZ : Gamma11Case::EQ1_G12Z;
    } else {
      c.gamma11_case = g.g11 > 1.0 ? Gamma11Case::GT1 : Gamma11Case::LT1;
    }
    c.epsilon_star = d.eps2;
    c.closed_form_error = e.what();
  }
  try {
    c.tau_bisection = min_dwell_bisection(d, eps);
  } catch (const Error& e) {
    c.bisection_error = e.what();
  }
  return c;
}

}  // namespace sph::certify
