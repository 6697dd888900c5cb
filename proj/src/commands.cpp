#include "sph/commands.hpp"

#include "sph/error.hpp"
#include "sph/tolerances.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

namespace sph::cli {

using linalg::Mat;
using linalg::Vec;
using nlohmann::json;
namespace fs = std::filesystem;

model::HybridSystemSpec effective_spec(const config::RunConfig& cfg) {
  if (!cfg.system.augment) return cfg.system;
  const auto findings = model::validate(cfg.system);
  if (!findings.empty()) throw Error(ErrorCode::InvalidSpec, findings.front().message);
  const double lambda = cfg.augment_lambda.value_or(model::default_augment_lambda(cfg.system.epsilon));
  return model::augment(cfg.system, lambda);
}

Analysis analyze(const config::RunConfig& cfg) {
  Analysis a;
  a.spec = effective_spec(cfg);
  a.reordered = model::reorder(a.spec);
  a.decoupled = decouple::build_decoupled(a.reordered);
  certify::LyapunovOptions opt = cfg.lyapunov;
  a.lyap = certify::build_lyapunov_data(a.decoupled, opt);
  return a;
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.6g}", v);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "-"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void print_constants(const certify::LyapunovData& d, std::ostream& out) {
  fmt::print(out, "lambda_s   {}\nlambda_f   {}\n", num(d.lambda_s), num(d.lambda_f));
  if (d.scalar_q) fmt::print(out, "q          {}\n", num(*d.scalar_q));
  fmt::print(out, "b1 b2 b3   {} {} {}{}\n", num(d.b.b1), num(d.b.b2), num(d.b.b3), d.strict_b3 ? " (strict)" : "");
  fmt::print(out, "eps1 eps2  {} {}\n", num(d.eps1), num(d.eps2));
  fmt::print(out, "beta1..3   {} {} {}\n", num(d.beta.beta1), num(d.beta.beta2), num(d.beta.beta3));
  fmt::print(out, "gamma      {} {} / {} {}\n", num(d.gamma.g11), num(d.gamma.g12), num(d.gamma.g21),
             num(d.gamma.g22));
  fmt::print(out, "delta1..4  {} {} {} {}\n", num(d.delta[0]), num(d.delta[1]), num(d.delta[2]), num(d.delta[3]));
}

void print_certificate(const certify::DwellTimeCertificate& c, std::ostream& out) {
  fmt::print(out, "{:<10} {:<12} {:<11} {:<11} {:<12} {:<12} {:<10} {}\n", num(c.epsilon),
             certify::to_string(c.gamma11_case), num(c.epsilon_star), num(c.a_param), opt_num(c.tau_closed_form),
             opt_num(c.tau_bisection), num(c.reduced_order_tau), c.witness_verified ? "yes" : "no");
  if (!c.closed_form_error.empty()) fmt::print(out, "  closed form: {}\n", c.closed_form_error);
  if (!c.bisection_error.empty()) fmt::print(out, "  bisection: {}\n", c.bisection_error);
}

void print_certificate_header(std::ostream& out) {
  fmt::print(out, "{:<10} {:<12} {:<11} {:<11} {:<12} {:<12} {:<10} {}\n", "eps", "case", "eps*", "a",
             "tau_closed", "tau_bisect", "tau_red", "witness");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Parse, "cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Parse, "cannot write " + path.string());
  f << text;
}

bool schur_at(const certify::LyapunovData& d, double eps, std::optional<double> tau) {
  if (!tau) return false;
  return linalg::is_schur_positive(certify::gamma_m(d, eps, *tau + tol::kCertificateProbe)).schur;
}

std::vector<double> eps_list(const config::RunConfig& cfg, const std::vector<double>& override) {
  if (!override.empty()) return override;
  if (!cfg.eps.empty()) return cfg.eps;
  return {cfg.system.epsilon};
}

double default_horizon(const config::RunConfig& cfg, const std::optional<Analysis>& a) {
  if (cfg.simulate.horizon) return *cfg.simulate.horizon;
  return a ? 50.0 / a->lyap.lambda_s : 10.0;
}

}  // namespace

int cmd_validate(const config::RunConfig& cfg, std::ostream& out) {
  int issues = 0;
  const auto report = [&](const std::string& kind, const std::string& msg) {
    fmt::print(out, "finding {}: {}\n", kind, msg);
    ++issues;
  };
  for (const auto& f : model::validate(cfg.system)) report(model::to_string(f.kind), f.message);
  if (issues) return 1;

  const auto spec = effective_spec(cfg);
  const auto reordered = model::reorder(spec);
  for (const auto& r : decouple::a22_reports(reordered)) {
    fmt::print(out, "mode {} A22 condition {} relative det {}\n", r.mode, num(r.condition), num(r.relative_det));
    if (!r.invertible) {
      report("SingularA22", fmt::format("mode {}: the fast block A22 must be non-singular for all modes", r.mode));
    }
  }
  if (issues) return 1;

  const auto decoupled = decouple::build_decoupled(reordered);
  for (std::size_t i = 0; i < decoupled.modes.size(); ++i) {
    const auto& m = decoupled.modes[i];
    if (!linalg::is_hurwitz(m.a0)) {
      report("NotHurwitz", fmt::format("mode {}: reduced block A0 has abscissa {}", i,
                                       num(linalg::spectral_abscissa(m.a0))));
    }
    if (!linalg::is_hurwitz(m.a22)) {
      report("NotHurwitz", fmt::format("mode {}: fast block A22 has abscissa {}", i,
                                       num(linalg::spectral_abscissa(m.a22))));
    }
  }
  if (issues) return 1;
  fmt::print(out, "ok: {} modes, n_x = {}, n_z = {}, {} transitions\n", spec.modes.size(), reordered.n_x,
             reordered.n_z, reordered.jumps.size());
  return 0;
}

std::string certificate_record(const certify::LyapunovData& d, const certify::DwellTimeCertificate& c) {
  json thresholds = json::object();
  for (const auto& [k, v] : c.thresholds) thresholds[k] = finite_or_null(v);
  const Vec p = c.witness();
  json rec{{"epsilon", c.epsilon},
           {"case", certify::to_string(c.gamma11_case)},
           {"epsilon_star", finite_or_null(c.epsilon_star)},
           {"eps1", finite_or_null(d.eps1)},
           {"eps2", d.eps2},
           {"lambda_s", d.lambda_s},
           {"lambda_f", d.lambda_f},
           {"b", {d.b.b1, d.b.b2, d.b.b3}},
           {"beta", {d.beta.beta1, d.beta.beta2, d.beta.beta3}},
           {"gamma", {{d.gamma.g11, d.gamma.g12}, {d.gamma.g21, d.gamma.g22}}},
           {"delta", d.delta},
           {"a", c.a_param},
           {"witness", {p(0), p(1)}},
           {"constant_part", c.constant_part},
           {"eta", finite_or_null(c.eta)},
           {"thresholds", thresholds},
           {"tau_closed_form", opt_json(c.tau_closed_form)},
           {"tau_bisection", opt_json(c.tau_bisection)},
           {"reduced_order_tau", c.reduced_order_tau},
           {"probe", tol::kCertificateProbe},
           {"schur_at_closed_form", schur_at(d, c.epsilon, c.tau_closed_form)},
           {"schur_at_bisection", schur_at(d, c.epsilon, c.tau_bisection)},
           {"witness_verified", c.witness_verified}};
  if (d.scalar_q) rec["q"] = *d.scalar_q;
  return rec.dump();
}

bool reverify_certificate(const std::string& record) {
  const json r = json::parse(record);
  const double eps = r.at("epsilon").get<double>();
  const double ls = r.at("lambda_s").get<double>();
  const double lf = r.at("lambda_f").get<double>();
  const auto beta = r.at("beta").get<std::vector<double>>();
  const auto g = r.at("gamma").get<std::vector<std::vector<double>>>();
  const double probe = r.at("probe").get<double>();
  Mat gamma(2, 2);
  gamma << g[0][0], g[0][1], g[1][0], g[1][1];
  const auto verdict = [&](const json& tau) {
    if (tau.is_null()) return false;
    const double t = tau.get<double>() + probe;
    Mat m(2, 2);
    m << std::exp(-ls * t) + eps * beta[2], eps * (beta[1] + beta[2]), eps * beta[0],
        std::exp(-lf * t / eps) + eps * beta[0];
    return linalg::is_schur_positive(gamma * m).schur;
  };
  return verdict(r.at("tau_closed_form")) == r.at("schur_at_closed_form").get<bool>() &&
         verdict(r.at("tau_bisection")) == r.at("schur_at_bisection").get<bool>();
}

int cmd_certify(const config::RunConfig& cfg, const CertifyArgs& args, std::ostream& out) {
  config::RunConfig run = cfg;
  run.lyapunov.strict_b3 = cfg.lyapunov.strict_b3 || args.strict_b3;
  Analysis a;
  try {
    a = analyze(run);
  } catch (const Error& e) {
    fmt::print(out, "error: {}\n", e.what());
    return 1;
  }
  print_constants(a.lyap, out);
  print_certificate_header(out);
  bool all_certified = true;
  json records = json::array();
  for (double eps : eps_list(run, args.eps)) {
    const auto c = certify::certify(a.lyap, eps);
    print_certificate(c, out);
    all_certified = all_certified && c.tau_bisection.has_value();
    records.push_back(json::parse(certificate_record(a.lyap, c)));
  }
  const fs::path dir = config::output_dir(run);
  ensure_dir(dir);
  write_text(dir / "certificates.json", records.dump(2) + "\n");
  fmt::print(out, "records: {}\n", (dir / "certificates.json").string());
  return all_certified ? 0 : 1;
}

void write_trajectory_csv(const simulate::Trajectory& traj, const fs::path& path) {
  Eigen::Index width = 0;
  for (const auto& s : traj.samples) width = std::max(width, s.state.size());
  std::string text = "t,mode,is_post_jump";
  for (Eigen::Index i = 0; i < width; ++i) text += fmt::format(",u{}", i + 1);
  text += ",W_s,W_f\n";
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    text += fmt::format("{:.17g},{},{}", s.t, s.mode, s.is_post_jump ? 1 : 0);
    for (Eigen::Index i = 0; i < width; ++i) {
      text += i < s.state.size() ? fmt::format(",{:.17g}", s.state(i)) : std::string(",");
    }
    if (k < traj.witness.size()) {
      text += fmt::format(",{:.17g},{:.17g}\n", traj.witness[k].w_s, traj.witness[k].w_f);
    } else {
      text += ",,\n";
    }
  }
  write_text(path, text);
}

void write_plot_script(const fs::path& csv, const fs::path& script, const std::string& title) {
  const std::string name = csv.filename().string();
  const std::string stem = csv.stem().string();
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set terminal pngcairo size 900,700\n";
  s += fmt::format("set output '{}_plane.png'\n", stem);
  s += fmt::format("set title '{} (u1, u2) plane'\nset xlabel 'u1'\nset ylabel 'u2'\n", title);
  s += fmt::format("plot '{}' using 4:5 with lines notitle\n", name);
  s += fmt::format("set output '{}_time.png'\n", stem);
  s += fmt::format("set title '{} states'\nset xlabel 't [s]'\nset ylabel 'state'\n", title);
  s += fmt::format("plot '{0}' using 1:4 with lines title 'u1', '{0}' using 1:5 with lines title 'u2'\n", name);
  s += fmt::format("set output '{}_witness.png'\n", stem);
  s += "set logscale y\nset ylabel 'witness'\n";
  s += fmt::format("plot '{0}' using 1:(column('W_s')) with lines title 'W_s', "
                   "'{0}' using 1:(column('W_f')) with lines title 'W_f'\n",
                   name);
  write_text(script, s);
}

namespace {

struct SimOutcome {
  simulate::Verdict verdict = simulate::Verdict::Undecided;
  double final_ratio = 0.0;
  std::size_t events = 0;
  fs::path csv;
};

SimOutcome run_simulation(const config::RunConfig& cfg, const std::optional<Analysis>& a,
                          const config::ScheduleConfig& sched, const fs::path& dir, const std::string& label) {
  const auto spec = a ? a->spec : effective_spec(cfg);
  const auto flows = simulate::from_spec(spec);
  const double horizon = default_horizon(cfg, a);
  const auto schedule =
      config::make_schedule(sched, model::effective_transitions(spec), spec.modes.size(), horizon);

  const std::size_t first = schedule.events.front().mode;
  const auto dim = static_cast<Eigen::Index>(spec.modes.at(first).dim());
  if (static_cast<Eigen::Index>(cfg.simulate.x0.size()) > dim) {
    throw Error(ErrorCode::DimensionMismatch, "x0 is longer than the state of the initial mode");
  }
  Vec x0 = Vec::Zero(dim);
  for (std::size_t i = 0; i < cfg.simulate.x0.size(); ++i) x0(static_cast<Eigen::Index>(i)) = cfg.simulate.x0[i];

  simulate::SimulateOptions so;
  so.sample_dt = cfg.simulate.sample_dt;
  auto traj = simulate::simulate(flows, schedule, x0, so);
  if (a) simulate::witnesses(traj, a->lyap, a->decoupled);

  simulate::ClassifyOptions co;
  co.delta = cfg.simulate.delta;
  co.divergence_factor = cfg.simulate.divergence_factor;
  SimOutcome r;
  r.verdict = simulate::classify(traj, co);
  const double n0 = x0.norm();
  r.final_ratio = n0 > 0.0 ? traj.samples.back().state.norm() / n0 : 0.0;
  r.events = schedule.events.size() - 1;
  r.csv = dir / (label + ".csv");
  write_trajectory_csv(traj, r.csv);
  write_plot_script(r.csv, dir / (label + ".gp"), label);
  return r;
}

std::optional<Analysis> try_analyze(const config::RunConfig& cfg) {
  try {
    return analyze(cfg);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

int cmd_simulate(const config::RunConfig& cfg, const SimulateArgs& args, std::ostream& out) {
  config::ScheduleConfig sched = cfg.simulate.schedule;
  if (args.schedule_file) {
    std::ifstream in(*args.schedule_file);
    if (!in) throw Error(ErrorCode::Parse, "cannot open " + args.schedule_file->string());
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
      j = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, std::string("malformed schedule file: ") + e.what());
    }
    // Reuse the configuration parser on a minimal document.
    json doc{{"epsilon", 0.5}, {"modes", json::array()}, {"jumps", json::array()}, {"simulate", {{"schedule", j}}}};
    sched = config::parse(doc.dump()).simulate.schedule;
  } else if (args.tau) {
    sched.kind = "periodic";
    sched.tau = *args.tau;
  }
  const auto a = try_analyze(cfg);
  const fs::path dir = config::output_dir(cfg);
  ensure_dir(dir);
  SimOutcome r;
  try {
    r = run_simulation(cfg, a, sched, dir, args.label);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    fmt::print(out, "error: {}\n", e.what());
    return 1;
  }
  fmt::print(out, "events {}\nfinal |X|/|X0| {}\nclassification {}\ntrajectory {}\n", r.events,
             num(r.final_ratio), simulate::to_string(r.verdict), r.csv.string());
  return 0;
}

int cmd_sweep(const config::RunConfig& cfg, const std::vector<double>& eps, std::ostream& out) {
  if (eps.empty()) {
    fmt::print(out, "error: empty epsilon list\n");
    return 2;
  }
  Analysis a;
  try {
    a = analyze(cfg);
  } catch (const Error& e) {
    fmt::print(out, "error: {}\n", e.what());
    return 1;
  }
  std::vector<std::future<certify::DwellTimeCertificate>> jobs;
  for (double e : eps) {
    jobs.push_back(std::async(std::launch::async, [&a, e] { return certify::certify(a.lyap, e); }));
  }
  const double g11 = a.lyap.gamma.g11;
  const double asymptote = g11 > 1.0 ? std::log(g11) / a.lyap.lambda_s : 0.0;
  std::string csv = "eps,case,tau_closed_form,tau_bisection,closed_over_eps,closed_minus_constant,closed_over_eps_log\n";
  fmt::print(out, "{:<10} {:<12} {:<12} {:<12} {:<12} {:<14} {}\n", "eps", "case", "tau_closed", "tau_bisect",
             "tau/eps", "tau-ln(g11)/ls", "tau/(-eps ln eps/lf)");
  bool ok = true;
  for (auto& job : jobs) {
    const auto c = job.get();
    ok = ok && c.tau_bisection.has_value();
    const double tc = c.tau_closed_form.value_or(std::nan(""));
    const double e = c.epsilon;
    const double log_scale = -e * std::log(e) / a.lyap.lambda_f;
    fmt::print(out, "{:<10} {:<12} {:<12} {:<12} {:<12} {:<14} {}\n", num(e), certify::to_string(c.gamma11_case),
               opt_num(c.tau_closed_form), opt_num(c.tau_bisection), num(tc / e), num(tc - asymptote),
               num(tc / log_scale));
    csv += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", e, certify::to_string(c.gamma11_case),
                       tc, c.tau_bisection.value_or(std::nan("")), tc / e, tc - asymptote, tc / log_scale);
  }
  const fs::path dir = config::output_dir(cfg);
  ensure_dir(dir);
  write_text(dir / "sweep.csv", csv);
  return ok ? 0 : 1;
}

namespace {

struct ReferenceRow {
  std::string quantity;
  std::string reference;
  std::string computed;
};

}  // namespace

int cmd_reproduce(int id, const std::optional<fs::path>& out_dir, std::ostream& out) {
  if (id != 1 && id != 2) {
    fmt::print(out, "error: unknown example {} (expected 1 or 2)\n", id);
    return 2;
  }
  config::RunConfig cfg = config::example(id);
  if (out_dir) cfg.output_dir = out_dir->string();
  else cfg.output_dir = config::output_dir(cfg).string();
  const fs::path dir = cfg.output_dir;
  ensure_dir(dir);
  write_text(dir / "config.json", config::emit(cfg) + "\n");

  std::ostringstream log;
  fmt::print(log, "== validate\n");
  const int v = cmd_validate(cfg, log);
  fmt::print(log, "== certify\n");
  const int c = cmd_certify(cfg, {}, log);
  fmt::print(log, "== sweep\n");
  cmd_sweep(cfg, cfg.eps, log);

  const Analysis a = analyze(cfg);
  const double eps = cfg.system.epsilon;
  const auto cert = certify::certify(a.lyap, eps);

  std::vector<double> taus = id == 1 ? std::vector<double>{6.16e-4, 2e-3, 0.2} : std::vector<double>{0.16, 0.406};
  std::vector<ReferenceRow> rows;
  const double g11 = a.lyap.gamma.g11;
  if (id == 1) {
    rows.push_back({"gamma11", fmt::format("sqrt(2/5) = {:.6f}", std::sqrt(0.4)), num(g11)});
    rows.push_back({"lambda_s", "1.25", num(a.lyap.lambda_s)});
    rows.push_back({"lambda_f", "2", num(a.lyap.lambda_f)});
    rows.push_back({"required dwell time at eps = 1e-3", "6.16e-4", fmt::format("bisection {}, closed form {}",
                                                                               opt_num(cert.tau_bisection),
                                                                               opt_num(cert.tau_closed_form))});
  } else {
    rows.push_back({"gamma11", fmt::format("2 sqrt(3/5) = {:.6f}", 2.0 * std::sqrt(0.6)), num(g11)});
    rows.push_back({"lambda_s", "1.1", num(a.lyap.lambda_s)});
    rows.push_back({"lambda_f", "2", num(a.lyap.lambda_f)});
    rows.push_back({"ln(gamma11)/lambda_s", "0.40", num(cert.reduced_order_tau)});
    rows.push_back({"required dwell time at eps = 1e-3", "0.406", fmt::format("bisection {}, closed form {}",
                                                                             opt_num(cert.tau_bisection),
                                                                             opt_num(cert.tau_closed_form))});
  }

  fmt::print(log, "== simulate\n");
  for (double tau : taus) {
    config::ScheduleConfig sched = cfg.simulate.schedule;
    sched.kind = "periodic";
    sched.tau = tau;
    const std::string label = fmt::format("trajectory_tau_{:g}", tau);
    const SimOutcome r = run_simulation(cfg, a, sched, dir, label);
    fmt::print(log, "tau {} events {} final ratio {} {}\n", num(tau), r.events, num(r.final_ratio),
               simulate::to_string(r.verdict));
    std::string expected = "converges";
    if (id == 2 && tau < 0.2) expected = "diverges";
    rows.push_back({fmt::format("trajectory at tau = {:g}", tau), expected, simulate::to_string(r.verdict)});
  }

  std::string summary = fmt::format("# Example {}\n\n| quantity | reference | computed |\n|---|---|---|\n", id);
  for (const auto& r : rows) summary += fmt::format("| {} | {} | {} |\n", r.quantity, r.reference, r.computed);
  summary += "\n```\n" + log.str() + "```\n";
  write_text(dir / "summary.md", summary);
  out << summary;
  return (v == 0 && c == 0) ? 0 : 1;
}

}  // namespace sph::cli
