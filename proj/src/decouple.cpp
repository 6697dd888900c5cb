#include "sph/decouple.hpp"

#include "sph/error.hpp"
#include "sph/tolerances.hpp"

#include <cmath>
#include <limits>

namespace sph::decouple {

std::vector<A22Report> a22_reports(const model::ReorderedSystem& sys) {
  std::vector<A22Report> out;
  for (std::size_t i = 0; i < sys.mode_count(); ++i) {
    const Mat a22 = sys.blocks(i).a22;
    A22Report r;
    r.mode = i;
    Eigen::JacobiSVD<Mat> svd(a22);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    if (smax > 0.0) {
      double rel = 1.0;
      for (Eigen::Index k = 0; k < sv.size(); ++k) rel *= sv(k) / smax;
      r.relative_det = rel;
    }
    r.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    r.invertible = smax > 0.0 && r.relative_det >= tol::kSingularA22;
    out.push_back(r);
  }
  return out;
}

std::vector<A22Report> check_A22(const model::ReorderedSystem& sys) {
  auto reports = a22_reports(sys);
  for (const auto& r : reports) {
    if (!r.invertible) {
      throw Error(ErrorCode::SingularA22,
                  "fast block A22 of mode " + std::to_string(r.mode) +
                      " is singular (relative det " + std::to_string(r.relative_det) + ")");
    }
  }
  return reports;
}

Mat DecoupledSystem::jump_matrix(const Transition& t) const {
  const JumpBlocks& r = jumps.at(t);
  const auto nx = static_cast<Eigen::Index>(n_x());
  const auto nz = static_cast<Eigen::Index>(n_z());
  Mat out(nx + nz, nx + nz);
  out << r.r11, r.r12, r.r21, r.r22;
  return out;
}

Mat DecoupledSystem::generator(std::size_t mode) const {
  const ModeBlocks& m = modes.at(mode);
  const auto nx = static_cast<Eigen::Index>(n_x());
  const auto nz = static_cast<Eigen::Index>(n_z());
  Mat g(nx + nz, nx + nz);
  g << m.a0, m.b1, m.b2, m.a22 / epsilon() + m.b3;
  return g;
}

DecoupledSystem build_decoupled(const model::ReorderedSystem& sys) {
  check_A22(sys);
  DecoupledSystem out;
  out.reordered = sys;
  const auto nx = static_cast<Eigen::Index>(sys.n_x);
  const auto nz = static_cast<Eigen::Index>(sys.n_z);

  for (std::size_t i = 0; i < sys.mode_count(); ++i) {
    const model::Blocks b = sys.blocks(i);
    const auto lu = b.a22.partialPivLu();
    ModeBlocks m;
    m.lift = lu.solve(b.a21);
    m.a0 = b.a11 - b.a12 * m.lift;
    m.b1 = b.a12;
    m.b2 = m.lift * m.a0;
    m.b3 = m.lift * b.a12;
    m.a22 = b.a22;

    Mat p = Mat::Identity(nx + nz, nx + nz);
    p.bottomLeftCorner(nz, nx) = m.lift;
    Mat p_inv = Mat::Identity(nx + nz, nx + nz);
    p_inv.bottomLeftCorner(nz, nx) = -m.lift;
    out.p.push_back(std::move(p));
    out.p_inv.push_back(std::move(p_inv));
    out.modes.push_back(std::move(m));
  }

  for (const auto& [t, j] : sys.jumps) {
    const model::Blocks jb = model::partition(j, sys.n_x);
    const Mat& lift_from = out.modes[t.from].lift;
    const Mat& lift_to = out.modes[t.to].lift;
    JumpBlocks r;
    r.r11 = jb.a11 - jb.a12 * lift_from;
    r.r12 = jb.a12;
    r.r21 = lift_to * r.r11 + jb.a21 - jb.a22 * lift_from;
    r.r22 = lift_to * jb.a12 + jb.a22;
    out.jumps.emplace(t, std::move(r));
  }
  return out;
}

Mat jump_by_product(const DecoupledSystem& sys, const Transition& t) {
  return sys.p.at(t.to) * sys.reordered.jumps.at(t) * sys.p_inv.at(t.from);
}

ReducedOrderModel reduced_order_model(const DecoupledSystem& sys) {
  ReducedOrderModel out;
  for (const ModeBlocks& m : sys.modes) out.flows.push_back(m.a0);
  for (const auto& [t, r] : sys.jumps) out.jumps.emplace(t, r.r11);
  return out;
}

}  // namespace sph::decouple
