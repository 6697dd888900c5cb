#pragma once

#include "sph/model.hpp"

#include <map>
#include <vector>

namespace sph::decouple {

using linalg::Mat;
using model::Transition;

struct A22Report {
  std::size_t mode = 0;
  bool invertible = false;
  double condition = 0.0;     // 2-norm condition number estimate
  double relative_det = 0.0;  // |det| / ||A22||^n
};

/// Per-mode invertibility of the fast block. Never throws.
std::vector<A22Report> a22_reports(const model::ReorderedSystem& sys);

/// Throws SingularA22 naming the first failing mode.
std::vector<A22Report> check_A22(const model::ReorderedSystem& sys);

/// Flow blocks of one mode in (x, y) coordinates:
///   dx/dt   = A0 x + B1 y
///   eps dy/dt = A22 y + eps (B2 x + B3 y)
struct ModeBlocks {
  Mat a0, b1, b2, b3, a22;
  Mat lift;  // A22^{-1} A21, the lower block of P
};

struct JumpBlocks {
  Mat r11, r12, r21, r22;
};

struct DecoupledSystem {
  model::ReorderedSystem reordered;
  std::vector<ModeBlocks> modes;
  std::vector<Mat> p;      // P_i  = [I 0; lift I]
  std::vector<Mat> p_inv;  // P_i^{-1} = [I 0; -lift I]
  std::map<Transition, JumpBlocks> jumps;

  std::size_t n_x() const noexcept { return reordered.n_x; }
  std::size_t n_z() const noexcept { return reordered.n_z; }
  double epsilon() const noexcept { return reordered.epsilon; }

  /// Assembled R^{i -(j)-> i'}.
  Mat jump_matrix(const Transition& t) const;
  /// Generator of the (x, y) flow, i.e. [A0 B1; B2 A22/eps + B3].
  Mat generator(std::size_t mode) const;
};

/// Throws SingularA22.
DecoupledSystem build_decoupled(const model::ReorderedSystem& sys);

/// R = P_{i'} J P_i^{-1} by direct multiplication; used to cross-check the
/// block formulas.
Mat jump_by_product(const DecoupledSystem& sys, const Transition& t);

struct ReducedOrderModel {
  std::vector<Mat> flows;            // A0^i
  std::map<Transition, Mat> jumps;   // R11
};

ReducedOrderModel reduced_order_model(const DecoupledSystem& sys);

}  // namespace sph::decouple
