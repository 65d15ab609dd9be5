// Copyright 2026 The pdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pdrive/persuasion.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace pdrive::persuasion {

void OmegaBelief::validate() const {
  if (!(omega_hat >= 0.0) || !std::isfinite(omega_hat))
    throw Error(ErrorCode::kInvalidArgument, "omega_hat must be finite and nonnegative");
  if (!(sigma_omega > 0.0 && sigma_omega <= 0.2))
    throw Error(ErrorCode::kInvalidArgument, "sigma_omega must lie in (0, 0.2]");
}

namespace {

// Separation of the ego from the receiver, rotated into the ellipse frame.
struct EllipseFrame {
  double c = 1.0;
  double s = 0.0;
  Vec2 local;  // d expressed along the ellipse axes
  Vec2 scaled; // local / (a_s, b_s)
};

EllipseFrame ellipse_frame(const VehicleState& x_sp, const VehicleState& x_e,
                           const EllipseFootprint& fp) {
  EllipseFrame f;
  if (fp.heading_aligned) {
    f.c = std::cos(x_sp.theta);
    f.s = std::sin(x_sp.theta);
  }
  const double dx = x_e.x - x_sp.x;
  const double dy = x_e.y - x_sp.y;
  f.local = {f.c * dx + f.s * dy, -f.s * dx + f.c * dy};
  f.scaled = {f.local[0] / fp.a_s, f.local[1] / fp.b_s};
  return f;
}

}  // namespace

double omega(const VehicleState& x_sp, const VehicleState& x_e, const EllipseFootprint& fp) {
  return ellipse_frame(x_sp, x_e, fp).scaled.norm();
}

OmegaDerivatives omega_derivatives(const VehicleState& x_sp, const VehicleState& x_e,
                                   const EllipseFootprint& fp) {
  const EllipseFrame f = ellipse_frame(x_sp, x_e, fp);
  OmegaDerivatives out;
  out.value = f.scaled.norm();
  if (out.value < 1e-12) return out;
  // omega = |D R^T d|, D = diag(1/a, 1/b), R = rotation by the ellipse angle.
  Mat2 rot;
  rot << f.c, -f.s, f.s, f.c;
  const Mat2 diag = Vec2(1.0 / fp.a_s, 1.0 / fp.b_s).asDiagonal();
  const Mat2 m = diag * rot.transpose();  // d -> scaled
  const Vec2 unit = f.scaled / out.value;
  out.grad_ego = m.transpose() * unit;
  out.hess_ego = m.transpose() * (Mat2::Identity() - unit * unit.transpose()) * m / out.value;
  out.grad_receiver.head<2>() = -out.grad_ego;
  if (fp.heading_aligned) {
    // d(local)/d(theta) = (local_y, -local_x)
    const Vec2 dlocal(f.local[1], -f.local[0]);
    out.grad_receiver[2] = unit.dot(diag * dlocal);
  }
  return out;
}

double tracking_deviation(const VehicleState& x_s, const VehicleState& x_sp,
                          const CostWeights& cw) {
  return cw.w1 * (x_s.vec() - x_sp.vec()).squaredNorm();
}

double cost_exponent(double om, const VehicleState& x_s, const VehicleState& x_sp,
                     const VehicleState& x_e, const VehicleState& x_g, const ControlInput& du,
                     const CostWeights& cw) {
  const Vec4 goal_err = x_e.vec() - x_g.vec();
  const Vec2 dv = du.vec();
  return (1.0 + om) * tracking_deviation(x_s, x_sp, cw) + goal_err.dot(cw.W2 * goal_err) +
         dv.dot(cw.W3 * dv) - cw.w4 * (x_s.vec() - x_e.vec()).squaredNorm();
}

namespace {

double checked_exp(double exponent, double cap) {
  if (!(exponent <= cap))
    throw Error(ErrorCode::kOverflow,
                "cost exponent " + std::to_string(exponent) + " exceeds cap; check weight scaling");
  return std::exp(exponent);
}

}  // namespace

double cost_c(double om, const VehicleState& x_s, const VehicleState& x_sp,
              const VehicleState& x_e, const VehicleState& x_g, const ControlInput& du,
              const CostWeights& cw, double exponent_cap) {
  return checked_exp(cost_exponent(om, x_s, x_sp, x_e, x_g, du, cw), exponent_cap);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double epsilon(const OmegaBelief& ob, double q) {
  return std_normal_cdf((ob.omega_hat + ob.sigma_omega * q) / std::sqrt(ob.sigma_omega));
}

double log_omega_integral(const OmegaBelief& ob, const VehicleState& x_s,
                          const VehicleState& x_sp, const VehicleState& x_e,
                          const VehicleState& x_g, const ControlInput& du,
                          const CostWeights& cw) {
  const double q = tracking_deviation(x_s, x_sp, cw);
  return std::log(epsilon(ob, q)) + 0.5 * ob.sigma_omega * q * q +
         cost_exponent(ob.omega_hat, x_s, x_sp, x_e, x_g, du, cw);
}

double omega_integral(const OmegaBelief& ob, const VehicleState& x_s,
                      const VehicleState& x_sp, const VehicleState& x_e,
                      const VehicleState& x_g, const ControlInput& du, const CostWeights& cw,
                      double exponent_cap) {
  return checked_exp(log_omega_integral(ob, x_s, x_sp, x_e, x_g, du, cw), exponent_cap);
}

VehicleState receiver_best_response(const OmegaBelief& ob, double gamma,
                                    const VehicleState& x_sp, const VehicleState& x_e,
                                    const CostWeights& cw) {
  const double scale = (1.0 + ob.sigma_omega * gamma + ob.omega_hat) * cw.w1;
  const double margin = scale - cw.w4;
  if (!(margin >= 1e-10))
    throw Error(ErrorCode::kSingularSystem, "receiver best-response system is not positive definite");
  return VehicleState::from((scale * x_sp.vec() - cw.w4 * x_e.vec()) / margin);
}

double gamma_update(const VehicleState& x_s_prev, const VehicleState& x_sp_prev,
                    const CostWeights& cw) {
  return tracking_deviation(x_s_prev, x_sp_prev, cw);
}

OmegaLinearization linearize_omega(const VehicleState& x_sp, const VehicleState& around,
                                   const EllipseFootprint& fp) {
  const OmegaDerivatives d = omega_derivatives(x_sp, around, fp);
  if (d.value < 1e-9)
    throw Error(ErrorCode::kDegenerateOmegaGradient,
                "omega linearization undefined at zero separation");
  OmegaLinearization lin;
  lin.point = around.vec();
  lin.value = d.value;
  lin.gradient.head<2>() = d.grad_ego;
  return lin;
}

LaplaceReduction::LaplaceReduction(const Mat4& sigma_xe, const CostWeights& cw)
    : w2_(cw.W2), k1_(cw.k1) {
  Eigen::LLT<Mat4> sigma_llt(sigma_xe);
  if (sigma_llt.info() != Eigen::Success)
    throw Error(ErrorCode::kNonPositiveDefinite, "sigma_xe must be positive definite");
  sigma_inv_ = sigma_llt.solve(Mat4::Identity());
  sigma_inv_ = 0.5 * (sigma_inv_ + sigma_inv_.transpose());
  const Mat4 system = sigma_inv_ - 2.0 * w2_;
  Eigen::LLT<Mat4> llt(system);
  if (llt.info() != Eigen::Success || min_eigenvalue(system) <= 0.0)
    throw Error(ErrorCode::kNonConvergentIntegral,
                "Laplace reduction needs sigma_xe^-1 / 2 - W2 positive definite");
  system_inv_ = llt.solve(Mat4::Identity());
}

Vec4 LaplaceReduction::argmin(const Vec4& x_hat, const Vec4& x_g,
                              const OmegaLinearization* lin) const {
  // grad C = -S^-1 (x - x_hat) + 2 W2 (x - x_g) + k1 g = 0
  Vec4 rhs = 2.0 * w2_ * (x_hat - x_g);
  if (lin != nullptr) rhs += k1_ * lin->gradient;
  return x_hat + system_inv_ * rhs;
}

double LaplaceReduction::exponent(const Vec4& x, const Vec4& x_hat, const Vec4& x_g,
                                  const OmegaLinearization* lin) const {
  const Vec4 d = x - x_hat;
  const Vec4 e = x - x_g;
  double c = -0.5 * d.dot(sigma_inv_ * d) + e.dot(w2_ * e);
  if (lin != nullptr) c += k1_ * lin->at(x);
  return c;
}

double LaplaceReduction::state_cost(const Vec4& x_hat, const Vec4& x_g,
                                    const OmegaLinearization* lin) const {
  return exponent(argmin(x_hat, x_g, lin), x_hat, x_g, lin);
}

LaplaceReduction::Gradient LaplaceReduction::planner_cost(const Vec4& x_hat, const Vec4& x_g,
                                                          const Persuadee* persuadee) const {
  Gradient out;
  if (persuadee == nullptr || k1_ == 0.0) {
    const Vec4 star = argmin(x_hat, x_g, nullptr);
    out.value = exponent(star, x_hat, x_g, nullptr);
    // Envelope theorem: dC/dx_star vanishes at the stationary point.
    out.grad = 2.0 * w2_ * (star - x_g);
    return out;
  }
  const VehicleState at = VehicleState::from(x_hat);
  const OmegaDerivatives od = omega_derivatives(persuadee->predicted, at, persuadee->footprint);
  if (od.value < 1e-9)
    throw Error(ErrorCode::kDegenerateOmegaGradient,
                "omega linearization undefined at zero separation");
  OmegaLinearization lin;
  lin.point = x_hat;
  lin.value = od.value;
  lin.gradient.head<2>() = od.grad_ego;
  const Vec4 star = argmin(x_hat, x_g, &lin);
  const Vec4 d = star - x_hat;
  out.value = exponent(star, x_hat, x_g, &lin);
  out.grad = 2.0 * w2_ * (star - x_g) + k1_ * lin.gradient;
  out.grad.head<2>() += k1_ * od.hess_ego * d.head<2>();
  return out;
}

VehicleState laplace_argmin(const VehicleState& x_hat, const VehicleState& x_g,
                            const Persuadee& sp, const Mat4& sigma_xe, const CostWeights& cw,
                            std::optional<OmegaLinearization> lin) {
  const LaplaceReduction lr(sigma_xe, cw);
  if (!lin && cw.k1 != 0.0) lin = linearize_omega(sp.predicted, x_hat, sp.footprint);
  return VehicleState::from(lr.argmin(x_hat.vec(), x_g.vec(), lin ? &*lin : nullptr));
}

double stage_cost_j(const VehicleState& x_hat, const ControlInput& u, const VehicleState& x_g,
                    const Persuadee& sp, const Mat4& sigma_xe, const CostWeights& cw,
                    std::optional<OmegaLinearization> lin) {
  const LaplaceReduction lr(sigma_xe, cw);
  if (!lin && cw.k1 != 0.0) lin = linearize_omega(sp.predicted, x_hat, sp.footprint);
  const Vec2 uv = u.vec();
  return lr.state_cost(x_hat.vec(), x_g.vec(), lin ? &*lin : nullptr) + uv.dot(cw.W3 * uv);
}

KFit structural_fit_k(std::span<const OmegaBelief> samples, const FitScene& scene,
                      const CostWeights& cw, double gamma) {
  std::set<double> distinct;
  for (const auto& s : samples) {
    s.validate();
    distinct.insert(s.omega_hat);
  }
  if (distinct.size() < 8)
    throw Error(ErrorCode::kInvalidArgument, "structural fit needs at least 8 distinct omega_hat samples");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd basis(n, 4);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const OmegaBelief& ob = samples[static_cast<std::size_t>(i)];
    const VehicleState x_s = receiver_best_response(ob, gamma, scene.x_sp, scene.x_e, cw);
    // Exponent only: the truncation prefactor epsilon is taken as 1.
    const double q = tracking_deviation(x_s, scene.x_sp, cw);
    target[i] = log_omega_integral(ob, x_s, scene.x_sp, scene.x_e, scene.x_g, scene.du, cw) -
                std::log(epsilon(ob, q));
    const double big_d =
        cw.w1 * ob.omega_hat + ((1.0 + ob.sigma_omega * gamma) * cw.w1 - cw.w4);
    basis(i, 0) = ob.omega_hat;
    basis(i, 1) = 1.0;
    basis(i, 2) = 1.0 / big_d;
    basis(i, 3) = 1.0 / (big_d * big_d);
  }
  const Eigen::Vector4d k = basis.colPivHouseholderQr().solve(target);
  const double resid = (basis * k - target).norm();
  const double spread = (target.array() - target.mean()).matrix().norm();
  KFit fit{k[0], k[1], k[2], k[3], 0.0};
  const double scale = std::max(spread, 1e-9 * (1.0 + target.norm()));
  fit.relative_residual = resid / scale;
  if (fit.relative_residual > 0.05)
    throw Error(ErrorCode::kPoorFit, "structural fit residual " +
                                         std::to_string(fit.relative_residual) + " above 5%");
  return fit;
}

}  // namespace pdrive::persuasion
