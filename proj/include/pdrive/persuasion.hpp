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

#pragma once

// Persuasion mathematics: the perceived-conservativeness world state, the
// exponential game cost, the closed-form expectation over the world state,
// the receiver's best response and the Laplace-reduced planner stage cost.
//
// Notation in comments: the receiver (surrounding vehicle) holds the belief
// omega ~ N(omega_hat, sigma_omega) about the ego's conservativeness and the
// belief x_e ~ N(x_hat, sigma_xe) about the ego's state.

#include "pdrive/types.hpp"

#include <optional>
#include <span>

namespace pdrive::persuasion {

struct OmegaBelief {
  double omega_hat = 1.0;
  double sigma_omega = 0.1;

  void validate() const;
};

/// Scaled elliptical distance between the receiver's predicted state and the
/// ego state. Only positions enter. The ellipse is lane-aligned unless
/// fp.heading_aligned, in which case it turns with x_sp.theta.
double omega(const VehicleState& x_sp, const VehicleState& x_e, const EllipseFootprint& fp);

/// omega() with derivatives with respect to the ego position and the
/// receiver state.
struct OmegaDerivatives {
  double value = 0.0;
  Vec2 grad_ego = Vec2::Zero();
  Mat2 hess_ego = Mat2::Zero();
  Vec4 grad_receiver = Vec4::Zero();
};
OmegaDerivatives omega_derivatives(const VehicleState& x_sp, const VehicleState& x_e,
                                   const EllipseFootprint& fp);

/// Exponent of the game cost c. du is the ego input change.
double cost_exponent(double om, const VehicleState& x_s, const VehicleState& x_sp,
                     const VehicleState& x_e, const VehicleState& x_g, const ControlInput& du,
                     const CostWeights& cw);

inline constexpr double kDefaultExponentCap = 700.0;

/// exp(cost_exponent(...)). Throws kOverflow beyond exponent_cap.
double cost_c(double om, const VehicleState& x_s, const VehicleState& x_sp,
              const VehicleState& x_e, const VehicleState& x_g, const ControlInput& du,
              const CostWeights& cw, double exponent_cap = kDefaultExponentCap);

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Truncation factor Psi((omega_hat + sigma_omega q) / sqrt(sigma_omega)).
double epsilon(const OmegaBelief& ob, double q);

/// Receiver tracking deviation q = (x_s - x_sp)^T W1 (x_s - x_sp).
double tracking_deviation(const VehicleState& x_s, const VehicleState& x_sp,
                          const CostWeights& cw);

/// log of omega_integral(); finite even where the integral itself overflows.
double log_omega_integral(const OmegaBelief& ob, const VehicleState& x_s,
                          const VehicleState& x_sp, const VehicleState& x_e,
                          const VehicleState& x_g, const ControlInput& du,
                          const CostWeights& cw);

/// Expectation of c over omega >= 0 under the Gaussian belief:
/// epsilon * exp(sigma_omega q^2 / 2) * c(omega_hat, ...).
double omega_integral(const OmegaBelief& ob, const VehicleState& x_s,
                      const VehicleState& x_sp, const VehicleState& x_e,
                      const VehicleState& x_g, const ControlInput& du, const CostWeights& cw,
                      double exponent_cap = kDefaultExponentCap);

/// Minimizer over x_s of the expected cost with the quadratic deviation term
/// frozen at gamma. Throws kSingularSystem when the system is not safely PD.
VehicleState receiver_best_response(const OmegaBelief& ob, double gamma,
                                    const VehicleState& x_sp, const VehicleState& x_e,
                                    const CostWeights& cw);

/// gamma for the next step from the receiver's previous state and prediction.
double gamma_update(const VehicleState& x_s_prev, const VehicleState& x_sp_prev,
                    const CostWeights& cw);

/// First-order expansion of omega_hat(x) = omega(x_sp, x, fp) around `point`.
struct OmegaLinearization {
  Vec4 point = Vec4::Zero();
  double value = 0.0;
  Vec4 gradient = Vec4::Zero();

  double at(const Vec4& x) const { return value + gradient.dot(x - point); }
};

/// Throws kDegenerateOmegaGradient when the scaled separation is below 1e-9.
OmegaLinearization linearize_omega(const VehicleState& x_sp, const VehicleState& around,
                                   const EllipseFootprint& fp);

/// Receiver whose perceived conservativeness enters the ego's stage cost.
struct Persuadee {
  VehicleState predicted;
  EllipseFootprint footprint;
};

/// Laplace reduction of the expectation over the ego signal for fixed
/// sigma_xe and weights. Construction checks sigma_xe^-1 / 2 - W2 > 0 and
/// throws kNonConvergentIntegral otherwise.
class LaplaceReduction {
 public:
  LaplaceReduction(const Mat4& sigma_xe, const CostWeights& cw);

  /// Stationary point of C(x) = -1/2 (x - x_hat)^T S^-1 (x - x_hat)
  ///   + (x - x_g)^T W2 (x - x_g) + k1 * lin.at(x).
  Vec4 argmin(const Vec4& x_hat, const Vec4& x_g, const OmegaLinearization* lin) const;

  /// C(x) itself.
  double exponent(const Vec4& x, const Vec4& x_hat, const Vec4& x_g,
                  const OmegaLinearization* lin) const;

  /// Reduced stage cost with the input term omitted.
  double state_cost(const Vec4& x_hat, const Vec4& x_g, const OmegaLinearization* lin) const;

  struct Gradient {
    double value = 0.0;
    Vec4 grad = Vec4::Zero();
  };
  /// Planner form: omega_hat is linearized at x_hat itself, and the returned
  /// gradient includes the dependence through the linearization point.
  Gradient planner_cost(const Vec4& x_hat, const Vec4& x_g, const Persuadee* persuadee) const;

  const Mat4& sigma_inv() const { return sigma_inv_; }

 private:
  Mat4 sigma_inv_;
  Mat4 system_inv_;  // (S^-1 - 2 W2)^-1
  Mat4 w2_;
  double k1_;
};

/// x_e* for the stage; linearizes omega_hat at x_hat unless `lin` is given.
VehicleState laplace_argmin(const VehicleState& x_hat, const VehicleState& x_g,
                            const Persuadee& sp, const Mat4& sigma_xe, const CostWeights& cw,
                            std::optional<OmegaLinearization> lin = std::nullopt);

/// J_t = C(x_e*) + u^T W3 u. The planner passes the input change as u.
double stage_cost_j(const VehicleState& x_hat, const ControlInput& u, const VehicleState& x_g,
                    const Persuadee& sp, const Mat4& sigma_xe, const CostWeights& cw,
                    std::optional<OmegaLinearization> lin = std::nullopt);

/// Scene held fixed while the belief mean is swept in structural_fit_k.
struct FitScene {
  VehicleState x_sp;
  VehicleState x_e;
  VehicleState x_g;
  ControlInput du;
};

struct KFit {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double relative_residual = 0.0;
};

/// Least-squares fit of the exponent of omega_integral (log epsilon removed,
/// i.e. epsilon taken as 1) at the receiver best response to
/// k1 w + k2 + k3 / D + k4 / D^2 with D = w1 w + (1 + sigma gamma) w1 - w4,
/// w = omega_hat. Needs >= 8 distinct samples; throws kPoorFit above 5%.
KFit structural_fit_k(std::span<const OmegaBelief> samples, const FitScene& scene,
                      const CostWeights& cw, double gamma);

}  // namespace pdrive::persuasion
