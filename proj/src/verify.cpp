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


#include "pdrive/verify.hpp"

#include "pdrive/adaptation.hpp"
#include "pdrive/persuasion.hpp"
#include "pdrive/quadrature.hpp"
#include "pdrive/sim.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace pdrive::verify {

namespace {

using persuasion::OmegaBelief;

struct Rng {
  std::mt19937_64 gen{20260514};
  double operator()(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(gen); }
  VehicleState state(double span) {
    return {(*this)(-span, span), (*this)(-span, span), (*this)(-0.5, 0.5), (*this)(0.0, 1.5)};
  }
};

CostWeights random_weights(Rng& r) {
  CostWeights cw;
  cw.w1 = r(0.5, 1.5);
  cw.w4 = r(0.05, 0.45) * cw.w1;
  cw.W2 = Vec4(r(0.05, 1.0), r(0.05, 1.0), r(0.05, 1.0), r(0.05, 1.0)).asDiagonal();
  cw.W3 = Vec2(r(0.1, 1.0), r(0.1, 1.0)).asDiagonal();
  cw.k1 = r(0.05, 1.0);
  return cw;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Check epsilon_bound() {
  Check c{"epsilon", "truncation factor bound", false, "", 0.0};
  const double e0 = persuasion::epsilon({1.0, 0.2}, 0.0);
  Rng r;
  double lo = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const OmegaBelief ob{r(1.0, 6.0), r(1e-3, 0.2)};
    lo = std::min(lo, persuasion::epsilon(ob, r(0.0, 5.0)));
  }
  c.pass = std::abs(e0 - 0.9873) <= 5e-5 && lo >= 0.9873 - 5e-5;
  c.detail = "eps(1, 0.2, 0) = " + fmt(e0) + ", sweep min " + fmt(lo);
  return c;
}

Check omega_integral() {
  Check c{"omega_integral", "closed-form omega integral vs quadrature", false, "", 0.0};
  Rng r;
  double worst = 0.0;
  double worst_trunc = 0.0;
  for (int i = 0; i < 100; ++i) {
    const CostWeights cw = random_weights(r);
    const OmegaBelief ob{r(0.2, 4.0), r(0.01, 0.2)};
    const VehicleState xs = r.state(1.0), xsp = r.state(1.0), xe = r.state(1.0), xg = r.state(1.0);
    const ControlInput du{r(-0.5, 0.5), r(-0.3, 0.3)};
    const double closed = persuasion::omega_integral(ob, xs, xsp, xe, xg, du, cw);
    const auto integrand = [&](double w, oracle::TruncationForm* form) {
      const double dens = form ? oracle::truncated_density(w, ob.omega_hat, ob.sigma_omega, *form)
                               : oracle::gaussian_density(w, ob.omega_hat, ob.sigma_omega);
      return dens * persuasion::cost_c(w, xs, xsp, xe, xg, du, cw);
    };
    const double hi = oracle::omega_upper_limit(ob.omega_hat, ob.sigma_omega);
    const double quad =
        oracle::integrate_scalar([&](double w) { return integrand(w, nullptr); }, 0.0, hi, 0.0,
                                 1e-12)
            .value;
    worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
    if (ob.omega_hat >= 1.0) {
      oracle::TruncationForm f = oracle::TruncationForm::kNormalized;
      const double t = oracle::integrate_scalar([&](double w) { return integrand(w, &f); }, 0.0,
                                                hi, 0.0, 1e-12)
                           .value;
      worst_trunc = std::max(worst_trunc, std::abs(closed - t) / std::abs(t));
    }
  }
  c.pass = worst <= 1e-9 && worst_trunc <= 0.015;
  c.detail = "max rel err " + fmt(worst) + ", vs truncated density " + fmt(worst_trunc);
  return c;
}

// Exponent over x_s with the quadratic deviation term frozen at gamma.
double frozen_exponent(const Vec4& xs, const OmegaBelief& ob, double gamma, const Vec4& xsp,
                       const Vec4& xe, const CostWeights& cw) {
  const Vec4 d = xs - xsp;
  const Vec4 e = xs - xe;
  return (1.0 + ob.omega_hat + ob.sigma_omega * gamma) * cw.w1 * d.squaredNorm() -
         cw.w4 * e.squaredNorm();
}

Check best_response() {
  Check c{"best_response", "receiver best response stationarity and grid", false, "", 0.0};
  Rng r;
  double worst_grad = 0.0;
  int grid_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const CostWeights cw = random_weights(r);
    const OmegaBelief ob{r(0.5, 4.0), r(0.01, 0.2)};
    const double gamma = r(0.0, 1.0);
    const Vec4 xsp = r.state(1.0).vec(), xe = r.state(1.0).vec();
    const Vec4 xs = persuasion::receiver_best_response(ob, gamma, VehicleState::from(xsp),
                                                       VehicleState::from(xe), cw)
                        .vec();
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
      Vec4 p = xs, m = xs;
      p[k] += h;
      m[k] -= h;
      const double g = (frozen_exponent(p, ob, gamma, xsp, xe, cw) -
                        frozen_exponent(m, ob, gamma, xsp, xe, cw)) /
                       (2 * h);
      worst_grad = std::max(worst_grad, std::abs(g));
    }
    const auto f = [&](const Vec4& x) { return frozen_exponent(x, ob, gamma, xsp, xe, cw); };
    const Vec4 radius = (xs - xsp).cwiseAbs() + Vec4::Constant(0.2);
    const oracle::GridResult gr = oracle::grid_minimize(f, xsp, radius, 21);
    if (!gr.boundary_hit && ((gr.argmin - xs).cwiseAbs() - gr.spacing).maxCoeff() <= 1e-12)
      ++grid_ok;
  }
  c.pass = worst_grad <= 1e-6 && grid_ok == 50;
  c.detail = "max |grad| " + fmt(worst_grad) + ", grid agreement " + std::to_string(grid_ok) + "/50";
  return c;
}

Check laplace() {
  Check c{"laplace", "Laplace stationary point, curvature and affinity", false, "", 0.0};
  Rng r;
  double worst_grad = 0.0, worst_curv = 0.0, worst_aff = 0.0;
  for (int i = 0; i < 30; ++i) {
    CostWeights cw = random_weights(r);
    const Mat4 sigma = Mat4::Identity() * r(0.01, 0.2);
    const EllipseFootprint fp;
    const VehicleState xsp = r.state(1.0), xhat = r.state(1.0), xg = r.state(1.0);
    const persuasion::Persuadee sp{xsp, fp};
    const persuasion::OmegaLinearization lin = persuasion::linearize_omega(xsp, xhat, fp);
    const persuasion::LaplaceReduction lr(sigma, cw);

    const Vec4 xs = persuasion::laplace_argmin(xhat, xg, sp, sigma, cw, lin).vec();
    const double h = 1e-4;
    for (int k = 0; k < 4; ++k) {
      Vec4 p = xs, m = xs;
      p[k] += h;
      m[k] -= h;
      worst_grad = std::max(worst_grad, std::abs(lr.exponent(p, xhat.vec(), xg.vec(), &lin) -
                                                 lr.exponent(m, xhat.vec(), xg.vec(), &lin)) /
                                            (2 * h));
    }

    const Vec4 dir = Vec4(r(-1, 1), r(-1, 1), r(-1, 1), r(-1, 1)).normalized();
    const auto j = [&](double t) {
      return persuasion::stage_cost_j(VehicleState::from(xhat.vec() + t * dir), {}, xg, sp, sigma,
                                      cw, lin);
    };
    const double s = 0.1;
    const double c0 = (j(s) - 2 * j(0) + j(-s)) / (s * s);
    for (double t0 : {0.3, -0.7, 1.1}) {
      const double ct = (j(t0 + s) - 2 * j(t0) + j(t0 - s)) / (s * s);
      worst_curv = std::max(worst_curv, std::abs(ct - c0) / std::max(1.0, std::abs(c0)));
    }

    const VehicleState a = r.state(1.0), b = r.state(1.0);
    const double lam = r(-0.5, 1.5);
    const auto mix = [&](const VehicleState& p, const VehicleState& q) {
      return VehicleState::from(lam * p.vec() + (1 - lam) * q.vec());
    };
    const auto arg = [&](const VehicleState& xh, const VehicleState& g) {
      return persuasion::laplace_argmin(xh, g, sp, sigma, cw, lin).vec();
    };
    const Vec4 e1 = arg(mix(a, b), xg) - (lam * arg(a, xg) + (1 - lam) * arg(b, xg));
    const Vec4 e2 = arg(xhat, mix(a, b)) - (lam * arg(xhat, a) + (1 - lam) * arg(xhat, b));
    worst_aff = std::max({worst_aff, e1.cwiseAbs().maxCoeff(), e2.cwiseAbs().maxCoeff()});
  }
  c.pass = worst_grad <= 1e-8 && worst_curv <= 1e-6 && worst_aff <= 1e-9;
  c.detail = "grad " + fmt(worst_grad) + ", curvature " + fmt(worst_curv) + ", affinity " +
             fmt(worst_aff);
  return c;
}

Check structural_fit() {
  Check c{"structural_fit", "structural fit on shipped scenarios", true, "", 0.0};
  for (const sim::ScenarioConfig& cfg : sim::builtin_scenarios()) {
    const sim::AgentSpec* ps = nullptr;
    for (const sim::AgentSpec& a : cfg.agents)
      if (a.persuadee) ps = &a;
    if (!ps) continue;
    std::vector<OmegaBelief> samples;
    for (int i = 0; i <= 40; ++i)
      samples.push_back({1.0 + 0.1 * i, cfg.beliefs.at(0).sigma_omega});
    try {
      const persuasion::KFit f =
          persuasion::structural_fit_k(samples, {ps->initial, cfg.ego_init, cfg.ego_goal, {}},
                                       cfg.weights, 0.0);
      const bool ok = f.k3 < 0.0 && f.k4 > 0.0;
      c.pass = c.pass && ok;
      c.detail += cfg.name + " k3 " + fmt(f.k3) + " k4 " + fmt(f.k4) + " res " +
                  fmt(f.relative_residual) + "; ";
    } catch (const Error& e) {
      c.pass = false;
      c.detail += cfg.name + ": " + e.what() + "; ";
    }
  }
  return c;
}

Check adaptation_monotone() {
  Check c{"adaptation", "adaptation monotonicity and invariants", false, "", 0.0};
  const AdaptationParams ap;
  const CostWeights cw;
  const BeliefState bs;
  bool ok = true;
  double prev_w1 = std::numeric_limits<double>::infinity();
  double prev_sigma = -1.0;
  for (int i = 0; i < 50; ++i) {
    const double g = 2.0 * i / 49.0;
    const auto [b1, w1] = adaptation::update_beliefs(bs, cw, 0.1, g, ap);
    ok = ok && w1.w1 <= prev_w1 && w1.w1 >= w1.w4 && b1.at(0).sigma_omega <= 0.2;
    prev_w1 = w1.w1;
    const auto [b2, w2] = adaptation::update_beliefs(bs, cw, g, 0.1, ap);
    const double s = b2.at(0).sigma_xe(0, 0);
    ok = ok && s >= prev_sigma && w2.w1 >= w2.w4 && b2.at(0).sigma_omega <= 0.2;
    prev_sigma = s;
  }
  c.pass = ok;
  c.detail = ok ? "w1 nonincreasing in beta, sigma_xe nondecreasing in alpha" : "violated";
  return c;
}

}  // namespace

std::vector<Check> run_oracle_suite(const std::function<void(const Check&)>& on_result) {
  struct Entry {
    const char* id;
    Check (*fn)();
  };
  const Entry entries[] = {{"epsilon", epsilon_bound},       {"omega_integral", omega_integral},
                           {"best_response", best_response}, {"laplace", laplace},
                           {"structural_fit", structural_fit}, {"adaptation", adaptation_monotone}};
  std::vector<Check> out;
  for (const Entry& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.id = e.id;
      c.title = e.id;
      c.pass = false;
      c.detail = std::string("error: ") + ex.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(c);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace pdrive::verify
