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
#include "pdrive/quadrature.hpp"
#include "pdrive/sim.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <numbers>

using namespace pdrive;
using namespace pdrive::persuasion;
using testref::real;

namespace {

VehicleState rand_state(testref::Rng& r, double span = 1.0) {
  return {r(-span, span), r(-span, span), r(-0.5, 0.5), r(0.0, 1.5)};
}

CostWeights rand_weights(testref::Rng& r) {
  CostWeights cw;
  cw.w1 = r(0.5, 1.5);
  cw.w4 = r(0.05, 0.45) * cw.w1;
  cw.W2 = Vec4(r(0.05, 1), r(0.05, 1), r(0.05, 1), r(0.05, 1)).asDiagonal();
  cw.W3 = Vec2(r(0.1, 1), r(0.1, 1)).asDiagonal();
  cw.k1 = r(0.05, 1.0);
  return cw;
}

real sq(const VehicleState& a, const VehicleState& b) {
  const real d[4] = {real(a.x) - b.x, real(a.y) - b.y, real(a.theta) - b.theta, real(a.v) - b.v};
  return d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
}

// Term-by-term exponent of c with diagonal W2, W3.
real exponent_ref(real om, const VehicleState& xs, const VehicleState& xsp, const VehicleState& xe,
                  const VehicleState& xg, const ControlInput& du, const CostWeights& cw) {
  const real ge[4] = {real(xe.x) - xg.x, real(xe.y) - xg.y, real(xe.theta) - xg.theta,
                      real(xe.v) - xg.v};
  real goal = 0;
  for (int i = 0; i < 4; ++i) goal += cw.W2(i, i) * ge[i] * ge[i];
  const real in = cw.W3(0, 0) * real(du.a) * du.a + cw.W3(1, 1) * real(du.delta) * du.delta;
  return (1 + om) * cw.w1 * sq(xs, xsp) + goal + in - cw.w4 * sq(xs, xe);
}

}  // namespace

TEST_SUITE("persuasion") {
  TEST_CASE("omega on and off the ellipse") {
    const EllipseFootprint fp;
    CHECK(omega({1, 2, 0, 0}, {1, 2, 0, 0}, fp) == 0.0);
    CHECK(omega({0, 0, 0, 0}, {0.75, 0, 0, 0}, fp) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(omega({0, 0, 0, 0}, {0.75, 0.35, 0, 0}, fp) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(omega({0, 0, 0.7, 0.3}, {0.75, 0.35, -0.2, 1.1}, fp) == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("heading-aligned omega turns with the receiver") {
    EllipseFootprint fp;
    fp.heading_aligned = true;
    const double n = std::numbers::pi / 2;
    CHECK(omega({0, 0, n, 0}, {0, 0.75, 0, 0}, fp) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(omega({0, 0, n, 0}, {0.35, 0, 0, 0}, fp) == doctest::Approx(1.0).epsilon(1e-14));
    testref::Rng r(31);
    for (int i = 0; i < 100; ++i) {
      const VehicleState a{r(-1, 1), r(-1, 1), r(-3, 3), 0}, b{r(-1, 1), r(-1, 1), 0, 0};
      const real ref = testref::ellipse(a.x, a.y, a.theta, b.x, b.y, 0.75, 0.35);
      CHECK(std::fabs(omega(a, b, fp) - static_cast<double>(ref)) < 1e-13);
    }
  }

  TEST_CASE("omega derivatives match central differences") {
    testref::Rng r(37);
    for (bool aligned : {false, true}) {
      EllipseFootprint fp;
      fp.heading_aligned = aligned;
      for (int i = 0; i < 50; ++i) {
        const VehicleState sp{r(-1, 1), r(-1, 1), r(-3, 3), 0}, e{r(-1, 1), r(-1, 1), 0, 0};
        const OmegaDerivatives d = omega_derivatives(sp, e, fp);
        const double h = 1e-6;
        for (int k = 0; k < 2; ++k) {
          Vec4 p = e.vec(), m = e.vec();
          p[k] += h;
          m[k] -= h;
          const double fd = (omega(sp, VehicleState::from(p), fp) - omega(sp, VehicleState::from(m), fp)) / (2 * h);
          CHECK(d.grad_ego[k] == doctest::Approx(fd).epsilon(1e-6));
        }
        for (int k = 0; k < 3; ++k) {
          Vec4 p = sp.vec(), m = sp.vec();
          p[k] += h;
          m[k] -= h;
          const double fd = (omega(VehicleState::from(p), e, fp) - omega(VehicleState::from(m), e, fp)) / (2 * h);
          CHECK(d.grad_receiver[k] == doctest::Approx(fd).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("game cost") {
    const CostWeights cw;
    const VehicleState x{0.3, 0.2, 0.1, 0.5};
    CHECK(cost_c(0.7, x, x, x, x, {}, cw) == 1.0);
    testref::Rng r(41);
    const VehicleState xs = rand_state(r), xsp = rand_state(r), xe = rand_state(r), xg = rand_state(r);
    const ControlInput du{0.2, -0.1};
    const double q = tracking_deviation(xs, xsp, cw);
    CHECK(q > 0.0);
    CHECK(cost_c(1.0, xs, xsp, xe, xg, du, cw) / cost_c(0.0, xs, xsp, xe, xg, du, cw) ==
          doctest::Approx(std::exp(q)).epsilon(1e-13));
    for (int i = 0; i < 100; ++i) {
      const CostWeights w = rand_weights(r);
      const VehicleState a = rand_state(r), b = rand_state(r), c = rand_state(r), g = rand_state(r);
      const ControlInput u{r(-1, 1), r(-1, 1)};
      const double om = r(0, 4);
      CHECK(cost_exponent(om, a, b, c, g, u, w) ==
            doctest::Approx(static_cast<double>(exponent_ref(om, a, b, c, g, u, w))).epsilon(1e-13));
    }
  }

  TEST_CASE("exponent cap signals overflow") {
    CostWeights cw;
    try {
      cost_c(0.0, {}, {}, {30, 0, 0, 0}, {}, {}, cw);
      FAIL("expected overflow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kOverflow);
    }
    CHECK_THROWS_AS(cost_c(0.0, {}, {}, {3, 0, 0, 0}, {}, {}, cw, 5.0), Error);
  }

  TEST_CASE("truncation factor") {
    CHECK(epsilon({1.0, 0.2}, 0.0) == doctest::Approx(0.9873).epsilon(5e-5));
    CHECK(epsilon({1.0, 0.2}, 0.0) ==
          doctest::Approx(static_cast<double>(testref::normal_cdf(std::sqrt(5.0L)))).epsilon(1e-14));
    CHECK(epsilon({0.0, 1.0}, 0.0) == 0.5);
    CHECK(epsilon({12.0, 0.1}, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("omega integral tends to c at omega_hat as the variance vanishes") {
    CostWeights cw;
    testref::Rng r(43);
    const VehicleState xs = rand_state(r), xsp = rand_state(r), xe = rand_state(r), xg = rand_state(r);
    const double c = cost_c(1.3, xs, xsp, xe, xg, {}, cw);
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double err = std::fabs(omega_integral({1.3, s}, xs, xsp, xe, xg, {}, cw) / c - 1.0);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-6);
  }

  TEST_CASE("omega integral against an extended-precision quadrature") {
    testref::Rng r(47);
    for (int i = 0; i < 40; ++i) {
      const CostWeights cw = rand_weights(r);
      const OmegaBelief ob{r(0.2, 4.0), r(0.01, 0.2)};
      const VehicleState xs = rand_state(r), xsp = rand_state(r), xe = rand_state(r), xg = rand_state(r);
      const ControlInput du{r(-0.5, 0.5), r(-0.3, 0.3)};
      const auto f = [&](real w) {
        return testref::gauss(w, ob.omega_hat, ob.sigma_omega) *
               std::exp(exponent_ref(w, xs, xsp, xe, xg, du, cw));
      };
      const real hi = ob.omega_hat + 12 * std::sqrt(real(ob.sigma_omega));
      const real ref = testref::simpson(f, 0, hi, 1e-15L * f(ob.omega_hat));
      const double closed = omega_integral(ob, xs, xsp, xe, xg, du, cw);
      CHECK(std::fabs(closed - static_cast<double>(ref)) / static_cast<double>(ref) <= 1e-9);
      CHECK(log_omega_integral(ob, xs, xsp, xe, xg, du, cw) == doctest::Approx(std::log(closed)));
    }
  }

  TEST_CASE("best response without the risk term tracks the prediction") {
    CostWeights cw;
    cw.w4 = 0.0;
    const VehicleState sp{1, 0.5, 0.1, 0.7}, e{-1, 0.2, 0, 0.4};
    const VehicleState xs = receiver_best_response({1.5, 0.1}, 0.3, sp, e, cw);
    CHECK((xs.vec() - sp.vec()).cwiseAbs().maxCoeff() <= 1e-15);
  }

  TEST_CASE("best response approaches the prediction for large omega_hat") {
    CostWeights cw;
    const VehicleState sp{1, 0.5, 0.1, 0.7}, e{-1, 0.2, 0, 0.4};
    double prev = std::numeric_limits<double>::infinity();
    for (double w : {1.0, 10.0, 100.0, 1e4}) {
      const double gap = (receiver_best_response({w, 0.1}, 0.0, sp, e, cw).vec() - sp.vec()).norm();
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 1e-3);
  }

  TEST_CASE("scalar best response against a dense grid") {
    CostWeights cw;
    cw.w1 = 1.0;
    cw.w4 = 0.5;
    const OmegaBelief ob{1.0, 0.1};
    const VehicleState sp{0.4, -0.2, 0.05, 0.8}, e{1.0, 0.3, 0.0, 0.5};
    const VehicleState xs = receiver_best_response(ob, 0.0, sp, e, cw);
    const double spv[4] = {sp.x, sp.y, sp.theta, sp.v}, ev[4] = {e.x, e.y, e.theta, e.v};
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
      double best = 0, fbest = std::numeric_limits<double>::infinity();
      for (int i = -200000; i <= 200000; ++i) {
        const double s = spv[k] + i * h;
        const double f = (2.0 * (s - spv[k]) * (s - spv[k])) - 0.5 * (s - ev[k]) * (s - ev[k]);
        if (f < fbest) {
          fbest = f;
          best = s;
        }
      }
      CHECK(std::fabs(xs.vec()[k] - best) <= h);
    }
  }

  TEST_CASE("best response needs a positive definite system") {
    CostWeights cw;
    cw.w1 = 0.1;
    cw.w4 = 0.1;
    try {
      receiver_best_response({0.0, 0.1}, 0.0, {}, {}, cw);
      FAIL("expected a singular system");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kSingularSystem);
    }
  }

  TEST_CASE("gamma update") {
    CostWeights cw;
    const VehicleState a{0.2, 0.3, 0.1, 0.5};
    CHECK(gamma_update(a, a, cw) == 0.0);
    CHECK(gamma_update({1, 0, 0, 0}, {}, cw) == 1.0);
    testref::Rng r(53);
    for (int i = 0; i < 100; ++i) {
      const CostWeights w = rand_weights(r);
      const VehicleState p = rand_state(r), q = rand_state(r);
      const double g = gamma_update(p, q, w);
      CHECK(g >= 0.0);
      CHECK(g == doctest::Approx(static_cast<double>(w.w1 * sq(p, q))).epsilon(1e-13));
    }
  }

  TEST_CASE("Laplace stationary point without cost terms is the signal mean") {
    CostWeights cw;
    cw.W2.setZero();
    cw.k1 = 0.0;
    const VehicleState xh{0.4, 0.2, 0.1, 0.6};
    const VehicleState xs = laplace_argmin(xh, {3, 0.5, 0, 1}, {{1, 0.5, 0, 0.5}, {}},
                                           Mat4::Identity() * 0.05, cw);
    CHECK((xs.vec() - xh.vec()).norm() < 1e-15);
  }

  TEST_CASE("Laplace stationary point with goal weights solves the linear system") {
    testref::Rng r(59);
    for (int i = 0; i < 30; ++i) {
      CostWeights cw = rand_weights(r);
      cw.k1 = 0.0;
      Mat4 a = Mat4::Random() * 0.05;
      const Mat4 sigma = a * a.transpose() + Mat4::Identity() * r(0.01, 0.1);
      const VehicleState xh = rand_state(r), xg = rand_state(r);
      const Mat4 s_inv = sigma.fullPivLu().inverse();
      const Vec4 rhs = s_inv * xh.vec() - 2.0 * cw.W2 * xg.vec();
      const Vec4 ref = (s_inv - 2.0 * cw.W2).fullPivLu().solve(rhs);
      const VehicleState xs = laplace_argmin(xh, xg, {rand_state(r), {}}, sigma, cw);
      CHECK((xs.vec() - ref).cwiseAbs().maxCoeff() < 1e-11);
    }
  }

  TEST_CASE("Laplace stationary point zeroes the exponent gradient") {
    testref::Rng r(61);
    const EllipseFootprint fp;
    for (int i = 0; i < 30; ++i) {
      const CostWeights cw = rand_weights(r);
      const Mat4 sigma = Mat4::Identity() * r(0.01, 0.2);
      const VehicleState xsp = rand_state(r), xh = rand_state(r), xg = rand_state(r);
      const OmegaLinearization lin = linearize_omega(xsp, xh, fp);
      const Vec4 xs = laplace_argmin(xh, xg, {xsp, fp}, sigma, cw).vec();
      const auto c = [&](const Vec4& x) {
        const Vec4 d = x - xh.vec(), e = x - xg.vec();
        return -0.5 * d.dot(sigma.inverse() * d) + e.dot(cw.W2 * e) +
               cw.k1 * (lin.value + lin.gradient.dot(x - xh.vec()));
      };
      const double h = 1e-4;
      for (int k = 0; k < 4; ++k) {
        Vec4 p = xs, m = xs;
        p[k] += h;
        m[k] -= h;
        CHECK(std::fabs(c(p) - c(m)) / (2 * h) <= 1e-8);
      }
    }
  }

  TEST_CASE("Laplace preconditions") {
    CostWeights cw;
    cw.W2 = Mat4::Identity() * 3.0;
    try {
      laplace_argmin({}, {}, {{1, 0, 0, 0}, {}}, Mat4::Identity() * 0.2, cw);
      FAIL("expected a divergent integral");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonConvergentIntegral);
    }
    try {
      laplace_argmin({1, 1, 0, 0}, {}, {{1, 1, 0, 0}, {}}, Mat4::Identity() * 0.01, CostWeights{});
      FAIL("expected a degenerate gradient");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerateOmegaGradient);
    }
  }

  TEST_CASE("reduced stage cost") {
    CostWeights cw;
    cw.W2.setZero();
    cw.k1 = 0.0;
    const VehicleState g{2, 0.5, 0, 0.6};
    const Persuadee sp{{1, 0.5, 0, 0.5}, {}};
    CHECK(stage_cost_j(g, {}, g, sp, Mat4::Identity() * 0.01, cw) == 0.0);

    testref::Rng r(67);
    const CostWeights w = rand_weights(r);
    const VehicleState xh = rand_state(r);
    const ControlInput u1{0.3, -0.2}, u2{-0.6, 0.4};
    const double d = stage_cost_j(xh, u1, g, sp, Mat4::Identity() * 0.05, w) -
                     stage_cost_j(xh, u2, g, sp, Mat4::Identity() * 0.05, w);
    CHECK(d == doctest::Approx(u1.vec().dot(w.W3 * u1.vec()) - u2.vec().dot(w.W3 * u2.vec()))
                   .epsilon(1e-12));
  }

  TEST_CASE("reduced stage cost is quadratic in the signal mean") {
    testref::Rng r(71);
    const EllipseFootprint fp;
    for (int i = 0; i < 20; ++i) {
      const CostWeights cw = rand_weights(r);
      const Mat4 sigma = Mat4::Identity() * r(0.01, 0.2);
      const VehicleState xsp = rand_state(r), xh = rand_state(r), xg = rand_state(r);
      const OmegaLinearization lin = linearize_omega(xsp, xh, fp);
      const Vec4 dir = Vec4(r(-1, 1), r(-1, 1), r(-1, 1), r(-1, 1)).normalized();
      const auto j = [&](double t) {
        return stage_cost_j(VehicleState::from(xh.vec() + t * dir), {}, xg, {xsp, fp}, sigma, cw, lin);
      };
      const double s = 0.1;
      const double c0 = (j(s) - 2 * j(0) + j(-s)) / (s * s);
      for (double t : {0.4, -0.9, 1.3}) {
        const double ct = (j(t + s) - 2 * j(t) + j(t - s)) / (s * s);
        CHECK(std::fabs(ct - c0) <= 1e-6 * std::max(1.0, std::fabs(c0)));
      }
    }
  }

  TEST_CASE("planner cost gradient includes the linearization point") {
    testref::Rng r(73);
    const EllipseFootprint fp;
    for (int i = 0; i < 20; ++i) {
      const CostWeights cw = rand_weights(r);
      const LaplaceReduction lr(Mat4::Identity() * 0.05, cw);
      const Persuadee ps{rand_state(r), fp};
      const Vec4 xh = rand_state(r).vec(), xg = rand_state(r).vec();
      const auto g = lr.planner_cost(xh, xg, &ps);
      const double h = 1e-6;
      for (int k = 0; k < 4; ++k) {
        Vec4 p = xh, m = xh;
        p[k] += h;
        m[k] -= h;
        const double fd = (lr.planner_cost(p, xg, &ps).value - lr.planner_cost(m, xg, &ps).value) / (2 * h);
        CHECK(g.grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }

  TEST_CASE("structural fit without the risk term has no rational part") {
    CostWeights cw;
    cw.w4 = 0.0;
    std::vector<OmegaBelief> samples;
    for (int i = 0; i <= 30; ++i) samples.push_back({1.0 + 0.1 * i, 0.1});
    const KFit f = structural_fit_k(samples, {{1, 0.555, 0, 0.8}, {0, 0.185, 0, 0.5}, {6, 0.555, 0, 0.6}, {}}, cw, 0.0);
    CHECK(std::fabs(f.k3) < 1e-8);
    CHECK(std::fabs(f.k4) < 1e-8);
    CHECK(f.relative_residual <= 0.05);
  }

  TEST_CASE("structural fit signs on the shipped scenes") {
    for (const sim::ScenarioConfig& c : sim::builtin_scenarios()) {
      CAPTURE(c.name);
      const sim::AgentSpec* ps = nullptr;
      for (const auto& a : c.agents)
        if (a.persuadee) ps = &a;
      REQUIRE(ps != nullptr);
      std::vector<OmegaBelief> samples;
      for (int i = 0; i <= 40; ++i) samples.push_back({1.0 + 0.1 * i, c.beliefs.at(0).sigma_omega});
      const FitScene scene{ps->initial, c.ego_init, c.ego_goal, {}};
      const KFit f = structural_fit_k(samples, scene, c.weights, 0.0);
      CHECK(f.k3 < 0.0);
      CHECK(f.k4 > 0.0);
      CHECK(f.relative_residual <= 0.05);
      // Fitted curve against the directly evaluated exponent.
      for (const OmegaBelief& ob : samples) {
        const VehicleState xs = receiver_best_response(ob, 0.0, scene.x_sp, scene.x_e, c.weights);
        const double q = tracking_deviation(xs, scene.x_sp, c.weights);
        const double direct =
            (1 + ob.omega_hat) * q + 0.5 * ob.sigma_omega * q * q +
            (scene.x_e.vec() - scene.x_g.vec()).dot(c.weights.W2 * (scene.x_e.vec() - scene.x_g.vec())) -
            c.weights.w4 * (xs.vec() - scene.x_e.vec()).squaredNorm();
        const double dd = c.weights.w1 * ob.omega_hat + c.weights.w1 - c.weights.w4;
        const double fit = f.k1 * ob.omega_hat + f.k2 + f.k3 / dd + f.k4 / (dd * dd);
        CHECK(fit == doctest::Approx(direct).epsilon(1e-3).scale(1.0));
      }
    }
  }

  TEST_CASE("structural fit needs enough samples") {
    std::vector<OmegaBelief> samples(10, OmegaBelief{1.0, 0.1});
    CHECK_THROWS_AS(structural_fit_k(samples, {}, CostWeights{}, 0.0), Error);
  }
}

TEST_SUITE("quadrature") {
  using namespace pdrive::oracle;

  TEST_CASE("constant and normal density") {
    CHECK(integrate_scalar([](double) { return 1.0; }, 0, 1, 1e-14).value == doctest::Approx(1.0).epsilon(1e-15));
    const double z = integrate_scalar([](double x) { return gaussian_density(x, 0, 1); }, -6, 6, 0, 1e-14).value;
    CHECK(std::fabs(z - 1.0) <= 2e-9);
    CHECK(std::fabs(z - std::erf(6.0 / std::sqrt(2.0))) <= 1e-13);
  }

  TEST_CASE("agrees with the extended-precision Simpson rule") {
    const auto f = [](double x) { return std::exp(-x) * std::sin(3 * x) + 1 / (1 + x * x); };
    const auto g = [](real x) { return std::exp(-x) * std::sin(3 * x) + 1 / (1 + x * x); };
    const double a = integrate_scalar(f, 0, 7, 0, 1e-13).value;
    CHECK(a == doctest::Approx(static_cast<double>(testref::simpson(g, 0, 7, 1e-16L))).epsilon(1e-12));
  }

  TEST_CASE("subdivision cap raises NoConvergence") {
    try {
      integrate_scalar([](double x) { return std::sin(1e3 * x); }, 0, 10, 1e-14, 0.0, 3);
      FAIL("expected no convergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoConvergence);
    }
  }

  TEST_CASE("truncated density far from zero") {
    CHECK(truncation_normalizer(1.0, 0.04) == doctest::Approx(1.0).epsilon(1e-6));
    const double g = gaussian_density(1.1, 1.0, 0.04);
    CHECK(truncated_density(1.1, 1.0, 0.04, TruncationForm::kPrinted) ==
          doctest::Approx(g / 0.2).epsilon(1e-6));
    CHECK(truncated_density(-0.1, 1.0, 0.04) == 0.0);
  }

  TEST_CASE("normalized truncated density integrates to one") {
    testref::Rng r(79);
    for (int i = 0; i < 20; ++i) {
      const double m = r(0.0, 3.0), v = r(0.01, 1.0);
      const auto f = [&](real w) {
        return testref::gauss(w, m, v) / testref::normal_cdf(m / std::sqrt(real(v)));
      };
      const real hi = m + 12 * std::sqrt(real(v));
      CHECK(std::fabs(static_cast<double>(testref::simpson(f, 0, hi, 1e-14L)) - 1.0) <= 1e-9);
      const double lib = integrate_scalar([&](double w) { return truncated_density(w, m, v); }, 0,
                                          omega_upper_limit(m, v), 0, 1e-13).value;
      CHECK(std::fabs(lib - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("normalizer bound in the operating range") {
    testref::Rng r(83);
    for (int i = 0; i < 1000; ++i) {
      const double z = truncation_normalizer(r(1.0, 8.0), r(1e-4, 0.2));
      CHECK(z >= 0.9873 - 5e-5);
      CHECK(z <= 1.0);
    }
  }

  TEST_CASE("grid minimum of a convex quadratic") {
    const Vec4 x0(0.3, -0.2, 0.11, 0.7);
    const auto f = [&](const Vec4& x) { return (x - x0).dot(Vec4(1, 2, 3, 4).asDiagonal() * (x - x0)); };
    const GridResult g = grid_minimize(f, Vec4::Zero(), Vec4::Constant(1.0), 41);
    CHECK_FALSE(g.boundary_hit);
    CHECK(((g.argmin - x0).cwiseAbs() - g.spacing).maxCoeff() <= 1e-12);
  }

  TEST_CASE("grid minimum of the frozen receiver exponent") {
    CostWeights cw;
    const OmegaBelief ob{1.5, 0.1};
    const VehicleState sp{0.4, 0.5, 0.0, 0.6}, e{0.0, 0.2, 0.1, 0.5};
    const double gamma = 0.2;
    const Vec4 xs = receiver_best_response(ob, gamma, sp, e, cw).vec();
    const auto f = [&](const Vec4& x) {
      return (1 + ob.omega_hat + ob.sigma_omega * gamma) * cw.w1 * (x - sp.vec()).squaredNorm() -
             cw.w4 * (x - e.vec()).squaredNorm();
    };
    const GridResult g = grid_minimize(f, sp.vec(), Vec4::Constant(0.3), 31);
    CHECK_FALSE(g.boundary_hit);
    CHECK(((g.argmin - xs).cwiseAbs() - g.spacing).maxCoeff() <= 1e-12);
  }

  TEST_CASE("minimizer on the box boundary is flagged") {
    const auto f = [](const Vec4& x) { return (x - Vec4(5, 0, 0, 0)).squaredNorm(); };
    CHECK(grid_minimize(f, Vec4::Zero(), Vec4::Constant(1.0), 11).boundary_hit);
  }
}
