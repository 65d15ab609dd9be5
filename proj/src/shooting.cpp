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


#include "pdrive/shooting.hpp"

#include "pdrive/dynamics.hpp"

#include <algorithm>
#include <limits>

namespace pdrive::shooting {

const char* to_string(Status s) {
  switch (s) {
    case Status::kConverged: return "converged";
    case Status::kMaxIterations: return "max_iter";
    case Status::kInfeasible: return "infeasible";
  }
  return "unknown";
}

double stage_penalty(const Objective& objective, int t, const VehicleState& x, Vec4& grad) {
  StageConstraints c;
  objective.stage_constraints(t, x, c);
  grad.setZero();
  double pen = 0.0;
  for (std::size_t j = 0; j < c.g.size(); ++j) {
    if (c.g[j] <= 0.0) continue;
    pen += c.g[j] * c.g[j];
    grad += 2.0 * c.g[j] * c.dg[j];
  }
  return pen;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<ControlInput> to_inputs(const VectorXd& z) {
  std::vector<ControlInput> u(static_cast<std::size_t>(z.size() / 2));
  for (std::size_t t = 0; t < u.size(); ++t) u[t] = {z[2 * t], z[2 * t + 1]};
  return u;
}

VectorXd to_vector(std::span<const ControlInput> u) {
  VectorXd z(2 * static_cast<Eigen::Index>(u.size()));
  for (std::size_t t = 0; t < u.size(); ++t) {
    z[2 * t] = u[t].a;
    z[2 * t + 1] = u[t].delta;
  }
  return z;
}

std::vector<VehicleState> roll(const Problem& p, std::span<const ControlInput> u) {
  std::vector<VehicleState> xs(u.size() + 1);
  xs[0] = p.x0;
  for (std::size_t t = 0; t < u.size(); ++t) xs[t + 1] = dynamics::step(xs[t], u[t], p.dims, p.ts);
  return xs;
}

// Constraint values at every stage of a rollout.
std::vector<StageConstraints> constraints_of(const Objective& obj,
                                             const std::vector<VehicleState>& xs) {
  std::vector<StageConstraints> cs(xs.size() - 1);
  for (std::size_t t = 0; t + 1 < xs.size(); ++t)
    obj.stage_constraints(static_cast<int>(t), xs[t + 1], cs[t]);
  return cs;
}

class Evaluator {
 public:
  Evaluator(const Problem& p, const Objective& obj) : p_(p), obj_(obj) {
    const auto n = p.lower.size();
    lo_.resize(2 * static_cast<Eigen::Index>(n));
    hi_.resize(lo_.size());
    for (std::size_t t = 0; t < n; ++t) {
      lo_[2 * t] = p.lower[t].a;
      lo_[2 * t + 1] = p.lower[t].delta;
      hi_[2 * t] = p.upper[t].a;
      hi_[2 * t + 1] = p.upper[t].delta;
    }
  }

  const VectorXd& lo() const { return lo_; }
  const VectorXd& hi() const { return hi_; }

  VectorXd project(const VectorXd& z) const { return z.cwiseMax(lo_).cwiseMin(hi_); }

  double operator()(const VectorXd& z, double rho, const Multipliers& lam, VectorXd* grad) const {
    const auto inputs = to_inputs(z);
    return evaluate(p_, obj_, inputs, rho, grad, &lam);
  }

  double kkt(const VectorXd& z, const VectorXd& g) const {
    return (z - project(z - g)).cwiseAbs().maxCoeff();
  }

 private:
  const Problem& p_;
  const Objective& obj_;
  VectorXd lo_;
  VectorXd hi_;
};

struct Inner {
  double kkt = 0.0;
  int iterations = 0;
};

// Projected trust-region Newton on the smoothed objective at fixed (rho, lam).
Inner minimize(const Evaluator& eval, VectorXd& z, double rho, const Multipliers& lam,
               int budget, const Options& options, double& mu) {
  const auto n = z.size();
  Inner out;
  VectorXd g(n);
  VectorXd g_probe(n);
  MatrixXd hess(n, n);
  double f = eval(z, rho, lam, &g);
  while (true) {
    out.kkt = eval.kkt(z, g);
    if (out.kkt <= options.kkt_tolerance || out.iterations >= budget) break;
    ++out.iterations;

    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = options.fd_step * std::max(1.0, std::abs(z[i]));
      VectorXd zp = z;
      zp[i] += h;
      eval(zp, rho, lam, &g_probe);
      hess.col(i) = (g_probe - g) / h;
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    std::vector<Eigen::Index> free;
    free.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned_lo = z[i] <= eval.lo()[i] && g[i] > 0.0;
      const bool pinned_hi = z[i] >= eval.hi()[i] && g[i] < 0.0;
      if (!pinned_lo && !pinned_hi) free.push_back(i);
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    MatrixXd hf(nf, nf);
    VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf[a] = g[free[a]];
      for (Eigen::Index b = 0; b < nf; ++b) hf(a, b) = hess(free[a], free[b]);
    }
    const VectorXd scaling = hf.diagonal().cwiseAbs().cwiseMax(1e-3);

    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      MatrixXd damped = hf;
      damped.diagonal() += mu * scaling;
      Eigen::LLT<MatrixXd> llt(damped);
      if (llt.info() != Eigen::Success) {
        mu = std::max(mu * 10.0, 1e-4);
        continue;
      }
      const VectorXd pf = llt.solve(-gf);
      VectorXd step = VectorXd::Zero(n);
      for (Eigen::Index a = 0; a < nf; ++a) step[free[a]] = pf[a];
      const VectorXd z_new = eval.project(z + step);
      const VectorXd s = z_new - z;
      if (s.cwiseAbs().maxCoeff() < 1e-15) {
        mu *= 10.0;
        continue;
      }
      const double predicted = -(g.dot(s) + 0.5 * s.dot(hess * s));
      if (!(predicted > 0.0)) {
        mu = std::max(mu * 10.0, 1e-6);
        continue;
      }
      VectorXd g_new(n);
      const double f_new = eval(z_new, rho, lam, &g_new);
      const double ratio = (f - f_new) / predicted;
      const bool at_noise = predicted < 1e-13 * (1.0 + std::abs(f));
      if (ratio >= 1e-4 || (at_noise && f_new <= f)) {
        accepted = true;
        z = z_new;
        f = f_new;
        g = g_new;
        if (ratio > 0.75) mu = std::max(mu / 5.0, 1e-12);
        else if (ratio < 0.25) mu *= 3.0;
      } else {
        mu = std::max(mu * 5.0, 1e-8);
      }
    }
    if (!accepted) break;  // no further numerical progress at these weights
  }
  return out;
}

}  // namespace

double evaluate(const Problem& problem, const Objective& objective,
                std::span<const ControlInput> inputs, double rho, Eigen::VectorXd* grad,
                const Multipliers* multipliers) {
  const std::size_t n = inputs.size();
  std::vector<VehicleState> xs(n + 1);
  std::vector<dynamics::StepJacobian> jac(grad != nullptr ? n : 0);
  xs[0] = problem.x0;
  for (std::size_t t = 0; t < n; ++t) {
    xs[t + 1] = grad != nullptr
                    ? dynamics::step(xs[t], inputs[t], problem.dims, problem.ts, jac[t])
                    : dynamics::step(xs[t], inputs[t], problem.dims, problem.ts);
  }

  VectorXd input_grad = VectorXd::Zero(2 * static_cast<Eigen::Index>(n));
  double total = objective.input_cost(inputs, input_grad);
  std::vector<Vec4> state_grad(n + 1, Vec4::Zero());
  StageConstraints c;
  for (std::size_t t = 0; t < n; ++t) {
    Vec4 gc = Vec4::Zero();
    total += objective.stage_cost(static_cast<int>(t), xs[t + 1], gc);
    if (rho > 0.0) {
      c.clear();
      objective.stage_constraints(static_cast<int>(t), xs[t + 1], c);
      for (std::size_t j = 0; j < c.g.size(); ++j) {
        const double lam = multipliers != nullptr && t < multipliers->size() &&
                                   j < (*multipliers)[t].size()
                               ? (*multipliers)[t][j]
                               : 0.0;
        const double m = std::max(0.0, lam + 2.0 * rho * c.g[j]);
        total += (m * m - lam * lam) / (4.0 * rho);
        gc += m * c.dg[j];
      }
    }
    state_grad[t + 1] = gc;
  }
  if (grad == nullptr) return total;

  grad->resize(2 * static_cast<Eigen::Index>(n));
  Vec4 costate = state_grad[n];
  for (std::size_t k = n; k-- > 0;) {
    const Eigen::Vector2d gu = jac[k].B.transpose() * costate;
    (*grad)[2 * k] = gu[0] + input_grad[2 * k];
    (*grad)[2 * k + 1] = gu[1] + input_grad[2 * k + 1];
    costate = jac[k].A.transpose() * costate + state_grad[k];
  }
  return total;
}

Result solve(const Problem& problem, const Objective& objective,
             std::vector<ControlInput> initial, const Options& options,
             const DualStart* dual) {
  if (initial.size() != problem.lower.size() || initial.size() != problem.upper.size())
    throw Error(ErrorCode::kHorizonMismatch, "initial guess and bounds disagree on horizon");
  const Evaluator eval(problem, objective);
  VectorXd z = eval.project(to_vector(initial));
  const VectorXd z_start = z;

  // Multipliers start at zero, shaped by the constraint count of each stage.
  Multipliers lam;
  for (const StageConstraints& c : constraints_of(objective, roll(problem, to_inputs(z))))
    lam.emplace_back(c.g.size(), 0.0);

  double rho = options.rho_initial;
  if (dual != nullptr && dual->multipliers.size() == lam.size() &&
      std::equal(lam.begin(), lam.end(), dual->multipliers.begin(),
                 [](const auto& a, const auto& b) { return a.size() == b.size(); })) {
    lam = dual->multipliers;
    rho = std::clamp(dual->rho, options.rho_initial, options.rho_final);
  }
  double mu = 1e-6;
  int iterations = 0;
  double kkt = std::numeric_limits<double>::infinity();
  double prev_violation = std::numeric_limits<double>::infinity();
  Multipliers lam_used = lam;
  double rho_used = rho;

  for (int outer = 0; outer < options.max_outer; ++outer) {
    const Inner in = minimize(eval, z, rho, lam, options.max_iterations - iterations, options, mu);
    iterations += in.iterations;
    kkt = in.kkt;
    rho_used = rho;

    // Feasibility and complementarity of the buffered constraints.
    double violation = 0.0;
    double complementarity = 0.0;
    const auto cs = constraints_of(objective, roll(problem, to_inputs(z)));
    for (std::size_t t = 0; t < cs.size(); ++t) {
      for (std::size_t j = 0; j < cs[t].g.size(); ++j) {
        const double gj = cs[t].g[j];
        violation = std::max(violation, gj);
        const double next = std::max(0.0, lam[t][j] + 2.0 * rho * gj);
        complementarity = std::max(complementarity, std::abs(next - lam[t][j]) / (2.0 * rho));
        lam[t][j] = next;
      }
    }
    lam_used = lam;
    if (kkt <= options.kkt_tolerance && violation <= options.constraint_tolerance &&
        complementarity <= options.constraint_tolerance)
      break;
    if (iterations >= options.max_iterations) break;
    if (violation > 0.5 * prev_violation) rho = std::min(rho * options.rho_factor, options.rho_final);
    prev_violation = violation;
  }

  const auto assemble = [&](const VectorXd& zz, double kkt_value) {
    Result r;
    r.inputs = to_inputs(zz);
    r.states = roll(problem, r.inputs);
    Eigen::VectorXd input_grad = VectorXd::Zero(zz.size());
    r.input_cost = objective.input_cost(r.inputs, input_grad);
    r.cost = r.input_cost;
    r.stage_costs.resize(r.inputs.size());
    r.max_violation = objective.stage_violation(-1, problem.x0);
    for (std::size_t t = 0; t < r.inputs.size(); ++t) {
      Vec4 scratch;
      r.stage_costs[t] = objective.stage_cost(static_cast<int>(t), r.states[t + 1], scratch);
      r.cost += r.stage_costs[t];
      r.penalty += stage_penalty(objective, static_cast<int>(t), r.states[t + 1], scratch);
      r.max_violation = std::max(
          r.max_violation, objective.stage_violation(static_cast<int>(t), r.states[t + 1]));
    }
    r.kkt_residual = kkt_value;
    r.rho = rho_used;
    r.multipliers = lam_used;
    r.iterations = iterations;
    if (r.max_violation > options.audit_tolerance) r.status = Status::kInfeasible;
    else if (r.kkt_residual <= options.kkt_tolerance) r.status = Status::kConverged;
    else r.status = Status::kMaxIterations;
    return r;
  };

  Result r = assemble(z, kkt);
  // Never return something worse than a start that already met every constraint.
  Result start = assemble(z_start, 0.0);
  if (start.penalty == 0.0 && start.max_violation <= options.audit_tolerance &&
      start.cost < r.cost) {
    VectorXd g;
    const Multipliers none;
    eval(z_start, rho_used, none, &g);
    start.kkt_residual = eval.kkt(z_start, g);
    start.status = start.kkt_residual <= options.kkt_tolerance ? Status::kConverged
                                                               : Status::kMaxIterations;
    start.multipliers = none;
    return start;
  }
  return r;
}

}  // namespace pdrive::shooting
