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

// Reference computations for the tests, written from the model definitions
// in long double and without calling into the library.

#include <array>
#include <cmath>
#include <functional>
#include <random>

namespace testref {

using real = long double;

inline constexpr real kPi = 3.141592653589793238462643383279502884L;

inline real normal_cdf(real x) { return 0.5L * std::erfc(-x / std::sqrt(2.0L)); }

inline real gauss(real x, real mean, real var) {
  const real d = x - mean;
  return std::exp(-d * d / (2.0L * var)) / std::sqrt(2.0L * kPi * var);
}

// Adaptive Simpson with Richardson correction.
inline real simpson(const std::function<real(real)>& f, real a, real b, real tol,
                    int depth = 48) {
  struct Rec {
    const std::function<real(real)>& f;
    real run(real a, real b, real fa, real fm, real fb, real whole, real tol, int depth) const {
      const real m = 0.5L * (a + b);
      const real lm = 0.5L * (a + m), rm = 0.5L * (m + b);
      const real flm = f(lm), frm = f(rm);
      const real left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
      const real right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
      const real delta = left + right - whole;
      if (depth <= 0 || std::fabs(delta) <= 15.0L * tol) return left + right + delta / 15.0L;
      return run(a, m, fa, flm, fm, left, tol / 2.0L, depth - 1) +
             run(m, b, fm, frm, fb, right, tol / 2.0L, depth - 1);
    }
  };
  const real fa = f(a), fb = f(b), fm = f(0.5L * (a + b));
  const real whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
  return Rec{f}.run(a, b, fa, fm, fb, whole, tol, depth);
}

struct State {
  real x, y, th, v;
};

// One Euler step of the kinematic bicycle, reference point l_f ahead, l_r behind.
inline State bicycle(State s, real a, real delta, real lf, real lr, real ts) {
  const real L = lf + lr;
  const real beta = std::atan(lr / L * std::tan(delta));
  return {s.x + ts * s.v * std::cos(s.th + beta), s.y + ts * s.v * std::sin(s.th + beta),
          s.th + ts * s.v * std::tan(delta) / L * std::cos(beta), s.v + ts * a};
}

// Scaled elliptical distance of (ex, ey) from an ellipse centered at (cx, cy),
// optionally turned by `angle`.
inline real ellipse(real cx, real cy, real angle, real ex, real ey, real as, real bs) {
  const real dx = ex - cx, dy = ey - cy;
  const real c = std::cos(angle), s = std::sin(angle);
  const real u = (c * dx + s * dy) / as, w = (-s * dx + c * dy) / bs;
  return std::sqrt(u * u + w * w);
}

// Rectangle corners, order rear-left, front-left, front-right, rear-right.
inline std::array<std::array<real, 2>, 4> box(real x, real y, real th, real lf, real lr, real w) {
  const real c = std::cos(th), s = std::sin(th);
  const real lon[4] = {-lr, lf, lf, -lr};
  const real lat[4] = {w / 2, w / 2, -w / 2, -w / 2};
  std::array<std::array<real, 2>, 4> out{};
  for (int i = 0; i < 4; ++i)
    out[i] = {x + lon[i] * c - lat[i] * s, y + lon[i] * s + lat[i] * c};
  return out;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(gen); }
};

}  // namespace testref
