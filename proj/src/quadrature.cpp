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

#include "pdrive/quadrature.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <vector>

namespace pdrive::oracle {

namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kXgk[1], kXgk[3], kXgk[5] and the center.
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Interval {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadResult integrate_scalar(const std::function<double(double)>& f, double lo, double hi,
                            double abs_tol, double rel_tol, int max_intervals) {
  if (!(abs_tol > 0.0 || rel_tol > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "quadrature tolerance must be positive");
  if (lo == hi) return {};
  std::priority_queue<Interval> heap;
  Interval first = gauss_kronrod(f, lo, hi);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int count = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals)
      throw Error(ErrorCode::kNoConvergence, "quadrature hit the subdivision cap");
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Interval left = gauss_kronrod(f, worst.lo, mid);
    const Interval right = gauss_kronrod(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift from incremental updates.
  double sum = 0.0;
  double err = 0.0;
  std::vector<Interval> parts;
  parts.reserve(heap.size());
  while (!heap.empty()) {
    parts.push_back(heap.top());
    heap.pop();
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& p : parts) {
    sum += p.value;
    err += p.error;
  }
  return {sum, err, count};
}

double gaussian_density(double omega, double mean, double variance) {
  const double d = omega - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double truncation_normalizer(double mean, double variance) {
  // 1 - Psi(-m / s) = Psi(m / s) = erfc(-m / (s sqrt 2)) / 2
  return 0.5 * std::erfc(-mean / std::sqrt(2.0 * variance));
}

double truncated_density(double omega, double mean, double variance, TruncationForm form) {
  if (omega < 0.0) return 0.0;
  const double g = gaussian_density(omega, mean, variance);
  const double z = truncation_normalizer(mean, variance);
  return form == TruncationForm::kPrinted ? g / (std::sqrt(variance) * z) : g / z;
}

GridResult grid_minimize(const std::function<double(const Vec4&)>& f, const Vec4& center,
                         const Vec4& radius, int resolution) {
  if (resolution < 3)
    throw Error(ErrorCode::kInvalidArgument, "grid resolution must be at least 3");
  GridResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.spacing = 2.0 * radius / static_cast<double>(resolution - 1);
  std::array<int, 4> best_idx{};
  Vec4 p;
  for (int i0 = 0; i0 < resolution; ++i0) {
    p[0] = center[0] - radius[0] + i0 * best.spacing[0];
    for (int i1 = 0; i1 < resolution; ++i1) {
      p[1] = center[1] - radius[1] + i1 * best.spacing[1];
      for (int i2 = 0; i2 < resolution; ++i2) {
        p[2] = center[2] - radius[2] + i2 * best.spacing[2];
        for (int i3 = 0; i3 < resolution; ++i3) {
          p[3] = center[3] - radius[3] + i3 * best.spacing[3];
          const double val = f(p);
          if (val < best.value) {
            best.value = val;
            best.argmin = p;
            best_idx = {i0, i1, i2, i3};
          }
        }
      }
    }
  }
  best.boundary_hit = std::any_of(best_idx.begin(), best_idx.end(), [&](int i) {
    return i == 0 || i == resolution - 1;
  });
  return best;
}

}  // namespace pdrive::oracle
