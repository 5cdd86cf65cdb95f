// Copyright 2026 The QIF Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qif/interp.hpp"

#include <cmath>

#include "qif/error.hpp"

namespace qif {
namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// One-sided three-point end slope, clipped to stay shape preserving.
double end_slope(double d0, double d1) {
  double s = (3.0 * d0 - d1) / 2.0;
  if (sign(s) != sign(d0)) return 0.0;
  if (sign(d0) != sign(d1) && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
  return s;
}

}  // namespace

MonotoneCubic::MonotoneCubic(double t0, double dt, std::vector<double> values)
    : t0_(t0), dt_(dt), y_(std::move(values)) {
  if (!(dt_ > 0.0)) throw InvalidInput("interpolation grid step must be positive");
  if (y_.size() < 2) throw InvalidInput("interpolation needs at least two knots");
  const std::size_t n = y_.size();
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) secant[k] = (y_[k + 1] - y_[k]) / dt_;

  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = secant[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double a = secant[k - 1];
    const double b = secant[k];
    if (a * b <= 0.0) continue;
    d_[k] = 2.0 / (1.0 / a + 1.0 / b);
  }
  d_[0] = end_slope(secant[0], secant[1]);
  d_[n - 1] = end_slope(secant[n - 2], secant[n - 3]);
}

bool MonotoneCubic::locate(double t, std::size_t& k, double& u) const {
  const double s = (t - t0_) / dt_;
  const double last = static_cast<double>(y_.size() - 1);
  if (s < -1e-12 || s > last + 1e-12) return false;
  double whole = std::floor(s);
  double frac = s - whole;
  // Snap values that are a rounding error away from a knot.
  if (frac > 1.0 - 1e-10) {
    whole += 1.0;
    frac = 0.0;
  } else if (frac < 1e-10) {
    frac = 0.0;
  }
  if (whole < 0.0) whole = 0.0;
  if (whole >= last) {
    k = y_.size() - 2;
    u = 1.0;
    return true;
  }
  k = static_cast<std::size_t>(whole);
  u = frac;
  return true;
}

double MonotoneCubic::value(double t) const {
  std::size_t k;
  double u;
  if (!locate(t, k, u)) return 0.0;
  if (u == 0.0) return y_[k];
  if (u == 1.0) return y_[k + 1];
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * y_[k] + h10 * dt_ * d_[k] + h01 * y_[k + 1] + h11 * dt_ * d_[k + 1];
}

double MonotoneCubic::derivative(double t) const {
  std::size_t k;
  double u;
  if (!locate(t, k, u)) return 0.0;
  if (u == 0.0) return d_[k];
  if (u == 1.0) return d_[k + 1];
  const double u2 = u * u;
  const double dh00 = (6.0 * u2 - 6.0 * u) / dt_;
  const double dh10 = 3.0 * u2 - 4.0 * u + 1.0;
  const double dh01 = (-6.0 * u2 + 6.0 * u) / dt_;
  const double dh11 = 3.0 * u2 - 2.0 * u;
  return dh00 * y_[k] + dh10 * d_[k] + dh01 * y_[k + 1] + dh11 * d_[k + 1];
}

}  // namespace qif
