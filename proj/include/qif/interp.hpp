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

#pragma once

#include <span>
#include <vector>

namespace qif {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes) over a uniform grid t0, t0+dt, ..., t0+(n-1)dt.
///
/// The interpolant is C1, passes through every knot exactly and never
/// overshoots the data between knots, so |f(t)| <= max|y_k| holds on the
/// whole interval. Outside the grid it returns 0 (compact support).
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(double t0, double dt, std::vector<double> values);

  double operator()(double t) const { return value(t); }
  double value(double t) const;
  double derivative(double t) const;

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double t_end() const { return t0_ + dt_ * static_cast<double>(y_.size() - 1); }
  std::size_t size() const { return y_.size(); }
  std::span<const double> values() const { return y_; }
  /// Knot slopes; these are the exact derivatives of the interpolant at the knots.
  std::span<const double> slopes() const { return d_; }

 private:
  // Locates the interval containing t; returns false outside [t0, t_end].
  bool locate(double t, std::size_t& k, double& u) const;

  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace qif
