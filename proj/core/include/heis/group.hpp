#pragma once

#include <complex>
#include <vector>

namespace heis {

using cplx = std::complex<double>;

// A point (x, y, s) of H^d. z_j = x_j + i y_j is derived, never stored.
struct HPoint {
  std::vector<double> x, y;
  double s = 0.0;

  HPoint() = default;
  HPoint(std::vector<double> x_, std::vector<double> y_, double s_);
  // d = 1 shorthand
  HPoint(double x_, double y_, double s_);

  int dim() const { return static_cast<int>(x.size()); }
  cplx z(int j) const { return {x[j], y[j]}; }
  bool valid() const;
};

HPoint identity(int d);
HPoint group_mul(const HPoint& a, const HPoint& b);
HPoint group_inv(const HPoint& w);
HPoint dilate(double a, const HPoint& w);  // throws for a <= 0
double homogeneous_norm(const HPoint& w);
double heisenberg_distance(const HPoint& a, const HPoint& b);

}  // namespace heis
