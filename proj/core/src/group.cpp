#include "heis/group.hpp"

#include <cmath>
#include <stdexcept>

namespace heis {

HPoint::HPoint(std::vector<double> x_, std::vector<double> y_, double s_)
    : x(std::move(x_)), y(std::move(y_)), s(s_) {
  if (x.size() != y.size()) throw std::invalid_argument("HPoint: x and y differ in length");
}

HPoint::HPoint(double x_, double y_, double s_) : x{x_}, y{y_}, s(s_) {}

bool HPoint::valid() const {
  if (x.size() != y.size() || x.empty()) return false;
  for (size_t j = 0; j < x.size(); ++j)
    if (!std::isfinite(x[j]) || !std::isfinite(y[j])) return false;
  return std::isfinite(s);
}

HPoint identity(int d) { return HPoint(std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), 0.0); }

HPoint group_mul(const HPoint& a, const HPoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("group_mul: dimension mismatch");
  HPoint r = a;
  double twist = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    r.x[j] += b.x[j];
    r.y[j] += b.y[j];
    twist += -2.0 * a.x[j] * b.y[j] + 2.0 * a.y[j] * b.x[j];
  }
  r.s = a.s + b.s + twist;
  return r;
}

HPoint group_inv(const HPoint& w) {
  HPoint r = w;
  for (auto& v : r.x) v = -v;
  for (auto& v : r.y) v = -v;
  r.s = -r.s;
  return r;
}

HPoint dilate(double a, const HPoint& w) {
  if (!(a > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
  HPoint r = w;
  for (auto& v : r.x) v *= a;
  for (auto& v : r.y) v *= a;
  r.s *= a * a;
  return r;
}

double homogeneous_norm(const HPoint& w) {
  double z2 = 0.0;
  for (int j = 0; j < w.dim(); ++j) z2 += w.x[j] * w.x[j] + w.y[j] * w.y[j];
  return std::pow(z2 * z2 + w.s * w.s, 0.25);
}

double heisenberg_distance(const HPoint& a, const HPoint& b) {
  return homogeneous_norm(group_mul(group_inv(a), b));
}

}  // namespace heis
