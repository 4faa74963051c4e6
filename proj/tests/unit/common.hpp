#pragma once

#include <cmath>
#include <random>

#include "heis/group.hpp"

namespace heis::test {

inline HPoint random_point(std::mt19937_64& rng, int d, double box) {
  std::uniform_real_distribution<double> U(-box, box);
  HPoint w;
  w.x.resize(d);
  w.y.resize(d);
  for (auto& v : w.x) v = U(rng);
  for (auto& v : w.y) v = U(rng);
  w.s = U(rng);
  return w;
}

inline double max_coord_diff(const HPoint& a, const HPoint& b) {
  double m = std::abs(a.s - b.s);
  for (int j = 0; j < a.dim(); ++j) m = std::max({m, std::abs(a.x[j] - b.x[j]), std::abs(a.y[j] - b.y[j])});
  return m;
}

inline cplx gauss(double x, double y, double s) { return std::exp(-x * x - y * y - s * s); }

}  // namespace heis::test
