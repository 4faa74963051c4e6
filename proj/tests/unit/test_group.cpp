#include <random>

#include "common.hpp"
#include "doctest.h"
#include "heis/grid.hpp"

using namespace heis;
using heis::test::max_coord_diff;
using heis::test::random_point;

TEST_SUITE("group") {
  TEST_CASE("group law matches the explicit formula") {
    HPoint a(1.0, 2.0, 3.0), b(-0.5, 0.25, 1.0);
    HPoint c = group_mul(a, b);
    CHECK(c.x[0] == 0.5);
    CHECK(c.y[0] == 2.25);
    // s + s' - 2 x y' + 2 y x'
    CHECK(c.s == doctest::Approx(3.0 + 1.0 - 2.0 * 1.0 * 0.25 + 2.0 * 2.0 * (-0.5)));
  }

  TEST_CASE("associativity, identity and inverse on random triples") {
    std::mt19937_64 rng(7);
    for (int d : {1, 2, 3}) {
      HPoint e = identity(d);
      for (int k = 0; k < 200; ++k) {
        auto a = random_point(rng, d, 3.0), b = random_point(rng, d, 3.0), c = random_point(rng, d, 3.0);
        CHECK(max_coord_diff(group_mul(group_mul(a, b), c), group_mul(a, group_mul(b, c))) < 1e-12);
        CHECK(max_coord_diff(group_mul(a, group_inv(a)), e) == 0.0);
        CHECK(max_coord_diff(group_mul(e, a), a) == 0.0);
      }
    }
  }

  TEST_CASE("the group is not commutative") {
    HPoint a(1.0, 0.0, 0.0), b(0.0, 1.0, 0.0);
    CHECK(max_coord_diff(group_mul(a, b), group_mul(b, a)) > 1.0);
  }

  TEST_CASE("homogeneous norm is homogeneous under dilations") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
      auto w = random_point(rng, 2, 2.0);
      for (double a : {0.25, 1.0, 3.5}) CHECK(homogeneous_norm(dilate(a, w)) == doctest::Approx(a * homogeneous_norm(w)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(dilate(0.0, HPoint(1, 1, 1)), std::invalid_argument);
  }

  TEST_CASE("distance is left invariant") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
      auto a = random_point(rng, 1, 2.0), b = random_point(rng, 1, 2.0), h = random_point(rng, 1, 2.0);
      CHECK(heisenberg_distance(group_mul(h, a), group_mul(h, b)) == doctest::Approx(heisenberg_distance(a, b)).epsilon(1e-10));
    }
  }

  TEST_CASE("convolution is not commutative") {
    GridSpec g;
    g.Lx = g.Ly = g.Ls = 3.0;
    g.nx = g.ny = g.ns = 12;
    auto f = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-2 * (x - 0.5) * (x - 0.5) - 2 * y * y - 2 * s * s)); });
    auto h = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-2 * x * x - 2 * (y - 0.5) * (y - 0.5) - 2 * s * s)); });
    auto fh = convolve(f, h), hf = convolve(h, f);
    CHECK(l2_norm(fh - hf) > 1e-3 * l2_norm(fh));
  }

  TEST_CASE("vector fields are left invariant") {
    // (X f) o tau_h = X (f o tau_h) with tau_h(w) = h w, checked at interior points
    GridSpec g;
    g.Lx = g.Ly = g.Ls = 3.0;
    g.nx = g.ny = g.ns = 49;
    HPoint h(0.3, -0.2, 0.1);
    auto fn = [](const HPoint& w) { return cplx(std::exp(-w.x[0] * w.x[0] - 0.5 * w.y[0] * w.y[0] - w.s * w.s), w.x[0] * 0.1); };
    auto f = GridFunction::sample(g, fn);
    auto fh = GridFunction::sample(g, [&](const HPoint& w) { return fn(group_mul(h, w)); });
    for (Field fld : {Field::X, Field::Y, Field::S}) {
      auto Xf = apply_vector_field(fld, 0, f);
      auto Xfh = apply_vector_field(fld, 0, fh);
      double err = 0, scale = 0;
      for (std::size_t i = 0; i < Xfh.size(); ++i) {
        HPoint w = Xfh.point(i);
        if (std::abs(w.x[0]) > 1.5 || std::abs(w.y[0]) > 1.5 || std::abs(w.s) > 1.0) continue;
        err = std::max(err, std::abs(Xfh[i] - Xf.interpolate(group_mul(h, w))));
        scale = std::max(scale, std::abs(Xfh[i]));
      }
      CHECK(err < 2e-2 * scale);
    }
  }

  TEST_CASE("Simpson quadrature integrates the Gaussian") {
    GridSpec g;
    g.nx = g.ny = g.ns = 41;
    auto f = GridFunction::sample3(g, heis::test::gauss);
    CHECK(haar_integral(f).real() == doctest::Approx(std::pow(std::numbers::pi, 1.5)).epsilon(1e-6));
  }

  TEST_CASE("grid validation") {
    GridSpec g;
    g.nx = 1;
    CHECK_THROWS(g.validate());
  }
}
