#include <numbers>

#include "doctest.h"
#include "heis/special.hpp"

using namespace heis;

TEST_SUITE("special") {
  TEST_CASE("Hermite functions are orthonormal under Gauss-Hermite") {
    const auto& gh = gauss_hermite_cached(60);
    for (int m = 0; m <= 20; m += 3)
      for (int n = 0; n <= 20; n += 4) {
        double acc = 0;
        for (std::size_t i = 0; i < gh.size(); ++i) acc += gh.fweights[i] * hermite_eval(m, gh.nodes[i]) * hermite_eval(n, gh.nodes[i]);
        CHECK(acc == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-10));
      }
  }

  TEST_CASE("hermite_all agrees with hermite_eval") {
    double out[31];
    hermite_all(30, 1.7, out);
    for (int n = 0; n <= 30; ++n) CHECK(out[n] == doctest::Approx(hermite_eval(n, 1.7)).epsilon(1e-12));
  }

  TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    auto q = gauss_legendre(8);
    double acc = 0;
    for (std::size_t i = 0; i < q.size(); ++i) acc += q.weights[i] * std::pow(q.nodes[i], 14);
    CHECK(acc == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
    auto c = composite_gl(0.0, std::numbers::pi, 4, 16);
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c.weights[i] * std::sin(c.nodes[i]);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("Laguerre functions") {
    double out[11];
    laguerre_fn_all(10, 0.7, out);
    for (int n = 0; n <= 10; ++n) CHECK(out[n] == doctest::Approx((n % 2 ? -1 : 1) * laguerre_eval(n, 0.0, 1.4) * std::exp(-0.7)).epsilon(1e-12));
    CHECK(laguerre_eval(2, 0.0, 1.0) == doctest::Approx(-0.5));
  }

  TEST_CASE("smooth step is exact outside (0, 1), monotone, and symmetric") {
    CHECK(smooth_step(-0.1) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(1.3) == 1.0);
    double prev = 0;
    for (int i = 1; i < 1000; ++i) {
      double x = i / 1000.0, v = smooth_step(x);
      CHECK(v >= prev);
      CHECK(v + smooth_step(1 - x) == doctest::Approx(1.0).epsilon(1e-14));
      prev = v;
    }
    CHECK(cutoff_theta(0.9) == 1.0);
    CHECK(cutoff_theta(2.0) == 0.0);
  }

  TEST_CASE("binomial") {
    CHECK(binomial(10, 3) == 120.0);
    CHECK(binomial(5, 0) == 1.0);
  }
}
