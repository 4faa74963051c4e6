#include "doctest.h"
#include "heis/mehler.hpp"
#include "heis/weyl.hpp"

using namespace heis;

TEST_SUITE("mehler") {
  TEST_CASE("Mehler diagonal from the quadrature Weyl matrix") {
    for (double t : {0.05, 0.1, 0.5}) {
      Mat A = weyl_matrix([&](double x, double y) { return cplx(std::exp(-(x * x + y * y) * std::tanh(t)) / std::cosh(t)); }, 12);
      for (int n = 0; n <= 10; ++n) CHECK(std::abs(A(n, n) - std::exp(-t * (2 * n + 1))) < 1e-8);
    }
  }

  TEST_CASE("heat shell series reproduces the closed-form symbol") {
    for (double t : {0.1, 0.5}) {
      MehlerSymbol m(heat_profile(t));
      for (double x : {0.01, 0.5, 2.0, 10.0}) CHECK(std::abs(m(x) - std::exp(-x * std::tanh(t)) / std::cosh(t)) < 1e-6);
    }
  }

  TEST_CASE("radial eigenvalues from the Laguerre formula") {
    auto ev = radial_eigenvalues([](double x) { return cplx(x); }, 6);  // xi^2 + eta^2 -> 2n + 1
    for (int n = 0; n <= 6; ++n) CHECK(std::abs(ev[n] - double(2 * n + 1)) < 1e-10);
  }

  TEST_CASE("Bessel symbol has the right eigenvalues") {
    auto m = make_m_mu(1.0);
    auto ev = radial_eigenvalues(m, 8);
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(ev[n] - 2.0 * std::sqrt(2.0 * n + 2.0)) < 1e-5 * (2 * n + 2));
    auto m2 = make_m_mu(2.0);  // exact polynomial: 4 (1 + x)
    CHECK(m2(3.0).real() == doctest::Approx(16.0));
  }
}
