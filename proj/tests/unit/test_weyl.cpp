#include <random>

#include "doctest.h"
#include "heis/special.hpp"
#include "heis/weyl.hpp"

using namespace heis;

namespace {
Poly random_poly(std::mt19937_64& rng, int maxdeg) {
  std::uniform_int_distribution<int> C(-3, 3), D(0, maxdeg);
  Poly p(1);
  for (int k = 0; k < 5; ++k) {
    int i = D(rng), j = D(rng);
    if (i + j <= maxdeg) p += Poly::monomial({i, j}, cplx(C(rng), C(rng)));
  }
  return p;
}
}  // namespace

TEST_SUITE("weyl") {
  TEST_CASE("Moyal product of the coordinates") {
    Poly x = Poly::xi(1, 0), y = Poly::eta(1, 0);
    CHECK(moyal_poly(x, y).max_abs_diff(x * y + Poly::constant(1, cplx(0, 0.5))) == 0.0);
    CHECK(moyal_poly(y, x).max_abs_diff(x * y - Poly::constant(1, cplx(0, 0.5))) == 0.0);
  }

  TEST_CASE("Moyal associativity on polynomials") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 30; ++k) {
      Poly a = random_poly(rng, 3), b = random_poly(rng, 3), c = random_poly(rng, 3);
      CHECK(moyal_poly(moyal_poly(a, b), c).max_abs_diff(moyal_poly(a, moyal_poly(b, c))) == 0.0);
    }
  }

  TEST_CASE("op^w is a homomorphism for the Moyal product") {
    std::mt19937_64 rng(23);
    const int N = 10;
    for (int k = 0; k < 10; ++k) {
      Poly a = random_poly(rng, 3), b = random_poly(rng, 2);
      int big = N + 8;
      Mat P = (weyl_matrix_poly(a, big) * weyl_matrix_poly(b, big)).topLeftCorner(N + 1, N + 1);
      CHECK((weyl_matrix_poly(moyal_poly(a, b), N) - P).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("commutator with a degree-1 symbol is (1/i) op of the Poisson bracket") {
    std::mt19937_64 rng(29);
    const cplx I(0, 1);
    const int N = 10, big = N + 8;
    for (int k = 0; k < 10; ++k) {
      Poly a = random_poly(rng, 3);
      Poly b = cplx(2.0) * Poly::xi(1, 0) - cplx(0.5) * Poly::eta(1, 0) + Poly::constant(1, 1.0);
      Mat A = weyl_matrix_poly(a, big), B = weyl_matrix_poly(b, big);
      Mat C = (A * B - B * A).topLeftCorner(N + 1, N + 1);
      CHECK((C - (-I) * weyl_matrix_poly(poisson_bracket(a, b), N)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("quadrature Weyl matrices agree with the exact polynomial ones") {
    Mat A = weyl_matrix([](double x, double y) { return cplx(x * x + y * y, x * y); }, 12);
    Poly x = Poly::xi(1, 0), y = Poly::eta(1, 0);
    Mat B = weyl_matrix_poly(x * x + y * y + cplx(0, 1) * x * y, 12);
    CHECK((A - B).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(B(3, 3).real() == doctest::Approx(7.0));  // xi^2 + eta^2 on h_3
  }

  TEST_CASE("real symbols give self-adjoint kernels; conj(a) gives the adjoint") {
    WeylGrid g;
    g.n = 96;
    g.h = 0.15;
    auto a = [](double x, double y) { return cplx(std::exp(-x * x - 0.5 * y * y), 0.3 * x * std::exp(-y * y)); };
    auto K = weyl_quantize(a, g);
    auto Kb = weyl_quantize([&](double x, double y) { return std::conj(a(x, y)); }, g);
    CHECK((Kb.k - K.k.adjoint()).cwiseAbs().maxCoeff() < 1e-10 * K.k.cwiseAbs().maxCoeff());
  }

  TEST_CASE("Wigner functions integrate to the overlap") {
    // int W_mn = 2 pi delta_mn
    const auto& gh = gauss_hermite_cached(80);
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        cplx acc = 0;
        for (std::size_t i = 0; i < gh.size(); ++i)
          for (std::size_t j = 0; j < gh.size(); ++j) acc += gh.fweights[i] * gh.fweights[j] * wigner_mn(m, n, gh.nodes[i], gh.nodes[j]);
        CHECK(std::abs(acc - (m == n ? 2 * std::numbers::pi : 0.0)) < 1e-8);
      }
  }

  TEST_CASE("Gaussian Moyal product by FFT") {
    WeylGrid g;
    g.n = 256;
    g.h = 0.1;
    double c = 0.5;
    auto gs = [&](double X, double Y) { return cplx(std::exp(-c * (X * X + Y * Y))); };
    std::vector<double> etas;
    for (int k = -10; k <= 10; ++k) etas.push_back(k * 0.3);
    Mat S = moyal_fft(gs, gs, g, etas);
    double t = std::atanh(c), err = 0;
    for (int s = 0; s < 2 * g.n - 1; ++s) {
      double X = g.mid(s);
      if (std::abs(X) > 3) continue;
      for (std::size_t k = 0; k < etas.size(); ++k) {
        double r2 = X * X + etas[k] * etas[k];
        double ex = std::cosh(t) * std::cosh(t) / std::cosh(2 * t) * std::exp(-std::tanh(2 * t) * r2);
        err = std::max(err, std::abs(S(s, k) - ex));
      }
    }
    CHECK(err < 1e-8);
  }

  TEST_CASE("seminorm of an order-0 symbol is finite and interior") {
    auto r = symbol_seminorm([](double x, double y) { return cplx(std::exp(-(x * x + y * y))); }, 2, 0.0);
    CHECK(std::isfinite(r.value));
    CHECK_FALSE(r.attained_on_boundary);
  }
}
