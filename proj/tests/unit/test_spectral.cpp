#include <numbers>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "heis/spectral.hpp"

using namespace heis;

namespace {
GridSpec small_grid(int n = 40, double L = 5.0) {
  GridSpec g;
  g.Lx = g.Ly = g.Ls = L;
  g.nx = g.ny = g.ns = n;
  return g;
}
}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("Plancherel constant and lambda grid weights") {
    CHECK(LambdaGrid::plancherel_constant(1) == doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi)));
    auto L = LambdaGrid::geometric(64, 1e-3, 8.0);
    CHECK(L.size() == 128);
    // int_{-8}^{8} |l| e^{-l^2} dl = 1 - e^{-64}
    double acc = 0;
    for (std::size_t k = 0; k < L.size(); ++k) acc += L.weights[k] * std::exp(-L.nodes[k] * L.nodes[k]);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("Gaussian transform matches its closed form") {
    // h = 0.25 leaves 7e-5 at |lambda| = 4, m = 11; h = 5/32 is at 3e-11
    auto g = small_grid(64);
    auto L = LambdaGrid::geometric(12, 1e-2, 4.0);
    auto F = gft(GridFunction::sample3(g, heis::test::gauss), L, 12);
    for (std::size_t k = 0; k < L.size(); ++k) {
      double a = std::abs(L.nodes[k]);
      for (int m = 0; m <= 12; ++m) {
        double ex = std::pow(std::numbers::pi, 1.5) * std::exp(-a * a / 4) * std::pow((1 - a) / (1 + a), m) / (1 + a);
        CHECK(std::abs(F.mats[k](m, m) - ex) < 1e-6);
      }
    }
  }

  TEST_CASE("Plancherel polarization") {
    auto g = small_grid();
    auto L = LambdaGrid::geometric(64, 1e-3, 8.0);
    auto f = GridFunction::sample3(g, heis::test::gauss);
    auto h = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-(x - 0.3) * (x - 0.3) - y * y - 2 * s * s), 0.2 * y); });
    auto F = gft(f, L, 24), H = gft(h, L, 24);
    cplx lhs = inner(f, h), rhs = F.plancherel_inner(H);
    CHECK(std::abs(lhs - rhs) < 2e-2 * l2_norm(f) * l2_norm(h));
  }

  TEST_CASE("HS Cauchy-Schwarz on random spectral families") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> G;
    auto L = LambdaGrid::geometric(8, 1e-2, 4.0);
    SpectralFunction A(L, 1, 6), B(L, 1, 6);
    for (auto* S : {&A, &B})
      for (auto& M : S->mats)
        for (int i = 0; i < 7; ++i)
          for (int j = 0; j < 7; ++j) M(i, j) = cplx(G(rng), G(rng));
    CHECK(std::abs(A.plancherel_inner(B)) <= std::sqrt(A.plancherel_norm2() * B.plancherel_norm2()));
  }

  TEST_CASE("convolution theorem") {
    // convolve interpolates the shifted factor, so the defect is O(h^2)
    auto defect = [](int n) {
      auto g = small_grid(n, 3.0);
      auto f = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-2 * (x - 0.3) * (x - 0.3) - 2 * y * y - 2 * s * s)); });
      auto h = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-2 * x * x - 2 * (y + 0.3) * (y + 0.3) - 3 * s * s)); });
      auto L = LambdaGrid::geometric(4, 0.2, 1.5);
      auto F = gft(f, L, 8), H = gft(h, L, 8), FH = gft(convolve(f, h), L, 8);
      double err = 0, scale = 0;
      for (std::size_t k = 0; k < L.size(); ++k) {
        Mat P = F.mats[k] * H.mats[k];
        err = std::max(err, (FH.mats[k] - P).topLeftCorner(5, 5).cwiseAbs().maxCoeff());
        scale = std::max(scale, P.cwiseAbs().maxCoeff());
      }
      return err / scale;
    };
    double e16 = defect(16), e20 = defect(20);
    CHECK(e16 < 4e-2);
    CHECK(e20 / e16 < 0.75);  // (16/20)^2 = 0.64
  }

  TEST_CASE("the Laplacian acts diagonally on a radial function") {
    auto g = small_grid(48, 5.0);
    auto L = LambdaGrid::geometric(12, 1e-2, 4.0);
    auto f = GridFunction::sample3(g, heis::test::gauss);
    auto F = gft(f, L, 12);
    auto lap = kohn_laplacian(f);
    lap *= -1.0;
    auto G = gft(lap, L, 12);
    auto D = spectral_derivative(F, SpecOp::MinusLaplacian);
    double err = 0, scale = 0;
    for (std::size_t k = 0; k < L.size(); ++k) {
      err = std::max(err, (G.mats[k] - D.mats[k]).cwiseAbs().maxCoeff());
      scale = std::max(scale, D.mats[k].cwiseAbs().maxCoeff());
      for (int m = 0; m <= 12; ++m)
        CHECK(std::abs(D.mats[k](m, m) - F.mats[k](m, m) * dlambda_eigen(L.nodes[k], m, 1)) < 1e-12 * (1 + scale));
    }
    CHECK(err < 2e-2 * scale);
  }

  TEST_CASE("radial fast path and inversion") {
    auto g = small_grid();
    auto L = LambdaGrid::geometric(48, 1e-3, 8.0);
    auto f = GridFunction::sample3(g, heis::test::gauss);
    CHECK(radial_defect(f) < 1e-12);
    auto F = gft(f, L, 24);
    auto R = gft_radial(f, L, 24);
    for (std::size_t k = 0; k < L.size(); ++k)
      for (int m = 0; m <= 24; ++m) CHECK(std::abs(R.R[k][m] - F.mats[k](m, m)) < 1e-6);
    auto fi = inverse_gft(F, g);
    CHECK(relative_sup(fi, f, false) < 5e-2);
    auto pts = inverse_gft_points(F, {HPoint(0.0, 0.0, 0.0), HPoint(0.5, -0.3, 0.2)});
    CHECK(std::abs(pts[0] - 1.0) < 5e-2);
    CHECK(std::abs(pts[1] - heis::test::gauss(0.5, -0.3, 0.2)) < 5e-2);
  }

  TEST_CASE("non-radial input is rejected by the radial path") {
    auto g = small_grid(16, 3.0);
    auto f = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-(x - 1) * (x - 1) - y * y - s * s)); });
    CHECK_THROWS(gft_radial(f, LambdaGrid::geometric(4, 0.1, 1.0), 4));
  }
}
