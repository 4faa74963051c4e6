#include <random>

#include "common.hpp"
#include "doctest.h"
#include "heis/lp.hpp"

using namespace heis;

namespace {
SpectralFunction random_spectral(const LambdaGrid& L, int N, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G;
  SpectralFunction F(L, 1, N);
  for (auto& M : F.mats)
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) M(i, j) = cplx(G(rng), G(rng));
  return F;
}
double max_abs(const SpectralFunction& F) {
  double m = 0;
  for (const auto& M : F.mats) m = std::max(m, M.cwiseAbs().maxCoeff());
  return m;
}
}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("partition of unity and support gaps") {
    auto part = build_partition();
    auto r = validate_partition(part, 8, 20000);
    CHECK(r.max_sum_defect < 1e-12);
    CHECK(r.disjoint_gap2);
    CHECK(r.adjacent_overlap);
    CHECK(r.square_sum_min >= 0.5 - 1e-12);
    CHECK(r.square_sum_max <= 1.0 + 1e-12);
    CHECK(lambda_support_gap(part) == 2);
    // S_p telescopes
    for (double tau : {0.3, 5.0, 70.0, 900.0}) {
      double s = 0;
      for (int q = -1; q <= 2; ++q) s += part.block(q, tau);
      CHECK(s == doctest::Approx(part.low(3, tau)).epsilon(1e-14));
    }
  }

  TEST_CASE("blocks sum back to the data and are almost orthogonal") {
    auto L = LambdaGrid::geometric(16, 1e-2, 64.0);
    auto F = random_spectral(L, 12, 1);
    int pmax = max_block(F);
    SpectralFunction sum(L, 1, 12);
    for (int p = -1; p <= pmax; ++p) sum += lp_project(F, p);
    CHECK(max_abs(sum - F) < 1e-12);
    for (int p = -1; p <= pmax; ++p)
      for (int q = p + 2; q <= pmax; ++q) CHECK(max_abs(lp_project(lp_project(F, p), q)) == 0.0);
  }

  TEST_CASE("Delta_p commutes with the Laplacian exactly") {
    auto L = LambdaGrid::geometric(8, 1e-2, 16.0);
    auto F = random_spectral(L, 10, 2);
    for (int p : {-1, 0, 2}) {
      auto A = spectral_derivative(lp_project(F, p), SpecOp::MinusLaplacian);
      auto B = lp_project(spectral_derivative(F, SpecOp::MinusLaplacian), p);
      CHECK(max_abs(A - B) <= 1e-12 * max_abs(A));
    }
  }

  TEST_CASE("Lambda_r commutes with Fourier multipliers") {
    auto L = LambdaGrid::geometric(8, 1e-2, 16.0);
    auto F = random_spectral(L, 8, 3);
    auto a = builtin_symbol("Z");
    for (int r : {-1, 0, 1}) {
      auto A = op_apply_spectral(a, lambda_project(F, r));
      auto B = lambda_project(op_apply_spectral(a, F), r);
      CHECK(max_abs(A - B) <= 1e-13 * (1 + max_abs(A)));
    }
  }

  TEST_CASE("Bessel potentials shift the Besov index") {
    GridSpec g;
    g.Lx = g.Ly = g.Ls = 5.0;
    g.nx = g.ny = g.ns = 32;
    auto L = LambdaGrid::geometric(32, 1e-2, 16.0);
    auto F = gft(GridFunction::sample3(g, heis::test::gauss), L, 16);
    int pmax = max_block(F);
    for (double rho : {0.5, 1.0}) {
      auto G = spectral_derivative(F, SpecOp::BesselPower, 0, rho);
      double a = besov_norm(G, 1.0 - 2 * rho, 2, 2, pmax).value, b = besov_norm(F, 1.0, 2, 2, pmax).value;
      CHECK(a / b > 0.1);
      CHECK(a / b < 10.0);
    }
  }

  TEST_CASE("Bony pieces reconstruct the product") {
    GridSpec g;
    g.Lx = g.Ly = g.Ls = 4.0;
    g.nx = g.ny = 16;
    g.ns = 24;
    auto L = LambdaGrid::geometric(16, 1e-2, 8.0);
    auto U = gft(GridFunction::sample3(g, heis::test::gauss), L, 8);
    auto V = gft(GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-2 * x * x - y * y - s * s)); }), L, 8);
    int pm = max_block(U);
    auto B = bony_decompose(U, V, pm, g);
    CHECK(relative_sup(B.Tuv + B.Tvu + B.R, pointwise_product(B.u, B.v), false) < 1e-12);
    CHECK_THROWS(bony_decompose(U, V, 0, g));  // blocks above pmax carry energy
  }

  TEST_CASE("LP symbol eigenvalues and semiclassical limit") {
    auto part = build_partition();
    for (double rho : {0.5, 2.0, 5.0}) CHECK(std::abs(lp_phi(1e-9, rho, part, 0) - part.Rstar(rho)) < 1e-6);
    auto a = lp_symbol(1, part);
    HPoint e(0, 0, 0);
    Mat A = a.matrix_at(e, 0.3, 12);
    for (int n = 0; n <= 12; ++n) CHECK(std::abs(A(n, n) - part.block(1, 4 * 0.3 * (2 * n + 1))) < 1e-14);
  }

  TEST_CASE("I_p approaches Phi as p grows") {
    auto part = build_partition();
    auto Phi = [&](double t) { return part.Rstar(t); };
    double prev = 1e9;
    for (int p = 1; p <= 4; ++p) {
      int alpha = static_cast<int>(std::lround((1.5 * std::ldexp(1.0, 2 * p) - 1) / 2));
      double err = ip_compare(Phi, 1.0, 8.0, p, alpha, 1.0).error();
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("product estimate constant is stable under refinement") {
    auto constant = [](int n) {
      GridSpec g;
      g.Lx = g.Ly = g.Ls = 4.0;
      g.nx = g.ny = g.ns = n;
      auto f = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-0.5 * (x * x + y * y + s * s))); });
      auto h = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-(x - 0.5) * (x - 0.5) - y * y - 2 * s * s)); });
      double proxy = sup_norm(f) + sup_norm(apply_vector_field(Field::X, 0, f)) + sup_norm(apply_vector_field(Field::Y, 0, f));
      return sobolev_norm_int(pointwise_product(f, h), 1) / (proxy * sobolev_norm_int(h, 1));
    };
    double c1 = constant(32), c2 = constant(48);
    CHECK(std::abs(c2 - c1) / c1 < 0.1);
  }
}
