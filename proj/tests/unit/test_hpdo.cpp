#include "common.hpp"
#include "doctest.h"
#include "heis/hpdo.hpp"

using namespace heis;

namespace {
const HPoint e(0.0, 0.0, 0.0);

HeisenbergSymbol gaussian_radial() {
  auto chi = [](double l) { return l * l * std::exp(-l * l); };
  auto a = radial_symbol(
      "g",
      [=](double l, int n) {
        double c = std::abs(l);
        return cplx(chi(l) * std::pow((1 - c) / (1 + c), n) / (1 + c));
      },
      [=](double l, double x, double y) { return cplx(chi(l) * std::exp(-std::abs(l) * (x * x + y * y))); }, -100);
  a.sigma_fn = [=](const HPoint&, double l, double X, double Y) { return cplx(chi(l) * std::exp(-(X * X + Y * Y))); };
  return a;
}
}  // namespace

TEST_SUITE("hpdo") {
  TEST_CASE("built-in symbols reproduce the ladder and Laplacian matrices") {
    for (double l : {0.7, -1.3}) {
      TruncatedBasis b(1, 12, l);
      auto L = ladder_matrices(b);
      CHECK((builtin_symbol("Z").matrix_at(e, l, 12) - L.Q[0]).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((builtin_symbol("Zbar").matrix_at(e, l, 12) - L.Qbar[0]).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((builtin_symbol("minusLaplacian").matrix_at(e, l, 12) - dlambda_matrix(b)).cwiseAbs().maxCoeff() < 1e-11);
      Mat S = builtin_symbol("S").matrix_at(e, l, 12);
      CHECK(std::abs(S(3, 3) - cplx(0, -l)) < 1e-15);
      Mat B = builtin_symbol("besselPower", 1.0).matrix_at(e, l, 12);
      CHECK((B - functional_calculus([](double x) { return cplx(std::sqrt(1 + x)); }, b)).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS(builtin_symbol("nope"));
  }

  TEST_CASE("sigma rescaling is consistent with the pointwise symbol") {
    auto Z = builtin_symbol("Z");
    for (double l : {0.4, -2.0}) {
      double r = std::sqrt(std::abs(l)), sg = l > 0 ? 1 : -1;
      CHECK(std::abs(Z.sigma(e, l, 0.3, -0.2) - Z(e, l, sg * 0.3 / r, -0.2 / r)) < 1e-14);
    }
  }

  TEST_CASE("Fourier multiplier composition and adjoint") {
    auto a = builtin_symbol("Z"), b = builtin_symbol("besselPower", -1.0);
    for (double l : {0.5, -1.5}) {
      Mat A = a.matrix_at(e, l, 10), B = b.matrix_at(e, l, 10);
      CHECK((fm_compose(a, b).matrix_at(e, l, 10) - B * A).cwiseAbs().maxCoeff() < 1e-12);
      auto g = general_symbol("g", [](double ll, double x, double y) { return cplx(std::exp(-std::abs(ll) * x * x), y * std::exp(-y * y)); }, 0);
      Mat G = g.matrix_at(e, l, 10);
      CHECK((fm_adjoint(g).matrix_at(e, l, 10) - G.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("commutator symbols carry the expected orders") {
    auto a = builtin_symbol("besselPower", 1.0);
    auto cs = commutator_symbols(a);
    CHECK(cs.b1.order == 2.0);
    CHECK(cs.b2.order == 2.0);
    CHECK(cs.c1.order == 0.0);
    CHECK(cs.c2.order == 0.0);
    CHECK(cs.p.order == 1.0);
  }

  TEST_CASE("Fourier multipliers commute with the fields: b1 vanishes") {
    // a symbol of lambda alone is scalar on each level, so it commutes with Q
    auto a = multiplier_symbol("m", [](double l) { return cplx(std::exp(-l * l)); }, 0);
    auto cs = commutator_symbols(a);
    for (double l : {0.3, -1.1}) CHECK(cs.b1.matrix_at(e, l, 8).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("Op of the Gaussian symbol on the Gaussian: kernel and spectral paths agree") {
    auto a = gaussian_radial();
    KernelBox box;
    box.Lam = 5;
    box.Zm = 8;
    box.nl = 64;
    box.nz = 64;
    auto K = kernel_of(a, e, box);
    auto fpt = [](const HPoint& w) { return heis::test::gauss(w.x[0], w.y[0], w.s); };
    GridSpec g;
    g.Lx = g.Ly = g.Ls = 5;
    g.nx = g.ny = 32;
    g.ns = 48;
    auto L = LambdaGrid::geometric(48, 1e-3, 6.0);
    auto F = gft(GridFunction::sample(g, fpt), L, 24);
    auto v = op_apply_points(a, F, {e});
    cplx k = apply_kernel_h(K, fpt);
    CHECK(std::abs(v[0] - k) < 1e-3 * std::abs(k));
    // the symbol comes back from the kernel
    for (double l : {0.8, -1.5}) {
      double r = std::sqrt(std::abs(l)), sg = l > 0 ? 1 : -1;
      cplx s = symbol_from_kernel_h(K, l, sg * r * 0.3, r * -0.2);
      CHECK(std::abs(s - a.sigma(e, l, sg * r * 0.3, r * -0.2)) < 1e-6);
    }
  }

  TEST_CASE("order-normalized norms are bounded") {
    auto L = LambdaGrid::geometric(32, 1e-3, 16.0);
    for (std::string nm : {"Z", "Zbar", "X", "Y", "S", "minusLaplacian"}) {
      double n = order_normalized_norm(builtin_symbol(nm), L, 16);
      CHECK(std::isfinite(n));
      CHECK(n < 2.0);
    }
  }

  TEST_CASE("sigma smoothness at lambda = 0") {
    CHECK(sigma_smoothness_at_zero(builtin_symbol("Z")).smooth);
    auto a = multiplier_symbol("m", [](double l) { return cplx(std::pow(std::abs(l), 1.5)); }, 3);
    a.sigma_fn = [](const HPoint&, double l, double, double) { return cplx(std::pow(std::abs(l), 1.5)); };
    auto rep = sigma_smoothness_at_zero(a);
    CHECK_FALSE(rep.smooth);
    CHECK(rep.first_bad_order == 2);
  }

  TEST_CASE("reduced symbol coefficients reconstruct a trigonometric symbol") {
    // a~ = cos(xi) type symbols are not in the class, so test the plumbing on the ring itself: a = 1
    auto one = multiplier_symbol("one", [](double) { return cplx(1.0); }, 0);
    auto R = reduce_symbol(one, e, 0.7, 48, 1, 256);
    for (int p : {-1, 0, 1})
      for (auto [X, Y] : {std::pair{0.3, 0.5}, std::pair{-1.7, 0.9}, std::pair{2.5, -0.4}})
        CHECK(std::abs(R.partial_sum(p, X, Y) - reduced_ring(p, X, Y)) < 1e-3);
    auto fit = fit_decay(R, 0, 8, 48);
    CHECK(fit.exponent > 3.0);
  }

  TEST_CASE("reduce_symbol rejects positive order") {
    CHECK_THROWS(reduce_symbol(builtin_symbol("Z"), e, 1.0, 4, 1, 64));
  }
}
