#include <random>

#include "common.hpp"
#include "doctest.h"
#include "heis/fock.hpp"

using namespace heis;

TEST_SUITE("fock") {
  TEST_CASE("graded indices count and order") {
    auto idx = graded_indices(2, 3);
    CHECK(idx.size() == 10);  // C(3 + 2, 2)
    for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1][0] + idx[i - 1][1] <= idx[i][0] + idx[i][1]);
    TruncatedBasis b(2, 3, 1.0);
    CHECK(b.find({1, 2}) >= 0);
    CHECK(b.find({2, 2}) == -1);
  }

  TEST_CASE("unitarity on the interior block") {
    for (double l : {0.5, -1.0, 2.0}) {
      // levels <= 16 with a 32-level margin: nothing leaks past the truncation
      TruncatedBasis b(1, 48, l);
      Mat M = rep_matrix(HPoint(0.2, -0.3, 0.4), b);
      CHECK(unitarity_defect(M, b, 32) < 1e-8);
    }
  }

  TEST_CASE("rep_matrix of the inverse is the adjoint") {
    std::mt19937_64 rng(5);
    for (double l : {0.7, -1.5}) {
      TruncatedBasis b(1, 16, l);
      for (int k = 0; k < 5; ++k) {
        auto w = heis::test::random_point(rng, 1, 0.8);
        Mat A = rep_matrix(group_inv(w), b), B = rep_matrix(w, b).adjoint();
        CHECK((A - B).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }

  TEST_CASE("rep_matrix along the centre is the phase e^{i lambda s}") {
    TruncatedBasis b(1, 8, -1.3);
    Mat M = rep_matrix(HPoint(0.0, 0.0, 0.7), b);
    CHECK((M - std::exp(cplx(0, -1.3 * 0.7)) * Mat::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("D_lambda is diagonal with eigenvalues 4|lambda|(2|alpha| + d)") {
    for (int d : {1, 2}) {
      TruncatedBasis b(d, 10, -0.8);
      auto L = ladder_matrices(b);
      Mat S = Mat::Zero(b.dim(), b.dim());
      for (int j = 0; j < d; ++j) S += L.Q[j] * L.Qbar[j] + L.Qbar[j] * L.Q[j];
      Mat D = dlambda_matrix(b);
      for (int i = 0; i < b.dim(); ++i) {
        CHECK(D(i, i).real() == doctest::Approx(dlambda_eigen(-0.8, b.degree(i), d)));
        if (b.degree(i) < 10) CHECK(std::abs(-2.0 * S(i, i) - D(i, i)) < 1e-12);
      }
    }
  }

  TEST_CASE("ladder operators satisfy the adjoint relation") {
    TruncatedBasis b(2, 6, 1.1);
    auto L = ladder_matrices(b);
    const cplx I(0, 1);
    for (int j = 0; j < 2; ++j) CHECK(((-I * L.Q[j]).adjoint() - (-I * L.Qbar[j])).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("ladder commutation with the representation") {
    for (double l : {0.6, -1.2}) {
      auto r = check_ladder_commutation(HPoint(0.2, 0.1, 0.3), TruncatedBasis(1, 12, l), 1e-3);
      CHECK(r.max() < 1e-4);
    }
  }

  TEST_CASE("Hilbert-Schmidt submultiplicativity") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
      Mat A = Mat::Random(12, 12), B = Mat::Random(12, 12);
      CHECK(hs_norm(B * A) <= op_norm(B) * hs_norm(A) * (1 + 1e-12));
      CHECK(hs_norm(A * B) <= hs_norm(A) * op_norm(B) * (1 + 1e-12));
    }
  }

  TEST_CASE("functional calculus is diagonal") {
    TruncatedBasis b(1, 5, 2.0);
    Mat F = functional_calculus([](double x) { return cplx(std::sqrt(1 + x)); }, b);
    for (int i = 0; i <= 5; ++i) CHECK(F(i, i).real() == doctest::Approx(std::sqrt(1 + 8.0 * (2 * i + 1))));
  }
}
