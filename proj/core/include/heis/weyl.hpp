#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "heis/fock.hpp"

namespace heis {

// ---- polynomial symbols on R^{2d}: variables xi_1..xi_d, eta_1..eta_d ----
class Poly {
 public:
  using Exp = std::vector<int>;  // length 2d

  explicit Poly(int d = 1) : d_(d) {}
  static Poly constant(int d, cplx c);
  static Poly xi(int d, int j);
  static Poly eta(int d, int j);
  static Poly monomial(const Exp& e, cplx c);

  int d() const { return d_; }
  const std::map<Exp, cplx>& terms() const { return terms_; }
  int degree() const;
  bool is_zero(double tol = 0.0) const;
  cplx eval(const std::vector<double>& xi, const std::vector<double>& eta) const;
  cplx eval1(double xi, double eta) const { return eval({xi}, {eta}); }
  Poly derivative(int var, int order = 1) const;  // var in [0, 2d)
  Poly conj() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(cplx c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(cplx c, Poly a) { return a *= c; }
  friend Poly operator*(const Poly& a, const Poly& b);
  double max_abs_diff(const Poly& o) const;
  std::string str() const;

 private:
  void add(const Exp& e, cplx c);
  int d_;
  std::map<Exp, cplx> terms_;
};

// a # b by the terminating bidifferential expansion.
Poly moyal_poly(const Poly& a, const Poly& b);
Poly poisson_bracket(const Poly& a, const Poly& b);

// ---- Hermite-basis matrices (d = 1, levels 0..N) ----
Mat xi_hat(int N);   // multiplication by xi
Mat eta_hat(int N);  // (1/i) d/dxi
// <h_m, op^w(p) h_n>, computed in an enlarged basis so the truncation is exact.
Mat weyl_matrix_poly(const Poly& p, int N);
// <h_m, op^w(c) h_n> by product Gauss-Hermite quadrature against the Wigner functions.
Mat weyl_matrix(const std::function<cplx(double, double)>& c, int N, int extra_nodes = 40);
// Weyl symbol of |h_n><h_m|, i.e. W_{mn}(xi, eta) = int h_m(xi + t/2) h_n(xi - t/2) e^{i t eta} dt.
cplx wigner_mn(int m, int n, double xi, double eta);
// Eigenvalues of op^w(r(xi^2 + eta^2)) on levels 0..N: (-1)^n int_0^inf r(x) L_n(2x) e^{-x} dx.
std::vector<cplx> radial_eigenvalues(const std::function<cplx(double)>& r, int N);

// ---- kernels on a uniform grid (d = 1) ----
struct WeylGrid {
  int n = 256;
  double h = 0.1;
  double coord(int i) const { return (i - 0.5 * (n - 1)) * h; }
  double mid(int s) const { return coord(0) + 0.5 * s * h; }  // (xi_i + xi_j) / 2 with s = i + j
  double eta_max() const;
};

struct WeylKernel {
  WeylGrid grid;
  Mat k;  // k(xi_i, xi_j)
};

using PhaseSymbol = std::function<cplx(double, double)>;

WeylKernel weyl_quantize(const PhaseSymbol& a, const WeylGrid& g);
std::vector<cplx> apply_kernel(const WeylKernel& K, const std::vector<cplx>& u);
std::vector<cplx> apply_weyl(const PhaseSymbol& a, const WeylGrid& g, const std::vector<cplx>& u);
// exact backend for polynomial symbols (spectral differentiation on the grid)
std::vector<cplx> apply_weyl(const Poly& p, const WeylGrid& g, const std::vector<cplx>& u);
// samples a(mid(s), eta_e), s = 0..2n-2
Mat symbol_from_kernel(const WeylKernel& K, const std::vector<double>& etas);
// Symbol of op^w(a) op^w(b) on midpoints x etas.
Mat moyal_fft(const PhaseSymbol& a, const PhaseSymbol& b, const WeylGrid& g, const std::vector<double>& etas);

// sup over a box of (1 + xi^2 + eta^2)^{(|beta| - mu)/2} |d^beta a|, |beta| <= n (finite differences).
struct SeminormReport {
  double value = 0.0;
  bool attained_on_boundary = false;  // sup sits on the box edge; box may be too small
};
SeminormReport symbol_seminorm(const PhaseSymbol& a, int n, double mu, double box = 20.0, int samples = 81);
// Gain factor of the harmonic-oscillator metric.
inline double gain_factor(double xi, double eta) { return 1.0 + xi * xi + eta * eta; }

}  // namespace heis
