#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "heis/spectral.hpp"
#include "heis/weyl.hpp"

namespace heis {

// Symbols on H^1 x (R \ 0) x R^2, evaluated as a(w, lambda, xi, eta).
using HSymbolFn = std::function<cplx(const HPoint&, double, double, double)>;
using WFactor = std::function<cplx(const HPoint&)>;

// One separable piece b(w) c(lambda, xi, eta). The kind decides how the Hermite-basis
// matrix A_lambda of op^w(c(lambda, ., .)) is built.
struct SymbolTerm {
  enum class Kind { Multiplier, Polynomial, Radial, General, Matrix };
  Kind kind = Kind::General;
  WFactor wfac;                                  // empty means 1
  std::function<cplx(double)> mult;              // Multiplier: c(lambda)
  std::function<Poly(double)> poly;              // Polynomial: c(lambda, ., .) in xi, eta
  std::function<cplx(double, int)> radial;       // Radial: eigenvalue on oscillator level n
  std::function<cplx(double, double, double)> c;  // pointwise evaluator (all kinds where available)
  std::function<Mat(double, int)> matrix;        // Matrix: A_lambda directly

  cplx eval_c(double lambda, double xi, double eta) const;
  Mat build(double lambda, int N) const;
};

class HeisenbergSymbol {
 public:
  std::string name;
  double order = 0.0;
  std::vector<SymbolTerm> terms;
  // Optional sigma-side evaluator; otherwise sigma is obtained by rescaling a.
  HSymbolFn sigma_fn;

  bool w_independent() const;
  bool polynomial() const;  // every term polynomial (or scalar) in (xi, eta)
  cplx operator()(const HPoint& w, double lambda, double xi, double eta) const;
  // sigma(a)(w, lambda, X, Y) = a(w, lambda, sgn(lambda) X / sqrt|lambda|, Y / sqrt|lambda|)
  cplx sigma(const HPoint& w, double lambda, double X, double Y) const;
  // A_lambda(w) = sum_i b_i(w) A_i(lambda), cached per (term, lambda, N) for the w-free parts
  Mat matrix_at(const HPoint& w, double lambda, int N) const;
  Mat term_matrix(std::size_t i, double lambda, int N) const;

  HeisenbergSymbol& operator+=(const HeisenbergSymbol& o);
  HeisenbergSymbol scaled(cplx s) const;
  // drop cached matrices after editing `terms` in place
  void invalidate() { cache_ = std::make_shared<MatrixCache>(); }

  struct MatrixCache {
    std::shared_mutex mu;
    std::map<std::tuple<std::size_t, double, int>, Mat> mats;
  };

 private:
  mutable std::shared_ptr<MatrixCache> cache_ = std::make_shared<MatrixCache>();
};

HeisenbergSymbol operator+(HeisenbergSymbol a, const HeisenbergSymbol& b);

// ---- building blocks ----
HeisenbergSymbol multiplier_symbol(std::string name, std::function<cplx(double)> c, double order);
HeisenbergSymbol polynomial_symbol(std::string name, std::function<Poly(double)> p, double order);
HeisenbergSymbol radial_symbol(std::string name, std::function<cplx(double, int)> eig,
                               std::function<cplx(double, double, double)> c, double order);
HeisenbergSymbol general_symbol(std::string name, std::function<cplx(double, double, double)> c, double order);
// b(w) c(lambda, xi, eta)
HeisenbergSymbol with_w_factor(HeisenbergSymbol a, WFactor b);

// Names: Z, Zbar, X, Y, S, minusLaplacian, besselPower, homPower; `param` is mu or nu.
HeisenbergSymbol builtin_symbol(const std::string& name, double param = 0.0);
HeisenbergSymbol multiplication_symbol(WFactor b, std::function<cplx(double)> blam = {});
std::vector<std::string> builtin_names();

// ---- operators ----
// F(Op(a) f) for w-independent a.
SpectralFunction op_apply_spectral(const HeisenbergSymbol& a, const SpectralFunction& F);
// Op(a) f on the grid of f; separable w-dependence handled term by term.
struct OpConfig {
  LambdaGrid grid = LambdaGrid::geometric(128, 1e-3, 8.0);
  int N = 32;
  SpectralConfig spectral;
};
GridFunction op_apply(const HeisenbergSymbol& a, const GridFunction& f, const OpConfig& cfg = {});
GridFunction op_apply(const HeisenbergSymbol& a, const SpectralFunction& F, const GridSpec& target,
                      const SpectralConfig& cfg = {});
// Generic path: A_lambda(w) rebuilt per output point.
std::vector<cplx> op_apply_points(const HeisenbergSymbol& a, const SpectralFunction& F, const std::vector<HPoint>& pts,
                                  const SpectralConfig& cfg = {});

// ---- kernel and symbol ----
struct KernelBox {
  double Lam = 4.0;  // lambda in [-Lam, Lam]
  double Zm = 8.0;   // z, zeta in [-Zm, Zm]
  int nl = 128, nz = 64;
};
// k(w, w w~) sampled for w~ on the dual grid of the (lambda, z, zeta) box.
struct HKernel {
  HPoint w;
  std::vector<double> xt, yt, st;  // w~ axes
  std::vector<cplx> k;             // index (i * ny + j) * ns + l over (xt, yt, st)
  cplx at(int i, int j, int l) const { return k[(static_cast<std::size_t>(i) * yt.size() + j) * st.size() + l]; }
  double cell() const;  // volume element of the w~ grid
};
// k(w, w') = (1 / 2 pi^3) int e^{i lambda s~ + 2 i y~ z - 2 i x~ zeta} sigma(a)(w, lambda, z, zeta), w~ = w^{-1} w'
HKernel kernel_of(const HeisenbergSymbol& a, const HPoint& w, const KernelBox& box = {});
// Same kernel by the trace formula at a single pair.
cplx kernel_trace(const HeisenbergSymbol& a, const HPoint& w, const HPoint& wprime, const LambdaGrid& grid, int N);
// sigma(a)(w, lambda, xi, eta) = int e^{2i(y' xi - x' eta)} e^{i lambda s'} k(w, w (w')^{-1}) dw'
cplx symbol_from_kernel_h(const HKernel& K, double lambda, double xi, double eta);
// int k(w, w') f(w') dw' with f given pointwise.
cplx apply_kernel_h(const HKernel& K, const std::function<cplx(const HPoint&)>& f);

// ---- symbolic calculus ----
HeisenbergSymbol fm_compose(const HeisenbergSymbol& a, const HeisenbergSymbol& b);  // symbol of Op(a) Op(b)
HeisenbergSymbol fm_adjoint(const HeisenbergSymbol& a);

// Finite-difference helpers on symbols (4th order, step relative to the local scale).
cplx d_w(const HeisenbergSymbol& a, Field f, const HPoint& w, double lambda, double xi, double eta);
cplx d_xi(const HSymbolFn& a, const HPoint& w, double lambda, double xi, double eta, int order = 1);
cplx d_eta(const HSymbolFn& a, const HPoint& w, double lambda, double xi, double eta, int order = 1);
cplx d_lambda(const HSymbolFn& a, const HPoint& w, double lambda, double xi, double eta);

struct CommutatorSymbols {
  HeisenbergSymbol b1, b2, c1, c2, p;
};
// [Z, Op(a)] = Op(b1), [Zbar, Op(a)] = Op(b2), [X, Op(a)] ... with c1, c2 the order mu - 1 pieces
// and p the symbol of [i s~ , Op(a)] (multiplication by s~ relative to w).
CommutatorSymbols commutator_symbols(const HeisenbergSymbol& a);
// Z Op(a) (left) or Op(a) Z (right); same for Zbar.
HeisenbergSymbol left_compose_field(const HeisenbergSymbol& a, bool left, bool zbar);
// Op(a) (Id - Delta)^k: order raised by 2k.
HeisenbergSymbol compose_bessel_right(const HeisenbergSymbol& a, int k);
// g = -d_lambda a + (1 / 2 lambda)(eta d_eta + xi d_xi) a; sigma(g) = -d_lambda sigma(a).
HeisenbergSymbol s_mult_symbol(const HeisenbergSymbol& a);

// Moyal product of pointwise symbols up to second order in the expansion (exact for
// polynomials of degree <= 2 in either factor); derivatives by finite differences.
HSymbolFn moyal_expansion(const HSymbolFn& a, const HSymbolFn& b, int order = 2);

struct Expansion {
  std::vector<HSymbolFn> terms;  // terms[k]: order-k piece
  HSymbolFn sum() const;
};
// Symbol of Op(a) Op(b) to order <= 2.
Expansion asymptotic_compose(const HeisenbergSymbol& a, const HeisenbergSymbol& b, int order = 2);
// Symbol of Op(a)^* to order <= 2.
Expansion asymptotic_adjoint(const HeisenbergSymbol& a, int order = 2);

// ---- reduced symbols ----
struct ReducedSymbol {
  int kmax = 0, pmax = 0;
  // coef[p + 1][(k1 + kmax) * (2 kmax + 1) + (k2 + kmax)] for p = -1..pmax
  std::vector<std::vector<cplx>> coef;
  cplx at(int p, int k1, int k2) const {
    return coef[p + 1][static_cast<std::size_t>(k1 + kmax) * (2 * kmax + 1) + (k2 + kmax)];
  }
  // sum_k b_p^k e^{i k . (X, Y)} on the torus cell
  cplx partial_sum(int p, double X, double Y) const;
};
// Fourier coefficients of b_p(xi, eta) = a~(w, lambda, 2^p xi, 2^p eta) phi(xi^2 + eta^2) over
// C = [-pi, pi]^2 with normalization (2 pi)^{-2}; p = -1 uses psi in place of phi.
ReducedSymbol reduce_symbol(const HeisenbergSymbol& a, const HPoint& w, double lambda, int kmax, int pmax,
                            int quad = 128);
// the ring function of level p on the cell
double reduced_ring(int p, double X, double Y);
struct DecayFit {
  double exponent = 0.0;  // fitted N in ||b^k|| ~ (1 + |k|)^{-N}
  std::vector<std::pair<double, double>> samples;  // (|k|, max |b^k| on the shell)
};
DecayFit fit_decay(const ReducedSymbol& r, int p, int kmin, int kmax);
// b^{kj}_{p,r}: lambda Fourier coefficients of b_p^k(w, 4^r lambda) phi(lambda) on [-pi, pi].
cplx reduced_lambda_coefficient(const HeisenbergSymbol& a, const HPoint& w, int p, int k1, int k2, int r, int j,
                                int quad = 64);

// ---- counterexample ----
struct GrowthRow {
  double S;
  double sup;
};
// sup_{|s| <= S} |s^N Op(a) f(0, 0, s)| for a = |lambda|^{k + 1/2} and F(f) = phi(lambda) on level 0.
std::vector<GrowthRow> counterexample_demo(int k, int N, const std::vector<double>& S = {5, 10, 20, 40});
// Detects non-smoothness of sigma at lambda = 0: divided differences of order <= max_order
// whose size grows as the step shrinks.
struct SmoothnessReport {
  bool smooth = true;
  int first_bad_order = -1;
  double growth = 0.0;
};
SmoothnessReport sigma_smoothness_at_zero(const HeisenbergSymbol& a, double X = 0.3, double Y = -0.2,
                                          int max_order = 4);

// Bound surrogate: max over nodes of ||(Id + D)^{-mu/2} A_lambda||_op.
double order_normalized_norm(const HeisenbergSymbol& a, const LambdaGrid& grid, int N, const HPoint& w = HPoint(0, 0, 0));
// L2 operator norm of a Fourier multiplier on the truncated space: max_lambda ||A_lambda||_op.
double multiplier_norm(const HeisenbergSymbol& a, const LambdaGrid& grid, int N);

// Sampled CSV over a (w, lambda, xi, eta) lattice: columns x,y,s,lambda,xi,eta,re,im.
void write_symbol_csv(std::ostream& os, const HSymbolFn& a, const std::vector<HPoint>& ws,
                      const std::vector<double>& lambdas, const std::vector<double>& xis);

}  // namespace heis
