#pragma once

#include <cmath>
#include <vector>

namespace heis {

// Orthonormal Hermite function h_n(t) = (2^n n! sqrt(pi))^{-1/2} H_n(t) e^{-t^2/2}.
double hermite_eval(int n, double t);
// h_0..h_N at t, written to out[0..N].
void hermite_all(int N, double t, double* out);

struct QuadRule {
  std::vector<double> nodes, weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Hermite rule for int g(t) e^{-t^2} dt. `weights` are the classical ones;
// `fweights` are e^{t^2} w_i, the weights for integrating g(t) directly.
struct GaussHermite {
  std::vector<double> nodes, weights, fweights;
  std::size_t size() const { return nodes.size(); }
};
GaussHermite gauss_hermite(int n);
// Cached (thread-safe) rule of size n.
const GaussHermite& gauss_hermite_cached(int n);

QuadRule gauss_legendre(int n);  // on [-1, 1]
const QuadRule& gauss_legendre_cached(int n);
// Composite rule on [a,b] with `panels` panels of q Gauss points.
QuadRule composite_gl(double a, double b, int panels, int q = 16);

// Generalized Laguerre polynomial L_m^{(p)}(t).
double laguerre_eval(int m, double p, double t);
// (-1)^n L_n(2x) e^{-x} for n = 0..N at x >= 0, overflow-safe.
void laguerre_fn_all(int N, double x, double* out);

double binomial(int n, int k);

// C^infinity step from the normalized integral of e^{-1/(1-u^2)}: 0 for x <= 0, 1 for x >= 1, exactly.
double smooth_step(double x);
// Even bump: 1 on |t| <= 1, 0 on |t| >= 2.
inline double cutoff_theta(double t) { return 1.0 - smooth_step(std::abs(t) - 1.0); }
// Smooth version of max(y, 0): y Phi(y / s) + s phi(y / s). Entire, positive, and within
// s phi(1/s) of y for y >= 1.
double soft_relu(double y, double s);

}  // namespace heis
