#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "heis/group.hpp"

namespace heis {

// A function R of the oscillator H = |xi|^2 - Delta. Only R on the spectrum {2n + d}
// matters for the operator; off the spectrum R is extended so that it decays at both
// ends and its Fourier transform decays fast (Gaussian-smooth transitions).
struct SpectralProfileR {
  std::function<cplx(double)> R;
  // optional closed form of Rhat(tau) = int R(y) e^{-i y tau} dy, needed at complex tau
  std::function<cplx(cplx)> Rhat;
  double y_lo = -8.0, y_hi = 64.0;  // numeric transform range
  double dy = 0.05;
  double mu = 0.0;  // declared order

  cplx Rhat_at(cplx tau) const;  // closed form when present, else trapezoid over [y_lo, y_hi]
};

// R(y) = e^{-t y} (1 + erf(2(y + 2))) / 2 with its closed-form transform.
SpectralProfileR heat_profile(double t);
// R(y) = c (a + b g(y))^{mu/2} theta(y / Y) S(y): g a smooth max(y, 0), S a lower erf cut.
// With a = 1, b = 1, c = 2^mu this is the Bessel-potential profile.
SpectralProfileR power_profile(double mu, double a, double b, double c, double Y = 32.0);

struct MehlerOptions {
  int k_min = 8;
  int k_cap = 64;
  double shell_tol = 1e-12;
  double U = 16.0;      // straight part of the u-contour
  double x_max = 100.0;  // largest x the fixed u-nodes resolve
};

// Weyl symbol r of R(H), so that op^w(r(|xi|^2 + |eta|^2)) = R(H), summed as a series of
// oscillatory integrals over the shells k (tau near k pi). Tails of each u-integral are
// rotated into the upper half plane, so the nodes are complex.
class MehlerSymbol {
 public:
  MehlerSymbol(const SpectralProfileR& R, int d = 1, const MehlerOptions& opt = {});
  cplx operator()(double x) const;  // x > 0
  cplx shell(int k, double x) const;
  int shells() const { return kmax_; }
  double tail_bound() const { return tail_; }  // largest last-shell term seen at probe points
  void write_csv(std::ostream& os, const std::vector<double>& xs) const;

 private:
  std::vector<cplx> u_, w_;  // contour nodes and weights (1/2pi folded in)
  std::vector<std::vector<cplx>> per_shell_;  // F_k(u_j) w_j (-1)^{kd}, indexed k + kmax
  std::vector<cplx> total_;
  int kmax_ = 0;
  double tail_ = 0.0;
  int d_;
};

std::vector<cplx> mehler_symbol(const SpectralProfileR& R, int d, const std::vector<double>& xs,
                                const MehlerOptions& opt = {});

// Eigenvalue of op^w(r(|xi|^2 + |eta|^2)) on oscillator level n, from the transform
// rhat(tau) = int_0^inf r(x) e^{-i x tau} dx (tau-integral), or from r itself via Laguerre (d = 1).
cplx oscillator_functional_rhat(const std::function<cplx(double)>& rhat, int n, int d = 1);
cplx oscillator_functional_r(const std::function<cplx(double)>& r, int n);
inline cplx oscillator_functional_R(const SpectralProfileR& R, int n, int d = 1) { return R.R(2.0 * n + d); }

// Symbol of 2^mu (Id + H)^{mu/2}; exact polynomial for mu in 2N, Mehler series otherwise.
std::function<cplx(double)> make_m_mu(double mu, double Y = 32.0);
// Symbol of 2^mu H^{mu/2} with the profile smoothed below the spectrum; mu >= 0.
std::function<cplx(double)> make_m_tilde_mu(double mu, double Y = 32.0);

}  // namespace heis
