#include "heis/mehler.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "heis/special.hpp"
#include "heis/weyl.hpp"

namespace heis {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSoftWidth = 0.15;  // soft_relu width; exact to ~1e-10 from y = 1 on

double lower_cut(double y) { return 0.5 * (1.0 + std::erf(2.0 * (y + 2.0))); }
}  // namespace

cplx SpectralProfileR::Rhat_at(cplx tau) const {
  if (Rhat) return Rhat(tau);
  // trapezoid; R is smooth and negligible at both ends
  int n = static_cast<int>(std::ceil((y_hi - y_lo) / dy));
  cplx step = std::exp(cplx(0.0, -dy) * tau);
  cplx ph = std::exp(cplx(0.0, -y_lo) * tau);
  cplx acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    acc += R(y_lo + i * dy) * ph;
    ph *= step;
  }
  return acc * dy;
}

SpectralProfileR heat_profile(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_profile: t must be positive");
  SpectralProfileR p;
  p.R = [t](double y) { return cplx(std::exp(-t * y) * lower_cut(y)); };
  // int S e^{-sy} dy = (1/s) int S' e^{-sy} dy = e^{2s + s^2/16} / s, s = t + i tau
  p.Rhat = [t](cplx tau) {
    cplx s = t + cplx(0.0, 1.0) * tau;
    return std::exp(2.0 * s + s * s / 16.0) / s;
  };
  p.mu = -1e300;  // smoothing
  return p;
}

SpectralProfileR power_profile(double mu, double a, double b, double c, double Y) {
  SpectralProfileR p;
  p.R = [=](double y) {
    double cut = cutoff_theta(y / Y) * lower_cut(y);
    if (cut == 0.0) return cplx(0.0);
    return cplx(c * std::pow(a + b * soft_relu(y, kSoftWidth), 0.5 * mu) * cut);
  };
  p.y_lo = -8.0;
  p.y_hi = 2.0 * Y + 1.0;
  p.mu = mu;
  return p;
}

MehlerSymbol::MehlerSymbol(const SpectralProfileR& R, int d, const MehlerOptions& opt) : d_(d) {
  if (d < 1) throw std::invalid_argument("MehlerSymbol: d >= 1");
  const auto& gl = gauss_legendre_cached(16);
  const cplx I(0.0, 1.0);
  // middle segment [-U, U]; panels resolve both e^{ixu} up to x_max and Rhat(atan u)
  double ymax = std::max({std::abs(R.y_lo), std::abs(R.y_hi), 8.0});
  double pw = std::min({0.25, 10.0 / opt.x_max, 10.0 / ymax});
  int panels = static_cast<int>(std::ceil(2.0 * opt.U / pw));
  pw = 2.0 * opt.U / panels;
  for (int p = 0; p < panels; ++p) {
    double a = -opt.U + p * pw;
    for (size_t i = 0; i < gl.size(); ++i) {
      u_.push_back(a + 0.5 * pw * (1.0 + gl.nodes[i]));
      w_.push_back(0.5 * pw * gl.weights[i]);
    }
  }
  // tails: u = +-U + i t, t in [0, inf), geometric panels
  std::vector<double> cuts{0.0};
  for (double t = 1e-3; t < 2e6; t *= 2.0) cuts.push_back(t);
  for (int side : {+1, -1})
    for (size_t p = 0; p + 1 < cuts.size(); ++p) {
      double a = cuts[p], b = cuts[p + 1];
      for (size_t i = 0; i < gl.size(); ++i) {
        double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
        u_.push_back(cplx(side * opt.U, t));
        w_.push_back(double(side) * I * 0.5 * (b - a) * gl.weights[i]);
      }
    }
  for (auto& w : w_) w /= 2.0 * kPi;

  const std::size_t n = u_.size();
  std::vector<cplx> at(n), jac(n);
  for (std::size_t j = 0; j < n; ++j) {
    at[j] = std::atan(u_[j]);
    jac[j] = std::pow(1.0 + u_[j] * u_[j], 0.5 * d - 1.0);
  }
  // numeric transforms reuse one set of samples of R
  std::vector<cplx> samples;
  if (!R.Rhat) {
    int ny = static_cast<int>(std::ceil((R.y_hi - R.y_lo) / R.dy));
    for (int i = 0; i <= ny; ++i) samples.push_back(R.R(R.y_lo + i * R.dy));
  }
  auto rhat = [&](cplx tau) {
    if (R.Rhat) return R.Rhat(tau);
    cplx step = std::exp(cplx(0.0, -R.dy) * tau), ph = std::exp(cplx(0.0, -R.y_lo) * tau), acc = 0.0;
    for (const cplx& v : samples) {
      acc += v * ph;
      ph *= step;
    }
    return acc * R.dy;
  };
  auto make_shell = [&](int k) {
    std::vector<cplx> s(n);
    double sign = ((k * d) % 2) ? -1.0 : 1.0;
    tbb::parallel_for(std::size_t(0), n, [&](std::size_t j) { s[j] = sign * w_[j] * jac[j] * rhat(k * kPi + at[j]); });
    return s;
  };
  auto eval = [&](const std::vector<cplx>& s, double x) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += s[j] * std::exp(I * x * u_[j]);
    return acc;
  };

  const std::vector<double> probes{0.05, 0.5, 2.0, 8.0, 20.0};
  std::vector<std::vector<cplx>> shells{make_shell(0)};  // order 0, 1, -1, 2, -2, ...
  std::vector<cplx> running(probes.size());
  for (size_t i = 0; i < probes.size(); ++i) running[i] = eval(shells[0], probes[i]);
  int k = 0;
  while (true) {
    ++k;
    auto sp = make_shell(k), sm = make_shell(-k);
    double last = 0.0, scale = 0.0;
    for (size_t i = 0; i < probes.size(); ++i) {
      cplx c = eval(sp, probes[i]) + eval(sm, probes[i]);
      running[i] += c;
      last = std::max(last, std::abs(c));
      scale = std::max(scale, std::abs(running[i]));
    }
    shells.push_back(std::move(sp));
    shells.push_back(std::move(sm));
    tail_ = last;
    if (k >= opt.k_min && last <= opt.shell_tol * std::max(scale, 1e-300)) break;
    if (k >= opt.k_cap) break;
  }
  kmax_ = k;
  per_shell_.assign(2 * k + 1, {});
  per_shell_[k] = std::move(shells[0]);
  for (int m = 1; m <= k; ++m) {
    per_shell_[k + m] = std::move(shells[2 * m - 1]);
    per_shell_[k - m] = std::move(shells[2 * m]);
  }
  total_.assign(n, 0.0);
  for (const auto& s : per_shell_)
    for (std::size_t j = 0; j < n; ++j) total_[j] += s[j];
}

cplx MehlerSymbol::operator()(double x) const {
  if (!(x > 0.0)) throw std::domain_error("MehlerSymbol: r is evaluated only at x > 0");
  const cplx I(0.0, 1.0);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < u_.size(); ++j) acc += total_[j] * std::exp(I * x * u_[j]);
  return acc;
}

cplx MehlerSymbol::shell(int k, double x) const {
  if (!(x > 0.0)) throw std::domain_error("MehlerSymbol: r is evaluated only at x > 0");
  if (std::abs(k) > kmax_) return 0.0;
  const auto& s = per_shell_[k + kmax_];
  const cplx I(0.0, 1.0);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < u_.size(); ++j) acc += s[j] * std::exp(I * x * u_[j]);
  return acc;
}

void MehlerSymbol::write_csv(std::ostream& os, const std::vector<double>& xs) const {
  os << "x,re,im\n";
  os.precision(17);
  for (double x : xs) {
    cplx v = (*this)(x);
    os << x << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

std::vector<cplx> mehler_symbol(const SpectralProfileR& R, int d, const std::vector<double>& xs,
                                const MehlerOptions& opt) {
  MehlerSymbol m(R, d, opt);
  std::vector<cplx> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(m(x));
  return out;
}

cplx oscillator_functional_rhat(const std::function<cplx(double)>& rhat, int n, int d) {
  // tau = tan(theta): (1/2pi) int rhat(tan th) e^{i(2n+d) th} cos^{d-2}(th) dth, panels graded to +-pi/2
  const auto& gl = gauss_legendre_cached(24);
  std::vector<double> cuts;
  const double h = 0.5 * kPi;
  int inner = 8 * (n + 4);
  for (int i = 0; i <= inner; ++i) cuts.push_back(-0.9 * h + 1.8 * h * i / inner);
  std::vector<double> right;
  for (double e = 0.1 * h; e > 1e-14; e *= 0.5) right.push_back(h - e * 0.5);
  std::vector<double> all;
  for (auto it = right.rbegin(); it != right.rend(); ++it) all.push_back(-*it);
  all.insert(all.end(), cuts.begin(), cuts.end());
  all.insert(all.end(), right.begin(), right.end());
  cplx acc = 0.0;
  for (size_t p = 0; p + 1 < all.size(); ++p) {
    double a = all[p], b = all[p + 1];
    for (size_t i = 0; i < gl.size(); ++i) {
      double th = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
      double w = 0.5 * (b - a) * gl.weights[i];
      acc += w * rhat(std::tan(th)) * std::polar(std::pow(std::cos(th), d - 2.0), (2.0 * n + d) * th);
    }
  }
  return acc / (2.0 * kPi);
}

cplx oscillator_functional_r(const std::function<cplx(double)>& r, int n) { return radial_eigenvalues(r, n)[n]; }

namespace {
// Radial polynomial symbol of c (a + b H)^k via Moyal powers, evaluated at x = xi^2 + eta^2.
std::function<cplx(double)> radial_moyal_power(int k, double a, double b, double c) {
  Poly base = Poly::constant(1, a) + cplx(b) * (Poly::xi(1, 0) * Poly::xi(1, 0) + Poly::eta(1, 0) * Poly::eta(1, 0));
  Poly acc = Poly::constant(1, c);
  for (int i = 0; i < k; ++i) acc = moyal_poly(acc, base);
  return [acc](double x) { return acc.eval1(std::sqrt(x), 0.0); };
}

bool even_integer(double mu) { return mu >= 0.0 && std::abs(mu / 2.0 - std::round(mu / 2.0)) < 1e-14; }
}  // namespace

std::function<cplx(double)> make_m_mu(double mu, double Y) {
  if (even_integer(mu)) return radial_moyal_power(static_cast<int>(std::round(mu / 2.0)), 1.0, 1.0, std::pow(2.0, mu));
  auto m = std::make_shared<MehlerSymbol>(power_profile(mu, 1.0, 1.0, std::pow(2.0, mu), Y));
  return [m](double x) { return (*m)(x); };
}

std::function<cplx(double)> make_m_tilde_mu(double mu, double Y) {
  if (mu < 0.0) throw std::invalid_argument("make_m_tilde_mu: mu >= 0 required");
  if (even_integer(mu)) return radial_moyal_power(static_cast<int>(std::round(mu / 2.0)), 0.0, 1.0, std::pow(2.0, mu));
  auto m = std::make_shared<MehlerSymbol>(power_profile(mu, 0.0, 1.0, std::pow(2.0, mu), Y));
  return [m](double x) { return (*m)(x); };
}

}  // namespace heis
