#include "heis/hpdo.hpp"

#include <fftw3.h>
#include <tbb/parallel_for.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "fftw_lock.hpp"
#include "heis/mehler.hpp"
#include "heis/special.hpp"

namespace heis {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

double sgn(double l) { return l > 0 ? 1.0 : -1.0; }

// linear symbol s1 xi + s2 eta as a Poly
Poly linear(cplx s1, cplx s2) { return s1 * Poly::xi(1, 0) + s2 * Poly::eta(1, 0); }

// 4th-order central differences
cplx fd1(const std::function<cplx(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}
cplx fd2(const std::function<cplx(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h);
}
double step(double x) { return 1e-3 * std::max(1.0, std::abs(x)); }

// Matrices of c in a basis enlarged by `pad`, for products that would otherwise leak at the top.
Mat padded(const SymbolTerm& t, double lambda, int N, int pad) { return t.build(lambda, N + pad); }
}  // namespace

// ---------------------------------------------------------------- terms

cplx SymbolTerm::eval_c(double lambda, double xi, double eta) const {
  switch (kind) {
    case Kind::Multiplier:
      return mult(lambda);
    case Kind::Polynomial:
      return poly(lambda).eval1(xi, eta);
    default:
      if (!c) throw std::logic_error("symbol term has no pointwise evaluator");
      return c(lambda, xi, eta);
  }
}

Mat SymbolTerm::build(double lambda, int N) const {
  switch (kind) {
    case Kind::Multiplier:
      return mult(lambda) * Mat::Identity(N + 1, N + 1);
    case Kind::Polynomial:
      return weyl_matrix_poly(poly(lambda), N);
    case Kind::Radial: {
      Mat A = Mat::Zero(N + 1, N + 1);
      for (int n = 0; n <= N; ++n) A(n, n) = radial(lambda, n);
      return A;
    }
    case Kind::General:
      return weyl_matrix([&](double x, double y) { return c(lambda, x, y); }, N);
    case Kind::Matrix:
      return matrix(lambda, N);
  }
  throw std::logic_error("unknown symbol kind");
}

bool HeisenbergSymbol::w_independent() const {
  for (const auto& t : terms)
    if (t.wfac) return false;
  return true;
}

bool HeisenbergSymbol::polynomial() const {
  for (const auto& t : terms)
    if (t.kind != SymbolTerm::Kind::Multiplier && t.kind != SymbolTerm::Kind::Polynomial) return false;
  return true;
}

cplx HeisenbergSymbol::operator()(const HPoint& w, double lambda, double xi, double eta) const {
  cplx acc = 0.0;
  for (const auto& t : terms) acc += (t.wfac ? t.wfac(w) : cplx(1.0)) * t.eval_c(lambda, xi, eta);
  return acc;
}

cplx HeisenbergSymbol::sigma(const HPoint& w, double lambda, double X, double Y) const {
  if (sigma_fn) return sigma_fn(w, lambda, X, Y);
  if (lambda == 0.0) throw std::domain_error("sigma: lambda = 0 needs a sigma-side evaluator");
  double r = std::sqrt(std::abs(lambda));
  return (*this)(w, lambda, sgn(lambda) * X / r, Y / r);
}

Mat HeisenbergSymbol::term_matrix(std::size_t i, double lambda, int N) const {
  auto key = std::make_tuple(i, lambda, N);
  {
    std::shared_lock lock(cache_->mu);
    auto it = cache_->mats.find(key);
    if (it != cache_->mats.end()) return it->second;
  }
  Mat A = terms[i].build(lambda, N);
  std::unique_lock lock(cache_->mu);
  cache_->mats.emplace(key, A);
  return A;
}

Mat HeisenbergSymbol::matrix_at(const HPoint& w, double lambda, int N) const {
  Mat A = Mat::Zero(N + 1, N + 1);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    cplx b = terms[i].wfac ? terms[i].wfac(w) : cplx(1.0);
    if (b != cplx(0.0)) A += b * term_matrix(i, lambda, N);
  }
  return A;
}

HeisenbergSymbol& HeisenbergSymbol::operator+=(const HeisenbergSymbol& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  order = std::max(order, o.order);
  if (sigma_fn || o.sigma_fn) sigma_fn = nullptr;  // no longer matches the sum
  invalidate();
  return *this;
}

HeisenbergSymbol operator+(HeisenbergSymbol a, const HeisenbergSymbol& b) { return a += b; }

HeisenbergSymbol HeisenbergSymbol::scaled(cplx s) const {
  HeisenbergSymbol out = *this;
  out.invalidate();
  if (sigma_fn) {
    auto f = sigma_fn;
    out.sigma_fn = [f, s](const HPoint& w, double l, double X, double Y) { return s * f(w, l, X, Y); };
  }
  for (auto& t : out.terms) {
    if (t.wfac) {  // scaling the w factor keeps the cached lambda matrices valid
      auto b = t.wfac;
      t.wfac = [b, s](const HPoint& w) { return s * b(w); };
      continue;
    }
    if (t.mult) t.mult = [m = t.mult, s](double l) { return s * m(l); };
    if (t.poly) t.poly = [p = t.poly, s](double l) { return s * p(l); };
    if (t.radial) t.radial = [r = t.radial, s](double l, int n) { return s * r(l, n); };
    if (t.matrix) t.matrix = [m = t.matrix, s](double l, int N) -> Mat { return s * m(l, N); };
    if (t.c) t.c = [c = t.c, s](double l, double x, double y) { return s * c(l, x, y); };
  }
  return out;
}

// ---------------------------------------------------------------- builders

HeisenbergSymbol multiplier_symbol(std::string name, std::function<cplx(double)> c, double order) {
  HeisenbergSymbol a;
  a.name = std::move(name);
  a.order = order;
  SymbolTerm t;
  t.kind = SymbolTerm::Kind::Multiplier;
  t.mult = std::move(c);
  a.terms.push_back(t);
  return a;
}

HeisenbergSymbol polynomial_symbol(std::string name, std::function<Poly(double)> p, double order) {
  HeisenbergSymbol a;
  a.name = std::move(name);
  a.order = order;
  SymbolTerm t;
  t.kind = SymbolTerm::Kind::Polynomial;
  t.poly = std::move(p);
  a.terms.push_back(t);
  return a;
}

HeisenbergSymbol radial_symbol(std::string name, std::function<cplx(double, int)> eig,
                               std::function<cplx(double, double, double)> c, double order) {
  HeisenbergSymbol a;
  a.name = std::move(name);
  a.order = order;
  SymbolTerm t;
  t.kind = SymbolTerm::Kind::Radial;
  t.radial = std::move(eig);
  t.c = std::move(c);
  a.terms.push_back(t);
  return a;
}

HeisenbergSymbol general_symbol(std::string name, std::function<cplx(double, double, double)> c, double order) {
  HeisenbergSymbol a;
  a.name = std::move(name);
  a.order = order;
  SymbolTerm t;
  t.kind = SymbolTerm::Kind::General;
  t.c = std::move(c);
  a.terms.push_back(t);
  return a;
}

HeisenbergSymbol with_w_factor(HeisenbergSymbol a, WFactor b) {
  for (auto& t : a.terms) {
    if (t.wfac) {
      auto old = t.wfac;
      t.wfac = [old, b](const HPoint& w) { return old(w) * b(w); };
    } else {
      t.wfac = b;
    }
  }
  if (a.sigma_fn) {
    auto f = a.sigma_fn;
    a.sigma_fn = [f, b](const HPoint& w, double l, double X, double Y) { return b(w) * f(w, l, X, Y); };
  }
  a.invalidate();
  return a;
}

namespace {

// Weyl symbol of sum_n R_n |h_n><h_n| at x = xi^2 + eta^2: sum_n R_n 2 (-1)^n L_n(2x) e^{-x}.
// Finite for profiles with a top cut, so exact up to rounding.
cplx level_series(const SpectralProfileR& R, double x) {
  int nmax = static_cast<int>(std::floor((R.y_hi - 1.0) / 2.0));
  std::vector<double> lf(nmax + 1);
  laguerre_fn_all(nmax, x, lf.data());
  cplx acc = 0.0;
  for (int n = 0; n <= nmax; ++n) acc += R.R(2.0 * n + 1.0) * 2.0 * lf[n];
  return acc;
}

}  // namespace

HeisenbergSymbol builtin_symbol(const std::string& name, double param) {
  if (name == "Z" || name == "Zbar") {
    // Z = Op(sqrt|l| (i eta - sgn xi)), Zbar = Op(sqrt|l| (i eta + sgn xi))
    double e = name == "Z" ? 1.0 : -1.0;
    auto a = polynomial_symbol(
        name,
        [e](double l) {
          double r = std::sqrt(std::abs(l));
          return linear(-e * sgn(l) * r, I * r);
        },
        1.0);
    a.sigma_fn = [e](const HPoint&, double, double X, double Y) { return I * Y - e * X; };
    return a;
  }
  if (name == "X") {
    auto a = polynomial_symbol(name, [](double l) { return linear(0.0, 2.0 * I * std::sqrt(std::abs(l))); }, 1.0);
    a.sigma_fn = [](const HPoint&, double, double, double Y) { return 2.0 * I * Y; };
    return a;
  }
  if (name == "Y") {
    auto a = polynomial_symbol(name, [](double l) { return linear(-2.0 * I * sgn(l) * std::sqrt(std::abs(l)), 0.0); }, 1.0);
    a.sigma_fn = [](const HPoint&, double, double X, double) { return -2.0 * I * X; };
    return a;
  }
  if (name == "S") {
    auto a = multiplier_symbol(name, [](double l) { return -I * l; }, 2.0);
    a.sigma_fn = [](const HPoint&, double l, double, double) { return -I * l; };
    return a;
  }
  if (name == "minusLaplacian") {
    auto a = polynomial_symbol(
        name,
        [](double l) {
          Poly x = Poly::xi(1, 0), y = Poly::eta(1, 0);
          return cplx(4.0 * std::abs(l)) * (x * x + y * y);
        },
        2.0);
    a.sigma_fn = [](const HPoint&, double, double X, double Y) { return cplx(4.0 * (X * X + Y * Y)); };
    return a;
  }
  if (name == "besselPower" || name == "homPower") {
    bool hom = name == "homPower";
    double mu = param;
    if (hom && mu < 0.0) throw std::invalid_argument("homPower: nu >= 0 required");
    double a0 = hom ? 0.0 : 1.0;
    // the top cut sits far above the levels any caller truncates to
    auto profile = [=](double l) { return power_profile(mu, a0, 4.0 * std::abs(l), 1.0, 256.0); };
    auto a = radial_symbol(
        name + "(" + std::to_string(mu) + ")",
        [=](double l, int n) { return cplx(std::pow(a0 + 4.0 * std::abs(l) * (2.0 * n + 1.0), 0.5 * mu)); },
        [profile](double l, double x, double y) { return level_series(profile(l), x * x + y * y); }, mu);
    return a;
  }
  throw std::invalid_argument("unknown builtin symbol: " + name);
}

HeisenbergSymbol multiplication_symbol(WFactor b, std::function<cplx(double)> blam) {
  auto a = multiplier_symbol("multiplication", blam ? blam : [](double) { return cplx(1.0); }, 0.0);
  return with_w_factor(a, std::move(b));
}

std::vector<std::string> builtin_names() {
  return {"Z", "Zbar", "X", "Y", "S", "minusLaplacian", "besselPower", "homPower", "multiplication"};
}

// ---------------------------------------------------------------- operators

SpectralFunction op_apply_spectral(const HeisenbergSymbol& a, const SpectralFunction& F) {
  if (!a.w_independent()) throw std::invalid_argument("op_apply_spectral: symbol depends on w");
  SpectralFunction G = F;
  HPoint e(0.0, 0.0, 0.0);
  tbb::parallel_for(std::size_t{0}, F.size(), [&](std::size_t k) { G.mats[k] = F.mats[k] * a.matrix_at(e, F.grid.nodes[k], F.N); });
  return G;
}

GridFunction op_apply(const HeisenbergSymbol& a, const SpectralFunction& F, const GridSpec& target,
                      const SpectralConfig& cfg) {
  // w-free terms are summed into one multiplier; every w-dependent term gets its own inverse
  HeisenbergSymbol free_part, dep_part;
  free_part.order = dep_part.order = a.order;
  for (const auto& t : a.terms) (t.wfac ? dep_part : free_part).terms.push_back(t);
  GridFunction out(target);
  if (!free_part.terms.empty()) out += inverse_gft(op_apply_spectral(free_part, F), target, cfg);
  for (const auto& t : dep_part.terms) {
    SymbolTerm bare = t;
    bare.wfac = nullptr;
    HeisenbergSymbol one;
    one.terms.push_back(bare);
    GridFunction g = inverse_gft(op_apply_spectral(one, F), target, cfg);
    auto& data = g.data();
    tbb::parallel_for(std::size_t{0}, g.size(), [&](std::size_t i) { data[i] *= t.wfac(g.point(i)); });
    out += g;
  }
  return out;
}

GridFunction op_apply(const HeisenbergSymbol& a, const GridFunction& f, const OpConfig& cfg) {
  return op_apply(a, gft(f, cfg.grid, cfg.N, cfg.spectral), f.spec(), cfg.spectral);
}

std::vector<cplx> op_apply_points(const HeisenbergSymbol& a, const SpectralFunction& F, const std::vector<HPoint>& pts,
                                  const SpectralConfig& cfg) {
  std::vector<cplx> out(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    SpectralFunction G = F;
    tbb::parallel_for(std::size_t{0}, F.size(),
                      [&](std::size_t k) { G.mats[k] = F.mats[k] * a.matrix_at(pts[p], F.grid.nodes[k], F.N); });
    out[p] = inverse_gft_points(G, {pts[p]}, cfg)[0];
  }
  return out;
}

// ---------------------------------------------------------------- kernels

double HKernel::cell() const {
  auto d = [](const std::vector<double>& v) { return v.size() > 1 ? std::abs(v[1] - v[0]) : 1.0; };
  return d(xt) * d(yt) * d(st);
}

namespace {
// Axis sample t_l = t0 + l dt (l < n); output frequencies om_m = (m - n/2) 2 pi / (n dt).
struct DftAxis {
  int n;
  double t0, dt;
  double t(int l) const { return t0 + l * dt; }
  double om(int m) const { return (m - n / 2) * 2.0 * kPi / (n * dt); }
};
}  // namespace

HKernel kernel_of(const HeisenbergSymbol& a, const HPoint& w, const KernelBox& box) {
  DftAxis al{box.nl, -box.Lam + box.Lam / box.nl, 2.0 * box.Lam / box.nl};  // midpoints, no lambda = 0
  DftAxis az{box.nz, -box.Zm, 2.0 * box.Zm / box.nz};
  const int nl = al.n, nz = az.n;
  std::vector<cplx> buf(static_cast<std::size_t>(nl) * nz * nz);
  // layout (l, i, j) over (lambda, z, zeta), alternating signs centre the spectrum
  tbb::parallel_for(0, nl, [&](int l) {
    for (int i = 0; i < nz; ++i)
      for (int j = 0; j < nz; ++j) {
        double sg = ((l + i + j) % 2) ? -1.0 : 1.0;
        buf[(static_cast<std::size_t>(l) * nz + i) * nz + j] = sg * a.sigma(w, al.t(l), az.t(i), az.t(j));
      }
  });
  fftw_complex* io = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_3d(nl, nz, nz, io, io, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  HKernel K;
  K.w = w;
  // frequencies: lambda -> s~, z -> 2 y~, zeta -> -2 x~
  for (int m = 0; m < nl; ++m) K.st.push_back(al.om(m));
  for (int m = 0; m < nz; ++m) K.yt.push_back(0.5 * az.om(m));
  for (int m = nz - 1; m >= 0; --m) K.xt.push_back(-0.5 * az.om(m));
  double pref = al.dt * az.dt * az.dt / (2.0 * kPi * kPi * kPi);
  K.k.resize(buf.size());
  for (int ix = 0; ix < nz; ++ix) {
    int mz = nz - 1 - ix;  // zeta frequency index
    for (int iy = 0; iy < nz; ++iy)
      for (int is = 0; is < nl; ++is) {
        cplx ph = std::exp(I * (al.om(is) * al.t0 + az.om(iy) * az.t0 + az.om(mz) * az.t0));
        K.k[(static_cast<std::size_t>(ix) * nz + iy) * nl + is] = pref * ph * buf[(static_cast<std::size_t>(is) * nz + iy) * nz + mz];
      }
  }
  return K;
}

cplx kernel_trace(const HeisenbergSymbol& a, const HPoint& w, const HPoint& wprime, const LambdaGrid& grid, int N) {
  HPoint wt = group_mul(group_inv(w), wprime);
  std::vector<cplx> per(grid.size());
  tbb::parallel_for(std::size_t{0}, grid.size(), [&](std::size_t k) {
    TruncatedBasis b(1, N, grid.nodes[k]);
    per[k] = grid.weights[k] * (rep_matrix(wt, b) * a.matrix_at(w, grid.nodes[k], N)).trace();
  });
  cplx acc = 0.0;
  for (auto v : per) acc += v;
  return grid.c_d * acc;
}

cplx symbol_from_kernel_h(const HKernel& K, double lambda, double xi, double eta) {
  // w' = (w~)^{-1} = -w~
  cplx acc = 0.0;
  for (std::size_t i = 0; i < K.xt.size(); ++i)
    for (std::size_t j = 0; j < K.yt.size(); ++j) {
      cplx base = std::exp(I * (-2.0 * K.yt[j] * xi + 2.0 * K.xt[i] * eta));
      for (std::size_t l = 0; l < K.st.size(); ++l)
        acc += base * std::exp(-I * lambda * K.st[l]) * K.at(static_cast<int>(i), static_cast<int>(j), static_cast<int>(l));
    }
  return acc * K.cell();
}

cplx apply_kernel_h(const HKernel& K, const std::function<cplx(const HPoint&)>& f) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < K.xt.size(); ++i)
    for (std::size_t j = 0; j < K.yt.size(); ++j)
      for (std::size_t l = 0; l < K.st.size(); ++l) {
        HPoint wp = group_mul(K.w, HPoint(K.xt[i], K.yt[j], K.st[l]));
        acc += K.at(static_cast<int>(i), static_cast<int>(j), static_cast<int>(l)) * f(wp);
      }
  return acc * K.cell();
}

// ---------------------------------------------------------------- calculus

namespace {
bool is_scalar(const SymbolTerm& t) { return t.kind == SymbolTerm::Kind::Multiplier; }
bool is_poly(const SymbolTerm& t) { return t.kind == SymbolTerm::Kind::Polynomial || is_scalar(t); }
Poly as_poly(const SymbolTerm& t, double l) { return is_scalar(t) ? Poly::constant(1, t.mult(l)) : t.poly(l); }

// symbol of op^w(first) op^w(second) for w-free terms
SymbolTerm compose_terms(const SymbolTerm& first, const SymbolTerm& second) {
  SymbolTerm t;
  if (is_scalar(first) && is_scalar(second)) {
    t.kind = SymbolTerm::Kind::Multiplier;
    t.mult = [f = first.mult, s = second.mult](double l) { return f(l) * s(l); };
    return t;
  }
  if (is_poly(first) && is_poly(second)) {
    t.kind = SymbolTerm::Kind::Polynomial;
    t.poly = [first, second](double l) { return moyal_poly(as_poly(first, l), as_poly(second, l)); };
    return t;
  }
  if (first.kind == SymbolTerm::Kind::Radial && second.kind == SymbolTerm::Kind::Radial) {
    t.kind = SymbolTerm::Kind::Radial;
    t.radial = [f = first.radial, s = second.radial](double l, int n) { return f(l, n) * s(l, n); };
    return t;
  }
  t.kind = SymbolTerm::Kind::Matrix;
  t.matrix = [first, second](double l, int N) -> Mat {
    const int pad = 16;
    return (padded(first, l, N, pad) * padded(second, l, N, pad)).topLeftCorner(N + 1, N + 1);
  };
  return t;
}
}  // namespace

HeisenbergSymbol fm_compose(const HeisenbergSymbol& a, const HeisenbergSymbol& b) {
  if (!a.w_independent() || !b.w_independent()) throw std::invalid_argument("fm_compose: symbols must not depend on w");
  HeisenbergSymbol out;
  out.name = a.name + "*" + b.name;
  out.order = a.order + b.order;
  // F(Op(a) Op(b) f) = F(f) B A, so the symbol is b # a
  for (const auto& tb : b.terms)
    for (const auto& ta : a.terms) out.terms.push_back(compose_terms(tb, ta));
  if (a.sigma_fn && b.sigma_fn && a.terms.size() == 1 && b.terms.size() == 1 && is_scalar(a.terms[0]) &&
      is_scalar(b.terms[0])) {
    out.sigma_fn = [sa = a.sigma_fn, sb = b.sigma_fn](const HPoint& w, double l, double X, double Y) {
      return sa(w, l, X, Y) * sb(w, l, X, Y);
    };
  }
  return out;
}

HeisenbergSymbol fm_adjoint(const HeisenbergSymbol& a) {
  if (!a.w_independent()) throw std::invalid_argument("fm_adjoint: symbol must not depend on w");
  HeisenbergSymbol out;
  out.name = a.name + "^*";
  out.order = a.order;
  for (const auto& t : a.terms) {
    SymbolTerm u = t;
    if (t.mult) u.mult = [m = t.mult](double l) { return std::conj(m(l)); };
    if (t.poly) u.poly = [p = t.poly](double l) { return p(l).conj(); };
    if (t.radial) u.radial = [r = t.radial](double l, int n) { return std::conj(r(l, n)); };
    if (t.c) u.c = [c = t.c](double l, double x, double y) { return std::conj(c(l, x, y)); };
    if (t.matrix) u.matrix = [m = t.matrix](double l, int N) -> Mat { return m(l, N).adjoint(); };
    out.terms.push_back(u);
  }
  if (a.sigma_fn)
    out.sigma_fn = [s = a.sigma_fn](const HPoint& w, double l, double X, double Y) { return std::conj(s(w, l, X, Y)); };
  return out;
}

// ---------------------------------------------------------------- finite differences

namespace {
cplx field_derivative(const std::function<cplx(const HPoint&)>& f, Field field, const HPoint& w) {
  double h = 1e-3 * std::max(1.0, std::abs(w.s) + w.x[0] * w.x[0] + w.y[0] * w.y[0]);
  auto along = [&](double vx, double vy, double vs) {
    // derivative along the curve t -> w + t v (a straight line suffices for first order fields)
    return fd1([&](double t) { return f(HPoint(w.x[0] + t * vx, w.y[0] + t * vy, w.s + t * vs)); }, 0.0, h);
  };
  double x = w.x[0], y = w.y[0];
  cplx X = along(1.0, 0.0, 2.0 * y);
  cplx Y = along(0.0, 1.0, -2.0 * x);
  switch (field) {
    case Field::X:
      return X;
    case Field::Y:
      return Y;
    case Field::Z:
      return 0.5 * (X - I * Y);
    case Field::Zbar:
      return 0.5 * (X + I * Y);
    case Field::S:
      return along(0.0, 0.0, 1.0);
  }
  return 0.0;
}

WFactor field_of(WFactor b, Field field) {
  return [b, field](const HPoint& w) { return field_derivative(b, field, w); };
}

HSymbolFn field_of_fn(HSymbolFn a, Field field) {
  return [a, field](const HPoint& w, double l, double x, double y) {
    return field_derivative([&](const HPoint& v) { return a(v, l, x, y); }, field, w);
  };
}

HSymbolFn as_fn(const HeisenbergSymbol& a) {
  return [a](const HPoint& w, double l, double x, double y) { return a(w, l, x, y); };
}
}  // namespace

cplx d_w(const HeisenbergSymbol& a, Field f, const HPoint& w, double lambda, double xi, double eta) {
  return field_derivative([&](const HPoint& v) { return a(v, lambda, xi, eta); }, f, w);
}

cplx d_xi(const HSymbolFn& a, const HPoint& w, double lambda, double xi, double eta, int order) {
  auto f = [&](double t) { return a(w, lambda, t, eta); };
  return order == 1 ? fd1(f, xi, step(xi)) : fd2(f, xi, step(xi));
}

cplx d_eta(const HSymbolFn& a, const HPoint& w, double lambda, double xi, double eta, int order) {
  auto f = [&](double t) { return a(w, lambda, xi, t); };
  return order == 1 ? fd1(f, eta, step(eta)) : fd2(f, eta, step(eta));
}

cplx d_lambda(const HSymbolFn& a, const HPoint& w, double lambda, double xi, double eta) {
  // stay on one side of lambda = 0
  double h = 1e-3 * std::abs(lambda);
  return fd1([&](double t) { return a(w, t, xi, eta); }, lambda, h);
}

namespace {
cplx d_xi_eta(const HSymbolFn& a, const HPoint& w, double l, double x, double y) {
  double hx = step(x), hy = step(y);
  auto g = [&](double t) { return fd1([&](double u) { return a(w, l, u, t); }, x, hx); };
  return fd1(g, y, hy);
}

// {c, q} for a w-free term c and a linear q = q1 xi + q2 eta (q1, q2 functions of lambda):
// d_eta c d_xi q - d_xi c d_eta q
SymbolTerm bracket_linear(const SymbolTerm& c, std::function<cplx(double)> q1, std::function<cplx(double)> q2) {
  SymbolTerm t;
  t.wfac = c.wfac;
  if (is_scalar(c)) {
    t.kind = SymbolTerm::Kind::Multiplier;
    t.mult = [](double) { return cplx(0.0); };
    return t;
  }
  if (is_poly(c)) {
    t.kind = SymbolTerm::Kind::Polynomial;
    t.poly = [c, q1, q2](double l) { return poisson_bracket(as_poly(c, l), linear(q1(l), q2(l))); };
    return t;
  }
  // op({c, q}) = i [op(c), op(q)] exactly for linear q
  t.kind = SymbolTerm::Kind::Matrix;
  t.matrix = [c, q1, q2](double l, int N) -> Mat {
    const int pad = 2;
    Mat A = padded(c, l, N, pad);
    Mat Q = weyl_matrix_poly(linear(q1(l), q2(l)), N + pad);
    return (I * (A * Q - Q * A)).topLeftCorner(N + 1, N + 1);
  };
  if (c.c || c.kind == SymbolTerm::Kind::General) {
    auto cf = c.c;
    t.c = [cf, q1, q2](double l, double x, double y) {
      HSymbolFn f = [&](const HPoint&, double ll, double xx, double yy) { return cf(ll, xx, yy); };
      HPoint e(0.0, 0.0, 0.0);
      return d_eta(f, e, l, x, y) * q1(l) - d_xi(f, e, l, x, y) * q2(l);
    };
  }
  return t;
}

// c # q (right = false) or q # c (right = true) for linear q: cq +- (1/2i){c, q}
SymbolTerm moyal_linear(const SymbolTerm& c, std::function<cplx(double)> q1, std::function<cplx(double)> q2,
                        bool q_first) {
  SymbolTerm t;
  t.wfac = c.wfac;
  if (is_poly(c)) {
    t.kind = SymbolTerm::Kind::Polynomial;
    t.poly = [c, q1, q2, q_first](double l) {
      Poly q = linear(q1(l), q2(l));
      return q_first ? moyal_poly(q, as_poly(c, l)) : moyal_poly(as_poly(c, l), q);
    };
    return t;
  }
  t.kind = SymbolTerm::Kind::Matrix;
  t.matrix = [c, q1, q2, q_first](double l, int N) -> Mat {
    const int pad = 2;
    Mat A = padded(c, l, N, pad);
    Mat Q = weyl_matrix_poly(linear(q1(l), q2(l)), N + pad);
    return (q_first ? Mat(Q * A) : Mat(A * Q)).topLeftCorner(N + 1, N + 1);
  };
  if (c.c) {
    auto cf = c.c;
    t.c = [cf, q1, q2, q_first](double l, double x, double y) {
      HSymbolFn f = [&](const HPoint&, double ll, double xx, double yy) { return cf(ll, xx, yy); };
      HPoint e(0.0, 0.0, 0.0);
      cplx br = d_eta(f, e, l, x, y) * q1(l) - d_xi(f, e, l, x, y) * q2(l);  // {c, q}
      cplx prod = cf(l, x, y) * (q1(l) * x + q2(l) * y);
      return q_first ? prod - br / (2.0 * I) : prod + br / (2.0 * I);
    };
  }
  return t;
}

SymbolTerm with_wfac(SymbolTerm t, WFactor b) {
  t.wfac = std::move(b);
  return t;
}

HeisenbergSymbol from_terms(std::string name, double order, std::vector<SymbolTerm> terms) {
  HeisenbergSymbol h;
  h.name = std::move(name);
  h.order = order;
  h.terms = std::move(terms);
  return h;
}
}  // namespace

CommutatorSymbols commutator_symbols(const HeisenbergSymbol& a) {
  auto r = [](double l) { return std::sqrt(std::abs(l)); };
  std::vector<SymbolTerm> b1, b2, c1, c2;
  for (const auto& t : a.terms) {
    // field derivatives of the w factor
    if (t.wfac) {
      b1.push_back(with_wfac(t, field_of(t.wfac, Field::Z)));
      b2.push_back(with_wfac(t, field_of(t.wfac, Field::Zbar)));
    }
    // sqrt|l| {a, eta + i sgn xi} and sqrt|l| {a, eta - i sgn xi}
    b1.push_back(bracket_linear(t, [r](double l) { return I * sgn(l) * r(l); }, [r](double l) { return cplx(r(l)); }));
    b2.push_back(bracket_linear(t, [r](double l) { return -I * sgn(l) * r(l); }, [r](double l) { return cplx(r(l)); }));
    // (1 / 2 sqrt|l|) {a, i xi -+ sgn eta}
    c1.push_back(bracket_linear(t, [r](double l) { return I / (2.0 * r(l)); }, [r](double l) { return cplx(-sgn(l) / (2.0 * r(l))); }));
    c2.push_back(bracket_linear(t, [r](double l) { return I / (2.0 * r(l)); }, [r](double l) { return cplx(sgn(l) / (2.0 * r(l))); }));
  }
  CommutatorSymbols out;
  out.b1 = from_terms("[Z,Op(" + a.name + ")]", a.order + 1, b1);
  out.b2 = from_terms("[Zbar,Op(" + a.name + ")]", a.order + 1, b2);
  out.c1 = from_terms("[z,Op(" + a.name + ")]", a.order - 1, c1);
  out.c2 = from_terms("[zbar,Op(" + a.name + ")]", a.order - 1, c2);
  // [i s, Op(a)]: kernel i(s - s') k = -i s~ k + 2i(x y~ - y x~) k, hence
  // p = -g - x (c1 - c2) + i y (c1 + c2) with g the s~ multiplication symbol
  HeisenbergSymbol g = s_mult_symbol(a);
  std::vector<SymbolTerm> p;
  for (auto t : g.scaled(-1.0).terms) p.push_back(t);
  WFactor xf = [](const HPoint& w) { return cplx(w.x[0]); };
  WFactor yf = [](const HPoint& w) { return cplx(w.y[0]); };
  auto times = [](WFactor a1, WFactor b) -> WFactor {
    if (!a1) return b;
    return [a1, b](const HPoint& w) { return a1(w) * b(w); };
  };
  for (const auto& t : c1) {
    p.push_back(with_wfac(t, times(t.wfac, [xf](const HPoint& w) { return -xf(w); })));
    p.push_back(with_wfac(t, times(t.wfac, [yf](const HPoint& w) { return I * yf(w); })));
  }
  for (const auto& t : c2) {
    p.push_back(with_wfac(t, times(t.wfac, xf)));
    p.push_back(with_wfac(t, times(t.wfac, [yf](const HPoint& w) { return I * yf(w); })));
  }
  out.p = from_terms("[is,Op(" + a.name + ")]", a.order, p);
  return out;
}

HeisenbergSymbol left_compose_field(const HeisenbergSymbol& a, bool left, bool zbar) {
  // symbol of Z: sqrt|l|(-sgn xi + i eta); of Zbar: sqrt|l|(sgn xi + i eta)
  double e = zbar ? 1.0 : -1.0;
  auto q1 = [e](double l) { return cplx(e * sgn(l) * std::sqrt(std::abs(l))); };
  auto q2 = [](double l) { return I * std::sqrt(std::abs(l)); };
  std::vector<SymbolTerm> out;
  for (const auto& t : a.terms) {
    if (left) {
      if (t.wfac) out.push_back(with_wfac(t, field_of(t.wfac, zbar ? Field::Zbar : Field::Z)));
      out.push_back(moyal_linear(t, q1, q2, false));
    } else {
      out.push_back(moyal_linear(t, q1, q2, true));
    }
  }
  std::string f = zbar ? "Zbar" : "Z";
  return from_terms(left ? f + "Op(" + a.name + ")" : "Op(" + a.name + ")" + f, a.order + 1, out);
}

HeisenbergSymbol compose_bessel_right(const HeisenbergSymbol& a, int k) {
  // F(Op(a)(Id - Delta)^k f) = F(f) (1 + D)^k A: symbol m # a with m = (1 + 4|l|(xi^2 + eta^2))^{#k}
  std::vector<SymbolTerm> out;
  for (const auto& t : a.terms) {
    SymbolTerm u;
    u.wfac = t.wfac;
    if (is_poly(t)) {
      u.kind = SymbolTerm::Kind::Polynomial;
      u.poly = [t, k](double l) {
        Poly x = Poly::xi(1, 0), y = Poly::eta(1, 0);
        Poly m = Poly::constant(1, 1.0) + cplx(4.0 * std::abs(l)) * (x * x + y * y);
        Poly acc = as_poly(t, l);
        for (int i = 0; i < k; ++i) acc = moyal_poly(m, acc);
        return acc;
      };
    } else {
      u.kind = SymbolTerm::Kind::Matrix;
      u.matrix = [t, k](double l, int N) -> Mat {
        Mat A = t.build(l, N);
        for (int n = 0; n <= N; ++n) A.row(n) *= std::pow(1.0 + 4.0 * std::abs(l) * (2.0 * n + 1.0), k);
        return A;
      };
    }
    out.push_back(u);
  }
  return from_terms("Op(" + a.name + ")(Id-Delta)^" + std::to_string(k), a.order + 2.0 * k, out);
}

HeisenbergSymbol s_mult_symbol(const HeisenbergSymbol& a) {
  std::vector<SymbolTerm> out;
  for (const auto& t : a.terms) {
    SymbolTerm u;
    u.wfac = t.wfac;
    if (is_scalar(t)) {
      u.kind = SymbolTerm::Kind::Multiplier;
      u.mult = [m = t.mult](double l) { return -fd1(m, l, 1e-3 * std::abs(l)); };
    } else if (is_poly(t)) {
      // -d_l p + (1/2l) (degree-weighted p)
      u.kind = SymbolTerm::Kind::Polynomial;
      u.poly = [p = t.poly](double l) {
        double h = 1e-3 * std::abs(l);
        Poly dp = (1.0 / (12.0 * h)) * (p(l - 2 * h) - p(l + 2 * h) + cplx(8.0) * (p(l + h) - p(l - h)));
        Poly out = cplx(-1.0) * dp;
        for (const auto& [e, c] : p(l).terms()) out += Poly::monomial(e, c * double(e[0] + e[1]) / (2.0 * l));
        return out;
      };
    } else {
      if (!t.c) throw std::invalid_argument("s_mult_symbol: term without evaluator");
      u.kind = SymbolTerm::Kind::General;
      u.c = [c = t.c](double l, double x, double y) {
        HSymbolFn f = [&](const HPoint&, double ll, double xx, double yy) { return c(ll, xx, yy); };
        HPoint e(0.0, 0.0, 0.0);
        return -d_lambda(f, e, l, x, y) + (x * d_xi(f, e, l, x, y) + y * d_eta(f, e, l, x, y)) / (2.0 * l);
      };
    }
    out.push_back(u);
  }
  auto g = from_terms("g(" + a.name + ")", a.order, out);
  if (a.sigma_fn) {
    g.sigma_fn = [s = a.sigma_fn](const HPoint& w, double l, double X, double Y) {
      return -fd1([&](double t) { return s(w, t, X, Y); }, l, 1e-3 * std::max(std::abs(l), 1e-2));
    };
  }
  return g;
}

HSymbolFn moyal_expansion(const HSymbolFn& a, const HSymbolFn& b, int order) {
  return [a, b, order](const HPoint& w, double l, double x, double y) {
    cplx v = a(w, l, x, y) * b(w, l, x, y);
    if (order >= 1) {
      cplx br = d_eta(a, w, l, x, y) * d_xi(b, w, l, x, y) - d_xi(a, w, l, x, y) * d_eta(b, w, l, x, y);
      v += br / (2.0 * I);
    }
    if (order >= 2) {
      cplx t2 = d_eta(a, w, l, x, y, 2) * d_xi(b, w, l, x, y, 2) - 2.0 * d_xi_eta(a, w, l, x, y) * d_xi_eta(b, w, l, x, y) +
                d_xi(a, w, l, x, y, 2) * d_eta(b, w, l, x, y, 2);
      v += 0.5 * t2 / ((2.0 * I) * (2.0 * I));
    }
    return v;
  };
}

HSymbolFn Expansion::sum() const {
  auto ts = terms;
  return [ts](const HPoint& w, double l, double x, double y) {
    cplx acc = 0.0;
    for (const auto& t : ts) acc += t(w, l, x, y);
    return acc;
  };
}

namespace {
// T a = (1/i) d_eta a - sgn d_xi a;  T* a = (1/i) d_eta a + sgn d_xi a
HSymbolFn T_of(HSymbolFn a, bool star) {
  return [a, star](const HPoint& w, double l, double x, double y) {
    double s = star ? sgn(l) : -sgn(l);
    return -I * d_eta(a, w, l, x, y) + s * d_xi(a, w, l, x, y);
  };
}
// (-l d_l + (1/2)(eta d_eta + xi d_xi)) a
HSymbolFn dilation_of(HSymbolFn a) {
  return [a](const HPoint& w, double l, double x, double y) {
    return -l * d_lambda(a, w, l, x, y) + 0.5 * (y * d_eta(a, w, l, x, y) + x * d_xi(a, w, l, x, y));
  };
}
HSymbolFn scale_fn(HSymbolFn a, std::function<cplx(double)> s) {
  return [a, s](const HPoint& w, double l, double x, double y) { return s(l) * a(w, l, x, y); };
}
HSymbolFn add_fn(std::vector<HSymbolFn> fs) {
  return [fs](const HPoint& w, double l, double x, double y) {
    cplx acc = 0.0;
    for (const auto& f : fs) acc += f(w, l, x, y);
    return acc;
  };
}
}  // namespace

Expansion asymptotic_compose(const HeisenbergSymbol& a_, const HeisenbergSymbol& b_, int order) {
  HSymbolFn a = as_fn(a_), b = as_fn(b_);
  Expansion e;
  e.terms.push_back(moyal_expansion(b, a));
  if (order >= 1) {
    HSymbolFn t1 = add_fn({moyal_expansion(field_of_fn(b, Field::Z), T_of(a, false)),
                           moyal_expansion(field_of_fn(b, Field::Zbar), T_of(a, true))});
    e.terms.push_back(scale_fn(t1, [](double l) { return cplx(1.0 / (2.0 * std::sqrt(std::abs(l)))); }));
  }
  if (order >= 2) {
    auto Zb = field_of_fn(b, Field::Z), Zbb = field_of_fn(b, Field::Zbar);
    HSymbolFn q = add_fn({moyal_expansion(field_of_fn(Zb, Field::Z), T_of(T_of(a, false), false)),
                          moyal_expansion(field_of_fn(Zbb, Field::Zbar), T_of(T_of(a, true), true)),
                          moyal_expansion(field_of_fn(Zbb, Field::Z), T_of(T_of(a, true), false)),
                          moyal_expansion(field_of_fn(Zb, Field::Zbar), T_of(T_of(a, false), true))});
    HSymbolFn s = moyal_expansion(field_of_fn(b, Field::S), dilation_of(a));
    e.terms.push_back(add_fn({scale_fn(q, [](double l) { return cplx(1.0 / (8.0 * std::abs(l))); }),
                              scale_fn(s, [](double l) { return 1.0 / (I * l); })}));
  }
  return e;
}

Expansion asymptotic_adjoint(const HeisenbergSymbol& a_, int order) {
  HSymbolFn ab = [a = as_fn(a_)](const HPoint& w, double l, double x, double y) { return std::conj(a(w, l, x, y)); };
  // (Z T + Zbar T*) applied to a function
  auto L = [](HSymbolFn f) { return add_fn({field_of_fn(T_of(f, false), Field::Z), field_of_fn(T_of(f, true), Field::Zbar)}); };
  Expansion e;
  e.terms.push_back(ab);
  if (order >= 1) e.terms.push_back(scale_fn(L(ab), [](double l) { return cplx(1.0 / (2.0 * std::sqrt(std::abs(l)))); }));
  if (order >= 2) {
    HSymbolFn q = scale_fn(L(L(ab)), [](double l) { return cplx(1.0 / (8.0 * std::abs(l))); });
    HSymbolFn s = scale_fn(dilation_of(field_of_fn(ab, Field::S)), [](double l) { return 1.0 / (I * l); });
    e.terms.push_back(add_fn({q, s}));
  }
  return e;
}

// ---------------------------------------------------------------- reduced symbols

double reduced_ring(int p, double X, double Y) {
  double t = X * X + Y * Y;
  return p < 0 ? cutoff_theta(t) : cutoff_theta(t / 4.0) - cutoff_theta(t);
}

cplx ReducedSymbol::partial_sum(int p, double X, double Y) const {
  cplx acc = 0.0;
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2) acc += at(p, k1, k2) * std::exp(I * (k1 * X + k2 * Y));
  return acc;
}

ReducedSymbol reduce_symbol(const HeisenbergSymbol& a, const HPoint& w, double lambda, int kmax, int pmax, int quad) {
  if (a.order > 0.0) throw std::invalid_argument("reduce_symbol: order-0 symbol required");
  if (2 * kmax + 1 > quad) throw std::invalid_argument("reduce_symbol: quad too small for kmax");
  ReducedSymbol r;
  r.kmax = kmax;
  r.pmax = pmax;
  double sl = std::sqrt(std::abs(lambda));
  double h = 2.0 * kPi / quad;
  for (int p = -1; p <= pmax; ++p) {
    double scale = p < 0 ? 1.0 : std::ldexp(1.0, p);
    std::vector<cplx> buf(static_cast<std::size_t>(quad) * quad);
    // periodic trapezoid on [-pi, pi)^2; the ring cutoff vanishes near the cell edge
    tbb::parallel_for(0, quad, [&](int i) {
      for (int j = 0; j < quad; ++j) {
        double X = -kPi + i * h, Y = -kPi + j * h;
        double ring = reduced_ring(p, X, Y);
        // a~(xi, eta) = a(xi / sqrt|l|, eta / sqrt|l|)
        buf[static_cast<std::size_t>(i) * quad + j] = ring == 0.0 ? 0.0 : ring * a(w, lambda, scale * X / sl, scale * Y / sl);
      }
    });
    fftw_complex* io = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_2d(quad, quad, io, io, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    std::vector<cplx> coef(static_cast<std::size_t>(2 * kmax + 1) * (2 * kmax + 1));
    for (int k1 = -kmax; k1 <= kmax; ++k1)
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        int i1 = (k1 + quad) % quad, i2 = (k2 + quad) % quad;
        // (2 pi)^{-2} sum e^{-ik.X} b h^2; the grid starts at -pi
        double sign = ((k1 + k2) % 2) ? -1.0 : 1.0;
        coef[static_cast<std::size_t>(k1 + kmax) * (2 * kmax + 1) + (k2 + kmax)] =
            sign * buf[static_cast<std::size_t>(i1) * quad + i2] / double(quad) / double(quad);
      }
    r.coef.push_back(std::move(coef));
  }
  return r;
}

DecayFit fit_decay(const ReducedSymbol& r, int p, int kmin, int kmax) {
  DecayFit fit;
  kmax = std::min(kmax, r.kmax);
  for (int m = std::max(kmin, 1); m <= kmax; ++m) {
    double best = 0.0;
    for (int k1 = -m; k1 <= m; ++k1)
      for (int k2 = -m; k2 <= m; ++k2)
        if (std::max(std::abs(k1), std::abs(k2)) == m) best = std::max(best, std::abs(r.at(p, k1, k2)));
    fit.samples.emplace_back(m, best);
  }
  // least squares of log|b| against log(1 + m)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto [m, v] : fit.samples) {
    if (v <= 0.0) continue;
    double x = std::log(1.0 + m), y = std::log(v);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n >= 2) fit.exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

cplx reduced_lambda_coefficient(const HeisenbergSymbol& a, const HPoint& w, int p, int k1, int k2, int r, int j,
                                int quad) {
  // lambda period [-8, 8] covers the support of phi; composite midpoint rule over the support
  const double L = 8.0;
  cplx acc = 0.0;
  int n = 4 * quad;
  double h = 2.0 * L / n;
  for (int i = 0; i < n; ++i) {
    double lam = -L + (i + 0.5) * h;
    double ph = cutoff_theta(lam / 4.0) - cutoff_theta(lam);
    if (ph == 0.0) continue;
    ReducedSymbol rs = reduce_symbol(a, w, std::ldexp(lam, 2 * r), std::max(std::abs(k1), std::abs(k2)), std::max(p, 0), quad);
    acc += std::exp(-I * (kPi * j * lam / L)) * rs.at(p, k1, k2) * ph * h;
  }
  return acc / (2.0 * L);
}

// ---------------------------------------------------------------- counterexample

std::vector<GrowthRow> counterexample_demo(int k, int N, const std::vector<double>& S) {
  // lambda nodes: geometric towards 0 (the |lambda|^{k + 3/2} kink), uniform outside
  std::vector<double> nodes, weights;
  const auto& gl = gauss_legendre_cached(16);
  double Smax = 0.0;
  for (double s : S) Smax = std::max(Smax, s);
  std::vector<double> cuts{0.0};
  for (double c = 1e-14; c < 0.05; c *= 2.0) cuts.push_back(c);
  double width = std::min(0.05, 2.0 / (Smax + 1.0));
  for (double c = 0.05; c < 2.0 + 1e-12; c += width) cuts.push_back(c);
  for (size_t p = 0; p + 1 < cuts.size(); ++p)
    for (size_t i = 0; i < gl.size(); ++i) {
      nodes.push_back(0.5 * (cuts[p] + cuts[p + 1]) + 0.5 * (cuts[p + 1] - cuts[p]) * gl.nodes[i]);
      weights.push_back(0.5 * (cuts[p + 1] - cuts[p]) * gl.weights[i]);
    }
  LambdaGrid grid = LambdaGrid::symmetric_from(nodes, weights, 1);
  SpectralFunction F(grid, 1, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) F.mats[i](0, 0) = cutoff_theta(grid.nodes[i]);
  auto a = multiplier_symbol("|lambda|^(k+1/2)", [k](double l) { return cplx(std::pow(std::abs(l), k + 0.5)); }, 2.0 * k + 1);
  SpectralFunction G = op_apply_spectral(a, F);
  std::vector<HPoint> pts;
  double ds = 0.05;
  for (double s = 0.0; s <= Smax + 1e-9; s += ds) pts.emplace_back(0.0, 0.0, s);
  auto vals = inverse_gft_points(G, pts);
  std::vector<GrowthRow> rows;
  for (double Sv : S) {
    double sup = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (pts[i].s <= Sv + 1e-9) sup = std::max(sup, std::pow(pts[i].s, N) * std::abs(vals[i]));
    rows.push_back({Sv, sup});
  }
  return rows;
}

SmoothnessReport sigma_smoothness_at_zero(const HeisenbergSymbol& a, double X, double Y, int max_order) {
  SmoothnessReport rep;
  HPoint e(0.0, 0.0, 0.0);
  double scale = 0.0;
  auto diff = [&](int m, double h) {
    // centred stencil shifted off lambda = 0 for even m
    double shift = (m % 2 == 0) ? 0.5 : 0.0;
    cplx acc = 0.0;
    for (int j = 0; j <= m; ++j) {
      double t = (0.5 * m - j + shift) * h;
      cplx v = a.sigma(e, t, X, Y);
      scale = std::max(scale, std::abs(v));
      acc += (j % 2 ? -1.0 : 1.0) * binomial(m, j) * v;
    }
    return std::abs(acc) / std::pow(h, m);
  };
  const double h = 1e-2;
  for (int m = 1; m <= max_order; ++m) {
    double coarse = diff(m, h), fine = diff(m, h / 8.0);
    // rounding in the stencil alone is about eps 2^m scale / h^m
    double noise = 1e3 * 2.2e-16 * std::ldexp(scale, m) / std::pow(h / 8.0, m);
    double g = fine / std::max(coarse, 1e-300);
    if (fine > noise && g > 2.0) {
      rep.smooth = false;
      rep.first_bad_order = m;
      rep.growth = g;
      return rep;
    }
  }
  return rep;
}

double order_normalized_norm(const HeisenbergSymbol& a, const LambdaGrid& grid, int N, const HPoint& w) {
  double best = 0.0;
  for (double l : grid.nodes) {
    Mat A = a.matrix_at(w, l, N);
    for (int n = 0; n <= N; ++n) A.row(n) *= std::pow(1.0 + 4.0 * std::abs(l) * (2.0 * n + 1.0), -0.5 * a.order);
    best = std::max(best, op_norm(A));
  }
  return best;
}

double multiplier_norm(const HeisenbergSymbol& a, const LambdaGrid& grid, int N) {
  if (!a.w_independent()) throw std::invalid_argument("multiplier_norm: symbol depends on w");
  std::vector<double> per(grid.size());
  HPoint e(0.0, 0.0, 0.0);
  tbb::parallel_for(std::size_t{0}, grid.size(), [&](std::size_t k) { per[k] = op_norm(a.matrix_at(e, grid.nodes[k], N)); });
  double best = 0.0;
  for (double v : per) best = std::max(best, v);
  return best;
}

void write_symbol_csv(std::ostream& os, const HSymbolFn& a, const std::vector<HPoint>& ws, const std::vector<double>& lambdas,
                      const std::vector<double>& xis) {
  os << "x,y,s,lambda,xi,eta,re,im\n";
  os.precision(12);
  for (const auto& w : ws)
    for (double l : lambdas)
      for (double x : xis)
        for (double y : xis) {
          cplx v = a(w, l, x, y);
          os << w.x[0] << ',' << w.y[0] << ',' << w.s << ',' << l << ',' << x << ',' << y << ',' << v.real() << ','
             << v.imag() << '\n';
        }
}

}  // namespace heis
