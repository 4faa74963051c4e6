#include "heis/weyl.hpp"

#include <fftw3.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fftw_lock.hpp"
#include "heis/special.hpp"

namespace heis {

// ---------------------------------------------------------------- Poly

Poly Poly::constant(int d, cplx c) {
  Poly p(d);
  p.add(Exp(2 * d, 0), c);
  return p;
}

Poly Poly::xi(int d, int j) {
  Exp e(2 * d, 0);
  e[j] = 1;
  return monomial(e, 1.0);
}

Poly Poly::eta(int d, int j) {
  Exp e(2 * d, 0);
  e[d + j] = 1;
  return monomial(e, 1.0);
}

Poly Poly::monomial(const Exp& e, cplx c) {
  if (e.size() % 2) throw std::invalid_argument("Poly: exponent length must be even");
  Poly p(static_cast<int>(e.size() / 2));
  p.add(e, c);
  return p;
}

void Poly::add(const Exp& e, cplx c) {
  if (c == cplx(0.0)) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_[e] = c;
  } else {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

int Poly::degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    deg = std::max(deg, s);
  }
  return deg;
}

bool Poly::is_zero(double tol) const {
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

cplx Poly::eval(const std::vector<double>& xi, const std::vector<double>& eta) const {
  cplx acc = 0.0;
  for (const auto& [e, c] : terms_) {
    cplx t = c;
    for (int j = 0; j < d_; ++j) t *= std::pow(xi[j], e[j]) * std::pow(eta[j], e[d_ + j]);
    acc += t;
  }
  return acc;
}

Poly Poly::derivative(int var, int order) const {
  Poly out(d_);
  for (const auto& [e, c] : terms_) {
    if (e[var] < order) continue;
    double f = 1.0;
    for (int k = 0; k < order; ++k) f *= e[var] - k;
    Exp ne = e;
    ne[var] -= order;
    out.add(ne, c * f);
  }
  return out;
}

Poly Poly::conj() const {
  Poly out(d_);
  for (const auto& [e, c] : terms_) out.add(e, std::conj(c));
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [e, c] : o.terms_) add(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [e, c] : o.terms_) add(e, -c);
  return *this;
}

Poly& Poly::operator*=(cplx c) {
  if (c == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out(a.d_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Poly::Exp e = ea;
      for (size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
      out.add(e, ca * cb);
    }
  return out;
}

double Poly::max_abs_diff(const Poly& o) const {
  Poly diff = *this - o;
  double m = 0.0;
  for (const auto& [e, c] : diff.terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string Poly::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
    for (int j = 0; j < d_; ++j) {
      if (e[j]) os << "*xi" << j + 1 << "^" << e[j];
      if (e[d_ + j]) os << "*eta" << j + 1 << "^" << e[d_ + j];
    }
  }
  return first ? "0" : os.str();
}

Poly moyal_poly(const Poly& a, const Poly& b) {
  if (a.d() != b.d()) throw std::invalid_argument("moyal_poly: dimension mismatch");
  int d = a.d();
  int kmax = std::max(0, std::min(a.degree(), b.degree()));
  Poly out(d);
  // sum over (alpha_j, beta_j): (1/2i)^k prod (-1)^{beta_j}/(alpha_j! beta_j!) [d_eta^alpha d_xi^beta a][d_xi^alpha d_eta^beta b]
  std::vector<int> al(d, 0), be(d, 0);
  std::function<void(int, int)> rec = [&](int slot, int left) {
    if (slot == 2 * d) {
      int k = 0;
      double coef = 1.0;
      Poly da = a, db = b;
      for (int j = 0; j < d; ++j) {
        k += al[j] + be[j];
        coef /= std::tgamma(al[j] + 1.0) * std::tgamma(be[j] + 1.0);
        if (be[j] % 2) coef = -coef;
        da = da.derivative(d + j, al[j]).derivative(j, be[j]);
        db = db.derivative(j, al[j]).derivative(d + j, be[j]);
      }
      if (da.is_zero() || db.is_zero()) return;
      cplx pref = std::pow(cplx(0.0, -0.5), k) * coef;  // (1/2i)^k
      out += pref * (da * db);
      return;
    }
    int& v = slot < d ? al[slot] : be[slot - d];
    for (int x = 0; x <= left; ++x) {
      v = x;
      rec(slot + 1, left - x);
    }
    v = 0;
  };
  rec(0, kmax);
  return out;
}

Poly poisson_bracket(const Poly& a, const Poly& b) {
  int d = a.d();
  Poly out(d);
  for (int j = 0; j < d; ++j) {
    out += a.derivative(d + j) * b.derivative(j);
    out -= a.derivative(j) * b.derivative(d + j);
  }
  return out;
}

// ---------------------------------------------------------------- Hermite-basis matrices

Mat xi_hat(int N) {
  Mat M = Mat::Zero(N + 1, N + 1);
  for (int n = 0; n < N; ++n) {
    double c = std::sqrt((n + 1) / 2.0);
    M(n + 1, n) = c;
    M(n, n + 1) = c;
  }
  return M;
}

Mat eta_hat(int N) {
  // (1/i) h_n' = -i (sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1})
  Mat M = Mat::Zero(N + 1, N + 1);
  const cplx I(0, 1);
  for (int n = 0; n < N; ++n) {
    double c = std::sqrt((n + 1) / 2.0);
    M(n + 1, n) = I * c;
    M(n, n + 1) = -I * c;
  }
  return M;
}

Mat weyl_matrix_poly(const Poly& p, int N) {
  if (p.d() != 1) throw std::invalid_argument("weyl_matrix_poly: d = 1 only");
  int deg = std::max(p.degree(), 0);
  int big = N + deg + 1;
  Mat X = xi_hat(big), E = eta_hat(big);
  Mat acc = Mat::Zero(big + 1, big + 1);
  std::vector<Mat> Xp{Mat::Identity(big + 1, big + 1)}, Ep{Mat::Identity(big + 1, big + 1)};
  for (int k = 1; k <= deg; ++k) {
    Xp.push_back(Xp.back() * X);
    Ep.push_back(Ep.back() * E);
  }
  for (const auto& [e, c] : p.terms()) {
    int j = e[0], k = e[1];
    // op^w(xi^j eta^k) = 2^{-j} sum_l C(j,l) xi^l eta^k xi^{j-l}
    Mat term = Mat::Zero(big + 1, big + 1);
    for (int l = 0; l <= j; ++l) term += binomial(j, l) * (Xp[l] * Ep[k] * Xp[j - l]);
    acc += c * std::pow(0.5, j) * term;
  }
  return acc.topLeftCorner(N + 1, N + 1);
}

cplx wigner_mn(int m, int n, double xi, double eta) {
  if (m < n) return std::conj(wigner_mn(n, m, xi, eta));
  int k = m - n;
  double r2 = xi * xi + eta * eta;
  double L = laguerre_eval(n, k, 2.0 * r2);
  double logpre = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) - r2;
  if (k > 0) {
    if (r2 == 0.0) return 0.0;
    logpre += k * std::log(std::sqrt(2.0 * r2));
  }
  double mag = 2.0 * std::exp(logpre) * L * ((n % 2) ? -1.0 : 1.0);
  return std::polar(1.0, k * std::atan2(eta, xi)) * mag;
}

namespace {

struct WignerTable {
  int N = 0;
  std::vector<double> xi, eta;  // node coordinates
  // T(node, pair) = W_{mn}(node) * fw_xi * fw_eta / (2 pi), pairs m >= n
  Mat T;
  std::vector<std::pair<int, int>> pairs;
};

const WignerTable& wigner_table(int N, int extra) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<WignerTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{N, extra}];
  if (slot) return *slot;
  auto t = std::make_unique<WignerTable>();
  t->N = N;
  const auto& gh = gauss_hermite_cached(N + extra);
  int q = static_cast<int>(gh.size());
  for (int m = 0; m <= N; ++m)
    for (int n = 0; n <= m; ++n) t->pairs.emplace_back(m, n);
  t->T.resize(static_cast<Eigen::Index>(q) * q, t->pairs.size());
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      t->xi.push_back(gh.nodes[a]);
      t->eta.push_back(gh.nodes[b]);
    }
  // isolated: a thread waiting here must not pick up an outer task that needs `mu`
  tbb::this_task_arena::isolate([&] {
    tbb::parallel_for(0, q * q, [&](int node) {
      double x = t->xi[node], y = t->eta[node];
      double w = gh.fweights[node / q] * gh.fweights[node % q] / (2.0 * std::numbers::pi);
      double r2 = x * x + y * y;
      cplx phase = std::polar(1.0, std::atan2(y, x));
      // Laguerre L_n^{(k)}(2 r^2) for n = 0..N-k by recurrence, k = m - n
      std::vector<double> Lk(N + 1);
      for (int k = 0; k <= N; ++k) {
        double t2 = 2.0 * r2;
        Lk[0] = 1.0;
        if (N - k >= 1) Lk[1] = 1.0 + k - t2;
        for (int n = 1; n < N - k; ++n) Lk[n + 1] = ((2.0 * n + 1.0 + k - t2) * Lk[n] - (n + k) * Lk[n - 1]) / (n + 1.0);
        cplx ph = std::pow(phase, k);
        for (int n = 0; n + k <= N; ++n) {
          int m = n + k;
          double logpre = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) - r2;
          if (k > 0) logpre += k * 0.5 * std::log(2.0 * r2);
          double mag = 2.0 * std::exp(logpre) * Lk[n] * ((n % 2) ? -1.0 : 1.0);
          int pair = m * (m + 1) / 2 + n;
          t->T(node, pair) = w * mag * ph;
        }
      }
    });
  });
  slot = std::move(t);
  return *slot;
}

}  // namespace

Mat weyl_matrix(const std::function<cplx(double, double)>& c, int N, int extra_nodes) {
  const auto& t = wigner_table(N, extra_nodes);
  Vec cv(t.xi.size());
  for (size_t i = 0; i < t.xi.size(); ++i) cv[i] = c(t.xi[i], t.eta[i]);
  Vec pr = t.T.transpose() * cv;
  Mat A(N + 1, N + 1);
  // lower pairs carry W_{mn}; W_{nm} = conj(W_{mn}) so the upper entry integrates c against the conjugate
  Vec prc = t.T.adjoint() * cv;
  for (size_t p = 0; p < t.pairs.size(); ++p) {
    auto [m, n] = t.pairs[p];
    A(m, n) = pr[p];
    if (m != n) A(n, m) = prc[p];
  }
  return A;
}

std::vector<cplx> radial_eigenvalues(const std::function<cplx(double)>& r, int N) {
  // graded panels near 0 (profiles may carry a log singularity there), unit panels beyond
  std::vector<double> cuts{0.0};
  for (double e = 1e-8; e < 1.0; e *= 10.0) cuts.push_back(e);
  double X = 2.0 * N + 80.0;
  for (double x = 1.0; x <= X; x += 1.0) cuts.push_back(x);
  const auto& gl = gauss_legendre_cached(20);
  std::vector<cplx> out(N + 1, 0.0);
  std::vector<double> lag(N + 1);
  for (size_t p = 0; p + 1 < cuts.size(); ++p) {
    double a = cuts[p], b = cuts[p + 1];
    for (size_t i = 0; i < gl.size(); ++i) {
      double x = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
      double w = 0.5 * (b - a) * gl.weights[i];
      laguerre_fn_all(N, x, lag.data());  // (-1)^n L_n(2x) e^{-x}
      cplx rv = r(x) * w;
      for (int n = 0; n <= N; ++n) out[n] += rv * lag[n];
    }
  }
  return out;
}

// ---------------------------------------------------------------- kernels

double WeylGrid::eta_max() const { return std::numbers::pi / h; }

WeylKernel weyl_quantize(const PhaseSymbol& a, const WeylGrid& g) {
  int n = g.n;
  int M = 1;
  while (M < 2 * n) M *= 2;
  double deta = 2.0 * std::numbers::pi / (M * g.h);
  WeylKernel K{g, Mat::Zero(n, n)};
  std::vector<std::vector<cplx>> rows(2 * n - 1);
  // one FFT per midpoint: g(t) = (deta / 2 pi) sum_k a(mid, eta_k) e^{i t h eta_k}
  tbb::parallel_for(0, 2 * n - 1, [&](int s) {
    std::vector<cplx> buf(M);
    double m = g.mid(s);
    for (int k = 0; k < M; ++k) buf[k] = a(m, (k - M / 2) * deta);
    fftw_complex* io = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_1d(M, io, io, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    rows[s] = std::move(buf);
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int s = i + j, t = i - j;
      double sign = (t % 2) ? -1.0 : 1.0;  // e^{-i pi t} from the centred eta grid
      K.k(i, j) = rows[s][(t + M) % M] * sign * deta / (2.0 * std::numbers::pi);
    }
  return K;
}

std::vector<cplx> apply_kernel(const WeylKernel& K, const std::vector<cplx>& u) {
  Eigen::Map<const Vec> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  Vec r = K.k * uv * K.grid.h;
  return std::vector<cplx>(r.data(), r.data() + r.size());
}

std::vector<cplx> apply_weyl(const PhaseSymbol& a, const WeylGrid& g, const std::vector<cplx>& u) {
  return apply_kernel(weyl_quantize(a, g), u);
}

namespace {
// (-i d/dxi)^k u by FFT; u must decay at the box edges.
std::vector<cplx> spectral_dk(const std::vector<cplx>& u, double h, int k) {
  if (k == 0) return u;
  int n = static_cast<int>(u.size());
  std::vector<cplx> buf = u;
  fftw_complex* io = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd = fftw_plan_dft_1d(n, io, io, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(n, io, io, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (int m = 0; m < n; ++m) {
    int f = m <= n / 2 ? m : m - n;
    if (n % 2 == 0 && m == n / 2 && k % 2) f = 0;  // Nyquist mode has no odd derivative
    double omega = 2.0 * std::numbers::pi * f / (n * h);
    buf[m] *= std::pow(omega, k) / n;  // (-i d)^k e^{i omega x} = omega^k e^{i omega x}
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  return buf;
}
}  // namespace

std::vector<cplx> apply_weyl(const Poly& p, const WeylGrid& g, const std::vector<cplx>& u) {
  if (p.d() != 1) throw std::invalid_argument("apply_weyl: d = 1 only");
  int n = g.n;
  std::vector<cplx> out(n, 0.0);
  for (const auto& [e, c] : p.terms()) {
    int j = e[0], k = e[1];
    for (int l = 0; l <= j; ++l) {
      std::vector<cplx> v(n);
      for (int i = 0; i < n; ++i) v[i] = std::pow(g.coord(i), j - l) * u[i];
      v = spectral_dk(v, g.h, k);
      double coef = binomial(j, l) * std::pow(0.5, j);
      for (int i = 0; i < n; ++i) out[i] += c * coef * std::pow(g.coord(i), l) * v[i];
    }
  }
  return out;
}

Mat symbol_from_kernel(const WeylKernel& K, const std::vector<double>& etas) {
  int n = K.grid.n;
  double h = K.grid.h;
  Mat out(2 * n - 1, etas.size());
  tbb::parallel_for(0, 2 * n - 1, [&](int s) {
    for (size_t e = 0; e < etas.size(); ++e) {
      cplx acc = 0.0;
      // pairs (i, j) with i + j = s, xi' = (i - j) h, step 2h
      int ilo = std::max(0, s - (n - 1)), ihi = std::min(n - 1, s);
      for (int i = ilo; i <= ihi; ++i) {
        int j = s - i;
        acc += std::exp(cplx(0.0, -(i - j) * h * etas[e])) * K.k(i, j);
      }
      out(s, e) = acc * 2.0 * h;
    }
  });
  return out;
}

Mat moyal_fft(const PhaseSymbol& a, const PhaseSymbol& b, const WeylGrid& g, const std::vector<double>& etas) {
  WeylKernel Ka = weyl_quantize(a, g), Kb = weyl_quantize(b, g);
  WeylKernel Kab{g, Ka.k * Kb.k * g.h};
  return symbol_from_kernel(Kab, etas);
}

// ---------------------------------------------------------------- seminorm

SeminormReport symbol_seminorm(const PhaseSymbol& a, int n, double mu, double box, int samples) {
  SeminormReport rep;
  for (int b1 = 0; b1 <= n; ++b1)
    for (int b2 = 0; b1 + b2 <= n; ++b2) {
      for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
          double x = -box + 2.0 * box * i / (samples - 1);
          double y = -box + 2.0 * box * j / (samples - 1);
          double hs = 1e-3 * std::max(1.0, 0.1 * std::sqrt(x * x + y * y));
          cplx der = 0.0;
          for (int p = 0; p <= b1; ++p)
            for (int q = 0; q <= b2; ++q) {
              double c = binomial(b1, p) * binomial(b2, q) * (((p + q) % 2) ? -1.0 : 1.0);
              der += c * a(x + (0.5 * b1 - p) * hs, y + (0.5 * b2 - q) * hs);
            }
          der /= std::pow(hs, b1 + b2);
          double v = std::pow(gain_factor(x, y), 0.5 * (b1 + b2 - mu)) * std::abs(der);
          if (v > rep.value) {
            rep.value = v;
            rep.attained_on_boundary = i == 0 || j == 0 || i == samples - 1 || j == samples - 1;
          }
        }
    }
  return rep;
}

}  // namespace heis
