#include "heis/special.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace heis {

namespace {
constexpr double kBig = 1e150;
}

void hermite_all(int N, double t, double* out) {
  // Recurrence on the polynomial part, scale tracked in log form, Gaussian applied last.
  double p_prev = 0.0;
  double p = std::pow(std::numbers::pi, -0.25);
  double log_scale = -0.5 * t * t;
  out[0] = p * std::exp(log_scale);
  for (int k = 0; k < N; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * t * p - std::sqrt(static_cast<double>(k) / (k + 1)) * p_prev;
    p_prev = p;
    p = next;
    if (std::abs(p) > kBig) {
      p /= kBig;
      p_prev /= kBig;
      log_scale += std::log(kBig);
    }
    out[k + 1] = log_scale < -745.0 ? 0.0 : p * std::exp(log_scale);
  }
}

double hermite_eval(int n, double t) {
  if (n < 0) throw std::invalid_argument("hermite_eval: n < 0");
  std::vector<double> v(n + 1);
  hermite_all(n, t, v.data());
  return v[n];
}

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  GaussHermite r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.fweights.resize(n);
  std::vector<double> h(n + 1);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i];
    // Newton polish on h_n: h_n' = sqrt(2n) h_{n-1} - x h_n
    for (int it = 0; it < 3; ++it) {
      hermite_all(n, x, h.data());
      double der = std::sqrt(2.0 * n) * h[n - 1] - x * h[n];
      if (der == 0.0) break;
      x -= h[n] / der;
    }
    hermite_all(n - 1, x, h.data());
    double christoffel = 0.0;
    for (int k = 0; k < n; ++k) christoffel += h[k] * h[k];
    r.nodes[i] = x;
    r.fweights[i] = 1.0 / christoffel;
    r.weights[i] = x * x > 700 ? 0.0 : r.fweights[i] * std::exp(-x * x);
  }
  return r;
}

const GaussHermite& gauss_hermite_cached(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussHermite>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussHermite>(gauss_hermite(n));
  return *slot;
}

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const QuadRule& gauss_legendre_cached(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadRule>(gauss_legendre(n));
  return *slot;
}

QuadRule composite_gl(double a, double b, int panels, int q) {
  const auto& g = gauss_legendre_cached(q);
  QuadRule r;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h;
    for (int i = 0; i < q; ++i) {
      r.nodes.push_back(c + 0.5 * h * g.nodes[i]);
      r.weights.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

double laguerre_eval(int m, double p, double t) {
  if (m < 0) throw std::invalid_argument("laguerre_eval: m < 0");
  double l0 = 1.0;
  if (m == 0) return l0;
  double l1 = 1.0 + p - t;
  for (int k = 1; k < m; ++k) {
    double l2 = ((2.0 * k + 1.0 + p - t) * l1 - (k + p) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

void laguerre_fn_all(int N, double x, double* out) {
  double t = 2.0 * x;
  double l0 = 1.0, l1 = 1.0 - t;
  double log_scale = -x;
  auto emit = [&](int n, double v) {
    double sign = (n % 2) ? -1.0 : 1.0;
    out[n] = log_scale < -745.0 ? 0.0 : sign * v * std::exp(log_scale);
  };
  emit(0, l0);
  if (N == 0) return;
  emit(1, l1);
  for (int k = 1; k < N; ++k) {
    double l2 = ((2.0 * k + 1.0 - t) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
    if (std::abs(l1) > kBig) {
      l1 /= kBig;
      l0 /= kBig;
      log_scale += std::log(kBig);
    }
    emit(k + 1, l1);
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double v = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  return v < 1e15 ? std::round(v) : v;
}

namespace {
// e^{-1/(1-u^2)} on (-1, 1), with u = 2x - 1
double bump01(double x) {
  double u = 2.0 * x - 1.0;
  return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
}
double bump_integral(double x) {
  // the integrand is flat to all orders at the ends; 16 panels reach rounding level
  const auto& gl = gauss_legendre_cached(24);
  const int panels = 16;
  double hw = 0.5 * x / panels, acc = 0.0;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < gl.size(); ++i) acc += hw * gl.weights[i] * bump01((2 * p + 1 + gl.nodes[i]) * hw);
  return acc;
}
}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // cubic Hermite table on 8192 cells; values and slopes from the exact integral
  constexpr int n = 8192;
  struct Table {
    std::vector<double> v, d;
    Table() : v(n + 1), d(n + 1) {
      double total = bump_integral(1.0);
      for (int i = 0; i <= n; ++i) {
        double x = double(i) / n;
        v[i] = x <= 0.5 ? bump_integral(x) / total : 1.0 - bump_integral(1.0 - x) / total;
        d[i] = bump01(x) / total;
      }
    }
  };
  static const Table t;
  double u = x * n;
  int i = std::min(static_cast<int>(u), n - 1);
  double s = u - i, h = 1.0 / n;
  double s2 = s * s, s3 = s2 * s;
  double v = (2 * s3 - 3 * s2 + 1) * t.v[i] + (s3 - 2 * s2 + s) * h * t.d[i] + (-2 * s3 + 3 * s2) * t.v[i + 1] +
         (s3 - s2) * h * t.d[i + 1];
  // the cubic can undershoot by ~1e-100 next to the flat ends
  return std::clamp(v, 0.0, 1.0);
}

double soft_relu(double y, double s) {
  double z = y / s;
  double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return y * Phi + s * phi;
}

}  // namespace heis
