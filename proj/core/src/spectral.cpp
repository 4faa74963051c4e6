#include "heis/spectral.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "heis/special.hpp"

namespace heis {

double LambdaGrid::plancherel_constant(int d) { return std::pow(2.0, d - 1) / std::pow(std::numbers::pi, d + 1); }

LambdaGrid LambdaGrid::geometric(int n_per_sign, double lmin, double lmax, int d) {
  if (n_per_sign < 4 || !(lmin > 0) || !(lmax > lmin)) throw std::invalid_argument("LambdaGrid: bad parameters");
  double t0 = std::log(lmin), t1 = std::log(lmax);
  double dt = (t1 - t0) / (n_per_sign - 1);
  auto tw = simpson_weights(n_per_sign, dt);
  std::vector<double> pos(n_per_sign), w(n_per_sign);
  for (int i = 0; i < n_per_sign; ++i) {
    pos[i] = std::exp(t0 + i * dt);
    w[i] = tw[i] * pos[i];  // dlambda = lambda dt
  }
  LambdaGrid g = symmetric_from(pos, w, d);
  // int_0^{lmin} |l|^d dl, assigned to the innermost node of each sign
  double sliver = std::pow(lmin, d + 1) / (d + 1);
  g.weights[n_per_sign - 1] += sliver;
  g.weights[n_per_sign] += sliver;
  return g;
}

LambdaGrid LambdaGrid::symmetric_from(const std::vector<double>& pos, const std::vector<double>& w, int d) {
  LambdaGrid g;
  g.d = d;
  g.c_d = plancherel_constant(d);
  int n = static_cast<int>(pos.size());
  for (int i = n - 1; i >= 0; --i) {
    g.nodes.push_back(-pos[i]);
    g.weights.push_back(w[i] * std::pow(pos[i], d));
  }
  for (int i = 0; i < n; ++i) {
    g.nodes.push_back(pos[i]);
    g.weights.push_back(w[i] * std::pow(pos[i], d));
  }
  for (double v : g.nodes)
    if (v == 0.0) throw std::invalid_argument("LambdaGrid: node at 0");
  return g;
}

SpectralFunction::SpectralFunction(const LambdaGrid& g, int d_, int N_) : grid(g), d(d_), N(N_) {
  int dim = static_cast<int>(graded_indices(d, N).size());
  mats.assign(g.size(), Mat::Zero(dim, dim));
}

SpectralFunction SpectralFunction::right_multiply(const std::function<Mat(std::size_t, double)>& M) const {
  SpectralFunction r = *this;
  tbb::parallel_for(std::size_t{0}, size(), [&](std::size_t k) { r.mats[k] = mats[k] * M(k, grid.nodes[k]); });
  return r;
}

SpectralFunction SpectralFunction::scaled(const std::function<cplx(double)>& c) const {
  SpectralFunction r = *this;
  for (std::size_t k = 0; k < size(); ++k) r.mats[k] *= c(grid.nodes[k]);
  return r;
}

SpectralFunction& SpectralFunction::operator+=(const SpectralFunction& o) {
  if (o.size() != size()) throw std::invalid_argument("SpectralFunction: grid mismatch");
  for (std::size_t k = 0; k < size(); ++k) mats[k] += o.mats[k];
  return *this;
}

SpectralFunction& SpectralFunction::operator-=(const SpectralFunction& o) {
  if (o.size() != size()) throw std::invalid_argument("SpectralFunction: grid mismatch");
  for (std::size_t k = 0; k < size(); ++k) mats[k] -= o.mats[k];
  return *this;
}

double SpectralFunction::plancherel_norm2() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < size(); ++k) acc += grid.weights[k] * mats[k].squaredNorm();
  return grid.c_d * acc;
}

cplx SpectralFunction::plancherel_inner(const SpectralFunction& g) const {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < size(); ++k) acc += grid.weights[k] * (g.mats[k].adjoint() * mats[k]).trace();
  return grid.c_d * acc;
}

double SpectralFunction::tail_fraction() const {
  double top = 0.0, all = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    TruncatedBasis b = basis(k);
    for (int c = 0; c < b.dim(); ++c) {
      double col = grid.weights[k] * mats[k].col(c).squaredNorm();
      all += col;
      if (b.degree(c) == N) top += col;
    }
  }
  return all > 0 ? top / all : 0.0;
}

void SpectralFunction::write_csv(std::ostream& os) const {
  os << "lambda,weight,row,col,re,im\n";
  os.precision(17);
  for (std::size_t k = 0; k < size(); ++k)
    for (int r = 0; r < mats[k].rows(); ++r)
      for (int c = 0; c < mats[k].cols(); ++c)
        os << grid.nodes[k] << "," << grid.weights[k] << "," << r << "," << c << "," << mats[k](r, c).real() << ","
           << mats[k](r, c).imag() << "\n";
}

namespace {

// Uniform rule in the centred variable u, sized by the bandwidth of the integrand.
struct URule {
  std::vector<double> u;
  double du = 0.0;
};

URule make_urule(int N, double lambda, double Ly, const SpectralConfig& cfg) {
  double T = std::sqrt(2.0 * N + 1.0) + cfg.tail;
  double band = 2.0 * T + 2.0 * std::sqrt(std::abs(lambda)) * Ly + cfg.margin;
  double du = 2.0 * std::numbers::pi / band;
  int half = static_cast<int>(std::ceil(T / du));
  URule r;
  r.du = du;
  for (int q = -half; q <= half; ++q) r.u.push_back(q * du);
  return r;
}

// Trapezoid weights: spectrally accurate for the decaying, oscillatory integrands of the
// transform, where Simpson's 2h sub-rule aliases at half the Nyquist frequency.
std::vector<double> trap_weights(int n, double h) {
  std::vector<double> w(n, h);
  w.front() = w.back() = h / 2;
  return w;
}

void require_d1(const GridSpec& g) {
  if (g.d != 1) throw std::invalid_argument("group Fourier transform: d = 1 only");
}

// fhat(i, j, k) = sum_s w_s e^{i lambda_k s} f(i, j, s); rows are (i, j), columns lambda nodes.
Mat s_transform(const GridFunction& f, const LambdaGrid& grid) {
  const auto& sp = f.spec();
  auto ws = trap_weights(sp.ns, sp.spacing(2));
  Mat E(sp.ns, grid.size());
  for (int k = 0; k < sp.ns; ++k)
    for (std::size_t l = 0; l < grid.size(); ++l)
      E(k, l) = ws[k] * std::exp(cplx(0.0, grid.nodes[l] * sp.coord(2, k)));
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> F(
      f.data().data(), static_cast<Eigen::Index>(sp.nx) * sp.ny, sp.ns);
  return F * E;
}

}  // namespace

double dealias_cutoff(const GridSpec& g, const SpectralConfig& cfg) {
  if (!cfg.dealias) return std::numeric_limits<double>::infinity();
  double h = std::max(g.spacing(0), g.spacing(g.d));
  return 2.0 * std::numbers::pi / h - cfg.dealias_margin;
}

SpectralFunction gft(const GridFunction& f, const LambdaGrid& grid, int N, const SpectralConfig& cfg) {
  const auto& sp = f.spec();
  require_d1(sp);
  SpectralFunction out(grid, 1, N);
  Mat fh = s_transform(f, grid);
  auto wx = trap_weights(sp.nx, sp.spacing(0));
  auto wy = trap_weights(sp.ny, sp.spacing(1));
  tbb::parallel_for(std::size_t{0}, grid.size(), [&](std::size_t l) {
    double lam = grid.nodes[l];
    double sl = std::sqrt(std::abs(lam));
    double sg = lam > 0 ? 1.0 : -1.0;
    URule ur = make_urule(N, lam, sp.Ly, cfg);
    int Q = static_cast<int>(ur.u.size());
    // G(i, q) = sum_j w_y fhat(i, j) e^{2i sgn sqrt|l| y_j u_q}, times the u-step
    Mat P(sp.ny, Q);
    for (int j = 0; j < sp.ny; ++j)
      for (int q = 0; q < Q; ++q) P(j, q) = wy[j] * ur.du * std::exp(cplx(0.0, 2.0 * sg * sl * sp.coord(1, j) * ur.u[q]));
    Mat fx(sp.nx, sp.ny);
    for (int i = 0; i < sp.nx; ++i)
      for (int j = 0; j < sp.ny; ++j) fx(i, j) = fh(static_cast<Eigen::Index>(i) * sp.ny + j, l);
    Mat G = fx * P;
    Mat acc = Mat::Zero(N + 1, N + 1);
    Eigen::MatrixXd Hp(N + 1, Q), Hm(N + 1, Q);
    for (int i = 0; i < sp.nx; ++i) {
      if (G.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
      double a = sl * sp.coord(0, i);
      for (int q = 0; q < Q; ++q) {
        hermite_all(N, ur.u[q] + a, &Hp(0, q));
        hermite_all(N, ur.u[q] - a, &Hm(0, q));
      }
      Mat left = Hp.cast<cplx>() * (wx[i] * G.row(i).transpose()).asDiagonal();
      acc.noalias() += left * Hm.transpose().cast<cplx>();
    }
    double cut = dealias_cutoff(sp, cfg);
    for (int m = 0; m <= N; ++m)
      for (int n = 0; n <= N; ++n)
        if (!resolvable(lam, m, n, cut)) acc(m, n) = 0.0;
    out.mats[l] = acc;
  });
  return out;
}

double radial_defect(const GridFunction& f) {
  const auto& sp = f.spec();
  require_d1(sp);
  double sup = sup_norm(f);
  if (sup == 0.0) return 0.0;
  if (sp.nx != sp.ny || sp.Lx != sp.Ly) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  auto at = [&](int i, int j, int k) { return f[(static_cast<std::size_t>(i) * sp.ny + j) * sp.ns + k]; };
  int n = sp.nx;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < sp.ns; ++k) {
        cplx v = at(i, j, k);
        dev = std::max({dev, std::abs(v - at(j, i, k)), std::abs(v - at(n - 1 - i, j, k)), std::abs(v - at(i, n - 1 - j, k))});
      }
  return dev / sup;
}

RadialSpectral gft_radial(const GridFunction& f, const LambdaGrid& grid, int N, double tol, const SpectralConfig& cfg) {
  const auto& sp = f.spec();
  require_d1(sp);
  double dev = radial_defect(f);
  if (dev > tol) throw std::invalid_argument("gft_radial: input is not radial (defect " + std::to_string(dev) + ")");
  Mat fh = s_transform(f, grid);
  auto wx = trap_weights(sp.nx, sp.spacing(0));
  auto wy = trap_weights(sp.ny, sp.spacing(1));
  RadialSpectral R;
  R.grid = grid;
  R.N = N;
  R.R.assign(grid.size(), std::vector<cplx>(N + 1, 0.0));
  tbb::parallel_for(std::size_t{0}, grid.size(), [&](std::size_t l) {
    double al = std::abs(grid.nodes[l]);
    std::vector<double> lag(N + 1);
    for (int i = 0; i < sp.nx; ++i)
      for (int j = 0; j < sp.ny; ++j) {
        double r2 = sp.coord(0, i) * sp.coord(0, i) + sp.coord(1, j) * sp.coord(1, j);
        cplx v = wx[i] * wy[j] * fh(static_cast<Eigen::Index>(i) * sp.ny + j, l);
        laguerre_fn_all(N, al * r2, lag.data());
        for (int m = 0; m <= N; ++m) R.R[l][m] += v * ((m % 2) ? -lag[m] : lag[m]);
      }
    double cut = dealias_cutoff(sp, cfg);
    for (int m = 0; m <= N; ++m)
      if (!resolvable(grid.nodes[l], m, m, cut)) R.R[l][m] = 0.0;
  });
  return R;
}

SpectralFunction to_spectral(const RadialSpectral& R) {
  SpectralFunction F(R.grid, 1, R.N);
  for (std::size_t k = 0; k < F.size(); ++k)
    for (int m = 0; m <= R.N; ++m) F.mats[k](m, m) = R.R[k][m];
  return F;
}

GridFunction inverse_gft(const SpectralFunction& F, const GridSpec& target, const SpectralConfig& cfg, InverseReport* report) {
  require_d1(target);
  if (F.d != 1) throw std::invalid_argument("inverse_gft: d = 1 only");
  const auto& sp = target;
  int N = F.N;
  std::size_t L = F.size();
  // T(i*ny + j, l) = tr(M(w^{-1}) F_l) without the s phase
  Mat T(static_cast<Eigen::Index>(sp.nx) * sp.ny, L);
  tbb::parallel_for(std::size_t{0}, L, [&](std::size_t l) {
    double lam = F.grid.nodes[l];
    double sl = std::sqrt(std::abs(lam));
    double sg = lam > 0 ? 1.0 : -1.0;
    URule ur = make_urule(N, lam, sp.Ly, cfg);
    int Q = static_cast<int>(ur.u.size());
    Eigen::MatrixXd Hp(N + 1, Q), Hm(N + 1, Q);
    Mat Pq(sp.nx, Q);
    const Mat& Fl = F.mats[l];
    for (int i = 0; i < sp.nx; ++i) {
      double a = sl * sp.coord(0, i);
      for (int q = 0; q < Q; ++q) {
        hermite_all(N, ur.u[q] + a, &Hp(0, q));
        hermite_all(N, ur.u[q] - a, &Hm(0, q));
      }
      Mat FH = Fl * Hm.cast<cplx>();
      for (int q = 0; q < Q; ++q) Pq(i, q) = Hp.col(q).cast<cplx>().dot(FH.col(q)) * ur.du;
    }
    Mat Ey(Q, sp.ny);
    for (int q = 0; q < Q; ++q)
      for (int j = 0; j < sp.ny; ++j) Ey(q, j) = std::exp(cplx(0.0, -2.0 * sg * sl * sp.coord(1, j) * ur.u[q]));
    Mat Tij = Pq * Ey;
    for (int i = 0; i < sp.nx; ++i)
      for (int j = 0; j < sp.ny; ++j) T(static_cast<Eigen::Index>(i) * sp.ny + j, l) = Tij(i, j);
  });
  Mat Es(L, sp.ns);
  for (std::size_t l = 0; l < L; ++l)
    for (int k = 0; k < sp.ns; ++k)
      Es(l, k) = F.grid.c_d * F.grid.weights[l] * std::exp(cplx(0.0, -F.grid.nodes[l] * sp.coord(2, k)));
  Mat out = T * Es;
  GridFunction g(sp);
  for (int r = 0; r < out.rows(); ++r)
    for (int k = 0; k < sp.ns; ++k) g[static_cast<std::size_t>(r) * sp.ns + k] = out(r, k);
  if (report) report->tail_fraction = F.tail_fraction();
  return g;
}

GridFunction inverse_gft_radial(const RadialSpectral& R, const GridSpec& target) {
  require_d1(target);
  const auto& sp = target;
  int N = R.N;
  std::size_t L = R.grid.size();
  Mat T(static_cast<Eigen::Index>(sp.nx) * sp.ny, L);
  tbb::parallel_for(0, sp.nx, [&](int i) {
    std::vector<double> lag(N + 1);
    for (int j = 0; j < sp.ny; ++j) {
      double r2 = sp.coord(0, i) * sp.coord(0, i) + sp.coord(1, j) * sp.coord(1, j);
      for (std::size_t l = 0; l < L; ++l) {
        laguerre_fn_all(N, std::abs(R.grid.nodes[l]) * r2, lag.data());
        cplx acc = 0.0;
        for (int m = 0; m <= N; ++m) acc += R.R[l][m] * ((m % 2) ? -lag[m] : lag[m]);
        T(static_cast<Eigen::Index>(i) * sp.ny + j, l) = acc;
      }
    }
  });
  Mat Es(L, sp.ns);
  for (std::size_t l = 0; l < L; ++l)
    for (int k = 0; k < sp.ns; ++k)
      Es(l, k) = R.grid.c_d * R.grid.weights[l] * std::exp(cplx(0.0, -R.grid.nodes[l] * sp.coord(2, k)));
  Mat out = T * Es;
  GridFunction g(sp);
  for (int r = 0; r < out.rows(); ++r)
    for (int k = 0; k < sp.ns; ++k) g[static_cast<std::size_t>(r) * sp.ns + k] = out(r, k);
  return g;
}

std::vector<cplx> inverse_gft_points(const SpectralFunction& F, const std::vector<HPoint>& pts, const SpectralConfig& cfg) {
  if (F.d != 1) throw std::invalid_argument("inverse_gft_points: d = 1 only");
  int N = F.N;
  double ymax = 0.0;
  for (const auto& p : pts) ymax = std::max(ymax, std::abs(p.y[0]));
  std::vector<cplx> out(pts.size(), 0.0);
  std::vector<std::vector<cplx>> per(F.size(), std::vector<cplx>(pts.size()));
  tbb::parallel_for(std::size_t{0}, F.size(), [&](std::size_t l) {
    double lam = F.grid.nodes[l];
    double sl = std::sqrt(std::abs(lam));
    double sg = lam > 0 ? 1.0 : -1.0;
    URule ur = make_urule(N, lam, ymax, cfg);
    int Q = static_cast<int>(ur.u.size());
    Eigen::MatrixXd Hp(N + 1, Q), Hm(N + 1, Q);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      double a = sl * pts[p].x[0];
      for (int q = 0; q < Q; ++q) {
        hermite_all(N, ur.u[q] + a, &Hp(0, q));
        hermite_all(N, ur.u[q] - a, &Hm(0, q));
      }
      Mat FH = F.mats[l] * Hm.cast<cplx>();
      cplx acc = 0.0;
      for (int q = 0; q < Q; ++q)
        acc += Hp.col(q).cast<cplx>().dot(FH.col(q)) * std::exp(cplx(0.0, -2.0 * sg * sl * pts[p].y[0] * ur.u[q]));
      per[l][p] = acc * ur.du * std::exp(cplx(0.0, -lam * pts[p].s)) * F.grid.weights[l] * F.grid.c_d;
    }
  });
  for (std::size_t l = 0; l < F.size(); ++l)
    for (std::size_t p = 0; p < pts.size(); ++p) out[p] += per[l][p];
  return out;
}

SpectralFunction spectral_derivative(const SpectralFunction& F, SpecOp which, int j, double rho) {
  return F.right_multiply([&](std::size_t k, double lam) -> Mat {
    TruncatedBasis b(F.d, F.N, lam);
    switch (which) {
      case SpecOp::Z: return ladder_matrices(b).Q.at(j);
      case SpecOp::Zbar: return ladder_matrices(b).Qbar.at(j);
      case SpecOp::S: return Mat::Identity(b.dim(), b.dim()) * cplx(0.0, -lam);
      case SpecOp::MinusLaplacian: return dlambda_matrix(b);
      case SpecOp::BesselPower: return functional_calculus([&](double x) { return cplx(std::pow(1.0 + x, rho)); }, b);
      case SpecOp::HomPower:
        return functional_calculus(
            [&](double x) {
              if (rho < 0 && x < 1e-300) throw std::domain_error("spectral_derivative: negative power at zero");
              return cplx(std::pow(x, rho));
            },
            b);
    }
    (void)k;
    return Mat();
  });
}

RadialSpectral radial_weight_relation(const RadialSpectral& R) {
  RadialSpectral out = R;
  const auto& nodes = R.grid.nodes;
  std::size_t L = nodes.size();
  int d = R.grid.d;
  auto deriv = [&](std::size_t k, int m) -> cplx {
    // three-point nonuniform differences within one sign
    bool pos = nodes[k] > 0;
    auto same = [&](std::size_t i) { return i < L && (nodes[i] > 0) == pos; };
    bool has_l = k > 0 && same(k - 1), has_r = same(k + 1);
    if (has_l && has_r) {
      double h1 = nodes[k] - nodes[k - 1], h2 = nodes[k + 1] - nodes[k];
      return (-h2 / (h1 * (h1 + h2))) * R.R[k - 1][m] + ((h2 - h1) / (h1 * h2)) * R.R[k][m] + (h1 / (h2 * (h1 + h2))) * R.R[k + 1][m];
    }
    return cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  };
  for (std::size_t k = 0; k < L; ++k) {
    double lam = nodes[k];
    for (int m = 0; m <= R.N; ++m) {
      cplx dl = deriv(k, m);
      if (lam > 0) {
        cplx diff = m >= 1 ? R.R[k][m] - R.R[k][m - 1] : 0.0;
        out.R[k][m] = dl - (m / lam) * diff;
      } else if (m < R.N) {
        out.R[k][m] = dl + ((m + d) / std::abs(lam)) * (R.R[k][m] - R.R[k][m + 1]);
      } else {
        out.R[k][m] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
      }
    }
  }
  return out;
}

}  // namespace heis
