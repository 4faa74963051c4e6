#include "heis/fock.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "heis/special.hpp"

namespace heis {

std::vector<std::vector<int>> graded_indices(int d, int N) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(d, 0);
  for (int deg = 0; deg <= N; ++deg) {
    // lexicographically descending in alpha_1 within a shell
    std::function<void(int, int)> rec = [&](int j, int left) {
      if (j == d - 1) {
        a[j] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[j] = v;
        rec(j + 1, left - v);
      }
    };
    rec(0, deg);
  }
  return out;
}

TruncatedBasis::TruncatedBasis(int d, int N, double lambda, int quad_nodes)
    : d_(d), N_(N), lambda_(lambda), quad_(std::max(quad_nodes, 2 * N + 16)) {
  if (d < 1 || N < 0) throw std::invalid_argument("TruncatedBasis: need d >= 1, N >= 0");
  if (lambda == 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("TruncatedBasis: lambda must be nonzero");
  alphas_ = graded_indices(d, N);
  for (int i = 0; i < static_cast<int>(alphas_.size()); ++i) {
    int deg = 0;
    for (int v : alphas_[i]) deg += v;
    degrees_.push_back(deg);
    index_[alphas_[i]] = i;
  }
}

int TruncatedBasis::find(const std::vector<int>& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

Ladder ladder_matrices(const TruncatedBasis& b) {
  int n = b.dim();
  double c = std::sqrt(2.0 * std::abs(b.lambda()));
  Ladder L;
  for (int j = 0; j < b.d(); ++j) {
    Mat up = Mat::Zero(n, n), down = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      auto a = b.alpha(i);
      auto ap = a;
      ap[j] += 1;
      int ip = b.find(ap);
      if (ip >= 0) up(ip, i) = -c * std::sqrt(a[j] + 1.0);
      if (a[j] > 0) {
        auto am = a;
        am[j] -= 1;
        down(b.find(am), i) = c * std::sqrt(static_cast<double>(a[j]));
      }
    }
    if (b.lambda() > 0) {
      L.Q.push_back(up);
      L.Qbar.push_back(down);
    } else {
      L.Q.push_back(down);
      L.Qbar.push_back(up);
    }
  }
  return L;
}

Mat dlambda_matrix(const TruncatedBasis& b) {
  Mat D = Mat::Zero(b.dim(), b.dim());
  for (int i = 0; i < b.dim(); ++i) D(i, i) = dlambda_eigen(b.lambda(), b.degree(i), b.d());
  return D;
}

Mat functional_calculus(const std::function<cplx(double)>& chi, const TruncatedBasis& b) {
  Mat M = Mat::Zero(b.dim(), b.dim());
  for (int i = 0; i < b.dim(); ++i) {
    cplx v = chi(dlambda_eigen(b.lambda(), b.degree(i), b.d()));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("functional_calculus: chi undefined at a spectral point");
    M(i, i) = v;
  }
  return M;
}

Mat rep_matrix_1d(double x, double y, double lambda, int N, int quad_nodes) {
  // <h_m,l, v h_n,l> = sum_q W_q h_m(u_q + a) h_n(u_q - a) e^{2i sgn sqrt|l| y u_q}, a = sqrt|l| x.
  // The -2i l x y phase cancels after centring the integration variable at x.
  const auto& gh = gauss_hermite_cached(quad_nodes);
  double sl = std::sqrt(std::abs(lambda));
  double a = sl * x;
  double kappa = 2.0 * (lambda > 0 ? 1.0 : -1.0) * sl * y;
  int Q = static_cast<int>(gh.size());
  Eigen::MatrixXd Hp(N + 1, Q), Hm(N + 1, Q);
  Eigen::VectorXcd wq(Q);
  for (int q = 0; q < Q; ++q) {
    double u = gh.nodes[q];
    hermite_all(N, u + a, &Hp(0, q));
    hermite_all(N, u - a, &Hm(0, q));
    wq[q] = gh.fweights[q] * std::exp(cplx(0.0, kappa * u));
  }
  return Hp.cast<cplx>() * wq.asDiagonal() * Hm.transpose().cast<cplx>();
}

int rep_quad_nodes(const HPoint& w, const TruncatedBasis& b) {
  double sl = std::sqrt(std::abs(b.lambda()));
  double kappa = 0.0;
  for (int j = 0; j < w.dim(); ++j) kappa = std::max(kappa, 2.0 * sl * std::abs(w.y[j]));
  int need = 2 * b.N() + 16 + static_cast<int>(std::ceil(2.0 * kappa * kappa + 4.0 * kappa));
  return std::max(b.quad_nodes(), std::min(need, 1200));
}

Mat rep_matrix(const HPoint& w, const TruncatedBasis& b, const RepOptions& opt) {
  if (w.dim() != b.d()) throw std::invalid_argument("rep_matrix: dimension mismatch");
  int Q = opt.quad_nodes > 0 ? opt.quad_nodes : rep_quad_nodes(w, b);
  int N = b.N();
  std::vector<Mat> axis;
  for (int j = 0; j < b.d(); ++j) axis.push_back(rep_matrix_1d(w.x[j], w.y[j], b.lambda(), N, Q));
  cplx phase = std::exp(cplx(0.0, b.lambda() * w.s));
  Mat M;
  if (b.d() == 1) {
    M = phase * axis[0];
  } else {
    int n = b.dim();
    M.resize(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        cplx v = phase;
        for (int j = 0; j < b.d(); ++j) v *= axis[j](b.alpha(r)[j], b.alpha(c)[j]);
        M(r, c) = v;
      }
  }
  if (opt.check_unitarity) {
    double def = unitarity_defect(M, b, opt.margin);
    if (def > opt.unitarity_tol)
      throw std::runtime_error("rep_matrix: unitarity defect " + std::to_string(def) + " exceeds threshold");
  }
  return M;
}

double op_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

double hs_norm(const Mat& M) { return M.norm(); }

Mat interior_block(const Mat& M, const TruncatedBasis& b, int margin) {
  std::vector<int> keep;
  for (int i = 0; i < b.dim(); ++i)
    if (b.degree(i) <= b.N() - margin) keep.push_back(i);
  Mat R(keep.size(), keep.size());
  for (size_t r = 0; r < keep.size(); ++r)
    for (size_t c = 0; c < keep.size(); ++c) R(r, c) = M(keep[r], keep[c]);
  return R;
}

double unitarity_defect(const Mat& M, const TruncatedBasis& b, int margin) {
  // Columns of the interior keep their full image inside the truncation only if w is
  // small; the defect is measured on the interior block of M^* M.
  Mat P = M.adjoint() * M;
  Mat I = interior_block(P, b, margin);
  return op_norm(I - Mat::Identity(I.rows(), I.cols()));
}

LadderResidual check_ladder_commutation(const HPoint& w, const TruncatedBasis& b, double h) {
  Ladder L = ladder_matrices(b);
  int margin = 1;
  LadderResidual res;
  auto minv = [&](const HPoint& p) { return rep_matrix(group_inv(p), b); };
  auto d4 = [&](auto&& f, const HPoint& p, int which, int j) {
    auto shift = [&](double t) {
      HPoint q = p;
      if (which == 0) q.x[j] += t;
      else if (which == 1) q.y[j] += t;
      else q.s += t;
      return f(q);
    };
    return Mat((-shift(2 * h) + 8.0 * shift(h) - 8.0 * shift(-h) + shift(-2 * h)) / (12.0 * h));
  };
  const cplx I(0, 1);
  Mat Mw = rep_matrix(w, b);
  Mat Minv = minv(w);
  for (int j = 0; j < b.d(); ++j) {
    Mat dx = d4(minv, w, 0, j), dy = d4(minv, w, 1, j), ds = d4(minv, w, 2, j);
    Mat X = dx + 2.0 * w.y[j] * ds;
    Mat Y = dy - 2.0 * w.x[j] * ds;
    Mat Z = 0.5 * (X - I * Y);
    Mat r1 = interior_block(Z - L.Q[j] * Minv, b, margin);
    res.field_identity = std::max(res.field_identity, op_norm(r1));
    cplx zbar(w.x[j], -w.y[j]);
    Mat comm = (L.Q[j] * Mw - Mw * L.Q[j]) / (2.0 * b.lambda());
    Mat r2 = interior_block(comm + zbar * Mw, b, margin);
    res.commutator_identity = std::max(res.commutator_identity, op_norm(r2));
  }
  return res;
}

void write_matrix_csv(std::ostream& os, const Mat& M) {
  os << "row,col,re,im\n";
  os.precision(17);
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) os << r << "," << c << "," << M(r, c).real() << "," << M(r, c).imag() << "\n";
}

}  // namespace heis
