#include "heis/lp.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace heis {

namespace {
double degree_tau(double lambda, int degree, int d) { return dlambda_eigen(lambda, degree, d); }

SpectralFunction diagonal_weight(const SpectralFunction& F, const std::function<double(double)>& w) {
  SpectralFunction G = F;
  tbb::parallel_for(std::size_t{0}, F.size(), [&](std::size_t k) {
    TruncatedBasis b = F.basis(k);
    for (int i = 0; i < b.dim(); ++i) G.mats[k].col(i) *= w(degree_tau(F.grid.nodes[k], b.degree(i), F.d));
  });
  return G;
}

void fit_slope(const std::vector<double>& x, const std::vector<double>& y, double& slope) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace

DyadicPartition build_partition() { return {}; }

PartitionReport validate_partition(const DyadicPartition& part, int P, int samples) {
  PartitionReport rep;
  rep.samples = samples + 1;
  const double top = std::ldexp(1.0, 2 * P);
  for (int i = 0; i <= samples; ++i) {
    // tau = 0 and a log sweep from 1e-3 to 4^P
    double tau = i == 0 ? 0.0 : 1e-3 * std::pow(top / 1e-3, double(i - 1) / (samples - 1));
    double sum = 0.0, sq = 0.0;
    std::vector<double> w(P + 2);
    for (int p = -1; p <= P; ++p) {
      w[p + 1] = part.block(p, tau);
      sum += w[p + 1];
      sq += w[p + 1] * w[p + 1];
    }
    // beyond block P the remaining rings sum to 1 - theta(4^{-P-1} tau), which is 0 here
    rep.max_sum_defect = std::max(rep.max_sum_defect, std::abs(sum - 1.0));
    rep.square_sum_min = std::min(rep.square_sum_min, sq);
    rep.square_sum_max = std::max(rep.square_sum_max, sq);
    for (int p = 0; p <= P; ++p)
      for (int q = p + 1; q <= P; ++q) {
        double prod = w[p + 1] * w[q + 1];
        if (q - p >= 2 && prod != 0.0) rep.disjoint_gap2 = false;
        if (q - p == 1 && prod > 0.0) rep.adjacent_overlap = true;
      }
  }
  return rep;
}

SpectralFunction spectral_cutoff(const SpectralFunction& F, const std::function<double(double)>& chi) {
  return diagonal_weight(F, chi);
}

SpectralFunction lp_project(const SpectralFunction& F, int p, const DyadicPartition& part) {
  if (p < -1) throw std::invalid_argument("lp_project: p >= -1");
  return diagonal_weight(F, [&](double tau) { return part.block(p, tau); });
}

SpectralFunction low_freq(const SpectralFunction& F, int p, const DyadicPartition& part) {
  if (p < 0) throw std::invalid_argument("low_freq: p >= 0");
  return diagonal_weight(F, [&](double tau) { return part.low(p, tau); });
}

SpectralFunction lambda_project(const SpectralFunction& F, int r, const DyadicPartition& part) {
  if (r < -1) throw std::invalid_argument("lambda_project: r >= -1");
  return F.scaled([&](double l) { return cplx(part.lambda_block(r, l)); });
}

int max_block(const SpectralFunction& F) {
  double tmax = 0.0;
  for (double l : F.grid.nodes) tmax = std::max(tmax, degree_tau(l, F.N, F.d));
  int p = -1;
  while (std::ldexp(1.0, 2 * (p + 1)) < tmax) ++p;
  return p;
}

int lambda_support_gap(const DyadicPartition& part, int rmax) {
  int gap = 0;
  const int n = 20000;
  const double top = 8.0 * std::ldexp(1.0, 2 * rmax);
  std::vector<double> ls;
  for (int i = 0; i <= n; ++i) ls.push_back(1e-3 * std::pow(top / 1e-3, double(i) / n));
  for (int r = -1; r <= rmax; ++r)
    for (int s = r + 1; s <= rmax; ++s)
      for (double l : ls)
        if (part.lambda_block(r, l) * part.lambda_block(s, l) != 0.0) {
          gap = std::max(gap, s - r);
          break;
        }
  return gap + 1;
}

std::vector<double> block_energies(const SpectralFunction& F, int pmax, const DyadicPartition& part) {
  std::vector<double> e;
  for (int p = -1; p <= pmax; ++p) e.push_back(lp_project(F, p, part).plancherel_norm2());
  return e;
}

void write_block_energy_csv(std::ostream& os, const std::vector<double>& energies) {
  os << "p,l2_norm\n";
  os.precision(12);
  for (std::size_t i = 0; i < energies.size(); ++i) os << static_cast<int>(i) - 1 << ',' << std::sqrt(energies[i]) << '\n';
}

namespace {
double lq_norm(const GridFunction& g, double q) {
  if (std::isinf(q)) return sup_norm(g);
  auto w = haar_weights(g.spec());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += w[i] * std::pow(std::abs(g[i]), q);
  return std::pow(acc, 1.0 / q);
}
}  // namespace

BesovResult besov_norm(const SpectralFunction& F, double s, double q, double r, int pmax, const GridSpec* target,
                       const DyadicPartition& part, double tail_tol) {
  if (q != 2.0 && !target) throw std::invalid_argument("besov_norm: q != 2 needs a target grid");
  BesovResult res;
  for (int p = -1; p <= pmax; ++p) {
    SpectralFunction B = lp_project(F, p, part);
    double n = q == 2.0 ? std::sqrt(B.plancherel_norm2()) : lq_norm(inverse_gft(B, *target), q);
    res.blocks.push_back(std::pow(2.0, p * s) * n);
  }
  if (std::isinf(r)) {
    for (double b : res.blocks) res.value = std::max(res.value, b);
  } else {
    for (double b : res.blocks) res.value += std::pow(b, r);
    res.value = std::pow(res.value, 1.0 / r);
  }
  res.tail = res.value > 0.0 ? res.blocks.back() / res.value : 0.0;
  if (res.tail > tail_tol) throw std::runtime_error("besov_norm: last block carries too much of the norm");
  return res;
}

BonyPieces bony_decompose(const SpectralFunction& U, const SpectralFunction& V, int pmax, const GridSpec& target,
                          const SpectralConfig& cfg, const DyadicPartition& part) {
  auto blocks = [&](const SpectralFunction& F) {
    // reject data that extends past pmax
    SpectralFunction rest = F;
    std::vector<GridFunction> out;
    for (int p = -1; p <= pmax; ++p) {
      SpectralFunction B = lp_project(F, p, part);
      rest -= B;
      out.push_back(inverse_gft(B, target, cfg));
    }
    double total = F.plancherel_norm2();
    if (total > 0.0 && rest.plancherel_norm2() > 1e-20 * total)
      throw std::invalid_argument("bony_decompose: input not band-limited to pmax");
    return out;
  };
  auto bu = blocks(U), bv = blocks(V);
  const int nb = pmax + 2;  // index i <-> block i - 1
  BonyPieces out{GridFunction(target), GridFunction(target), GridFunction(target), GridFunction(target),
                 GridFunction(target)};
  for (int i = 0; i < nb; ++i) {
    out.u += bu[i];
    out.v += bv[i];
  }
  // S_{q-1} u = sum_{p <= q-2} Delta_p u
  GridFunction Su(target), Sv(target);
  for (int j = 0; j < nb; ++j) {
    if (j >= 2) {
      Su += bu[j - 2];
      Sv += bv[j - 2];
    }
    out.Tuv += pointwise_product(Su, bv[j]);
    out.Tvu += pointwise_product(Sv, bu[j]);
    for (int i = std::max(0, j - 1); i <= std::min(nb - 1, j + 1); ++i) out.R += pointwise_product(bu[i], bv[j]);
  }
  return out;
}

GridFunction paraproduct(const SpectralFunction& U, const SpectralFunction& V, int pmax, const GridSpec& target,
                         const SpectralConfig& cfg) {
  return bony_decompose(U, V, pmax, target, cfg).Tuv;
}

GridFunction remainder(const SpectralFunction& U, const SpectralFunction& V, int pmax, const GridSpec& target,
                       const SpectralConfig& cfg) {
  return bony_decompose(U, V, pmax, target, cfg).R;
}

SpectralFunction bernstein_seed(const LambdaGrid& grid, int N, double s) {
  SpectralFunction F(grid, grid.d, N);
  for (std::size_t k = 0; k < F.size(); ++k) {
    TruncatedBasis b = F.basis(k);
    for (int i = 0; i < b.dim(); ++i) F.mats[k](i, i) = std::pow(1.0 + degree_tau(grid.nodes[k], b.degree(i), grid.d), -s);
  }
  return F;
}

BernsteinResult bernstein_ratio(const SpectralFunction& seed, const std::vector<SpecOp>& beta, double a, double b,
                                int pmin, int pmax, const DyadicPartition& part) {
  if (a != 2.0) throw std::invalid_argument("bernstein_ratio: a = 2 only");
  if (b != 2.0 && !std::isinf(b)) throw std::invalid_argument("bernstein_ratio: b in {2, inf}");
  BernsteinResult res;
  std::vector<double> xs, ys;
  for (int p = pmin; p <= pmax; ++p) {
    SpectralFunction u = lp_project(seed, p, part);
    double den = std::sqrt(u.plancherel_norm2());
    SpectralFunction v = u;
    for (SpecOp op : beta) v = spectral_derivative(v, op);
    double num;
    if (b == 2.0) {
      num = std::sqrt(v.plancherel_norm2());
    } else {
      // grid at the block's own scale: (2^-p x, 2^-p y, 4^-p s)
      std::vector<HPoint> pts;
      double h = std::ldexp(0.25, -p);
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
          for (int k = -1; k <= 1; ++k) pts.emplace_back(i * h, j * h, k * h * h);
      num = 0.0;
      for (cplx val : inverse_gft_points(v, pts)) num = std::max(num, std::abs(val));
    }
    if (!(den > 0.0)) throw std::runtime_error("bernstein_ratio: empty block; lambda grid or N too small");
    res.p.push_back(p);
    res.ratio.push_back(num / den);
    xs.push_back(p);
    ys.push_back(std::log2(num / den));
  }
  if (xs.size() >= 2) fit_slope(xs, ys, res.exponent);
  return res;
}

// ---------------------------------------------------------------- LP symbols

double lp_phi(double mu, double rho, const DyadicPartition& part, int block) {
  mu = std::abs(mu);
  auto R = [&](double t) { return block < 0 ? part.Rtilde(t) : part.Rstar(t); };
  double top = block < 0 ? 2.0 : 8.0;  // support of the profile
  double nlevels = (top / std::max(mu, 1e-300) - 1.0) / 2.0;
  // below this the level sum is replaced by its semiclassical limit, good to O(mu)
  if (mu < 1e-7 || nlevels > 2e6) return R(rho);
  int nmax = static_cast<int>(std::floor(nlevels));
  double x = rho / mu;
  std::vector<double> lf(nmax + 1);
  laguerre_fn_all(nmax, x, lf.data());
  double acc = 0.0;
  for (int n = 0; n <= nmax; ++n) acc += 2.0 * R(mu * (2.0 * n + 1.0)) * lf[n];
  return acc;
}

HeisenbergSymbol lp_symbol(int p, const DyadicPartition& part) {
  if (p < -1) throw std::invalid_argument("lp_symbol: p >= -1");
  double scale = std::ldexp(4.0, -2 * std::max(p, 0));  // 4^{1-p}; 4 for the low block
  auto a = radial_symbol(
      "Phi_" + std::to_string(p),
      [=](double l, int n) { return cplx(part.block(p, 4.0 * std::abs(l) * (2.0 * n + 1.0))); },
      [=](double l, double x, double y) { return cplx(lp_phi(scale * std::abs(l), scale * std::abs(l) * (x * x + y * y), part, p)); },
      0.0);
  a.sigma_fn = [=](const HPoint&, double l, double X, double Y) {
    return cplx(lp_phi(scale * std::abs(l), scale * (X * X + Y * Y), part, p));
  };
  return a;
}

// ---------------------------------------------------------------- decay

namespace {
// all levels 0..N at once: (-1)^n int Phi(kappa x) L_n(2x) e^{-x} dx
std::vector<double> level_integrals(const std::function<double(double)>& Phi, double lo, double hi, int N, double kappa) {
  std::vector<double> acc(N + 1, 0.0);
  double x0 = lo / kappa, x1 = std::min(hi / kappa, 4.0 * N + 200.0);  // e^{-x} L_n(2x) is negligible past x1
  if (x1 <= x0) return acc;
  double width = std::min(0.5, (hi - lo) / (16.0 * kappa));
  int panels = static_cast<int>(std::ceil((x1 - x0) / width));
  double pw = (x1 - x0) / panels;
  const auto& gl = gauss_legendre_cached(16);
  std::vector<double> lf(N + 1);
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < gl.size(); ++i) {
      double x = x0 + pw * (p + 0.5 * (1.0 + gl.nodes[i]));
      double f = Phi(kappa * x) * 0.5 * pw * gl.weights[i];
      if (f == 0.0) continue;
      laguerre_fn_all(N, x, lf.data());
      for (int n = 0; n <= N; ++n) acc[n] += f * lf[n];
    }
  return acc;
}
}  // namespace

double level_integral(const std::function<double(double)>& Phi, double support_lo, double support_hi, int n, double kappa) {
  return level_integrals(Phi, support_lo, support_hi, n, kappa)[n];
}

double truncation_decay(const std::function<double(double)>& Phi, double lo, double hi, int p, int q,
                        const LambdaGrid& grid, int N, const DyadicPartition& part) {
  std::vector<double> best(grid.size(), 0.0);
  tbb::parallel_for(std::size_t{0}, grid.size(), [&](std::size_t k) {
    double l = std::abs(grid.nodes[k]);
    std::vector<double> I;
    for (int n = 0; n <= N; ++n) {
      double w = part.block(q, 4.0 * l * (2.0 * n + 1.0));
      if (w == 0.0) continue;
      if (I.empty()) I = level_integrals(Phi, lo, hi, N, std::ldexp(4.0 * l, -2 * p));
      best[k] = std::max(best[k], std::abs(w * I[n]));
    }
  });
  return *std::max_element(best.begin(), best.end());
}

void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows) {
  os << "p,q,norm\n";
  os.precision(12);
  for (const auto& r : rows) os << r.p << ',' << r.q << ',' << r.norm << '\n';
}

IpComparison ip_compare(const std::function<double(double)>& Phi, double lo, double hi, int p, int alpha, double lambda) {
  double kappa = std::ldexp(std::abs(lambda), -2 * p);
  IpComparison c;
  c.Ip = level_integral(Phi, lo, hi, alpha, kappa);
  c.Phi_value = Phi(kappa * (2.0 * alpha + 1.0));
  return c;
}

}  // namespace heis
