#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <vector>

#include "heis/fock.hpp"
#include "heis/grid.hpp"

namespace heis {

// Symmetric quadrature in lambda for int g(lambda) |lambda|^d dlambda; no node at 0.
struct LambdaGrid {
  std::vector<double> nodes, weights;  // weights already contain |lambda|^d
  int d = 1;
  double c_d = 0.0;  // Plancherel constant 2^{d-1} / pi^{d+1}

  static double plancherel_constant(int d);
  // n_per_sign nodes per sign, geometric in [lmin, lmax], Simpson in log|lambda|,
  // with the [0, lmin] sliver folded into the innermost node.
  static LambdaGrid geometric(int n_per_sign, double lmin, double lmax, int d = 1);
  // nodes given for lambda > 0 with plain dlambda weights; mirrored and |lambda|^d folded in.
  static LambdaGrid symmetric_from(const std::vector<double>& pos_nodes, const std::vector<double>& pos_dl_weights, int d = 1);
  std::size_t size() const { return nodes.size(); }
};

struct SpectralConfig {
  int N = 32;
  double tail = 7.0;    // Hermite support half-width beyond sqrt(2N+1)
  double margin = 6.0;  // extra bandwidth in the u-rule step
  // Drop entries (m, n) whose Hermite pair oscillates faster than the sample grid can
  // integrate: sqrt|lambda| (sqrt(2m+1) + sqrt(2n+1)) > 2 pi / h - dealias_margin.
  bool dealias = true;
  double dealias_margin = 6.0;
};

// Largest resolvable sqrt|lambda|(sqrt(2m+1) + sqrt(2n+1)) on the grid; +inf when disabled.
double dealias_cutoff(const GridSpec& g, const SpectralConfig& cfg);
inline bool resolvable(double lambda, int m, int n, double cutoff) {
  return std::sqrt(std::abs(lambda)) * (std::sqrt(2.0 * m + 1.0) + std::sqrt(2.0 * n + 1.0)) <= cutoff;
}

// F(f)(lambda_k) in the Fock basis {|alpha| <= N}, one matrix per node.
struct SpectralFunction {
  LambdaGrid grid;
  int d = 1;
  int N = 0;
  std::vector<Mat> mats;

  SpectralFunction() = default;
  SpectralFunction(const LambdaGrid& g, int d_, int N_);  // zero matrices
  std::size_t size() const { return mats.size(); }
  int dim() const { return mats.empty() ? 0 : static_cast<int>(mats[0].rows()); }
  TruncatedBasis basis(std::size_t k) const { return TruncatedBasis(d, N, grid.nodes[k]); }

  // Right multiplication per node by M(lambda_k).
  SpectralFunction right_multiply(const std::function<Mat(std::size_t, double)>& M) const;
  SpectralFunction scaled(const std::function<cplx(double)>& c) const;
  SpectralFunction& operator+=(const SpectralFunction& o);
  SpectralFunction& operator-=(const SpectralFunction& o);
  friend SpectralFunction operator+(SpectralFunction a, const SpectralFunction& b) { return a += b; }
  friend SpectralFunction operator-(SpectralFunction a, const SpectralFunction& b) { return a -= b; }

  // c_d sum_k w_k ||F_k||_HS^2, the Plancherel side of ||f||^2.
  double plancherel_norm2() const;
  // c_d sum_k w_k tr(G_k^* F_k)
  cplx plancherel_inner(const SpectralFunction& g) const;
  // share of the HS mass sitting in the top degree shell
  double tail_fraction() const;
  void write_csv(std::ostream& os) const;
};

struct RadialSpectral {
  LambdaGrid grid;
  int N = 0;
  std::vector<std::vector<cplx>> R;  // R[k][m]
};

SpectralFunction gft(const GridFunction& f, const LambdaGrid& grid, int N, const SpectralConfig& cfg = {});
// Max deviation of f from radial symmetry over reflected/swapped sample pairs (relative to sup |f|).
double radial_defect(const GridFunction& f);
RadialSpectral gft_radial(const GridFunction& f, const LambdaGrid& grid, int N, double tol = 1e-8,
                          const SpectralConfig& cfg = {});
SpectralFunction to_spectral(const RadialSpectral& R);

struct InverseReport {
  double tail_fraction = 0.0;
};
GridFunction inverse_gft(const SpectralFunction& F, const GridSpec& target, const SpectralConfig& cfg = {},
                         InverseReport* report = nullptr);
GridFunction inverse_gft_radial(const RadialSpectral& R, const GridSpec& target);
// Trace formula at arbitrary points.
std::vector<cplx> inverse_gft_points(const SpectralFunction& F, const std::vector<HPoint>& pts, const SpectralConfig& cfg = {});

enum class SpecOp { Z, Zbar, S, MinusLaplacian, BesselPower, HomPower };
SpectralFunction spectral_derivative(const SpectralFunction& F, SpecOp which, int j = 0, double rho = 1.0);

// F((is - |z|^2) f) for radial f from R by lambda-differences; rows with missing data are NaN.
RadialSpectral radial_weight_relation(const RadialSpectral& R);

}  // namespace heis
