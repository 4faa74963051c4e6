#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "heis/hpdo.hpp"
#include "heis/special.hpp"
#include "heis/spectral.hpp"

namespace heis {

// Telescoping dyadic partition: Rtilde = theta, Rstar(t) = theta(t / 4) - theta(t), and the
// same pair (psi, phi) in lambda.
struct DyadicPartition {
  double theta(double t) const { return cutoff_theta(t); }
  double Rtilde(double t) const { return theta(t); }
  double Rstar(double t) const { return theta(t / 4.0) - theta(t); }
  double psi(double l) const { return theta(l); }
  double phi(double l) const { return Rstar(l); }
  // weight of block p >= -1 at tau
  double block(int p, double tau) const { return p < 0 ? Rtilde(tau) : Rstar(std::ldexp(tau, -2 * p)); }
  double lambda_block(int r, double l) const { return r < 0 ? psi(l) : phi(std::ldexp(l, -2 * r)); }
  // S_p weight: sum of blocks q <= p - 1, which telescopes to Rtilde(4^{-p} tau)
  double low(int p, double tau) const { return Rtilde(std::ldexp(tau, -2 * p)); }
};

struct PartitionReport {
  double max_sum_defect = 0.0;   // sup |Rtilde + sum Rstar(4^-p .) - 1|
  double square_sum_min = 1.0;   // measured lower constant c
  double square_sum_max = 0.0;
  bool disjoint_gap2 = true;     // Rstar(4^-p .) Rstar(4^-p' .) == 0 for |p - p'| >= 2 on every sample
  bool adjacent_overlap = false;  // neighbouring rings do overlap (so gap 2 is the best possible)
  int samples = 0;
};

DyadicPartition build_partition();
// Invariants on a dense log-spaced sample of [0, 4^P] (plus tau = 0).
PartitionReport validate_partition(const DyadicPartition& part, int P = 8, int samples = 200000);

// ---- blocks on spectral data ----
SpectralFunction lp_project(const SpectralFunction& F, int p, const DyadicPartition& part = {});
SpectralFunction low_freq(const SpectralFunction& F, int p, const DyadicPartition& part = {});
SpectralFunction lambda_project(const SpectralFunction& F, int r, const DyadicPartition& part = {});
// Multiply by chi(D_lambda) on every node (diagonal in the Fock basis).
SpectralFunction spectral_cutoff(const SpectralFunction& F, const std::function<double(double)>& chi);
// Highest block that can be nonzero on the nodes and levels of F.
int max_block(const SpectralFunction& F);

// Largest |p - q| with phi_p phi_q not identically 0 on a dense sample, plus one.
int lambda_support_gap(const DyadicPartition& part, int rmax = 12);

// Block energies ||Delta_p F||^2 (Plancherel side), p = -1..pmax.
std::vector<double> block_energies(const SpectralFunction& F, int pmax, const DyadicPartition& part = {});
void write_block_energy_csv(std::ostream& os, const std::vector<double>& energies);

struct BesovResult {
  double value = 0.0;
  double tail = 0.0;  // weighted size of the last block relative to the total
  std::vector<double> blocks;  // 2^{ps} ||Delta_p u||_{L^q}
};
// Truncated B^s_{q,r}; q = 2 stays spectral, otherwise blocks are inverted onto `target`.
// q or r = infinity is passed as std::numeric_limits<double>::infinity().
BesovResult besov_norm(const SpectralFunction& F, double s, double q, double r, int pmax, const GridSpec* target = nullptr,
                       const DyadicPartition& part = {}, double tail_tol = 1.0);

// ---- Bony decomposition on a common grid ----
struct BonyPieces {
  GridFunction Tuv, Tvu, R;
  GridFunction u, v;  // u = sum of its blocks, likewise v
};
// u, v given by spectral data; blocks above pmax are rejected.
BonyPieces bony_decompose(const SpectralFunction& U, const SpectralFunction& V, int pmax, const GridSpec& target,
                          const SpectralConfig& cfg = {}, const DyadicPartition& part = {});
GridFunction paraproduct(const SpectralFunction& U, const SpectralFunction& V, int pmax, const GridSpec& target,
                         const SpectralConfig& cfg = {});
GridFunction remainder(const SpectralFunction& U, const SpectralFunction& V, int pmax, const GridSpec& target,
                       const SpectralConfig& cfg = {});

// ---- Bernstein ----
// Seed with diagonal entries (1 + D)^{-s}, so each block carries energy.
SpectralFunction bernstein_seed(const LambdaGrid& grid, int N, double s = 2.0);
struct BernsteinResult {
  std::vector<int> p;
  std::vector<double> ratio;
  double exponent = 0.0;  // fitted slope of log2 ratio against p
};
// ||X^beta u_p||_{L^b} / ||u_p||_{L^a} for u_p = Delta_p(seed). beta is a word in {Z, Zbar, S}
// fields; a = 2 and b in {2, inf}. L^inf is the maximum over a grid dilated to scale 2^{-p}.
BernsteinResult bernstein_ratio(const SpectralFunction& seed, const std::vector<SpecOp>& beta, double a, double b,
                                int pmin, int pmax, const DyadicPartition& part = {});

// ---- LP symbols ----
// Weyl symbol of Rstar(mu (2n + 1)) on the oscillator levels at rho = mu (xi^2 + eta^2):
// phi(mu, rho) -> Rstar(rho) as mu -> 0, and phi is even in mu.
double lp_phi(double mu, double rho, const DyadicPartition& part = {}, int block = 0);
// Phi_p with eigenvalues Rstar(4^{1-p} |lambda| (2n + 1)) (Rtilde for p = -1).
HeisenbergSymbol lp_symbol(int p, const DyadicPartition& part = {});

// ---- decay of Delta_q Op(a_p) ----
// I(n, kappa) = (-1)^n int_0^inf Phi(kappa x) L_n(2x) e^{-x} dx: the level-n eigenvalue of op^w(Phi(kappa (xi^2 + eta^2))).
double level_integral(const std::function<double(double)>& Phi, double support_lo, double support_hi, int n, double kappa);
struct DecayRow {
  int p, q;
  double norm;
};
// a_p = Phi(4^{1-p} |lambda| (xi^2 + eta^2)) with Phi supported in [lo, hi]; the norm is the maximum over the nodes
// of `grid` and levels n <= N of |Rstar(4^{1-q} |lambda| (2n+1)) I(n, 4^{1-p} |lambda|)|.
double truncation_decay(const std::function<double(double)>& Phi, double lo, double hi, int p, int q,
                        const LambdaGrid& grid, int N, const DyadicPartition& part = {});
void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows);
struct IpComparison {
  double Ip = 0.0;
  double Phi_value = 0.0;
  double error() const { return std::abs(Ip - Phi_value); }
};
// I_p(alpha, lambda) against Phi(lambda 4^{-p} (2 alpha + 1)) for d = 1.
IpComparison ip_compare(const std::function<double(double)>& Phi, double lo, double hi, int p, int alpha, double lambda);

}  // namespace heis
