#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "heis/group.hpp"

namespace heis {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// {F_{alpha,lambda} : |alpha| <= N}, graded lexicographic order.
class TruncatedBasis {
 public:
  TruncatedBasis(int d, int N, double lambda, int quad_nodes = 0);

  int d() const { return d_; }
  int N() const { return N_; }
  double lambda() const { return lambda_; }
  int sgn() const { return lambda_ > 0 ? 1 : -1; }
  int quad_nodes() const { return quad_; }
  int dim() const { return static_cast<int>(alphas_.size()); }
  const std::vector<int>& alpha(int i) const { return alphas_[i]; }
  int degree(int i) const { return degrees_[i]; }
  int find(const std::vector<int>& a) const;  // -1 if outside the truncation
  TruncatedBasis with_lambda(double lambda) const { return TruncatedBasis(d_, N_, lambda, quad_); }

 private:
  int d_, N_;
  double lambda_;
  int quad_;
  std::vector<std::vector<int>> alphas_;
  std::vector<int> degrees_;
  std::map<std::vector<int>, int> index_;
};

// All multi-indices of length d with |alpha| <= N, ordered by degree then lexicographically.
std::vector<std::vector<int>> graded_indices(int d, int N);

struct Ladder {
  std::vector<Mat> Q, Qbar;
};
Ladder ladder_matrices(const TruncatedBasis& b);
Mat dlambda_matrix(const TruncatedBasis& b);
Mat functional_calculus(const std::function<cplx(double)>& chi, const TruncatedBasis& b);

// Eigenvalue 4|lambda|(2|alpha| + d) of D_lambda.
inline double dlambda_eigen(double lambda, int degree, int d) { return 4.0 * std::abs(lambda) * (2.0 * degree + d); }

struct RepOptions {
  int quad_nodes = 0;  // 0: pick from basis and the oscillation scale of w
  bool check_unitarity = false;
  double unitarity_tol = 1e-6;
  int margin = 2;
};

// 1-D factor m_{mn}(x, y) for level N (no e^{i lambda s} phase).
Mat rep_matrix_1d(double x, double y, double lambda, int N, int quad_nodes);
// <h_{alpha,lambda}, v^lambda_w h_{beta,lambda}> in the Schroedinger picture.
Mat rep_matrix(const HPoint& w, const TruncatedBasis& b, const RepOptions& opt = {});
int rep_quad_nodes(const HPoint& w, const TruncatedBasis& b);

// Max over the interior block |alpha|,|beta| <= N - margin of |M^* M - I|, measured in operator norm.
double unitarity_defect(const Mat& M, const TruncatedBasis& b, int margin = 2);
double op_norm(const Mat& M);
double hs_norm(const Mat& M);
// Restriction to indices with |alpha| <= N - margin.
Mat interior_block(const Mat& M, const TruncatedBasis& b, int margin);

// Residual of Z_j u_{w^{-1}} = Q_j u_{w^{-1}} and of (1/2 lambda)[Q_j, u_w] = -zbar_j u_w,
// with the w-derivative taken by central differences of step h.
struct LadderResidual {
  double field_identity = 0.0;
  double commutator_identity = 0.0;
  double max() const { return std::max(field_identity, commutator_identity); }
};
LadderResidual check_ladder_commutation(const HPoint& w, const TruncatedBasis& b, double h);

void write_matrix_csv(std::ostream& os, const Mat& M);

}  // namespace heis
