#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "heis/group.hpp"

namespace heis {

// Uniform box grid on [-Lx,Lx]^d x [-Ly,Ly]^d x [-Ls,Ls], endpoints included.
// Axis order is x_1..x_d, y_1..y_d, s; the s index runs fastest.
struct GridSpec {
  int d = 1;
  double Lx = 6.0, Ly = 6.0, Ls = 6.0;
  int nx = 64, ny = 64, ns = 64;

  int axes() const { return 2 * d + 1; }
  int points(int axis) const;
  double half_width(int axis) const;
  double spacing(int axis) const { return 2.0 * half_width(axis) / (points(axis) - 1); }
  double coord(int axis, int i) const { return -half_width(axis) + i * spacing(axis); }
  std::size_t size() const;
  std::size_t stride(int axis) const;
  bool operator==(const GridSpec&) const = default;
  void validate() const;
};

// Composite Simpson weights on n equispaced points (3/8 rule closes an odd interval count).
std::vector<double> simpson_weights(int n, double h);

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const GridSpec& spec);
  GridFunction(const GridSpec& spec, std::vector<cplx> data);

  static GridFunction sample(const GridSpec& spec, const std::function<cplx(const HPoint&)>& f);
  // d = 1 fast path
  static GridFunction sample3(const GridSpec& spec, const std::function<cplx(double, double, double)>& f);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }
  cplx operator[](std::size_t i) const { return data_[i]; }
  cplx& operator[](std::size_t i) { return data_[i]; }

  // Boundary contamination mask (1 = unreliable); empty means all clean.
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::vector<std::uint8_t>& mask() { return mask_; }
  bool masked(std::size_t i) const { return !mask_.empty() && mask_[i]; }

  HPoint point(std::size_t flat) const;
  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::vector<int>& idx) const;

  // Multilinear interpolation, zero outside the box.
  cplx interpolate(const HPoint& w) const;
  cplx interpolate3(double x, double y, double s) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx c);

  void write_binary(std::ostream& os) const;
  static GridFunction read_binary(std::istream& is);
  void write_csv(std::ostream& os) const;

 private:
  GridSpec spec_;
  std::vector<cplx> data_;
  std::vector<std::uint8_t> mask_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx c, GridFunction a);
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);

// Tensor Simpson weights per flat index (Haar = Lebesgue).
std::vector<double> haar_weights(const GridSpec& spec);
cplx haar_integral(const GridFunction& f);
double l2_norm(const GridFunction& f);
double sup_norm(const GridFunction& f, bool skip_masked = false);
cplx inner(const GridFunction& f, const GridFunction& g);  // conjugate-linear in g
double relative_l2(const GridFunction& a, const GridFunction& ref);
double relative_sup(const GridFunction& a, const GridFunction& ref, bool skip_masked = true);

// f * g (w) = int f(w . v^{-1}) g(v) dv. Direct quadrature, d = 1 only.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

enum class Field { X, Y, Z, Zbar, S };
const char* field_name(Field f);

// Fourth-order finite differences; two cells per side are flagged in the mask.
GridFunction partial(const GridFunction& f, int axis);
GridFunction apply_vector_field(Field field, int j, const GridFunction& f);
GridFunction kohn_laplacian(const GridFunction& f);
double sobolev_norm_int(const GridFunction& f, int k);

}  // namespace heis
