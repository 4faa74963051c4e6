#include "heis/grid.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace heis {

int GridSpec::points(int axis) const {
  if (axis < d) return nx;
  if (axis < 2 * d) return ny;
  return ns;
}

double GridSpec::half_width(int axis) const {
  if (axis < d) return Lx;
  if (axis < 2 * d) return Ly;
  return Ls;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int a = 0; a < axes(); ++a) n *= static_cast<std::size_t>(points(a));
  return n;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t st = 1;
  for (int a = axes() - 1; a > axis; --a) st *= static_cast<std::size_t>(points(a));
  return st;
}

void GridSpec::validate() const {
  if (d < 1) throw std::invalid_argument("GridSpec: d must be >= 1");
  if (!(Lx > 0 && Ly > 0 && Ls > 0)) throw std::invalid_argument("GridSpec: half widths must be positive");
  if (nx < 2 || ny < 2 || ns < 2) throw std::invalid_argument("GridSpec: need >= 2 points per axis");
}

std::vector<double> simpson_weights(int n, double h) {
  std::vector<double> w(n, 0.0);
  if (n == 2) {
    w[0] = w[1] = h / 2;
    return w;
  }
  int intervals = n - 1;
  int simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
  if (simpson_end < 0) {  // n == 4 (3 intervals): plain 3/8 rule
    simpson_end = 0;
  }
  for (int i = 0; i < simpson_end; i += 2) {
    w[i] += h / 3;
    w[i + 1] += 4 * h / 3;
    w[i + 2] += h / 3;
  }
  if (simpson_end != intervals) {
    int i = simpson_end;
    w[i] += 3 * h / 8;
    w[i + 1] += 9 * h / 8;
    w[i + 2] += 9 * h / 8;
    w[i + 3] += 3 * h / 8;
  }
  return w;
}

GridFunction::GridFunction(const GridSpec& spec) : spec_(spec), data_(spec.size()) { spec_.validate(); }

GridFunction::GridFunction(const GridSpec& spec, std::vector<cplx> data) : spec_(spec), data_(std::move(data)) {
  spec_.validate();
  if (data_.size() != spec_.size()) throw std::invalid_argument("GridFunction: sample count mismatch");
}

GridFunction GridFunction::sample(const GridSpec& spec, const std::function<cplx(const HPoint&)>& f) {
  GridFunction g(spec);
  tbb::parallel_for(std::size_t{0}, g.size(), [&](std::size_t i) { g.data_[i] = f(g.point(i)); });
  return g;
}

GridFunction GridFunction::sample3(const GridSpec& spec, const std::function<cplx(double, double, double)>& f) {
  if (spec.d != 1) throw std::invalid_argument("sample3: d = 1 only");
  GridFunction g(spec);
  tbb::parallel_for(0, spec.nx, [&](int i) {
    double x = spec.coord(0, i);
    for (int j = 0; j < spec.ny; ++j) {
      double y = spec.coord(1, j);
      for (int k = 0; k < spec.ns; ++k)
        g.data_[(static_cast<std::size_t>(i) * spec.ny + j) * spec.ns + k] = f(x, y, spec.coord(2, k));
    }
  });
  return g;
}

std::vector<int> GridFunction::multi_index(std::size_t flat) const {
  int na = spec_.axes();
  std::vector<int> idx(na);
  for (int a = na - 1; a >= 0; --a) {
    int n = spec_.points(a);
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t GridFunction::flat_index(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < spec_.axes(); ++a) flat = flat * spec_.points(a) + idx[a];
  return flat;
}

HPoint GridFunction::point(std::size_t flat) const {
  auto idx = multi_index(flat);
  int d = spec_.d;
  HPoint w{std::vector<double>(d), std::vector<double>(d), 0.0};
  for (int j = 0; j < d; ++j) {
    w.x[j] = spec_.coord(j, idx[j]);
    w.y[j] = spec_.coord(d + j, idx[d + j]);
  }
  w.s = spec_.coord(2 * d, idx[2 * d]);
  return w;
}

cplx GridFunction::interpolate3(double x, double y, double s) const {
  const auto& g = spec_;
  double c[3] = {x, y, s};
  int i0[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    double u = (c[a] + g.half_width(a)) / g.spacing(a);
    int n = g.points(a);
    if (u < 0.0 || u > n - 1) return 0.0;
    int i = static_cast<int>(std::floor(u));
    if (i >= n - 1) i = n - 2;
    i0[a] = i;
    t[a] = u - i;
  }
  cplx acc = 0.0;
  for (int m = 0; m < 8; ++m) {
    double wgt = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < 3; ++a) {
      int bit = (m >> (2 - a)) & 1;
      wgt *= bit ? t[a] : 1.0 - t[a];
      flat = flat * g.points(a) + (i0[a] + bit);
    }
    if (wgt != 0.0) acc += wgt * data_[flat];
  }
  return acc;
}

cplx GridFunction::interpolate(const HPoint& w) const {
  if (spec_.d == 1) return interpolate3(w.x[0], w.y[0], w.s);
  int na = spec_.axes();
  int d = spec_.d;
  std::vector<int> i0(na);
  std::vector<double> t(na);
  for (int a = 0; a < na; ++a) {
    double c = a < d ? w.x[a] : (a < 2 * d ? w.y[a - d] : w.s);
    double u = (c + spec_.half_width(a)) / spec_.spacing(a);
    int n = spec_.points(a);
    if (u < 0.0 || u > n - 1) return 0.0;
    int i = static_cast<int>(std::floor(u));
    if (i >= n - 1) i = n - 2;
    i0[a] = i;
    t[a] = u - i;
  }
  cplx acc = 0.0;
  for (int m = 0; m < (1 << na); ++m) {
    double wgt = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < na; ++a) {
      int bit = (m >> (na - 1 - a)) & 1;
      wgt *= bit ? t[a] : 1.0 - t[a];
      flat = flat * spec_.points(a) + (i0[a] + bit);
    }
    if (wgt != 0.0) acc += wgt * data_[flat];
  }
  return acc;
}

namespace {
void require_same(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw std::invalid_argument("incompatible grids");
}

void merge_mask(GridFunction& a, const GridFunction& b) {
  if (b.mask().empty()) return;
  if (a.mask().empty()) a.mask().assign(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) a.mask()[i] |= b.mask()[i];
}
}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same(spec_, o.spec_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  merge_mask(*this, o);
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same(spec_, o.spec_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  merge_mask(*this, o);
  return *this;
}

GridFunction& GridFunction::operator*=(cplx c) {
  for (auto& v : data_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
  require_same(a.spec(), b.spec());
  GridFunction r(a.spec());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  merge_mask(r, a);
  merge_mask(r, b);
  return r;
}

// Layout: magic "HEISGF01", int32 d, 3 x float64 half widths, 3 x int32 counts,
// then re/im float64 pairs in flat order. Host byte order, which is little-endian
// on every supported target.
void GridFunction::write_binary(std::ostream& os) const {
  os.write("HEISGF01", 8);
  std::int32_t d = spec_.d;
  os.write(reinterpret_cast<const char*>(&d), 4);
  double L[3] = {spec_.Lx, spec_.Ly, spec_.Ls};
  os.write(reinterpret_cast<const char*>(L), sizeof L);
  std::int32_t n[3] = {spec_.nx, spec_.ny, spec_.ns};
  os.write(reinterpret_cast<const char*>(n), sizeof n);
  os.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(cplx)));
}

GridFunction GridFunction::read_binary(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "HEISGF01", 8) != 0) throw std::runtime_error("read_binary: bad magic");
  std::int32_t d;
  double L[3];
  std::int32_t n[3];
  is.read(reinterpret_cast<char*>(&d), 4);
  is.read(reinterpret_cast<char*>(L), sizeof L);
  is.read(reinterpret_cast<char*>(n), sizeof n);
  GridSpec spec{d, L[0], L[1], L[2], n[0], n[1], n[2]};
  GridFunction g(spec);
  is.read(reinterpret_cast<char*>(g.data_.data()), static_cast<std::streamsize>(g.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_binary: truncated payload");
  return g;
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "# d=" << spec_.d << " half_widths=" << spec_.Lx << "," << spec_.Ly << "," << spec_.Ls
     << " points=" << spec_.nx << "," << spec_.ny << "," << spec_.ns << "\n";
  for (int j = 0; j < spec_.d; ++j) os << "x" << j + 1 << ",";
  for (int j = 0; j < spec_.d; ++j) os << "y" << j + 1 << ",";
  os << "s,re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    HPoint w = point(i);
    for (double v : w.x) os << v << ",";
    for (double v : w.y) os << v << ",";
    os << w.s << "," << data_[i].real() << "," << data_[i].imag() << "\n";
  }
}

std::vector<double> haar_weights(const GridSpec& spec) {
  int na = spec.axes();
  std::vector<std::vector<double>> axis_w(na);
  for (int a = 0; a < na; ++a) axis_w[a] = simpson_weights(spec.points(a), spec.spacing(a));
  std::vector<double> w(spec.size(), 1.0);
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    std::size_t rest = flat;
    double v = 1.0;
    for (int a = na - 1; a >= 0; --a) {
      int n = spec.points(a);
      v *= axis_w[a][rest % n];
      rest /= n;
    }
    w[flat] = v;
  }
  return w;
}

cplx haar_integral(const GridFunction& f) {
  auto w = haar_weights(f.spec());
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i];
  return acc;
}

double l2_norm(const GridFunction& f) {
  auto w = haar_weights(f.spec());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * std::norm(f[i]);
  return std::sqrt(acc);
}

double sup_norm(const GridFunction& f, bool skip_masked) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (skip_masked && f.masked(i)) continue;
    m = std::max(m, std::abs(f[i]));
  }
  return m;
}

cplx inner(const GridFunction& f, const GridFunction& g) {
  require_same(f.spec(), g.spec());
  auto w = haar_weights(f.spec());
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * std::conj(g[i]);
  return acc;
}

double relative_l2(const GridFunction& a, const GridFunction& ref) { return l2_norm(a - ref) / l2_norm(ref); }

double relative_sup(const GridFunction& a, const GridFunction& ref, bool skip_masked) {
  GridFunction diff = a - ref;
  merge_mask(diff, ref);
  double den = sup_norm(ref, false);
  return sup_norm(diff, skip_masked) / den;
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  require_same(f.spec(), g.spec());
  const auto& sp = f.spec();
  if (sp.d != 1) throw std::invalid_argument("convolve: d = 1 only");
  auto w = haar_weights(sp);
  GridFunction out(sp);
  // inner points where g is non-negligible
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] != cplx(0.0)) support.push_back(i);
  std::vector<HPoint> vs;
  vs.reserve(support.size());
  for (auto i : support) vs.push_back(g.point(i));
  tbb::parallel_for(std::size_t{0}, out.size(), [&](std::size_t o) {
    HPoint p = out.point(o);
    double x = p.x[0], y = p.y[0], s = p.s;
    cplx acc = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const HPoint& v = vs[k];
      double xv = v.x[0], yv = v.y[0], sv = v.s;
      // w . v^{-1}
      double xs = x - xv, ys = y - yv, ss = s - sv + 2.0 * x * yv - 2.0 * y * xv;
      acc += f.interpolate3(xs, ys, ss) * g[support[k]] * w[support[k]];
    }
    out[o] = acc;
  });
  return out;
}

const char* field_name(Field f) {
  switch (f) {
    case Field::X: return "X";
    case Field::Y: return "Y";
    case Field::Z: return "Z";
    case Field::Zbar: return "Zbar";
    case Field::S: return "S";
  }
  return "?";
}

GridFunction partial(const GridFunction& f, int axis) {
  const auto& sp = f.spec();
  int n = sp.points(axis);
  if (n < 5) throw std::invalid_argument("partial: need >= 5 points per axis");
  double h = sp.spacing(axis);
  std::size_t st = sp.stride(axis);
  GridFunction out(sp);
  out.mask().assign(out.size(), 0);
  const auto& in = f.data();
  auto& res = out.data();
  std::size_t outer = sp.size() / (st * n);
  tbb::parallel_for(std::size_t{0}, outer, [&](std::size_t blk) {
    for (std::size_t inner_i = 0; inner_i < st; ++inner_i) {
      std::size_t base = blk * st * n + inner_i;
      auto at = [&](int i) { return in[base + i * st]; };
      for (int i = 0; i < n; ++i) {
        cplx v;
        if (i >= 2 && i <= n - 3) {
          v = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
        } else if (i == 0) {
          v = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h);
        } else if (i == 1) {
          v = (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h);
        } else if (i == n - 2) {
          v = (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) - at(n - 5)) / (12.0 * h);
        } else {
          v = (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) + 3.0 * at(n - 5)) / (12.0 * h);
        }
        std::size_t idx = base + i * st;
        res[idx] = v;
        bool dirty = i < 2 || i > n - 3;
        if (!f.mask().empty())
          for (int k = std::max(0, i - 2); k <= std::min(n - 1, i + 2) && !dirty; ++k) dirty = f.mask()[base + k * st];
        out.mask()[idx] = dirty;
      }
    }
  });
  return out;
}

GridFunction apply_vector_field(Field field, int j, const GridFunction& f) {
  const auto& sp = f.spec();
  int d = sp.d;
  if (j < 0 || j >= d) throw std::invalid_argument("apply_vector_field: index out of range");
  GridFunction ds = partial(f, 2 * d);
  if (field == Field::S) return ds;
  GridFunction dx = partial(f, j);
  GridFunction dy = partial(f, d + j);
  GridFunction out(sp);
  out.mask() = dx.mask();
  for (std::size_t i = 0; i < out.size(); ++i) out.mask()[i] |= dy.mask()[i] | ds.mask()[i];
  tbb::parallel_for(std::size_t{0}, out.size(), [&](std::size_t i) {
    auto idx = f.multi_index(i);
    double x = sp.coord(j, idx[j]);
    double y = sp.coord(d + j, idx[d + j]);
    cplx X = dx[i] + 2.0 * y * ds[i];
    cplx Y = dy[i] - 2.0 * x * ds[i];
    const cplx I(0, 1);
    switch (field) {
      case Field::X: out[i] = X; break;
      case Field::Y: out[i] = Y; break;
      case Field::Z: out[i] = 0.5 * (X - I * Y); break;
      case Field::Zbar: out[i] = 0.5 * (X + I * Y); break;
      case Field::S: break;
    }
  });
  return out;
}

GridFunction kohn_laplacian(const GridFunction& f) {
  GridFunction out(f.spec());
  out.mask().assign(out.size(), 0);
  for (int j = 0; j < f.spec().d; ++j) {
    out += apply_vector_field(Field::X, j, apply_vector_field(Field::X, j, f));
    out += apply_vector_field(Field::Y, j, apply_vector_field(Field::Y, j, f));
  }
  return out;
}

double sobolev_norm_int(const GridFunction& f, int k) {
  if (k < 0) throw std::invalid_argument("sobolev_norm_int: k must be >= 0");
  int nmin = std::min({f.spec().nx, f.spec().ny, f.spec().ns});
  if (4 * k + 1 > nmin) throw std::invalid_argument("sobolev_norm_int: k too large for grid");
  int d = f.spec().d;
  double total = 0.0;
  std::vector<GridFunction> level{f};
  for (int order = 0; order <= k; ++order) {
    std::vector<GridFunction> next;
    for (const auto& g : level) {
      double n = l2_norm(g);
      total += n * n;
      if (order == k) continue;
      for (int j = 0; j < d; ++j) {
        next.push_back(apply_vector_field(Field::X, j, g));
        next.push_back(apply_vector_field(Field::Y, j, g));
      }
    }
    level = std::move(next);
  }
  return std::sqrt(total);
}

}  // namespace heis
