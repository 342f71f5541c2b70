#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hamrep/util.hpp"

namespace hamrep {

enum class AxisKind { Periodic, Interval };

struct Axis {
  AxisKind kind = AxisKind::Interval;
  double lo = 0.0;
  double hi = 1.0;  // Periodic: domain [lo, lo+period), hi = lo+period
  size_t n = 0;

  static Axis periodic(double period, size_t n, double lo = 0.0) {
    return Axis{AxisKind::Periodic, lo, lo + period, n};
  }
  static Axis interval(double lo, double hi, size_t n) {
    return Axis{AxisKind::Interval, lo, hi, n};
  }

  double length() const { return hi - lo; }
  // Grid step. Periodic axes have n samples per period (no duplicated seam);
  // interval axes include both endpoints.
  double step() const {
    return kind == AxisKind::Periodic ? length() / static_cast<double>(n)
                                      : length() / static_cast<double>(n - 1);
  }
  double coord(size_t i) const { return lo + step() * static_cast<double>(i); }
  bool operator==(const Axis& o) const {
    return kind == o.kind && lo == o.lo && hi == o.hi && n == o.n;
  }
};

struct GridSpec {
  std::vector<Axis> axes;

  size_t dim() const { return axes.size(); }
  size_t size() const {
    size_t s = 1;
    for (const auto& a : axes) s *= a.n;
    return s;
  }
  void validate() const;
  bool operator==(const GridSpec& o) const { return axes == o.axes; }
};

// Real-valued function sampled on a uniform grid. Values are immutable in
// spirit: operations return new functions. Row-major, axis 0 slowest.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridSpec spec, std::vector<double> values);

  static GridFunction zeros(GridSpec spec);
  static GridFunction sample(GridSpec spec,
                             const std::function<double(const std::vector<double>&)>& f);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  size_t dim() const { return spec_.dim(); }
  size_t size() const { return values_.size(); }

  double at(const std::vector<size_t>& idx) const { return values_[flat_index(idx)]; }
  size_t flat_index(const std::vector<size_t>& idx) const;
  std::vector<size_t> unflatten(size_t flat) const;
  std::vector<double> coords(const std::vector<size_t>& idx) const;

  // Tensor Lagrange interpolation (6-point stencils). Points outside an
  // interval axis evaluate to 0: interval-axis data is compactly supported
  // with zero margins by convention. Periodic axes wrap.
  double value(const std::vector<double>& x) const;
  // d/dx_axis of the interpolant.
  double deriv(const std::vector<double>& x, size_t axis) const;
  double second_deriv(const std::vector<double>& x, size_t axis_a, size_t axis_b) const;

  double sup_norm() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

// Smooth profile r with r=1 on [-1/3,1/3], r=0 off (-2/3,2/3) and
// sum_{i in Z} r(t+i) = 1. Evaluation is closed-form; the sampled grid is
// kept for serialization and for callers that want the raw table.
struct BumpBasis {
  double sharpness = 1.0;
  GridFunction r;  // samples of eval() on a periodic grid over [-1,1)

  double eval(double t) const;
  double eval_deriv(double t) const;
  double eval_deriv2(double t) const;
  double eval_deriv3(double t) const;  // finite-difference of eval_deriv2
};

BumpBasis make_bump(double profile_sharpness, size_t samples = 4096);

// R^scale(x) = prod_i r(x_i/scale) sampled on [-scale,scale]^d.
GridFunction tensor_bump(const BumpBasis& b, size_t d, double scale, size_t samples_per_axis = 257);

// Max over all mixed partials of total order `order` of sup |D^i f|.
// Spectral on periodic axes, 4th-order centered stencils on interval axes.
double deriv_sup_norm(const GridFunction& f, int order);

// Per-axis partial derivative of given order (1..4), same grid.
GridFunction partial_deriv(const GridFunction& f, size_t axis, int order);

double integral(const GridFunction& f);

// Integrate out one axis; result has that axis removed.
GridFunction fiber_integral(const GridFunction& f, size_t axis);

// Largest fraction of spectral mass carried by the top decade of modes on
// any periodic axis; a resolution proxy for smoothness audits.
double spectral_tail_fraction(const GridFunction& f);

void save_gridfn(const GridFunction& f, const std::string& path);
GridFunction load_gridfn(const std::string& path);
void export_csv(const GridFunction& f, const std::string& path);

}  // namespace hamrep
