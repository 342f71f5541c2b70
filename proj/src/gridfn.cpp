#include "hamrep/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "hamrep/fft.hpp"
#include "hamrep/sha256.hpp"
#include "json.hpp"

namespace hamrep {

void GridSpec::validate() const {
  for (const auto& a : axes) {
    if (a.n < 8) throw ArgumentError("axis sample count must be >= 8");
    if (a.kind == AxisKind::Interval && !(a.lo < a.hi))
      throw ArgumentError("interval axis requires lo < hi");
    if (a.kind == AxisKind::Periodic && !(a.length() > 0))
      throw ArgumentError("periodic axis requires positive period");
  }
}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size()) throw ArgumentError("value array does not match grid spec");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ArgumentError("grid values must be finite");
  }
}

GridFunction GridFunction::zeros(GridSpec spec) {
  spec.validate();
  std::vector<double> v(spec.size(), 0.0);
  return GridFunction(std::move(spec), std::move(v));
}

GridFunction GridFunction::sample(GridSpec spec,
                                  const std::function<double(const std::vector<double>&)>& f) {
  spec.validate();
  const size_t d = spec.dim();
  const size_t total = spec.size();
  std::vector<double> vals(total);
  std::vector<size_t> idx(d, 0);
  std::vector<double> x(d);
  for (size_t flat = 0; flat < total; ++flat) {
    for (size_t k = 0; k < d; ++k) x[k] = spec.axes[k].coord(idx[k]);
    vals[flat] = f(x);
    for (size_t k = d; k-- > 0;) {
      if (++idx[k] < spec.axes[k].n) break;
      idx[k] = 0;
    }
  }
  return GridFunction(std::move(spec), std::move(vals));
}

size_t GridFunction::flat_index(const std::vector<size_t>& idx) const {
  size_t flat = 0;
  for (size_t k = 0; k < spec_.dim(); ++k) flat = flat * spec_.axes[k].n + idx[k];
  return flat;
}

std::vector<size_t> GridFunction::unflatten(size_t flat) const {
  std::vector<size_t> idx(spec_.dim());
  for (size_t k = spec_.dim(); k-- > 0;) {
    idx[k] = flat % spec_.axes[k].n;
    flat /= spec_.axes[k].n;
  }
  return idx;
}

std::vector<double> GridFunction::coords(const std::vector<size_t>& idx) const {
  std::vector<double> x(spec_.dim());
  for (size_t k = 0; k < spec_.dim(); ++k) x[k] = spec_.axes[k].coord(idx[k]);
  return x;
}

namespace {

constexpr int kStencil = 6;  // interpolation stencil width

// Lagrange basis values and first two derivatives at local coordinate t,
// nodes at integer offsets off[0..5].
void lagrange_weights(double t, const int* off, double* w, double* dw, double* d2w) {
  for (int j = 0; j < kStencil; ++j) {
    double L = 1.0, dL = 0.0, d2L = 0.0;
    for (int k = 0; k < kStencil; ++k) {
      if (k == j) continue;
      const double denom = static_cast<double>(off[j] - off[k]);
      const double f = (t - static_cast<double>(off[k])) / denom;
      d2L = d2L * f + 2.0 * dL / denom;
      dL = dL * f + L / denom;
      L *= f;
    }
    w[j] = L;
    if (dw) dw[j] = dL;
    if (d2w) d2w[j] = d2L;
  }
}

struct AxisStencil {
  std::array<long, kStencil> idx;  // raw node indices (may fall outside interval axes)
  std::array<double, kStencil> w, dw, d2w;
  double inv_h;
};

AxisStencil axis_stencil(const Axis& ax, double x, bool need_d1, bool need_d2) {
  AxisStencil st;
  const double h = ax.step();
  st.inv_h = 1.0 / h;
  double u = (x - ax.lo) / h;
  if (ax.kind == AxisKind::Periodic) {
    const double np = static_cast<double>(ax.n);
    u -= np * std::floor(u / np);
    if (u >= np) u = 0.0;
  }
  const long i0 = static_cast<long>(std::floor(u));
  const double t = u - static_cast<double>(i0);
  static constexpr int off[kStencil] = {-2, -1, 0, 1, 2, 3};
  double w[kStencil], dw[kStencil], d2w[kStencil];
  lagrange_weights(t, off, w, need_d1 || need_d2 ? dw : nullptr, need_d2 ? d2w : nullptr);
  for (int j = 0; j < kStencil; ++j) {
    long i = i0 + off[j];
    if (ax.kind == AxisKind::Periodic) {
      const long n = static_cast<long>(ax.n);
      i %= n;
      if (i < 0) i += n;
    }
    st.idx[j] = i;
    st.w[j] = w[j];
    st.dw[j] = need_d1 || need_d2 ? dw[j] : 0.0;
    st.d2w[j] = need_d2 ? d2w[j] : 0.0;
  }
  return st;
}

}  // namespace

// Tensor contraction over per-axis stencils. deriv_axis picks which axis uses
// derivative weights (d1 for one axis, d2 if axis_a == axis_b).
static double interp_general(const GridFunction& f, const std::vector<double>& x, long d1_axis,
                             long d2_axis) {
  const GridSpec& spec = f.spec();
  const size_t d = spec.dim();
  if (x.size() != d) throw ArgumentError("point dimension mismatch");
  std::vector<AxisStencil> st(d);
  for (size_t k = 0; k < d; ++k) {
    const bool nd2 = (static_cast<long>(k) == d1_axis && static_cast<long>(k) == d2_axis);
    const bool nd1 = (static_cast<long>(k) == d1_axis || static_cast<long>(k) == d2_axis);
    st[k] = axis_stencil(spec.axes[k], x[k], nd1, nd2);
  }
  // Iterate over the kStencil^d tensor stencil.
  size_t count = 1;
  for (size_t k = 0; k < d; ++k) count *= kStencil;
  std::vector<size_t> strides(d, 1);
  for (size_t k = d; k-- > 1;) strides[k - 1] = strides[k] * spec.axes[k].n;
  const auto& vals = f.values();
  double acc = 0.0;
  std::vector<int> j(d, 0);
  for (size_t c = 0; c < count; ++c) {
    double w = 1.0;
    long flat = 0;
    bool outside = false;
    for (size_t k = 0; k < d; ++k) {
      const long i = st[k].idx[j[k]];
      if (i < 0 || i >= static_cast<long>(spec.axes[k].n)) {
        outside = true;  // zero margin convention on interval axes
        break;
      }
      double wk;
      if (static_cast<long>(k) == d1_axis && static_cast<long>(k) == d2_axis) {
        wk = st[k].d2w[j[k]] * st[k].inv_h * st[k].inv_h;
      } else if (static_cast<long>(k) == d1_axis || static_cast<long>(k) == d2_axis) {
        wk = st[k].dw[j[k]] * st[k].inv_h;
      } else {
        wk = st[k].w[j[k]];
      }
      w *= wk;
      flat += i * static_cast<long>(strides[k]);
    }
    if (!outside) acc += w * vals[static_cast<size_t>(flat)];
    for (size_t k = d; k-- > 0;) {
      if (++j[k] < kStencil) break;
      j[k] = 0;
    }
  }
  return acc;
}

double GridFunction::value(const std::vector<double>& x) const {
  return interp_general(*this, x, -1, -1);
}

double GridFunction::deriv(const std::vector<double>& x, size_t axis) const {
  return interp_general(*this, x, static_cast<long>(axis), -1);
}

double GridFunction::second_deriv(const std::vector<double>& x, size_t a, size_t b) const {
  return interp_general(*this, x, static_cast<long>(a), static_cast<long>(b));
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!(spec_ == o.spec_)) throw ArgumentError("grid mismatch in +=");
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!(spec_ == o.spec_)) throw ArgumentError("grid mismatch in -=");
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Bump basis

namespace {

double sharp_step(double t, double s) {
  // smooth_step with adjustable steepness; still C-infinity and flat-ended.
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-s / t);
  const double b = std::exp(-s / (1.0 - t));
  return a / (a + b);
}

double mollifier_plateau(double t, double s) {
  // 1 on [-1/3,1/3], 0 off (-2/3,2/3).
  const double a = std::fabs(t);
  if (a <= 1.0 / 3.0) return 1.0;
  if (a >= 2.0 / 3.0) return 0.0;
  return sharp_step((2.0 / 3.0 - a) * 3.0, s);
}

}  // namespace

double BumpBasis::eval(double t) const {
  if (std::fabs(t) >= 2.0 / 3.0) return 0.0;
  const double b0 = mollifier_plateau(t, sharpness);
  const double bm = mollifier_plateau(t - 1.0, sharpness);
  const double bp = mollifier_plateau(t + 1.0, sharpness);
  return b0 / (b0 + bm + bp);
}

double BumpBasis::eval_deriv(double t) const {
  const double h = 1e-6;
  return (eval(t + h) - eval(t - h)) / (2.0 * h);
}

double BumpBasis::eval_deriv2(double t) const {
  const double h = 2e-5;
  return (eval(t + h) - 2.0 * eval(t) + eval(t - h)) / (h * h);
}

double BumpBasis::eval_deriv3(double t) const {
  const double h = 2e-4;
  return (eval(t + 2 * h) - 2 * eval(t + h) + 2 * eval(t - h) - eval(t - 2 * h)) / (2 * h * h * h);
}

BumpBasis make_bump(double profile_sharpness, size_t samples) {
  if (!(profile_sharpness >= 0.25 && profile_sharpness <= 4.0))
    throw ResolutionError("bump sharpness outside supported range [0.25, 4]");
  BumpBasis b;
  b.sharpness = profile_sharpness;
  GridSpec spec{{Axis::periodic(2.0, samples, -1.0)}};
  b.r = GridFunction::sample(spec, [&](const std::vector<double>& x) { return b.eval(x[0]); });
  return b;
}

GridFunction tensor_bump(const BumpBasis& b, size_t d, double scale, size_t samples_per_axis) {
  if (d < 1) throw ArgumentError("tensor_bump: d must be >= 1");
  if (!(scale > 0)) throw ArgumentError("tensor_bump: scale must be positive");
  GridSpec spec;
  for (size_t k = 0; k < d; ++k)
    spec.axes.push_back(Axis::interval(-scale, scale, samples_per_axis));
  // Transition band of r spans 1/3 in t, so scale/3 in x; demand a few
  // samples across it.
  if (spec.axes[0].step() > scale / 12.0)
    throw ResolutionError("tensor_bump: scale below grid resolution");
  return GridFunction::sample(spec, [&](const std::vector<double>& x) {
    double p = 1.0;
    for (double xi : x) p *= b.eval(xi / scale);
    return p;
  });
}

// ---------------------------------------------------------------------------
// Calculus

namespace {

// 4th-order centered stencils for derivative orders 1..4 (half-widths 2,2,3,3).
struct FdStencil {
  int radius;
  std::array<double, 7> coef;  // indexed by offset+radius
};

FdStencil fd_stencil(int order) {
  switch (order) {
    case 1:
      return {2, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12, 0, 0}};
    case 2:
      return {2, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0, 0}};
    case 3:
      return {3, {1.0 / 8, -8.0 / 8, 13.0 / 8, 0.0, -13.0 / 8, 8.0 / 8, -1.0 / 8}};
    case 4:
      return {3, {-1.0 / 6, 12.0 / 6, -39.0 / 6, 56.0 / 6, -39.0 / 6, 12.0 / 6, -1.0 / 6}};
    default:
      throw ArgumentError("derivative order must be in 1..4");
  }
}

}  // namespace

GridFunction partial_deriv(const GridFunction& f, size_t axis, int order) {
  if (order < 1 || order > 4) throw ArgumentError("derivative order must be in 1..4");
  if (axis >= f.dim()) throw ArgumentError("axis out of range");
  const GridSpec& spec = f.spec();
  const Axis& ax = spec.axes[axis];
  const size_t n = ax.n;
  // View the array as outer x n x inner.
  size_t inner = 1;
  for (size_t k = axis + 1; k < spec.dim(); ++k) inner *= spec.axes[k].n;
  size_t outer = f.size() / (n * inner);

  std::vector<double> out(f.size());
  const auto& in = f.values();

  if (ax.kind == AxisKind::Periodic) {
    const double freq = 2.0 * kPi / ax.length();
    std::vector<std::complex<double>> line(n);
    for (size_t o = 0; o < outer; ++o) {
      for (size_t i = 0; i < inner; ++i) {
        const size_t base = o * n * inner + i;
        for (size_t j = 0; j < n; ++j) line[j] = in[base + j * inner];
        fft_inplace(line, false);
        for (size_t j = 0; j < n; ++j) {
          const long m = fft_mode(j, n);
          std::complex<double> mult = std::pow(std::complex<double>(0.0, m * freq), order);
          if (order % 2 == 1 && static_cast<size_t>(2 * std::labs(m)) == n)
            mult = 0.0;  // Nyquist mode has no well-defined odd derivative
          line[j] *= mult;
        }
        fft_inplace(line, true);
        for (size_t j = 0; j < n; ++j) out[base + j * inner] = line[j].real();
      }
    }
  } else {
    const FdStencil st = fd_stencil(order);
    const double scale = std::pow(1.0 / ax.step(), order);
    for (size_t o = 0; o < outer; ++o) {
      for (size_t i = 0; i < inner; ++i) {
        const size_t base = o * n * inner + i;
        for (size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int s = -st.radius; s <= st.radius; ++s) {
            const long jj = static_cast<long>(j) + s;
            if (jj < 0 || jj >= static_cast<long>(n)) continue;  // zero margins
            acc += st.coef[s + st.radius] * in[base + static_cast<size_t>(jj) * inner];
          }
          out[base + j * inner] = acc * scale;
        }
      }
    }
  }
  return GridFunction(spec, std::move(out));
}

double deriv_sup_norm(const GridFunction& f, int order) {
  if (order < 1 || order > 4) throw ArgumentError("derivative order must be in 1..4");
  const size_t d = f.dim();
  // Enumerate multi-indices of total order `order`.
  std::vector<int> mi(d, 0);
  double best = 0.0;
  std::function<void(size_t, int)> rec = [&](size_t axis, int rem) {
    if (axis + 1 == d) {
      mi[axis] = rem;
      GridFunction g = f;
      for (size_t k = 0; k < d; ++k) {
        if (mi[k] > 0) g = partial_deriv(g, k, mi[k]);
      }
      best = std::max(best, g.sup_norm());
      return;
    }
    for (int take = 0; take <= rem; ++take) {
      mi[axis] = take;
      rec(axis + 1, rem - take);
    }
  };
  if (d == 0) return 0.0;
  rec(0, order);
  return best;
}

double integral(const GridFunction& f) {
  const GridSpec& spec = f.spec();
  const size_t d = spec.dim();
  KahanSum sum;
  const auto& vals = f.values();
  std::vector<size_t> idx(d, 0);
  for (size_t flat = 0; flat < vals.size(); ++flat) {
    double w = 1.0;
    for (size_t k = 0; k < d; ++k) {
      const Axis& ax = spec.axes[k];
      double wk = ax.step();
      if (ax.kind == AxisKind::Interval && (idx[k] == 0 || idx[k] + 1 == ax.n)) wk *= 0.5;
      w *= wk;
    }
    sum.add(w * vals[flat]);
    for (size_t k = d; k-- > 0;) {
      if (++idx[k] < spec.axes[k].n) break;
      idx[k] = 0;
    }
  }
  return sum.value();
}

GridFunction fiber_integral(const GridFunction& f, size_t axis) {
  if (axis >= f.dim()) throw ArgumentError("fiber_integral: axis out of range");
  const GridSpec& spec = f.spec();
  const Axis& ax = spec.axes[axis];
  const size_t n = ax.n;
  size_t inner = 1;
  for (size_t k = axis + 1; k < spec.dim(); ++k) inner *= spec.axes[k].n;
  const size_t outer = f.size() / (n * inner);

  GridSpec out_spec;
  for (size_t k = 0; k < spec.dim(); ++k) {
    if (k != axis) out_spec.axes.push_back(spec.axes[k]);
  }
  std::vector<double> out(outer * inner, 0.0);
  const auto& in = f.values();
  for (size_t o = 0; o < outer; ++o) {
    for (size_t i = 0; i < inner; ++i) {
      KahanSum sum;
      for (size_t j = 0; j < n; ++j) {
        double w = ax.step();
        if (ax.kind == AxisKind::Interval && (j == 0 || j + 1 == n)) w *= 0.5;
        sum.add(w * in[o * n * inner + j * inner + i]);
      }
      out[o * inner + i] = sum.value();
    }
  }
  if (out_spec.axes.empty()) {
    // Scalar result of a 1-d fiber integral: keep it on a minimal grid.
    out_spec.axes.push_back(Axis::interval(0.0, 1.0, 8));
    std::vector<double> c(8, out[0]);
    return GridFunction(out_spec, c);
  }
  return GridFunction(std::move(out_spec), std::move(out));
}

double spectral_tail_fraction(const GridFunction& f) {
  const GridSpec& spec = f.spec();
  double worst = 0.0;
  for (size_t axis = 0; axis < spec.dim(); ++axis) {
    const Axis& ax = spec.axes[axis];
    if (ax.kind != AxisKind::Periodic) continue;
    const size_t n = ax.n;
    size_t inner = 1;
    for (size_t k = axis + 1; k < spec.dim(); ++k) inner *= spec.axes[k].n;
    const size_t outer = f.size() / (n * inner);
    const auto& in = f.values();
    std::vector<std::complex<double>> line(n);
    double total = 0.0, tail = 0.0;
    const long nyq = static_cast<long>(n / 2);
    for (size_t o = 0; o < outer; ++o) {
      for (size_t i = 0; i < inner; ++i) {
        const size_t base = o * n * inner + i;
        for (size_t j = 0; j < n; ++j) line[j] = in[base + j * inner];
        fft_inplace(line, false);
        for (size_t j = 0; j < n; ++j) {
          const long m = std::labs(fft_mode(j, n));
          const double e = std::norm(line[j]);
          if (m > 0) total += e;
          if (m > (9 * nyq) / 10) tail += e;
        }
      }
    }
    if (total > 0) worst = std::max(worst, tail / total);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Serialization

static const char kMagic[8] = {'H', 'R', 'G', 'F', '0', '0', '0', '1'};

void save_gridfn(const GridFunction& f, const std::string& path) {
  nlohmann::json hdr;
  hdr["dim"] = f.dim();
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : f.spec().axes) {
    nlohmann::json ja;
    ja["kind"] = a.kind == AxisKind::Periodic ? "periodic" : "interval";
    ja["lo"] = a.lo;
    ja["hi"] = a.hi;
    ja["n"] = a.n;
    axes.push_back(ja);
  }
  hdr["axes"] = axes;
  hdr["dtype"] = "f64le";
  const auto& vals = f.values();
  hdr["sha256"] = Sha256::of(vals.data(), vals.size() * sizeof(double));
  const std::string hs = hdr.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  const uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.write(reinterpret_cast<const char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
}

GridFunction load_gridfn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("bad magic in " + path + " (expected HRGF0001)");
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  nlohmann::json hdr = nlohmann::json::parse(hs);
  GridSpec spec;
  for (const auto& ja : hdr.at("axes")) {
    Axis a;
    a.kind = ja.at("kind") == "periodic" ? AxisKind::Periodic : AxisKind::Interval;
    a.lo = ja.at("lo");
    a.hi = ja.at("hi");
    a.n = ja.at("n");
    spec.axes.push_back(a);
  }
  std::vector<double> vals(spec.size());
  in.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (!in) throw FormatError("truncated payload in " + path);
  const std::string sum = Sha256::of(vals.data(), vals.size() * sizeof(double));
  if (hdr.contains("sha256") && hdr["sha256"] != sum)
    throw FormatError("checksum mismatch in " + path + ": header " +
                      hdr["sha256"].get<std::string>() + " vs payload " + sum);
  return GridFunction(std::move(spec), std::move(vals));
}

void export_csv(const GridFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  const size_t d = f.dim();
  for (size_t k = 0; k < d; ++k) out << "x" << k << ",";
  out << "value\n";
  for (size_t flat = 0; flat < f.size(); ++flat) {
    const auto idx = f.unflatten(flat);
    const auto x = f.coords(idx);
    for (size_t k = 0; k < d; ++k) out << format_double(x[k]) << ",";
    out << format_double(f.values()[flat]) << "\n";
  }
}

}  // namespace hamrep
