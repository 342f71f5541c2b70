#include "hamrep/hamflow.hpp"

#include <algorithm>
#include <cmath>

#include "hamrep/map_nodes.hpp"

namespace hamrep {

// ---------------------------------------------------------------------------
// Small matrices

SmallMat SmallMat::identity(size_t n) {
  SmallMat m(n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SmallMat SmallMat::operator*(const SmallMat& o) const {
  SmallMat r(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      const double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (size_t j = 0; j < n; ++j) r(i, j) += v * o(k, j);
    }
  return r;
}

SmallMat SmallMat::transpose() const {
  SmallMat r(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Vec SmallMat::apply(const Vec& x) const {
  Vec y(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

double SmallMat::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

SmallMat symplectic_j0(size_t dim) {
  if (dim % 2 != 0) throw ArgumentError("symplectic dimension must be even");
  SmallMat j(dim);
  for (size_t i = 0; i + 1 < dim; i += 2) {
    j(i, i + 1) = 1.0;
    j(i + 1, i) = -1.0;
  }
  return j;
}

double symplectic_defect(const SmallMat& jac) {
  const SmallMat j0 = symplectic_j0(jac.n);
  SmallMat d = jac.transpose() * j0 * jac;
  for (size_t i = 0; i < d.n * d.n; ++i) d.a[i] -= j0.a[i];
  return d.max_abs();
}

Vec solve_linear(SmallMat A, Vec b) {
  const size_t n = A.n;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(piv, col))) piv = r;
    if (std::fabs(A(piv, col)) < 1e-300) throw InversionError("singular linear system");
    if (piv != col) {
      for (size_t j = 0; j < n; ++j) std::swap(A(col, j), A(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (size_t r = col + 1; r < n; ++r) {
      const double f = A(r, col) / A(col, col);
      if (f == 0.0) continue;
      for (size_t j = col; j < n; ++j) A(r, j) -= f * A(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (size_t i = n; i-- > 0;) {
    double s = b[i];
    for (size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Profiles

namespace {

class PlateauProfile final : public Profile {
 public:
  PlateauProfile(double amp, double r1, double r2) : amp_(amp), r1_(r1), r2_(r2) {
    if (!(r1 >= 0 && r2 > r1)) throw ArgumentError("plateau profile requires 0 <= r1 < r2");
  }
  double value(double t) const override {
    const double a = std::fabs(t);
    if (a <= r1_) return amp_;
    if (a >= r2_) return 0.0;
    return amp_ * smooth_step((r2_ - a) / (r2_ - r1_));
  }
  double deriv(double t) const override {
    const double a = std::fabs(t);
    if (a <= r1_ || a >= r2_) return 0.0;
    const double s = (t >= 0 ? 1.0 : -1.0);
    return -amp_ * smooth_step_deriv((r2_ - a) / (r2_ - r1_)) / (r2_ - r1_) * s;
  }
  double deriv2(double t) const override {
    const double h = 1e-6 * (r2_ - r1_);
    return (deriv(t + h) - deriv(t - h)) / (2 * h);
  }
  std::string kind() const override { return "plateau"; }
  nlohmann::json params() const override {
    return {{"amp", amp_}, {"r1", r1_}, {"r2", r2_}};
  }

 private:
  double amp_, r1_, r2_;
};

class GridProfile final : public Profile {
 public:
  explicit GridProfile(GridFunction f) : f_(std::move(f)) {
    if (f_.dim() != 1) throw ArgumentError("grid profile must be 1-d");
  }
  double value(double t) const override { return f_.value({t}); }
  double deriv(double t) const override { return f_.deriv({t}, 0); }
  double deriv2(double t) const override { return f_.second_deriv({t}, 0, 0); }
  std::string kind() const override { return "grid"; }
  nlohmann::json params() const override {
    nlohmann::json j;
    const Axis& ax = f_.spec().axes[0];
    j["axis"] = {{"kind", ax.kind == AxisKind::Periodic ? "periodic" : "interval"},
                 {"lo", ax.lo},
                 {"hi", ax.hi},
                 {"n", ax.n}};
    j["values"] = f_.values();
    return j;
  }

 private:
  GridFunction f_;
};

// Fixed slope on each slab [c_k - half, c_k + half], smooth blends between
// consecutive linear pieces, flat zero outside the first/last slab plus one
// gap. Used by the slab shear family.
class SlabProfile final : public Profile {
 public:
  SlabProfile(double slope, std::vector<double> centers, double half, double gap)
      : slope_(slope), centers_(std::move(centers)), half_(half), gap_(gap) {
    if (centers_.empty()) throw ArgumentError("slab profile needs at least one slab");
    std::sort(centers_.begin(), centers_.end());
    for (size_t k = 1; k < centers_.size(); ++k) {
      if (centers_[k] - centers_[k - 1] < 2 * half_ + 0.5 * gap_)
        throw ArgumentError("slab profile: slabs overlap");
    }
    // Center the value range: on slab k the profile is slope*(t-c_k) + off
    // with a common offset such that min+max = 0 over the active window.
    offset_ = 0.0;
  }

  double value(double t) const override { return eval<0>(t); }
  double deriv(double t) const override { return eval<1>(t); }
  double deriv2(double t) const override {
    const double h = 1e-6 * half_;
    return (deriv(t + h) - deriv(t - h)) / (2 * h);
  }
  std::string kind() const override { return "slab"; }
  nlohmann::json params() const override {
    return {{"slope", slope_}, {"centers", centers_}, {"half", half_}, {"gap", gap_}};
  }

 private:
  template <int Order>
  double eval(double t) const {
    const size_t m = centers_.size();
    const double lo_edge = centers_.front() - half_;
    const double hi_edge = centers_.back() + half_;
    if (t <= lo_edge - gap_ || t >= hi_edge + gap_) return 0.0;
    if (t < lo_edge) {  // entry blend 0 -> first linear piece
      return blend<Order>(t, lo_edge - gap_, gap_, 0.0, 0.0, lin(0, t), slope_);
    }
    if (t > hi_edge) {  // exit blend last piece -> 0
      return blend<Order>(t, hi_edge, gap_, lin(m - 1, t), slope_, 0.0, 0.0);
    }
    for (size_t k = 0; k < m; ++k) {
      if (t <= centers_[k] + half_) {
        if (t >= centers_[k] - half_) {
          if constexpr (Order == 0) return lin(k, t);
          return slope_;
        }
        const double a = centers_[k - 1] + half_;
        const double w = (centers_[k] - half_) - a;
        return blend<Order>(t, a, w, lin(k - 1, t), slope_, lin(k, t), slope_);
      }
    }
    return 0.0;
  }

  double lin(size_t k, double t) const { return slope_ * (t - centers_[k]) + offset_; }

  template <int Order>
  double blend(double t, double a, double w, double A, double dA, double B, double dB) const {
    const double u = (t - a) / w;
    const double s = smooth_step(u);
    if constexpr (Order == 0) return (1 - s) * A + s * B;
    const double ds = smooth_step_deriv(u) / w;
    return (1 - s) * dA + s * dB + ds * (B - A);
  }

  double slope_;
  std::vector<double> centers_;
  double half_, gap_;
  double offset_;
};

class ScaledProfile final : public Profile {
 public:
  ScaledProfile(ProfilePtr base, double scale) : base_(std::move(base)), scale_(scale) {}
  double value(double t) const override { return scale_ * base_->value(t); }
  double deriv(double t) const override { return scale_ * base_->deriv(t); }
  double deriv2(double t) const override { return scale_ * base_->deriv2(t); }
  std::string kind() const override { return "scaled"; }
  nlohmann::json params() const override {
    return {{"scale", scale_},
            {"base", {{"kind", base_->kind()}, {"params", base_->params()}}}};
  }

 private:
  ProfilePtr base_;
  double scale_;
};

}  // namespace

ProfilePtr scaled_profile(ProfilePtr base, double scale) {
  return std::make_shared<ScaledProfile>(std::move(base), scale);
}

ProfilePtr plateau_profile(double amp, double r1, double r2) {
  return std::make_shared<PlateauProfile>(amp, r1, r2);
}

ProfilePtr grid_profile(GridFunction f) { return std::make_shared<GridProfile>(std::move(f)); }

ProfilePtr slab_profile(double slope, std::vector<double> centers, double half_width, double gap,
                        double, double) {
  return std::make_shared<SlabProfile>(slope, std::move(centers), half_width, gap);
}

ProfilePtr profile_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  const nlohmann::json& p = j.at("params");
  if (kind == "plateau") return plateau_profile(p.at("amp"), p.at("r1"), p.at("r2"));
  if (kind == "slab")
    return slab_profile(p.at("slope"), p.at("centers").get<std::vector<double>>(), p.at("half"),
                        p.at("gap"), 0, 0);
  if (kind == "scaled")
    return scaled_profile(profile_from_json(p.at("base")), p.at("scale"));
  if (kind == "grid") {
    const auto& ja = p.at("axis");
    Axis ax;
    ax.kind = ja.at("kind") == "periodic" ? AxisKind::Periodic : AxisKind::Interval;
    ax.lo = ja.at("lo");
    ax.hi = ja.at("hi");
    ax.n = ja.at("n");
    return grid_profile(GridFunction(GridSpec{{ax}}, p.at("values").get<std::vector<double>>()));
  }
  throw FormatError("unknown profile kind: " + kind);
}

// ---------------------------------------------------------------------------
// SymplecticMap facade

size_t SymplecticMap::dim() const { return node_->dim(); }
Vec SymplecticMap::displacement(const Vec& x) const { return node_->displacement(x); }

Vec SymplecticMap::apply(const Vec& x) const {
  Vec d = node_->displacement(x);
  for (size_t i = 0; i < d.size(); ++i) d[i] += x[i];
  return d;
}

SmallMat SymplecticMap::jacobian(const Vec& x) const { return node_->jacobian(x); }
Box SymplecticMap::support() const { return node_->support(); }
std::string SymplecticMap::kind() const { return node_->kind(); }

Vec evaluate(const SymplecticMap& m, const Vec& p) { return m.apply(p); }

GridFunction pullback(const SymplecticMap& m, const GridFunction& u) {
  const GridSpec& spec = u.spec();
  if (spec.dim() != m.dim()) throw ArgumentError("pullback: dimension mismatch");
  std::vector<double> out(u.size());
  for (size_t flat = 0; flat < u.size(); ++flat) {
    const Vec x = u.coords(u.unflatten(flat));
    out[flat] = u.value(m.apply(x));
  }
  return GridFunction(spec, std::move(out));
}

double symplectic_residual(const SymplecticMap& m, const std::vector<Vec>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, symplectic_defect(m.jacobian(p)));
  return worst;
}

SmallMat fd_jacobian(const SymplecticMap& m, const Vec& x, double h) {
  const size_t d = m.dim();
  SmallMat jac(d);
  Vec xp = x;
  for (size_t j = 0; j < d; ++j) {
    const double x0 = x[j];
    xp[j] = x0 + h;
    Vec f1 = m.apply(xp);
    xp[j] = x0 - h;
    Vec f_1 = m.apply(xp);
    xp[j] = x0 + 2 * h;
    Vec f2 = m.apply(xp);
    xp[j] = x0 - 2 * h;
    Vec f_2 = m.apply(xp);
    xp[j] = x0;
    for (size_t i = 0; i < d; ++i)
      jac(i, j) = (8.0 * (f1[i] - f_1[i]) - (f2[i] - f_2[i])) / (12.0 * h);
  }
  return jac;
}

double symplectic_residual_fd(const SymplecticMap& m, const std::vector<Vec>& pts, double h) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, symplectic_defect(fd_jacobian(m, p, h)));
  return worst;
}

std::vector<Vec> halton_points(const Box& box, size_t count) {
  static constexpr uint64_t primes[6] = {2, 3, 5, 7, 11, 13};
  const size_t d = box.dim();
  if (d > 6) throw ArgumentError("halton_points: dimension too large");
  std::vector<Vec> pts;
  pts.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Vec x(d);
    for (size_t k = 0; k < d; ++k)
      x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * halton(i + 1, primes[k]);
    pts.push_back(std::move(x));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Primitive nodes

Box MapNode::infinite_box(size_t dim) {
  Box b;
  b.lo.assign(dim, -kHugeCoord);
  b.hi.assign(dim, kHugeCoord);
  return b;
}

namespace {

class IdentityNode final : public MapNode {
 public:
  explicit IdentityNode(size_t d) : d_(d) {}
  size_t dim() const override { return d_; }
  Vec displacement(const Vec&) const override { return Vec(d_, 0.0); }
  SmallMat jacobian(const Vec&) const override { return SmallMat::identity(d_); }
  Box support() const override {
    Box b;
    b.lo.assign(d_, 0.0);
    b.hi.assign(d_, 0.0);
    return b;
  }
  std::string kind() const override { return "identity"; }
  nlohmann::json to_json() const override { return {{"kind", "identity"}, {"dim", d_}}; }

 private:
  size_t d_;
};

class TranslationNode final : public MapNode {
 public:
  explicit TranslationNode(Vec v) : v_(std::move(v)) {}
  size_t dim() const override { return v_.size(); }
  Vec displacement(const Vec&) const override { return v_; }
  SmallMat jacobian(const Vec&) const override { return SmallMat::identity(v_.size()); }
  Box support() const override { return infinite_box(v_.size()); }
  NodePtr native_inverse() const override {
    Vec w(v_.size());
    for (size_t i = 0; i < v_.size(); ++i) w[i] = -v_[i];
    return std::make_shared<TranslationNode>(std::move(w));
  }
  std::string kind() const override { return "translation"; }
  nlohmann::json to_json() const override { return {{"kind", "translation"}, {"v", v_}}; }

 private:
  Vec v_;
};

class LinearNode final : public MapNode {
 public:
  explicit LinearNode(SmallMat m) : m_(std::move(m)) {}
  size_t dim() const override { return m_.n; }
  Vec displacement(const Vec& x) const override {
    Vec y = m_.apply(x);
    for (size_t i = 0; i < y.size(); ++i) y[i] -= x[i];
    return y;
  }
  SmallMat jacobian(const Vec&) const override { return m_; }
  Box support() const override { return infinite_box(m_.n); }
  std::string kind() const override { return "linear"; }
  nlohmann::json to_json() const override {
    return {{"kind", "linear"}, {"m", m_.a}, {"n", m_.n}};
  }

 private:
  SmallMat m_;
};

class ShearNode final : public MapNode {
 public:
  ShearNode(size_t dim, size_t target, size_t source, ProfilePtr h)
      : d_(dim), t_(target), s_(source), h_(std::move(h)) {
    if (t_ / 2 != s_ / 2 || t_ == s_ || t_ >= d_ || s_ >= d_)
      throw ArgumentError("shear axes must form a symplectic pair");
  }
  size_t dim() const override { return d_; }
  Vec displacement(const Vec& x) const override {
    Vec d(d_, 0.0);
    d[t_] = h_->value(x[s_]);
    return d;
  }
  SmallMat jacobian(const Vec& x) const override {
    SmallMat j = SmallMat::identity(d_);
    j(t_, s_) = h_->deriv(x[s_]);
    return j;
  }
  Box support() const override { return infinite_box(d_); }
  NodePtr native_inverse() const override {
    return std::make_shared<ShearNode>(d_, t_, s_, scaled_profile(h_, -1.0));
  }
  std::string kind() const override { return "shear"; }
  nlohmann::json to_json() const override {
    return {{"kind", "shear"},
            {"dim", d_},
            {"target", t_},
            {"source", s_},
            {"profile", {{"kind", h_->kind()}, {"params", h_->params()}}}};
  }

 private:
  size_t d_, t_, s_;
  ProfilePtr h_;
};

// Rotation of the (ax, ax+1) plane about `center` by a radius-dependent
// angle; exactly symplectic for any angle profile.
class TwistNode final : public MapNode {
 public:
  TwistNode(size_t dim, size_t ax, Vec c2, ProfilePtr angle)
      : d_(dim), ax_(ax), c_(std::move(c2)), ang_(std::move(angle)) {
    if (ax_ % 2 != 0 || ax_ + 1 >= d_) throw ArgumentError("twist axis must start a pair");
    if (c_.size() != 2) throw ArgumentError("twist center must be 2-d");
  }
  size_t dim() const override { return d_; }
  Vec displacement(const Vec& x) const override {
    const double u = x[ax_] - c_[0], v = x[ax_ + 1] - c_[1];
    const double rho = std::hypot(u, v);
    Vec d(d_, 0.0);
    const double phi = ang_->value(rho);
    if (phi == 0.0) return d;
    const double cp = std::cos(phi), sp = std::sin(phi);
    d[ax_] = (cp - 1.0) * u - sp * v;
    d[ax_ + 1] = sp * u + (cp - 1.0) * v;
    return d;
  }
  SmallMat jacobian(const Vec& x) const override {
    SmallMat j = SmallMat::identity(d_);
    const double u = x[ax_] - c_[0], v = x[ax_ + 1] - c_[1];
    const double rho = std::hypot(u, v);
    if (rho < 1e-14) return j;
    const double phi = ang_->value(rho);
    const double dphi = ang_->deriv(rho);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double ru = u / rho, rv = v / rho;
    const double au = -sp * u - cp * v;  // dR/dphi * w rows
    const double av = cp * u - sp * v;
    j(ax_, ax_) = cp + au * dphi * ru;
    j(ax_, ax_ + 1) = -sp + au * dphi * rv;
    j(ax_ + 1, ax_) = sp + av * dphi * ru;
    j(ax_ + 1, ax_ + 1) = cp + av * dphi * rv;
    return j;
  }
  Box support() const override {
    Box b = infinite_box(d_);
    if (ang_->kind() == "plateau") {
      const double r2 = ang_->params().at("r2");
      b.lo[ax_] = c_[0] - r2;
      b.hi[ax_] = c_[0] + r2;
      b.lo[ax_ + 1] = c_[1] - r2;
      b.hi[ax_ + 1] = c_[1] + r2;
    }
    return b;
  }
  NodePtr native_inverse() const override {
    return std::make_shared<TwistNode>(d_, ax_, c_, scaled_profile(ang_, -1.0));
  }
  std::string kind() const override { return "twist"; }
  nlohmann::json to_json() const override {
    return {{"kind", "twist"},
            {"dim", d_},
            {"ax", ax_},
            {"center", c_},
            {"profile", {{"kind", ang_->kind()}, {"params", ang_->params()}}}};
  }

 private:
  size_t d_;
  size_t ax_;
  Vec c_;
  ProfilePtr ang_;
};

class ComposeNode final : public MapNode {
 public:
  explicit ComposeNode(std::vector<SymplecticMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw ArgumentError("composition of zero maps");
    for (const auto& m : maps_) {
      if (m.dim() != maps_[0].dim()) throw ArgumentError("composition dimension mismatch");
    }
  }
  size_t dim() const override { return maps_[0].dim(); }
  Vec displacement(const Vec& x) const override {
    Vec d(dim(), 0.0);
    Vec cur = x;
    for (size_t i = maps_.size(); i-- > 0;) {  // rightmost applies first
      Vec step = maps_[i].displacement(cur);
      for (size_t k = 0; k < d.size(); ++k) {
        d[k] += step[k];
        cur[k] += step[k];
      }
    }
    return d;
  }
  SmallMat jacobian(const Vec& x) const override {
    Vec cur = x;
    SmallMat j = SmallMat::identity(dim());
    for (size_t i = maps_.size(); i-- > 0;) {
      j = maps_[i].jacobian(cur) * j;
      cur = maps_[i].apply(cur);
    }
    return j;
  }
  Box support() const override {
    Box b = maps_[0].support();
    for (size_t i = 1; i < maps_.size(); ++i) {
      const Box o = maps_[i].support();
      for (size_t k = 0; k < b.lo.size(); ++k) {
        b.lo[k] = std::min(b.lo[k], o.lo[k]);
        b.hi[k] = std::max(b.hi[k], o.hi[k]);
      }
    }
    return b;
  }
  std::string kind() const override { return "compose"; }
  NodePtr native_inverse() const override {
    std::vector<SymplecticMap> inv;
    for (size_t i = maps_.size(); i-- > 0;) inv.push_back(maps_[i].inverse());
    return SymplecticMap::composition(std::move(inv)).node();
  }
  nlohmann::json to_json() const override {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : maps_) arr.push_back(m.to_json());
    return {{"kind", "compose"}, {"maps", arr}};
  }

 private:
  std::vector<SymplecticMap> maps_;
};

class InverseNode final : public MapNode {
 public:
  explicit InverseNode(SymplecticMap fwd) : fwd_(std::move(fwd)) {}
  size_t dim() const override { return fwd_.dim(); }
  Vec displacement(const Vec& y) const override {
    // Solve fwd(y + d) = y for d by Newton, seeded with -displacement(y).
    const size_t n = dim();
    Vec d = fwd_.displacement(y);
    for (double& v : d) v = -v;
    Vec x(n);
    double best = 1e300;
    int stalled = 0;
    for (int it = 0; it < 60; ++it) {
      for (size_t k = 0; k < n; ++k) x[k] = y[k] + d[k];
      Vec resid = fwd_.displacement(x);
      double rnorm = 0.0;
      for (size_t k = 0; k < n; ++k) {
        resid[k] += d[k];  // fwd(x) - y
        rnorm = std::max(rnorm, std::fabs(resid[k]));
      }
      if (rnorm <= 1e-12) return d;
      // Integrator-backed nodes bottom out at their evaluation noise; accept
      // once the residual stops improving below 1e-9.
      if (rnorm < 0.5 * best) {
        best = rnorm;
        stalled = 0;
      } else if (++stalled >= 4) {
        if (best <= 1e-9) return d;
        throw InversionError("map inversion: Newton stalled at " + format_double(best) +
                             " (kind=" + fwd_.kind() + ")");
      }
      const Vec corr = solve_linear(fwd_.jacobian(x), resid);
      for (size_t k = 0; k < n; ++k) d[k] -= corr[k];
    }
    throw InversionError("map inversion: Newton exhausted iterations (kind=" + fwd_.kind() +
                         ")");
  }
  SmallMat jacobian(const Vec& y) const override {
    Vec d = displacement(y);
    Vec x = y;
    for (size_t k = 0; k < x.size(); ++k) x[k] += d[k];
    const SmallMat jf = fwd_.jacobian(x);
    const size_t n = dim();
    SmallMat out(n);
    for (size_t col = 0; col < n; ++col) {
      Vec e(n, 0.0);
      e[col] = 1.0;
      Vec sol = solve_linear(jf, e);
      for (size_t r = 0; r < n; ++r) out(r, col) = sol[r];
    }
    return out;
  }
  Box support() const override { return fwd_.support(); }
  std::string kind() const override { return "inverse"; }
  nlohmann::json to_json() const override {
    return {{"kind", "inverse"}, {"map", fwd_.to_json()}};
  }
  const SymplecticMap& child() const { return fwd_; }

 private:
  SymplecticMap fwd_;
};

// Implicit-midpoint flow of an autonomous grid Hamiltonian.
class FlowNode final : public MapNode {
 public:
  FlowNode(GridFunction H, double time, FlowParams params)
      : H_(std::move(H)), time_(time), params_(params) {
    if (H_.dim() % 2 != 0) throw ArgumentError("flow: Hamiltonian dimension must be even");
    const double nsteps = std::ceil(std::fabs(time_) / params_.step);
    if (nsteps > static_cast<double>(params_.max_steps))
      throw ArgumentError("flow: step budget exceeded");
    steps_ = std::max<size_t>(1, static_cast<size_t>(nsteps));
  }
  size_t dim() const override { return H_.dim(); }

  Vec field(const Vec& x) const {
    const size_t n = dim();
    Vec f(n);
    for (size_t i = 0; i + 1 < n; i += 2) {
      f[i] = H_.deriv(x, i + 1);
      f[i + 1] = -H_.deriv(x, i);
    }
    return f;
  }

  Vec displacement(const Vec& x) const override {
    const size_t n = dim();
    const double tau = time_ / static_cast<double>(steps_);
    Vec cur = x;
    Vec total(n, 0.0);
    Vec mid(n);
    for (size_t s = 0; s < steps_; ++s) {
      Vec d = field(cur);
      for (double& v : d) v *= tau;
      for (int it = 0; it < 100; ++it) {
        for (size_t k = 0; k < n; ++k) mid[k] = cur[k] + 0.5 * d[k];
        Vec f = field(mid);
        double delta = 0.0;
        for (size_t k = 0; k < n; ++k) {
          const double nd = tau * f[k];
          delta = std::max(delta, std::fabs(nd - d[k]));
          d[k] = nd;
        }
        if (delta <= 1e-15) break;
      }
      for (size_t k = 0; k < n; ++k) {
        cur[k] += d[k];
        total[k] += d[k];
      }
    }
    return total;
  }

  SmallMat jacobian(const Vec& x) const override {
    const size_t n = dim();
    const double tau = time_ / static_cast<double>(steps_);
    Vec cur = x;
    SmallMat jac = SmallMat::identity(n);
    Vec mid(n);
    for (size_t s = 0; s < steps_; ++s) {
      Vec d = field(cur);
      for (double& v : d) v *= tau;
      for (int it = 0; it < 100; ++it) {
        for (size_t k = 0; k < n; ++k) mid[k] = cur[k] + 0.5 * d[k];
        Vec f = field(mid);
        double delta = 0.0;
        for (size_t k = 0; k < n; ++k) {
          const double nd = tau * f[k];
          delta = std::max(delta, std::fabs(nd - d[k]));
          d[k] = nd;
        }
        if (delta <= 1e-15) break;
      }
      SmallMat A(n);
      for (size_t i = 0; i + 1 < n; i += 2) {
        for (size_t j = 0; j < n; ++j) {
          A(i, j) = H_.second_deriv(mid, i + 1, j);
          A(i + 1, j) = -H_.second_deriv(mid, i, j);
        }
      }
      SmallMat lhs = SmallMat::identity(n), rhs = SmallMat::identity(n);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
          lhs(i, j) -= 0.5 * tau * A(i, j);
          rhs(i, j) += 0.5 * tau * A(i, j);
        }
      SmallMat rj = rhs * jac;
      SmallMat step(n);
      for (size_t col = 0; col < n; ++col) {
        Vec b(n);
        for (size_t r = 0; r < n; ++r) b[r] = rj(r, col);
        Vec sol = solve_linear(lhs, b);
        for (size_t r = 0; r < n; ++r) step(r, col) = sol[r];
      }
      jac = step;
      for (size_t k = 0; k < n; ++k) cur[k] += d[k];
    }
    return jac;
  }

  Box support() const override {
    Box b;
    b.lo.resize(dim());
    b.hi.resize(dim());
    for (size_t k = 0; k < dim(); ++k) {
      b.lo[k] = H_.spec().axes[k].lo;
      b.hi[k] = H_.spec().axes[k].hi;
    }
    return b;
  }
  std::string kind() const override { return "flow"; }
  nlohmann::json to_json() const override {
    return {{"kind", "flow"}, {"H", gridfn_to_json(H_)}, {"time", time_}, {"step", params_.step}};
  }

 private:
  GridFunction H_;
  double time_;
  FlowParams params_;
  size_t steps_ = 1;
};

}  // namespace

nlohmann::json gridfn_to_json(const GridFunction& f) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : f.spec().axes) {
    axes.push_back({{"kind", a.kind == AxisKind::Periodic ? "periodic" : "interval"},
                    {"lo", a.lo},
                    {"hi", a.hi},
                    {"n", a.n}});
  }
  return {{"axes", axes}, {"values", f.values()}};
}

GridFunction gridfn_from_json(const nlohmann::json& j) {
  GridSpec spec;
  for (const auto& ja : j.at("axes")) {
    Axis a;
    a.kind = ja.at("kind") == "periodic" ? AxisKind::Periodic : AxisKind::Interval;
    a.lo = ja.at("lo");
    a.hi = ja.at("hi");
    a.n = ja.at("n");
    spec.axes.push_back(a);
  }
  return GridFunction(std::move(spec), j.at("values").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------
// Builders

SymplecticMap SymplecticMap::identity(size_t dim) {
  return SymplecticMap(std::make_shared<IdentityNode>(dim));
}

SymplecticMap SymplecticMap::translation(Vec v) {
  return SymplecticMap(std::make_shared<TranslationNode>(std::move(v)));
}

SymplecticMap SymplecticMap::linear(SmallMat m, double tol) {
  if (symplectic_defect(m) > tol)
    throw ArgumentError("linear map is not symplectic within tolerance");
  return SymplecticMap(std::make_shared<LinearNode>(std::move(m)));
}

SymplecticMap SymplecticMap::shear(size_t dim, size_t target, size_t source, ProfilePtr h) {
  return SymplecticMap(std::make_shared<ShearNode>(dim, target, source, std::move(h)));
}

SymplecticMap SymplecticMap::radial_twist(size_t dim, size_t ax, Vec center2, ProfilePtr angle) {
  return SymplecticMap(std::make_shared<TwistNode>(dim, ax, std::move(center2), std::move(angle)));
}

SymplecticMap SymplecticMap::composition(std::vector<SymplecticMap> maps) {
  if (maps.size() == 1) return maps[0];
  return SymplecticMap(std::make_shared<ComposeNode>(std::move(maps)));
}

SymplecticMap SymplecticMap::inverse() const {
  if (auto inv = std::dynamic_pointer_cast<const InverseNode>(node_)) return inv->child();
  if (NodePtr nat = node_->native_inverse()) return SymplecticMap(std::move(nat));
  return SymplecticMap(std::make_shared<InverseNode>(*this));
}

SymplecticMap SymplecticMap::hamiltonian_flow(GridFunction H, double time, FlowParams params) {
  return SymplecticMap(std::make_shared<FlowNode>(std::move(H), time, params));
}

SymplecticMap disk_push(size_t dim, size_t ax, const Vec& from2, const Vec& to2,
                        double content_radius, double support_radius) {
  const double dist = std::hypot(to2[0] - from2[0], to2[1] - from2[1]);
  if (dist == 0.0) return SymplecticMap::identity(dim);
  // Half-turn about `from`, then about the midpoint: the rigid core
  // translates by (to - from).
  const Vec mid{0.5 * (from2[0] + to2[0]), 0.5 * (from2[1] + to2[1])};
  const double r1a = content_radius;
  const double r1b = content_radius + 0.5 * dist;
  if (!(support_radius > r1b + 1e-12))
    throw ArgumentError("disk_push: support radius too small for the move");
  auto twist1 = SymplecticMap::radial_twist(
      dim, ax, from2, plateau_profile(kPi, r1a, std::max(r1a + 1e-9, support_radius - 0.5 * dist)));
  auto twist2 =
      SymplecticMap::radial_twist(dim, ax, mid, plateau_profile(kPi, r1b, support_radius));
  return SymplecticMap::composition({twist2, twist1});
}

SymplecticMap cube_swap(size_t dim, size_t ax, const Vec& a2, const Vec& b2,
                        double content_radius, double support_radius) {
  const Vec mid{0.5 * (a2[0] + b2[0]), 0.5 * (a2[1] + b2[1])};
  const double half = 0.5 * std::hypot(b2[0] - a2[0], b2[1] - a2[1]);
  const double rglobal = half + content_radius;
  if (!(support_radius > rglobal)) throw ArgumentError("cube_swap: support radius too small");
  if (!(content_radius < half)) throw ArgumentError("cube_swap: content radius too large");
  // Local half-turn collars must stay clear of the other cube's content,
  // which sits at distance 2*half - content_radius.
  const double rl2 = content_radius + 0.9 * 2.0 * (half - content_radius);
  auto local_a =
      SymplecticMap::radial_twist(dim, ax, a2, plateau_profile(kPi, content_radius, rl2));
  auto local_b =
      SymplecticMap::radial_twist(dim, ax, b2, plateau_profile(kPi, content_radius, rl2));
  auto global =
      SymplecticMap::radial_twist(dim, ax, mid, plateau_profile(kPi, rglobal, support_radius));
  return SymplecticMap::composition({global, local_b, local_a});
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json SymplecticMap::to_json() const { return node_->to_json(); }

SymplecticMap SymplecticMap::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  if (kind == "identity") return identity(j.at("dim"));
  if (kind == "translation") return translation(j.at("v").get<Vec>());
  if (kind == "linear") {
    SmallMat m(j.at("n").get<size_t>());
    m.a = j.at("m").get<std::vector<double>>();
    return linear(std::move(m));
  }
  if (kind == "shear")
    return shear(j.at("dim"), j.at("target"), j.at("source"), profile_from_json(j.at("profile")));
  if (kind == "twist")
    return radial_twist(j.at("dim"), j.at("ax"), j.at("center").get<Vec>(),
                        profile_from_json(j.at("profile")));
  if (kind == "compose") {
    std::vector<SymplecticMap> maps;
    for (const auto& jm : j.at("maps")) maps.push_back(from_json(jm));
    return composition(std::move(maps));
  }
  if (kind == "inverse") return from_json(j.at("map")).inverse();
  if (kind == "flow") {
    FlowParams params;
    params.step = j.at("step");
    return hamiltonian_flow(gridfn_from_json(j.at("H")), j.at("time"), params);
  }
  if (kind == "psi_h") return psi_h_from_json(j);
  if (kind == "straightening") return straightening_from_json(j);
  if (kind == "annulus_rotation") {
    SymplecticMap rot = build_annulus_rotation().rotation;
    const double dir = j.value("dir", 1.0);
    return dir >= 0 ? rot : rot.inverse();
  }
  throw FormatError("unknown map kind: " + kind);
}

}  // namespace hamrep
