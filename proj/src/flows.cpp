#include <algorithm>
#include <cmath>

#include "hamrep/map_nodes.hpp"

namespace hamrep {

namespace {

// Section-transport map for H = x1 + h. Trajectories are integrated with x2
// as the independent variable (x2 decreases strictly along the flow since
// dx2/ds = -(1 + dh/dx1) < -1/2), which turns the section condition into a
// fixed integration range. All displacement components are accumulated in
// small arithmetic.
class PsiHNode final : public MapNode {
 public:
  PsiHNode(GridFunction h, double sigma_step) : h_(std::move(h)), sigma_step_(sigma_step) {
    const size_t d = h_.dim();
    if (d % 2 != 0 || d < 2) throw ArgumentError("psi_h: h must live on an even-dimensional box");
    for (const auto& ax : h_.spec().axes) {
      if (ax.kind != AxisKind::Interval) throw ArgumentError("psi_h: h must use interval axes");
    }
    if (h_.spec().axes[1].hi > 1.0 + 1e-12)
      throw ArgumentError("psi_h: support of h must lie below the section {x2 = 1}");
    slope1_ = 0.0;
    {
      GridFunction d1 = partial_deriv(h_, 0, 1);
      slope1_ = d1.sup_norm();
    }
    if (!(slope1_ < 0.5))
      throw PreconditionError("psi_h: |dh/dx1| must stay below 1/2, measured " +
                              format_double(slope1_));
    slope_all_ = deriv_sup_norm(h_, 1);
    const auto& axes = h_.spec().axes;
    blo_.resize(d);
    bhi_.resize(d);
    for (size_t k = 0; k < d; ++k) {
      blo_[k] = axes[k].lo;
      bhi_[k] = axes[k].hi;
    }
    drift_rate_ = slope_all_ / (1.0 - slope1_);
  }

  size_t dim() const override { return h_.dim(); }

  // State layout during integration: u = non-sigma coordinates in the fixed
  // order (x1, x3, x4, ..., x_{2n}) stored as displacements from start,
  // plus w = accumulated x2-displacement.
  Vec displacement(const Vec& p) const override {
    const size_t d = dim();
    Vec out(d, 0.0);
    double lo, hi;
    if (!window(p[1], lo, hi)) return out;
    // Quick reject: trajectory cannot reach the support box.
    const double span = hi - lo;
    const double slack = drift_rate_ * span + 1e-9;
    for (size_t k = 0; k < d; ++k) {
      if (k == 1) continue;
      if (p[k] < blo_[k] - slack || p[k] > bhi_[k] + slack) return out;
    }
    Vec state(d, 0.0);  // d-1 displacements + w
    integrate(p, lo, hi, state, nullptr);
    unpack(state, out);
    return out;
  }

  SmallMat jacobian(const Vec& p) const override {
    const size_t d = dim();
    double lo, hi;
    SmallMat jac = SmallMat::identity(d);
    if (!window(p[1], lo, hi)) return jac;
    const double span = hi - lo;
    const double slack = drift_rate_ * span + 1e-9;
    for (size_t k = 0; k < d; ++k) {
      if (k == 1) continue;
      if (p[k] < blo_[k] - slack || p[k] > bhi_[k] + slack) return jac;
    }
    Vec state(d, 0.0);
    SmallMat V = SmallMat::identity(d);  // variational in (u, w)
    integrate(p, lo, hi, state, &V);

    // Endpoint sensitivity for the x2-start: nonzero only when sigma0 is
    // inside the window.
    Vec f0(d, 0.0);
    const bool sigma0_active = (p[1] > lo - 1e-14 && p[1] < hi + 1e-14 && p[1] != 1.0);
    if (sigma0_active) rhs(p, Vec(d, 0.0), p[1], f0);
    // direction: integration runs from sigma0 toward 1; the transported
    // endpoint term carries a minus sign regardless of direction.
    Vec vf = V.apply(f0);

    // Map (u,w)-indices back to coordinates: u slot for coord c (c != 1):
    // slot(c) = (c == 0) ? 0 : c - 1; w slot = d - 1.
    const auto slot = [](size_t c) { return c == 0 ? size_t{0} : c - 1; };
    for (size_t c = 0; c < d; ++c) {
      for (size_t j = 0; j < d; ++j) {
        double v;
        const size_t rc = (c == 1) ? d - 1 : slot(c);
        if (j == 1) {
          v = -vf[rc] + (c == 1 ? 1.0 : 0.0);
        } else {
          v = V(rc, slot(j)) + 0.0;
          if (c == j) {
            // V already contains the identity block for u-coordinates.
          }
        }
        jac(c, j) = v;
      }
    }
    return jac;
  }

  Box support() const override {
    const size_t d = dim();
    Box b;
    b.lo.resize(d);
    b.hi.resize(d);
    const double span = bhi_[1] - std::min(blo_[1], -1.0) + 2.0;
    const double slack = drift_rate_ * span + 0.05;
    for (size_t k = 0; k < d; ++k) {
      b.lo[k] = blo_[k] - slack;
      b.hi[k] = bhi_[k] + slack;
    }
    b.lo[1] = -kHugeCoord;  // below the support the x2-lag persists
    b.hi[1] = bhi_[1];
    return b;
  }

  std::string kind() const override { return "psi_h"; }
  nlohmann::json to_json() const override {
    return {{"kind", "psi_h"}, {"h", gridfn_to_json(h_)}, {"sigma_step", sigma_step_}};
  }

  const GridFunction& h() const { return h_; }
  double slope1() const { return slope1_; }
  double slope_all() const { return slope_all_; }

  // Integral of h along the H_t-flow trajectory from the section point
  // (y0, 1, yr) for duration tau_max, with early stop below the support.
  // Used by the straightening collar generator (t scales h).
  double flow_h_integral(const Vec& sec, double tau_max, double tscale) const {
    const size_t d = dim();
    Vec x = sec;  // absolute position, x[1] = 1 at start
    double acc = 0.0;
    const double dt = sigma_step_;
    double tau = 0.0;
    Vec g(d);
    while (tau < tau_max) {
      const double step = std::min(dt, tau_max - tau);
      // RK4 on (x, acc).
      Vec k1(d + 1), k2(d + 1), k3(d + 1), k4(d + 1);
      flow_rhs(x, tscale, k1);
      Vec xt(d);
      for (size_t k = 0; k < d; ++k) xt[k] = x[k] + 0.5 * step * k1[k];
      flow_rhs(xt, tscale, k2);
      for (size_t k = 0; k < d; ++k) xt[k] = x[k] + 0.5 * step * k2[k];
      flow_rhs(xt, tscale, k3);
      for (size_t k = 0; k < d; ++k) xt[k] = x[k] + step * k3[k];
      flow_rhs(xt, tscale, k4);
      for (size_t k = 0; k < d + 1; ++k) {
        const double incr = step / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
        if (k < d)
          x[k] += incr;
        else
          acc += incr;
      }
      tau += step;
      if (x[1] < blo_[1] - 0.01) break;  // below the support: h contributes 0
    }
    return acc;
  }

  // Point on the H_t-trajectory from the section after duration tau.
  Vec flow_from_section(const Vec& sec, double tau_max, double tscale) const {
    const size_t d = dim();
    Vec x = sec;
    const double dt = sigma_step_;
    double tau = 0.0;
    while (tau < tau_max) {
      const double step = std::min(dt, tau_max - tau);
      Vec k1(d + 1), k2(d + 1), k3(d + 1), k4(d + 1);
      flow_rhs(x, tscale, k1);
      Vec xt(d);
      for (size_t k = 0; k < d; ++k) xt[k] = x[k] + 0.5 * step * k1[k];
      flow_rhs(xt, tscale, k2);
      for (size_t k = 0; k < d; ++k) xt[k] = x[k] + 0.5 * step * k2[k];
      flow_rhs(xt, tscale, k3);
      for (size_t k = 0; k < d; ++k) xt[k] = x[k] + step * k3[k];
      flow_rhs(xt, tscale, k4);
      for (size_t k = 0; k < d; ++k)
        x[k] += step / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
      tau += step;
      if (x[1] < blo_[1] - 0.01) {
        // Pure x1-flow below the support: finish in closed form.
        x[1] -= (tau_max - tau);
        break;
      }
    }
    return x;
  }

  double h_value(const Vec& x) const { return h_.value(x); }

 private:
  // Hamiltonian flow of x1 + tscale*h, plus d(integral of tscale*h)/dtau in
  // the last slot.
  void flow_rhs(const Vec& x, double tscale, Vec& out) const {
    const size_t d = dim();
    Vec g(d);
    for (size_t k = 0; k < d; ++k) g[k] = tscale * h_.deriv(x, k);
    out[0] = g[1];
    out[1] = -(1.0 + g[0]);
    for (size_t i = 2; i + 1 < d; i += 2) {
      out[i] = g[i + 1];
      out[i + 1] = -g[i];
    }
    out[d] = tscale * h_.value(x);
  }

  bool window(double sigma0, double& lo, double& hi) const {
    const double a = std::min(sigma0, 1.0);
    const double b = std::max(sigma0, 1.0);
    lo = std::max(a, blo_[1]);
    hi = std::min(b, bhi_[1]);
    return hi > lo + 1e-15;
  }

  // RHS in sigma; state = displacements of (x1, x3, ..., x_{2n}) plus w.
  // `p` holds the start point, `sigma` the current x2.
  void rhs(const Vec& p, const Vec& state, double sigma, Vec& out) const {
    const size_t d = dim();
    Vec x(d);
    x[0] = p[0] + state[0];
    x[1] = sigma;
    for (size_t c = 2; c < d; ++c) x[c] = p[c] + state[c - 1];
    Vec g(d);
    for (size_t k = 0; k < d; ++k) g[k] = h_.deriv(x, k);
    const double D = 1.0 + g[0];
    out[0] = -g[1] / D;
    for (size_t c = 2; c < d; ++c) {
      out[c - 1] = (c % 2 == 0) ? -g[c + 1] / D : g[c - 1] / D;
    }
    out[d - 1] = g[0] / D;  // x2-lag accumulator
  }

  void rhs_matrix(const Vec& p, const Vec& state, double sigma, SmallMat& A) const {
    const size_t d = dim();
    Vec x(d);
    x[0] = p[0] + state[0];
    x[1] = sigma;
    for (size_t c = 2; c < d; ++c) x[c] = p[c] + state[c - 1];
    Vec g(d);
    for (size_t k = 0; k < d; ++k) g[k] = h_.deriv(x, k);
    const double D = 1.0 + g[0];
    // Hessian columns for the non-sigma coordinates.
    const auto coord_of_slot = [](size_t s) { return s == 0 ? size_t{0} : s + 1; };
    A = SmallMat(d);
    for (size_t js = 0; js + 1 < d; ++js) {
      const size_t j = coord_of_slot(js);
      Vec H(d);
      for (size_t k = 0; k < d; ++k) H[k] = h_.second_deriv(x, k, j);
      // row for slot 0 (coordinate x1): f = -g1/D
      A(0, js) = -(H[1] / D - g[1] * H[0] / (D * D));
      for (size_t c = 2; c < d; ++c) {
        const size_t rs = c - 1;
        if (c % 2 == 0)
          A(rs, js) = -(H[c + 1] / D - g[c + 1] * H[0] / (D * D));
        else
          A(rs, js) = (H[c - 1] / D - g[c - 1] * H[0] / (D * D));
      }
      A(d - 1, js) = H[0] / (D * D);
    }
  }

  void integrate(const Vec& p, double lo, double hi, Vec& state, SmallMat* V) const {
    const size_t d = dim();
    const bool down = p[1] > 1.0;  // integrate from hi to lo when start above
    double s0 = down ? hi : lo;
    double s1 = down ? lo : hi;
    // Step count follows the full support height, not the clipped window, so
    // the discretization varies smoothly with the start point.
    const size_t nsteps = std::max<size_t>(
        8, static_cast<size_t>(std::ceil((bhi_[1] - blo_[1] + 1.0) / sigma_step_)));
    const double dstep = (s1 - s0) / static_cast<double>(nsteps);
    Vec k1(d), k2(d), k3(d), k4(d), tmp(d);
    SmallMat A(d);
    double sigma = s0;
    for (size_t step = 0; step < nsteps; ++step) {
      rhs(p, state, sigma, k1);
      for (size_t i = 0; i < d; ++i) tmp[i] = state[i] + 0.5 * dstep * k1[i];
      rhs(p, tmp, sigma + 0.5 * dstep, k2);
      for (size_t i = 0; i < d; ++i) tmp[i] = state[i] + 0.5 * dstep * k2[i];
      rhs(p, tmp, sigma + 0.5 * dstep, k3);
      for (size_t i = 0; i < d; ++i) tmp[i] = state[i] + dstep * k3[i];
      rhs(p, tmp, sigma + dstep, k4);
      if (V) {
        // RK4 for V' = A(sigma, state) V at the same stage states.
        SmallMat A1(d), A2(d), A3(d), A4(d);
        rhs_matrix(p, state, sigma, A1);
        for (size_t i = 0; i < d; ++i) tmp[i] = state[i] + 0.5 * dstep * k1[i];
        rhs_matrix(p, tmp, sigma + 0.5 * dstep, A2);
        for (size_t i = 0; i < d; ++i) tmp[i] = state[i] + 0.5 * dstep * k2[i];
        rhs_matrix(p, tmp, sigma + 0.5 * dstep, A3);
        for (size_t i = 0; i < d; ++i) tmp[i] = state[i] + dstep * k3[i];
        rhs_matrix(p, tmp, sigma + dstep, A4);
        const SmallMat K1 = A1 * (*V);
        SmallMat tmpM = *V;
        for (size_t i = 0; i < d * d; ++i) tmpM.a[i] += 0.5 * dstep * K1.a[i];
        const SmallMat K2 = A2 * tmpM;
        tmpM = *V;
        for (size_t i = 0; i < d * d; ++i) tmpM.a[i] += 0.5 * dstep * K2.a[i];
        const SmallMat K3 = A3 * tmpM;
        tmpM = *V;
        for (size_t i = 0; i < d * d; ++i) tmpM.a[i] += dstep * K3.a[i];
        const SmallMat K4 = A4 * tmpM;
        for (size_t i = 0; i < d * d; ++i)
          V->a[i] += dstep / 6.0 * (K1.a[i] + 2 * K2.a[i] + 2 * K3.a[i] + K4.a[i]);
      }
      for (size_t i = 0; i < d; ++i)
        state[i] += dstep / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      sigma += dstep;
    }
  }

  void unpack(const Vec& state, Vec& out) const {
    const size_t d = dim();
    out[0] = state[0];
    out[1] = state[d - 1];
    for (size_t c = 2; c < d; ++c) out[c] = state[c - 1];
  }

  GridFunction h_;
  double sigma_step_;
  double slope1_ = 0.0, slope_all_ = 0.0, drift_rate_ = 0.0;
  Vec blo_, bhi_;
};

// Compactly supported realization of the straightening: time-1 flow of
// chi(x2) * G_t where G_t generates the section-transport isotopy of t*h.
// Three regimes: pure section transport where trajectories stay inside
// {chi = 1}, identity below the cutoff, honest flow integration in between.
class StraightenNode final : public MapNode {
 public:
  StraightenNode(GridFunction h, double L, double lambda)
      : L_(L), lambda_(lambda) {
    if (!(L > 0) || lambda == 0) throw ArgumentError("straightening: bad L or lambda");
    const double slope = deriv_sup_norm(h, 1);
    if (slope > std::fabs(lambda) / 8.0 * (1.0 + 1e-12))
      throw PreconditionError("straightening: |Dh| must be <= |lambda|/8, measured " +
                              format_double(slope));
    // Unit rescale: h_unit(x) = h(Lx)/(lambda L) on axes scaled by 1/L.
    GridSpec uspec = h.spec();
    for (auto& ax : uspec.axes) {
      ax.lo /= L;
      ax.hi /= L;
    }
    std::vector<double> vals = h.values();
    for (double& v : vals) v /= (lambda * L);
    GridFunction hu(uspec, std::move(vals));
    slope_all_ = deriv_sup_norm(hu, 1);  // = |Dh|/|lambda| <= 1/8

    psi_ = std::make_shared<PsiHNode>(std::move(hu), 1.0 / 96.0);
    // Collar placement from the measured slope (margin 0.02): below c1 the
    // generator is independent of x2 and h vanishes along trajectories.
    const double s = std::min(slope_all_, 0.124);
    c1_ = -(1.02 + 2.0 * s) / (1.0 - 2.0 * s);
    c0_ = c1_ - 0.2;
    cA_ = (c1_ + 2.0 * s) / (1.0 + 2.0 * s) + 0.02;
  }

  size_t dim() const override { return psi_->dim(); }

  Vec displacement(const Vec& p) const override {
    const size_t d = dim();
    Vec up(d);
    for (size_t k = 0; k < d; ++k) up[k] = p[k] / L_;
    Vec du = unit_displacement(up);
    for (size_t k = 0; k < d; ++k) du[k] *= L_;
    return du;
  }

  SmallMat jacobian(const Vec& p) const override {
    const size_t d = dim();
    Vec up(d);
    for (size_t k = 0; k < d; ++k) up[k] = p[k] / L_;
    if (up[1] >= cA_) return psi_->jacobian(up);
    if (up[1] <= c0_ - 0.02) return SmallMat::identity(d);
    // Fourth-order FD in unit coordinates (collar region only).
    SmallMat jac(d);
    const double hh = 3e-4;
    Vec xp = up;
    for (size_t j = 0; j < d; ++j) {
      const double x0 = up[j];
      xp[j] = x0 + hh;
      Vec f1 = unit_apply(xp);
      xp[j] = x0 - hh;
      Vec f_1 = unit_apply(xp);
      xp[j] = x0 + 2 * hh;
      Vec f2 = unit_apply(xp);
      xp[j] = x0 - 2 * hh;
      Vec f_2 = unit_apply(xp);
      xp[j] = x0;
      for (size_t i = 0; i < d; ++i)
        jac(i, j) = (8.0 * (f1[i] - f_1[i]) - (f2[i] - f_2[i])) / (12.0 * hh);
    }
    return jac;
  }

  Box support() const override {
    const size_t d = dim();
    Box pb = psi_->support();
    Box b;
    b.lo.resize(d);
    b.hi.resize(d);
    for (size_t k = 0; k < d; ++k) {
      b.lo[k] = pb.lo[k] * L_;
      b.hi[k] = pb.hi[k] * L_;
    }
    b.lo[1] = (c0_ - 0.02) * L_;
    return b;
  }

  std::string kind() const override { return "straightening"; }
  nlohmann::json to_json() const override {
    // Reconstruct the original h from the unit grid.
    const GridFunction& hu = psi_->h();
    GridSpec spec = hu.spec();
    for (auto& ax : spec.axes) {
      ax.lo *= L_;
      ax.hi *= L_;
    }
    std::vector<double> vals = hu.values();
    for (double& v : vals) v *= lambda_ * L_;
    return {{"kind", "straightening"},
            {"h", gridfn_to_json(GridFunction(spec, vals))},
            {"L", L_},
            {"lambda", lambda_}};
  }

 private:
  Vec unit_apply(const Vec& up) const {
    Vec d = unit_displacement(up);
    for (size_t k = 0; k < d.size(); ++k) d[k] += up[k];
    return d;
  }

  Vec unit_displacement(const Vec& up) const {
    const size_t d = dim();
    if (up[1] >= cA_) return psi_->displacement(up);
    Vec zero(d, 0.0);
    if (up[1] <= c0_ - 0.02) return zero;
    // Quick reject outside the lateral extent of the generator.
    const Box pb = psi_->support();
    for (size_t k = 0; k < d; ++k) {
      if (k == 1) continue;
      if (up[k] < pb.lo[k] || up[k] > pb.hi[k]) return zero;
    }
    // RK4 time integration of X_{chi G_t}, t in [0,1].
    const size_t nsteps = 24;
    const double dt = 1.0 / static_cast<double>(nsteps);
    Vec disp(d, 0.0);
    Vec k1(d), k2(d), k3(d), tmp(d), k4(d);
    for (size_t s = 0; s < nsteps; ++s) {
      const double t = s * dt;
      field(up, disp, t, k1);
      for (size_t i = 0; i < d; ++i) tmp[i] = disp[i] + 0.5 * dt * k1[i];
      field(up, tmp, t + 0.5 * dt, k2);
      for (size_t i = 0; i < d; ++i) tmp[i] = disp[i] + 0.5 * dt * k2[i];
      field(up, tmp, t + 0.5 * dt, k3);
      for (size_t i = 0; i < d; ++i) tmp[i] = disp[i] + dt * k3[i];
      field(up, tmp, t + dt, k4);
      for (size_t i = 0; i < d; ++i)
        disp[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return disp;
  }

  double chi(double x2) const { return smooth_step((x2 - c0_) / (c1_ - c0_)); }
  double chi_deriv(double x2) const {
    return smooth_step_deriv((x2 - c0_) / (c1_ - c0_)) / (c1_ - c0_);
  }

  // G_t(y) = -integral over tau of (t h) along the H_t trajectory from the
  // section above y; dG/dx2 = (t h)(Psi_t^{-1}(y)).
  double generator(const Vec& y, double t) const {
    Vec sec = y;
    sec[1] = 1.0;
    return -psi_->flow_h_integral(sec, 1.0 - y[1], t);
  }

  void field(const Vec& p, const Vec& disp, double t, Vec& out) const {
    const size_t d = dim();
    Vec y(d);
    for (size_t k = 0; k < d; ++k) y[k] = p[k] + disp[k];
    const double c = chi(y[1]);
    const double cd = chi_deriv(y[1]);
    std::fill(out.begin(), out.end(), 0.0);
    if (c == 0.0 && cd == 0.0) return;
    const double G = generator(y, t);
    // dG/dx2 via the trajectory endpoint.
    Vec sec = y;
    sec[1] = 1.0;
    Vec endpoint = psi_->flow_from_section(sec, 1.0 - y[1], t);
    const double d2G = t * psi_->h_value(endpoint);
    // Lateral gradients by central differences of the generator.
    const double fd = 1e-5;
    Vec grad(d, 0.0);
    for (size_t k = 0; k < d; ++k) {
      if (k == 1) {
        grad[k] = d2G;
        continue;
      }
      Vec yp = y;
      yp[k] = y[k] + fd;
      const double gp = generator(yp, t);
      yp[k] = y[k] - fd;
      const double gm = generator(yp, t);
      grad[k] = (gp - gm) / (2 * fd);
    }
    // X_{chi G}: pair (x1, x2) gets the cutoff terms.
    out[0] = cd * G + c * grad[1];
    out[1] = -c * grad[0];
    for (size_t i = 2; i + 1 < d; i += 2) {
      out[i] = c * grad[i + 1];
      out[i + 1] = -c * grad[i];
    }
  }

  std::shared_ptr<PsiHNode> psi_;
  double L_, lambda_;
  double slope_all_ = 0.0;
  double c0_ = -1.9, c1_ = -1.7, cA_ = -1.15;
};

}  // namespace

SymplecticMap build_psi_h(const GridFunction& h, double sigma_step) {
  return SymplecticMap(std::make_shared<PsiHNode>(h, sigma_step));
}

SymplecticMap build_straightening(const GridFunction& h, double L, double lambda) {
  return SymplecticMap(std::make_shared<StraightenNode>(h, L, lambda));
}

SymplecticMap psi_h_from_json(const nlohmann::json& j) {
  return build_psi_h(gridfn_from_json(j.at("h")), j.at("sigma_step"));
}

SymplecticMap straightening_from_json(const nlohmann::json& j) {
  return build_straightening(gridfn_from_json(j.at("h")), j.at("L"), j.at("lambda"));
}

// ---------------------------------------------------------------------------

NormalizerResult build_coordinate_normalizer(const GridFunction& f, const Vec& p) {
  const size_t d = f.dim();
  if (d % 2 != 0) throw ArgumentError("normalizer: dimension must be even");
  // df(p) = dx1 within 1e-8 (caller pre-rotates).
  for (size_t k = 0; k < d; ++k) {
    const double g = f.deriv(p, k);
    const double want = (k == 0) ? 1.0 : 0.0;
    if (std::fabs(g - want) > 1e-8)
      throw PreconditionError("normalizer: df(p) != dx1, component " + std::to_string(k) + " = " +
                              format_double(g));
  }
  const double fp = f.value(p);

  // Find delta with |D h_delta| < 1/10 (margin below the 1/8 budget).
  const std::vector<double> candidates{0.5,  0.4,  0.32, 0.25, 0.2,  0.16, 0.125,
                                       0.1,  0.08, 0.06, 0.05, 0.04, 0.03, 0.02};
  for (double delta : candidates) {
    GridSpec hspec;
    for (size_t k = 0; k < d; ++k) hspec.axes.push_back(Axis::interval(-2 * delta, 2 * delta, 97));
    bool in_domain = true;
    GridFunction hdelta = GridFunction::sample(hspec, [&](const Vec& x) {
      double w = 1.0;
      for (size_t k = 0; k < d; ++k) w *= plateau_bump(x[k] / delta, 1.0, 2.0);
      if (w == 0.0) return 0.0;
      Vec q(d);
      for (size_t k = 0; k < d; ++k) q[k] = p[k] + x[k];
      (void)in_domain;
      return w * (f.value(q) - fp - x[0]);
    });
    if (!in_domain) continue;
    const double slope = deriv_sup_norm(hdelta, 1);
    if (slope < 0.1) {
      SymplecticMap phi = build_straightening(hdelta, 2 * delta, 1.0);
      const Vec q0 = phi.apply(Vec(d, 0.0));
      // Compactly supported recentering push(es) taking q0 back to 0.
      std::vector<SymplecticMap> pushes;
      double q0norm = 0.0;
      for (double v : q0) q0norm = std::max(q0norm, std::fabs(v));
      if (q0norm > 1e-14) {
        for (size_t pair = 0; pair + 1 < d; pair += 2) {
          const Vec from{q0[pair], q0[pair + 1]};
          const Vec to{0.0, 0.0};
          if (std::hypot(from[0] - to[0], from[1] - to[1]) < 1e-15) continue;
          pushes.push_back(disk_push(d, pair, from, to, 0.5 * delta, 1.9 * delta));
        }
      }
      std::vector<SymplecticMap> fwd = pushes;
      fwd.push_back(phi);
      SymplecticMap theta_centered = SymplecticMap::composition(std::move(fwd)).inverse();
      Vec minus_p(d), plus_p(d);
      for (size_t k = 0; k < d; ++k) {
        minus_p[k] = -p[k];
        plus_p[k] = p[k];
      }
      NormalizerResult res;
      res.theta = SymplecticMap::composition({SymplecticMap::translation(plus_p), theta_centered,
                                              SymplecticMap::translation(minus_p)});
      res.c = fp + q0[0] - p[0];
      res.delta = 0.1 * delta;
      return res;
    }
  }
  throw ResolutionError("normalizer: no admissible delta found (function too curved near p)");
}

}  // namespace hamrep
