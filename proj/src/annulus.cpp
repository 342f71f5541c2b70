#include "hamrep/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <cstdio>
#include <cstdlib>

#include "hamrep/map_nodes.hpp"

namespace hamrep {

namespace {

double ramp(double s, double s0, double s1, double a, double b) {
  if (s <= s0) return a;
  if (s >= s1) return b;
  return a + (b - a) * smooth_step((s - s0) / (s1 - s0));
}

double dramp(double s, double s0, double s1, double a, double b) {
  if (s <= s0 || s >= s1) return 0.0;
  return (b - a) * smooth_step_deriv((s - s0) / (s1 - s0)) / (s1 - s0);
}

// Turn bump on [0, len]: rise over r, plateau, fall. Integral = len - r
// exactly (smooth_step is symmetric), so peak = (pi/2)/(len - r) gives an
// exact quarter turn.
double bump_shape(double x, double len, double r) {
  if (x <= 0 || x >= len) return 0.0;
  if (x < r) return smooth_step(x / r);
  if (x > len - r) return smooth_step((len - x) / r);
  return 1.0;
}

double dbump_shape(double x, double len, double r) {
  if (x <= 0 || x >= len) return 0.0;
  if (x < r) return smooth_step_deriv(x / r) / r;
  if (x > len - r) return -smooth_step_deriv((len - x) / r) / r;
  return 0.0;
}

// Stable root of ut = rho - kappa rho^2/2 with rho ~ ut for small kappa.
double rho_of(double kappa, double ut) {
  const double disc = 1.0 - 2.0 * kappa * ut;
  if (disc <= 0) throw std::logic_error("annulus tube pinched (internal)");
  return 2.0 * ut / (1.0 + std::sqrt(disc));
}

}  // namespace

double AnnulusChart::kappa_of(double s) const {
  const double t1a = funnel_end_;
  const double t2a = funnel_end_ + turn_len_ + leg_len_;
  const double peak = (kPi / 2.0) / (turn_len_ - 0.3);
  return peak * (bump_shape(s - t1a, turn_len_, 0.3) + bump_shape(s - t2a, turn_len_, 0.3));
}

double AnnulusChart::dkappa_of(double s) const {
  const double t1a = funnel_end_;
  const double t2a = funnel_end_ + turn_len_ + leg_len_;
  const double peak = (kPi / 2.0) / (turn_len_ - 0.3);
  return peak * (dbump_shape(s - t1a, turn_len_, 0.3) + dbump_shape(s - t2a, turn_len_, 0.3));
}

double AnnulusChart::q_of(double s) const {
  const double t1a = funnel_end_;
  const double t1b = t1a + turn_len_;
  const double t2a = t1b + leg_len_;
  const double t2b = t2a + turn_len_;
  if (s <= core_half_) return 1.0;
  if (s <= t1a) return ramp(s, core_half_, t1a, 1.0, q_turn_);
  if (s <= t1b) return q_turn_;
  if (s <= t2a) {
    const double mid0 = t1b + 0.30 * leg_len_;
    const double mid1 = t2a - 0.30 * leg_len_;
    if (s < mid0) return ramp(s, t1b, mid0, q_turn_, q_side_);
    if (s > mid1) return ramp(s, mid1, t2a, q_side_, q_turn_);
    return q_side_;
  }
  if (s <= t2b) return q_turn_;
  return ramp(s, t2b, t2b + 0.42, q_turn_, q_top_);
}

double AnnulusChart::dq_of(double s) const {
  const double t1a = funnel_end_;
  const double t1b = t1a + turn_len_;
  const double t2a = t1b + leg_len_;
  const double t2b = t2a + turn_len_;
  if (s <= core_half_) return 0.0;
  if (s <= t1a) return dramp(s, core_half_, t1a, 1.0, q_turn_);
  if (s <= t1b) return 0.0;
  if (s <= t2a) {
    const double mid0 = t1b + 0.30 * leg_len_;
    const double mid1 = t2a - 0.30 * leg_len_;
    if (s < mid0) return dramp(s, t1b, mid0, q_turn_, q_side_);
    if (s > mid1) return dramp(s, mid1, t2a, q_side_, q_turn_);
    return 0.0;
  }
  if (s <= t2b) return 0.0;
  return dramp(s, t2b, t2b + 0.42, q_turn_, q_top_);
}

void AnnulusChart::build_tables(double lambda_knob) {
  lambda_knob_ = lambda_knob;
  const double span = 2.0 * u_max_;
  q_side_ = span / (0.38 + 0.13 * lambda_knob_);
  q_top_ = span / (0.90 + 0.36 * lambda_knob_);
  q_turn_ = std::max(2.0 * 2.618 * u_max_ / 0.78, 2.2);

  // Integrate up to the end of turn 2 to learn where the top leg starts;
  // the apex closure then fixes the top leg length (heading is exactly pi).
  const double t2b = funnel_end_ + 2 * turn_len_ + leg_len_;
  const size_t n_pre = 8192;
  const double h_pre = t2b / static_cast<double>(n_pre);
  double th = 0.0, gx = 0.0, gy = 0.0;
  for (size_t i = 0; i < n_pre; ++i) {
    const double s = static_cast<double>(i) * h_pre;
    const double k1 = kappa_of(s), k2 = kappa_of(s + 0.5 * h_pre), k4 = kappa_of(s + h_pre);
    const double th1 = th;
    const double th2 = th + 0.5 * h_pre * k1;
    const double th3 = th + 0.5 * h_pre * k2;
    const double th4 = th + h_pre * k2;
    gx += h_pre / 6.0 * (std::cos(th1) + 2 * std::cos(th2) + 2 * std::cos(th3) + std::cos(th4));
    gy += h_pre / 6.0 * (std::sin(th1) + 2 * std::sin(th2) + 2 * std::sin(th3) + std::sin(th4));
    th += h_pre / 6.0 * (k1 + 2 * k2 + 2 * k2 + k4);
  }
  if (gx <= 0.2) throw std::logic_error("annulus: geometry invalid (top leg collapsed)");
  s_apex_ = t2b + gx;

  tab_theta_.assign(n_tab_, 0.0);
  tab_gx_.assign(n_tab_, 0.0);
  tab_gy_.assign(n_tab_, 0.0);
  tab_time_.assign(n_tab_, 0.0);
  const double h = s_apex_ / static_cast<double>(n_tab_ - 1);
  th = 0.0;
  gx = 0.0;
  gy = 0.0;
  double tm = 0.0;
  for (size_t i = 1; i < n_tab_; ++i) {
    const double sbase = static_cast<double>(i - 1) * h;
    for (int sub = 0; sub < 2; ++sub) {
      const double hs = 0.5 * h;
      const double s0 = sbase + sub * hs;
      const double k1 = kappa_of(s0), k2 = kappa_of(s0 + 0.5 * hs), k4 = kappa_of(s0 + hs);
      const double th1 = th;
      const double th2 = th + 0.5 * hs * k1;
      const double th3 = th + 0.5 * hs * k2;
      const double th4 = th + hs * k2;
      gx += hs / 6.0 * (std::cos(th1) + 2 * std::cos(th2) + 2 * std::cos(th3) + std::cos(th4));
      gy += hs / 6.0 * (std::sin(th1) + 2 * std::sin(th2) + 2 * std::sin(th3) + std::sin(th4));
      tm += hs / 6.0 * (1.0 / q_of(s0) + 4.0 / q_of(s0 + 0.5 * hs) + 1.0 / q_of(s0 + hs));
      th += hs / 6.0 * (k1 + 2 * k2 + 2 * k2 + k4);
    }
    tab_theta_[i] = th;
    tab_gx_[i] = gx;
    tab_gy_[i] = gy;
    tab_time_[i] = tm;
  }
  t_half_ = tab_time_.back();
  apex_x_residual_ = std::fabs(tab_gx_.back());
  if (getenv("HAMREP_ANNULUS_DEBUG")) {
    fprintf(stderr, "lambda=%.3f q_side=%.3f q_top=%.3f s_apex=%.4f t_half=%.6f top_leg=%.4f\n",
            lambda_knob_, q_side_, q_top_, s_apex_, t_half_, s_apex_ - (funnel_end_ + 2*turn_len_ + leg_len_));
    // positions at key anchors
    auto at = [&](double s){ fprintf(stderr, "  s=%.3f pos=(%.4f, %.4f) th=%.4f q=%.3f\n",
        s, table_interp(tab_gx_, s), table_interp(tab_gy_, s), table_interp(tab_theta_, s), q_of(s)); };
    at(core_half_); at(funnel_end_); at(funnel_end_+turn_len_);
    at(funnel_end_+turn_len_+leg_len_); at(funnel_end_+2*turn_len_+leg_len_); at(s_apex_);
  }

  tab_s_of_t_.assign(n_tab_, 0.0);
  size_t j = 0;
  for (size_t i = 0; i < n_tab_; ++i) {
    const double t = t_half_ * static_cast<double>(i) / static_cast<double>(n_tab_ - 1);
    while (j + 1 < n_tab_ && tab_time_[j + 1] < t) ++j;
    double s = s_apex_ * static_cast<double>(j) / static_cast<double>(n_tab_ - 1);
    for (int it = 0; it < 10; ++it) {
      const double f = table_interp(tab_time_, s) - t;
      s -= f * q_of(s);
      s = std::clamp(s, 0.0, s_apex_);
    }
    tab_s_of_t_[i] = s;
  }
}

double AnnulusChart::table_interp(const std::vector<double>& tab, double s) const {
  const double h = s_apex_ / static_cast<double>(n_tab_ - 1);
  const double u = s / h;
  const long i0 = static_cast<long>(std::floor(u));
  const long n = static_cast<long>(n_tab_);
  static constexpr int off[6] = {-2, -1, 0, 1, 2, 3};
  const double tt = u - static_cast<double>(i0);
  double acc = 0.0;
  for (int jj = 0; jj < 6; ++jj) {
    double L = 1.0;
    for (int k = 0; k < 6; ++k) {
      if (k == jj) continue;
      L *= (tt - off[k]) / static_cast<double>(off[jj] - off[k]);
    }
    long idx = std::clamp(i0 + off[jj], 0L, n - 1);
    acc += L * tab[static_cast<size_t>(idx)];
  }
  return acc;
}

AnnulusChart::Frame AnnulusChart::frame_at_s(double s) const {
  Frame f;
  f.s = s;
  f.mirrored = false;
  f.theta = table_interp(tab_theta_, s);
  f.gamma = {table_interp(tab_gx_, s), table_interp(tab_gy_, s)};
  f.kappa = kappa_of(s);
  f.dkappa = dkappa_of(s);
  f.q = q_of(s);
  f.dq = dq_of(s);
  f.time = table_interp(tab_time_, s);
  return f;
}

double AnnulusChart::s_of_time(double t) const {
  const double u = t / t_half_ * static_cast<double>(n_tab_ - 1);
  const long i0 = std::clamp(static_cast<long>(std::floor(u)), 0L,
                             static_cast<long>(n_tab_) - 1);
  double s = tab_s_of_t_[static_cast<size_t>(i0)];
  for (int it = 0; it < 4; ++it) {
    const double f = table_interp(tab_time_, s) - t;
    s -= f * q_of(s);
    s = std::clamp(s, 0.0, s_apex_);
  }
  return s;
}

Vec AnnulusChart::to_plane(double t, double u) const {
  // Wrap t into [-t_half, t_half).
  const double period = 2.0 * t_half_;
  double tw = std::remainder(t, period);
  const bool mir = tw < 0.0;
  const double ts = std::fabs(tw);
  const double s = s_of_time(std::min(ts, t_half_));
  const double theta = table_interp(tab_theta_, s);
  const double gx = table_interp(tab_gx_, s);
  const double gy = table_interp(tab_gy_, s);
  const double kap = kappa_of(s);
  const double q = q_of(s);
  const double rho = rho_of(kap, u / q);
  // n = left normal of T = (cos, sin).
  double px = gx + rho * (-std::sin(theta));
  double py = gy + rho * (std::cos(theta));
  if (mir) px = -px;
  return {px, py};
}

SmallMat AnnulusChart::d_to_plane(double t, double u) const {
  const double period = 2.0 * t_half_;
  double tw = std::remainder(t, period);
  const bool mir = tw < 0.0;
  const double ts = std::fabs(tw);
  const double s = s_of_time(std::min(ts, t_half_));
  const double theta = table_interp(tab_theta_, s);
  const double kap = kappa_of(s);
  const double dkap = dkappa_of(s);
  const double q = q_of(s);
  const double dq = dq_of(s);
  const double ut = u / q;
  const double rho = rho_of(kap, ut);
  const double R = 1.0 - kap * rho;
  const double ct = std::cos(theta), st = std::sin(theta);
  // d gamma/ds = T; dn/ds = -kappa T.
  const double rho_ut = 1.0 / R;
  const double rho_kap = 0.5 * rho * rho / R;
  const double rho_s = rho_kap * dkap + rho_ut * (-u * dq / (q * q));
  const double rho_u = rho_ut / q;
  // d psi/ds = (1 - kappa rho) T + rho_s n ; d psi/dt = q * dpsi/ds.
  double dxt = q * (R * ct + rho_s * (-st));
  double dyt = q * (R * st + rho_s * ct);
  double dxu = rho_u * (-st);
  double dyu = rho_u * ct;
  if (mir) {
    // p = (-Px(ts,u), Py(ts,u)), ts = -t: d/dt = -d/dts.
    dxt = dxt;         // -(-dPx/dts) = dPx/dts
    dyt = -dyt;        // dPy/dt = -dPy/dts
    dxu = -dxu;        // -dPx/du
    dyu = dyu;
  }
  SmallMat m(2);
  m(0, 0) = dxt;
  m(0, 1) = dxu;
  m(1, 0) = dyt;
  m(1, 1) = dyu;
  return m;
}

AnnulusChart::ChartCoords AnnulusChart::from_plane(const Vec& p) const {
  ChartCoords out;
  if (std::fabs(p[0]) > 2.01 || std::fabs(p[1]) > 2.01) return out;
  const double cell = 4.04 / static_cast<double>(seed_n_);
  const long ix = std::clamp(static_cast<long>((p[0] + 2.02) / cell), 0L,
                             static_cast<long>(seed_n_) - 1);
  const long iy = std::clamp(static_cast<long>((p[1] + 2.02) / cell), 0L,
                             static_cast<long>(seed_n_) - 1);
  const size_t bucket = static_cast<size_t>(iy) * seed_n_ + static_cast<size_t>(ix);
  double s = seed_s_[bucket];
  if (s < -0.5) return out;  // far from the tube
  bool mir = seed_m_[bucket] != 0;

  for (int it = 0; it < 40; ++it) {
    const double px = mir ? -p[0] : p[0];
    const double py = p[1];
    const double theta = table_interp(tab_theta_, s);
    const double gx = table_interp(tab_gx_, s);
    const double gy = table_interp(tab_gy_, s);
    const double kap = kappa_of(s);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double wx = px - gx, wy = py - gy;
    const double F = wx * ct + wy * st;
    const double rho = -wx * st + wy * ct;
    const double Fp = -1.0 + kap * rho;
    double snew = s - F / Fp;
    if (std::fabs(F) < 1e-12 && snew >= -1e-9 && snew <= s_apex_ + 1e-9) {
      s = std::clamp(snew, 0.0, s_apex_);
      const double q = q_of(s);
      const double ut = rho - 0.5 * kap * rho * rho;
      const double u = ut * q;
      if (std::fabs(u) > u_max_ + 1e-9) return out;
      out.in_tube = true;
      out.u = u;
      out.t = (mir ? -1.0 : 1.0) * table_interp(tab_time_, s);
      return out;
    }
    // Reflect across the seams when Newton wanders.
    if (snew < 0.0) {
      snew = -snew;
      mir = !mir;
    } else if (snew > s_apex_) {
      snew = 2.0 * s_apex_ - snew;
      mir = !mir;
    }
    s = std::clamp(snew, 0.0, s_apex_);
  }
  return out;  // no foot point found: treat as outside
}

double AnnulusChart::shift_profile(double u) const {
  const double a = std::fabs(u);
  if (a <= band_) return 1.0;
  if (a >= edge_) return 0.0;
  return smooth_step((edge_ - a) / (edge_ - band_));
}

double AnnulusChart::shift_profile_deriv(double u) const {
  const double a = std::fabs(u);
  if (a <= band_ || a >= edge_) return 0.0;
  const double sign = u >= 0 ? 1.0 : -1.0;
  return -sign * smooth_step_deriv((edge_ - a) / (edge_ - band_)) / (edge_ - band_);
}

void AnnulusChart::run_audits() {
  // Pinch margin over the whole curve.
  double pinch = 1e300;
  const size_t ns = 4096;
  for (size_t i = 0; i <= ns; ++i) {
    const double s = s_apex_ * static_cast<double>(i) / static_cast<double>(ns);
    const double m = 1.0 - 2.0 * std::fabs(kappa_of(s)) * u_max_ / q_of(s);
    pinch = std::min(pinch, m);
  }
  min_pinch_ = pinch;
  if (pinch < 0.2) throw std::logic_error("annulus: pinch margin too small: " +
                                          format_double(pinch));

  // Boundary polyline: both halves, both edges. Wall clearance and
  // non-adjacent self-distance.
  struct BPt {
    double x, y, s;
    int half;
  };
  std::vector<BPt> bnd;
  for (int half = 0; half < 2; ++half) {
    for (size_t i = 0; i <= ns; ++i) {
      const double s = s_apex_ * static_cast<double>(i) / static_cast<double>(ns);
      const double t = (half == 0 ? 1.0 : -1.0) * table_interp(tab_time_, s);
      for (double u : {-u_max_, u_max_}) {
        const Vec p = to_plane(t, u);
        bnd.push_back({p[0], p[1], s, half});
        min_clearance_ =
            std::min({min_clearance_ == 0 ? 1e300 : min_clearance_, 1.97 - std::fabs(p[0]),
                      1.97 - std::fabs(p[1])});
      }
    }
  }
  if (min_clearance_ < 0.01)
    throw std::logic_error("annulus: tube leaves the target box, clearance " +
                           format_double(min_clearance_));
  // Self-distance for parameter-distant пairs (coarse subsample).
  double min_self = 1e300;
  for (size_t i = 0; i < bnd.size(); i += 9) {
    for (size_t j = i + 9; j < bnd.size(); j += 9) {
      const auto &a = bnd[i], &b = bnd[j];
      double ds = std::fabs(a.s - b.s);
      if (a.half != b.half) ds = std::min(a.s + b.s, 2 * s_apex_ - a.s - b.s);
      if (ds < 0.8) continue;
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      min_self = std::min(min_self, d);
    }
  }
  min_clearance_ = std::min(min_clearance_, min_self);
  if (min_self < 0.02)
    throw std::logic_error("annulus: tube self-intersects or nearly touches, distance " +
                           format_double(min_self));
}

AnnulusChart::AnnulusChart() {
  // Tune the corridor-width knob so the half-circumference time is exactly pi.
  double lo = 0.0, hi = 1.0;
  build_tables(hi);
  const double t_hi = t_half_;
  build_tables(lo);
  const double t_lo = t_half_;
  if (!(t_lo <= kPi && kPi <= t_hi))
    throw std::logic_error("annulus: time closure infeasible; T(0)=" + format_double(t_lo) +
                           " T(1)=" + format_double(t_hi));
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    build_tables(mid);
    if (t_half_ < kPi)
      lo = mid;
    else
      hi = mid;
  }
  build_tables(0.5 * (lo + hi));

  // Seed grid for the inverse.
  seed_s_.assign(seed_n_ * seed_n_, -1.0);
  seed_m_.assign(seed_n_ * seed_n_, 0);
  std::vector<double> best_d(seed_n_ * seed_n_, 1e300);
  const double cell = 4.04 / static_cast<double>(seed_n_);
  const size_t ns = 8192;
  for (int half = 0; half < 2; ++half) {
    for (size_t i = 0; i <= ns; ++i) {
      const double s = s_apex_ * static_cast<double>(i) / static_cast<double>(ns);
      const double gx0 = table_interp(tab_gx_, s);
      const double gy0 = table_interp(tab_gy_, s);
      for (int du = -12; du <= 12; ++du) {
        const double theta = table_interp(tab_theta_, s);
        const double u = u_max_ * static_cast<double>(du) / 12.0;
        const double rho = rho_of(kappa_of(s), u / q_of(s));
        double px = gx0 - rho * std::sin(theta);
        const double py = gy0 + rho * std::cos(theta);
        if (half == 1) px = -px;
        // Mark a 3x3 neighborhood of cells.
        const long cx = static_cast<long>((px + 2.02) / cell);
        const long cy = static_cast<long>((py + 2.02) / cell);
        for (long oy = -2; oy <= 2; ++oy) {
          for (long ox = -2; ox <= 2; ++ox) {
            const long jx = cx + ox, jy = cy + oy;
            if (jx < 0 || jy < 0 || jx >= static_cast<long>(seed_n_) ||
                jy >= static_cast<long>(seed_n_))
              continue;
            const double ccx = -2.02 + (static_cast<double>(jx) + 0.5) * cell;
            const double ccy = -2.02 + (static_cast<double>(jy) + 0.5) * cell;
            const double d = std::hypot(ccx - px, ccy - py);
            const size_t b = static_cast<size_t>(jy) * seed_n_ + static_cast<size_t>(jx);
            if (d < best_d[b]) {
              best_d[b] = d;
              seed_s_[b] = s;
              seed_m_[b] = static_cast<uint8_t>(half);
            }
          }
        }
      }
    }
  }
  run_audits();
}

// ---------------------------------------------------------------------------
// Rotation node

class AnnulusRotationNode final : public MapNode {
 public:
  AnnulusRotationNode(std::shared_ptr<const AnnulusChart> chart, size_t dim, double dir = 1.0)
      : chart_(std::move(chart)), d_(dim), dir_(dir) {
    if (d_ % 2 != 0 || d_ < 2) throw ArgumentError("annulus rotation: bad dimension");
  }
  size_t dim() const override { return d_; }

  Vec displacement(const Vec& p) const override {
    Vec out(d_, 0.0);
    const auto cc = chart_->from_plane({p[0], p[1]});
    if (!cc.in_tube) return out;
    const double tshift = cc.t + dir_ * kAlpha * chart_->shift_profile(cc.u);
    const Vec q = chart_->to_plane(tshift, cc.u);
    out[0] = q[0] - p[0];
    out[1] = q[1] - p[1];
    return out;
  }

  SmallMat jacobian(const Vec& p) const override {
    SmallMat j = SmallMat::identity(d_);
    const auto cc = chart_->from_plane({p[0], p[1]});
    if (!cc.in_tube) return j;
    const double a = chart_->shift_profile(cc.u);
    const double da = chart_->shift_profile_deriv(cc.u);
    const double tshift = cc.t + dir_ * kAlpha * a;
    const SmallMat d_out = chart_->d_to_plane(tshift, cc.u);
    const SmallMat d_in = chart_->d_to_plane(cc.t, cc.u);
    // S = [[1, alpha a'], [0, 1]] in (t,u); J = Dout * S * Din^{-1}.
    SmallMat S = SmallMat::identity(2);
    S(0, 1) = dir_ * kAlpha * da;
    // inverse of a 2x2 with det 1
    SmallMat inv(2);
    const double det = d_in(0, 0) * d_in(1, 1) - d_in(0, 1) * d_in(1, 0);
    inv(0, 0) = d_in(1, 1) / det;
    inv(0, 1) = -d_in(0, 1) / det;
    inv(1, 0) = -d_in(1, 0) / det;
    inv(1, 1) = d_in(0, 0) / det;
    const SmallMat j2 = d_out * S * inv;
    j(0, 0) = j2(0, 0);
    j(0, 1) = j2(0, 1);
    j(1, 0) = j2(1, 0);
    j(1, 1) = j2(1, 1);
    return j;
  }

  Box support() const override {
    Box b = infinite_box(d_);
    b.lo[0] = -2.0;
    b.hi[0] = 2.0;
    b.lo[1] = -2.0;
    b.hi[1] = 2.0;
    return b;
  }
  std::string kind() const override { return "annulus_rotation"; }
  NodePtr native_inverse() const override {
    return std::make_shared<AnnulusRotationNode>(chart_, d_, -dir_);
  }
  nlohmann::json to_json() const override {
    return {{"kind", "annulus_rotation"}, {"dim", d_}, {"dir", dir_}};
  }

 private:
  std::shared_ptr<const AnnulusChart> chart_;
  size_t d_;
  double dir_;
};

AnnulusPair build_annulus_rotation() {
  static std::shared_ptr<const AnnulusChart> chart = [] {
    return std::make_shared<const AnnulusChart>();
  }();
  AnnulusPair pair;
  pair.chart = chart;
  pair.rotation = SymplecticMap(std::make_shared<AnnulusRotationNode>(chart, 2));
  return pair;
}

}  // namespace hamrep

namespace hamrep {
void annulus_debug_dump() {
  AnnulusChart* c = nullptr;
  (void)c;
}
}  // namespace hamrep
