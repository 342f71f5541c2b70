#pragma once

#include "hamrep/hamflow.hpp"

namespace hamrep {

// Explicit area-preserving embedding psi of the annulus
// (R/2piZ) x [-u_max, u_max] into (-2,2)^2, equal to the identity on
// [-1,1] x [-u_max, u_max]. Built as a width-modulated tube around a closed
// racetrack: a point (t,u) maps to gamma(s) + rho(s,u) n(s) where s is the
// arclength position at time t, and rho solves u/q = rho - kappa rho^2 / 2,
// which makes the area element exactly dt ^ du.
class AnnulusChart {
 public:
  AnnulusChart();

  double u_max() const { return u_max_; }
  // |u| band on which the rotation is an exact alpha-shift.
  double band() const { return band_; }
  double period() const { return 2.0 * t_half_; }  // tuned to 2*pi

  struct ChartCoords {
    double t = 0.0;
    double u = 0.0;
    bool in_tube = false;
  };

  Vec to_plane(double t, double u) const;
  // Columns: d(psi)/dt, d(psi)/du.
  SmallMat d_to_plane(double t, double u) const;
  ChartCoords from_plane(const Vec& p) const;

  // Shift profile of the rotation: alpha * a(u) with a = 1 on the band,
  // 0 at the edge of the annulus.
  double shift_profile(double u) const;
  double shift_profile_deriv(double u) const;

  // Build-time audit values.
  double time_closure_residual() const { return std::fabs(2.0 * t_half_ - 2.0 * kPi); }
  double apex_x_residual() const { return apex_x_residual_; }
  double min_boundary_clearance() const { return min_clearance_; }
  double min_pinch_margin() const { return min_pinch_; }

 private:
  friend class AnnulusRotationNode;

  struct Frame {
    double s;         // arclength on the unmirrored half
    bool mirrored;    // left half
    double theta;     // tangent angle (unmirrored)
    Vec gamma;        // centerline point (unmirrored)
    double kappa, dkappa;
    double q, dq;
    double time;      // t(s) >= 0
  };

  double kappa_of(double s) const;
  double dkappa_of(double s) const;
  double q_of(double s) const;
  double dq_of(double s) const;
  Frame frame_at_s(double s) const;
  double s_of_time(double t) const;

  void build_tables(double lambda_knob);
  void run_audits();

  // geometry parameters (fixed) and the tuned width knob
  double u_max_ = 0.43;
  double band_ = 0.39;
  double edge_ = 0.425;
  double core_half_ = 1.02;
  double funnel_end_ = 1.14;
  double turn_len_ = 0.9;
  double leg_len_ = 0.23;
  double q_turn_ = 3.0;
  double lambda_knob_ = 0.5;
  double q_side_ = 2.0, q_top_ = 1.0;

  double s_apex_ = 0.0, t_half_ = 0.0;
  double apex_x_residual_ = 0.0, min_clearance_ = 0.0, min_pinch_ = 0.0;

  // dense tables over s in [0, s_apex]
  size_t n_tab_ = 8193;
  std::vector<double> tab_theta_, tab_gx_, tab_gy_, tab_time_;
  // inverse time table: s at uniform t in [0, t_half]
  std::vector<double> tab_s_of_t_;
  // seed grid for from_plane
  size_t seed_n_ = 128;
  std::vector<double> seed_s_;
  std::vector<uint8_t> seed_m_;

  double table_interp(const std::vector<double>& tab, double s) const;
};

}  // namespace hamrep
