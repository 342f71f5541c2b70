#include "doctest.h"

#include <cmath>

#include "hamrep/annulus.hpp"
#include "hamrep/hamflow.hpp"
#include "hamrep/util.hpp"

using namespace hamrep;

TEST_CASE("annulus chart: build-time audits") {
  auto pair = build_annulus_rotation();
  const AnnulusChart& chart = *pair.chart;
  CHECK(chart.time_closure_residual() <= 1e-9);
  CHECK(chart.apex_x_residual() <= 1e-9);
  CHECK(chart.min_pinch_margin() >= 0.2);
  CHECK(chart.min_boundary_clearance() >= 0.02);
  CHECK(std::fabs(chart.period() - 2 * kPi) <= 1e-9);
}

TEST_CASE("annulus chart: identity on the core") {
  auto pair = build_annulus_rotation();
  const AnnulusChart& chart = *pair.chart;
  // psi(t,x) = (t,x) for |t| <= 1, |x| <= u_max.
  const double um = chart.u_max() - 0.005;
  for (double t : {-1.0, -0.5, 0.0, 0.5, 0.77, 1.0}) {
    for (double u : {-um, -0.3, 0.0, 0.25, 0.3, um}) {
      const Vec p = chart.to_plane(t, u);
      CHECK(std::fabs(p[0] - t) <= 1e-11);
      CHECK(std::fabs(p[1] - u) <= 1e-11);
    }
  }
  const Vec p = chart.to_plane(0.5, 0.5);
  CHECK(std::fabs(p[0] - 0.5) <= 1e-12);
  CHECK(std::fabs(p[1] - 0.5) <= 1e-12);
}

TEST_CASE("annulus chart: inverse consistency") {
  auto pair = build_annulus_rotation();
  const AnnulusChart& chart = *pair.chart;
  Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    const double t = rng.uniform(-kPi, kPi);
    const double u = rng.uniform(-chart.u_max(), chart.u_max());
    const Vec p = chart.to_plane(t, u);
    CHECK(std::fabs(p[0]) <= 2.0);
    CHECK(std::fabs(p[1]) <= 2.0);
    const auto cc = chart.from_plane(p);
    REQUIRE(cc.in_tube);
    CHECK(std::fabs(cc.u - u) <= 1e-9);
    // t matches modulo the period.
    const double dt = std::remainder(cc.t - t, 2 * kPi);
    CHECK(std::fabs(dt) <= 1e-9);
  }
}

TEST_CASE("annulus chart: area element is exactly one") {
  auto pair = build_annulus_rotation();
  const AnnulusChart& chart = *pair.chart;
  Rng rng(11);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double t = rng.uniform(-kPi, kPi);
    const double u = rng.uniform(-chart.u_max(), chart.u_max());
    const SmallMat d = chart.d_to_plane(t, u);
    const double det = d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0);
    worst = std::max(worst, std::fabs(det - 1.0));
  }
  CHECK(worst <= 1e-8);

  // Finite-difference Jacobian of psi at random interior points.
  worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double t = rng.uniform(-3.0, 3.0);
    const double u = rng.uniform(-chart.band(), chart.band());
    const double h = 1e-3;
    const auto d1 = [&](bool tu, int comp) {
      const auto ev = [&](double ofs) {
        return tu ? chart.to_plane(t + ofs, u)[comp] : chart.to_plane(t, u + ofs)[comp];
      };
      return (8 * (ev(h) - ev(-h)) - (ev(2 * h) - ev(-2 * h))) / (12 * h);
    };
    const double a = d1(true, 0), b = d1(false, 0);
    const double c = d1(true, 1), d = d1(false, 1);
    worst = std::max(worst, std::fabs(a * d - b * c - 1.0));
  }
  // FD is a coarse cross-check only: the chart's width ramps carry large
  // high-order derivatives, so difference quotients stall near 1e-4.
  CHECK(worst <= 2e-4);
}

TEST_CASE("annulus rotation: conjugation identity and band behavior") {
  auto pair = build_annulus_rotation();
  const AnnulusChart& chart = *pair.chart;
  const SymplecticMap& rot = pair.rotation;

  Rng rng(23);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = rng.uniform(-kPi, kPi);
    const double x = rng.uniform(-chart.band(), chart.band());
    const Vec lhs = rot.apply(chart.to_plane(t, x));
    const Vec rhs = chart.to_plane(t + kAlpha, x);
    worst = std::max(worst, std::fabs(lhs[0] - rhs[0]));
    worst = std::max(worst, std::fabs(lhs[1] - rhs[1]));
  }
  CHECK(worst <= 1e-6);

  // Identity on the hole and outside the tube.
  const Vec inside_hole{0.0, 1.0};
  const auto cc = chart.from_plane(inside_hole);
  if (!cc.in_tube) {
    const Vec img = rot.apply(inside_hole);
    CHECK(img == inside_hole);
  }

  // Symplectic residual with analytic Jacobians.
  Box b;
  b.lo = {-1.95, -1.95};
  b.hi = {1.95, 1.95};
  CHECK(symplectic_residual(rot, halton_points(b, 1000)) <= 1e-5);
}

TEST_CASE("annulus rotation: round trip with the inverse") {
  auto pair = build_annulus_rotation();
  const SymplecticMap& rot = pair.rotation;
  auto rt = SymplecticMap::composition({rot, rot.inverse()});
  Box b;
  b.lo = {-1.9, -1.9};
  b.hi = {1.9, 1.9};
  for (const auto& p : halton_points(b, 100)) {
    const Vec q = rt.apply(p);
    CHECK(std::fabs(q[0] - p[0]) <= 1e-9);
    CHECK(std::fabs(q[1] - p[1]) <= 1e-9);
  }
}
