#include "doctest.h"

#include <cmath>

#include "hamrep/gridfn.hpp"
#include "hamrep/hamflow.hpp"
#include "hamrep/util.hpp"

using namespace hamrep;

namespace {

std::vector<Vec> sample_box(double lo, double hi, size_t count) {
  Box b;
  b.lo = {lo, lo};
  b.hi = {hi, hi};
  return halton_points(b, count);
}

GridFunction gaussian_bump_2d(double amp, double width, size_t n = 129, double box = 1.0) {
  BumpBasis b = make_bump(1.0);
  GridSpec spec{{Axis::interval(-box, box, n), Axis::interval(-box, box, n)}};
  return GridFunction::sample(spec, [&](const Vec& x) {
    return amp * b.eval(x[0] / width) * b.eval(x[1] / width);
  });
}

}  // namespace

TEST_CASE("identity and translation") {
  auto id = SymplecticMap::identity(2);
  Vec p{0.3, -0.2};
  CHECK(id.apply(p) == p);
  auto tr = SymplecticMap::translation({1.0, 0.0});
  const Vec q = tr.apply({0.0, 0.0});
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 0.0);
  CHECK(symplectic_residual(id, sample_box(-1, 1, 50)) <= 1e-15);
}

TEST_CASE("composition with inverse is the identity") {
  BumpBasis b = make_bump(1.0);
  GridSpec line{{Axis::interval(-2.0, 2.0, 257)}};
  auto prof = grid_profile(GridFunction::sample(
      line, [&](const Vec& x) { return 0.3 * b.eval(x[0]) * std::sin(3 * x[0]); }));
  auto sh = SymplecticMap::shear(2, 0, 1, prof);
  auto tw = SymplecticMap::radial_twist(2, 0, {0.2, -0.1}, plateau_profile(1.1, 0.4, 0.9));
  auto m = SymplecticMap::composition({tw, sh, SymplecticMap::translation({0.05, -0.03})});
  auto round = SymplecticMap::composition({m, m.inverse()});
  for (const auto& p : sample_box(-0.8, 0.8, 40)) {
    const Vec q = round.apply(p);
    CHECK(std::fabs(q[0] - p[0]) <= 1e-10);
    CHECK(std::fabs(q[1] - p[1]) <= 1e-10);
  }
}

TEST_CASE("shears and twists are exactly symplectic; FD agrees with analytic") {
  BumpBasis b = make_bump(1.0);
  GridSpec line{{Axis::interval(-2.0, 2.0, 257)}};
  auto prof = grid_profile(
      GridFunction::sample(line, [&](const Vec& x) { return 0.5 * b.eval(x[0] / 1.2); }));
  auto sh = SymplecticMap::shear(2, 0, 1, prof);
  auto pts = sample_box(-1.5, 1.5, 200);
  CHECK(symplectic_residual(sh, pts) <= 1e-12);
  CHECK(symplectic_residual_fd(sh, pts) <= 1e-8);

  auto tw = SymplecticMap::radial_twist(2, 0, {0.0, 0.0}, plateau_profile(kPi, 0.5, 1.2));
  CHECK(symplectic_residual(tw, pts) <= 1e-12);
  CHECK(symplectic_residual_fd(tw, pts) <= 1e-7);

  // FD cross-check of the analytic Jacobian, entrywise.
  for (const auto& p : sample_box(-1.2, 1.2, 25)) {
    auto ja = tw.jacobian(p);
    auto jf = fd_jacobian(tw, p, 1e-3);
    for (size_t i = 0; i < 4; ++i) CHECK(std::fabs(ja.a[i] - jf.a[i]) <= 2e-7);
  }
}

TEST_CASE("cube swap exchanges contents rigidly") {
  const double eps = 0.25;
  const Vec a{-eps, 0.0}, b{eps, 0.0};
  auto swap = cube_swap(2, 0, a, b, 2 * eps / 3 * 1.42, 3.4 * eps);
  // Content points map a+x -> b+x.
  for (const auto& x : sample_box(-2 * eps / 3, 2 * eps / 3, 60)) {
    Vec pa{a[0] + x[0], a[1] + x[1]};
    Vec img = swap.apply(pa);
    CHECK(std::fabs(img[0] - (b[0] + x[0])) <= 1e-12);
    CHECK(std::fabs(img[1] - (b[1] + x[1])) <= 1e-12);
    Vec pb{b[0] + x[0], b[1] + x[1]};
    Vec img2 = swap.apply(pb);
    CHECK(std::fabs(img2[0] - (a[0] + x[0])) <= 1e-12);
  }
  // Identity outside the support radius.
  Vec far{1.2, 1.2};
  CHECK(swap.apply(far) == far);
  CHECK(symplectic_residual(swap, sample_box(-1.0, 1.0, 300)) <= 1e-12);
}

TEST_CASE("disk push translates the core rigidly") {
  auto push = disk_push(2, 0, {0.0, 0.0}, {0.3, 0.1}, 0.2, 0.9);
  for (const auto& x : sample_box(-0.15, 0.15, 40)) {
    Vec img = push.apply(x);
    CHECK(std::fabs(img[0] - (x[0] + 0.3)) <= 1e-12);
    CHECK(std::fabs(img[1] - (x[1] + 0.1)) <= 1e-12);
  }
  CHECK(symplectic_residual(push, sample_box(-1.2, 1.2, 200)) <= 1e-12);
}

TEST_CASE("hamiltonian flow: midpoint integrator, harmonic oscillator oracle") {
  // H = (x^2 + y^2)/2 on a grid; flow = rotation by t.
  GridSpec spec{{Axis::interval(-2.0, 2.0, 257), Axis::interval(-2.0, 2.0, 257)}};
  auto H = GridFunction::sample(spec,
                                [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
  const double t = 0.7;
  auto flow = SymplecticMap::hamiltonian_flow(H, t, FlowParams{1e-3, 200000});
  Vec p{0.5, 0.2};
  Vec img = flow.apply(p);
  // x' = dH/dy = y, y' = -x: rotation by -t in the (x,y) plane.
  const double c = std::cos(t), s = std::sin(t);
  CHECK(std::fabs(img[0] - (c * p[0] + s * p[1])) <= 2e-5);
  CHECK(std::fabs(img[1] - (-s * p[0] + c * p[1])) <= 2e-5);
  CHECK(symplectic_residual(flow, sample_box(-0.8, 0.8, 10)) <= 1e-6);
}

TEST_CASE("psi_h: zero profile gives the identity") {
  GridSpec spec{{Axis::interval(-1.0, 1.0, 65), Axis::interval(-1.0, 1.0, 65)}};
  auto h = GridFunction::zeros(spec);
  auto psi = build_psi_h(h);
  for (const auto& p : sample_box(-0.9, 0.9, 30)) {
    const Vec q = psi.apply(p);
    CHECK(std::fabs(q[0] - p[0]) <= 1e-12);
    CHECK(std::fabs(q[1] - p[1]) <= 1e-12);
  }
}

TEST_CASE("psi_h: pullback identity, displacement bound, symplecticity") {
  auto h = gaussian_bump_2d(0.02, 0.6, 769);
  auto psi = build_psi_h(h);

  // x1 o Psi - x1 = h at sample points in (-1,1)^2.
  double worst = 0.0;
  for (const auto& p : sample_box(-0.95, 0.95, 400)) {
    const Vec d = psi.displacement(p);
    worst = std::max(worst, std::fabs(d[0] - h.value(p)));
  }
  CHECK(worst <= 1e-6);

  // |Psi* x_i - x_i| <= 2 |1 - x2| |Dh|_inf.
  const double dh = deriv_sup_norm(h, 1);
  double bound_excess = 0.0;
  for (const auto& p : sample_box(-1.5, 1.4, 1000)) {
    const Vec d = psi.displacement(p);
    const double cap = 2.0 * std::fabs(1.0 - p[1]) * dh + 1e-9;
    for (double di : d) bound_excess = std::max(bound_excess, std::fabs(di) - cap);
  }
  CHECK(bound_excess <= 1e-5);

  CHECK(symplectic_residual(psi, sample_box(-1.3, 1.3, 300)) <= 1e-5);

  // Analytic Jacobian matches FD (both noise floors included).
  for (const auto& p : sample_box(-0.9, 0.9, 20)) {
    auto ja = psi.jacobian(p);
    auto jf = fd_jacobian(psi, p, 1e-3);
    for (size_t i = 0; i < 4; ++i) CHECK(std::fabs(ja.a[i] - jf.a[i]) <= 5e-4);
  }
}

TEST_CASE("psi_h rejects steep profiles") {
  auto h = gaussian_bump_2d(0.5, 0.3, 129);
  CHECK_THROWS_AS(build_psi_h(h), PreconditionError);
}

TEST_CASE("psi_h integrator convergence: halving the step shrinks the residual") {
  auto h = gaussian_bump_2d(0.02, 0.6, 769);
  auto coarse = build_psi_h(h, 1.0 / 6.0);
  auto fine = build_psi_h(h, 1.0 / 12.0);
  auto ref = build_psi_h(h, 1.0 / 96.0);
  double ec = 0.0, ef = 0.0;
  for (const auto& p : sample_box(-0.8, 0.8, 50)) {
    const Vec qc = coarse.apply(p), qf = fine.apply(p), qr = ref.apply(p);
    for (size_t i = 0; i < 2; ++i) {
      ec = std::max(ec, std::fabs(qc[i] - qr[i]));
      ef = std::max(ef, std::fabs(qf[i] - qr[i]));
    }
  }
  CHECK(ec >= 3.0 * ef);  // order >= 2
}

TEST_CASE("straightening: pullback identity on the inner box and compact support") {
  const double L = 1.0, lambda = 1.0;
  auto h = gaussian_bump_2d(0.008, 0.6, 769);
  const double slope = deriv_sup_norm(h, 1);
  REQUIRE(slope < lambda / 8.0);
  auto phi = build_straightening(h, L, lambda);

  // pullback(Phi, lambda x1) - lambda x1 = h on (-L, L)^2.
  double worst = 0.0;
  for (const auto& p : sample_box(-0.95, 0.95, 300)) {
    const Vec d = phi.displacement(p);
    worst = std::max(worst, std::fabs(lambda * d[0] - h.value(p)));
  }
  CHECK(worst <= 1e-5);

  // Identity on a ring outside the reported support box.
  const Box sup = phi.support();
  for (size_t k = 0; k < 200; ++k) {
    const double ang = 2 * kPi * static_cast<double>(k) / 200.0;
    Vec p{1.05 * (sup.hi[0]) * std::cos(ang), 0.0};
    p[1] = (std::sin(ang) > 0 ? sup.hi[1] : sup.lo[1]) * 1.05;
    const Vec d = phi.displacement(p);
    CHECK(std::fabs(d[0]) <= 1e-12);
    CHECK(std::fabs(d[1]) <= 1e-12);
  }

  CHECK(symplectic_residual(phi, sample_box(-1.9, 1.9, 200)) <= 1e-5);
}

TEST_CASE("straightening: zero h gives identity, slope precondition enforced") {
  GridSpec spec{{Axis::interval(-1.0, 1.0, 65), Axis::interval(-1.0, 1.0, 65)}};
  auto phi = build_straightening(GridFunction::zeros(spec), 1.0, 1.0);
  for (const auto& p : sample_box(-1.5, 1.5, 50)) {
    const Vec d = phi.displacement(p);
    CHECK(std::fabs(d[0]) <= 1e-13);
    CHECK(std::fabs(d[1]) <= 1e-13);
  }
  auto steep = gaussian_bump_2d(0.4, 0.5, 129);
  CHECK_THROWS_AS(build_straightening(steep, 1.0, 1.0), PreconditionError);
}

TEST_CASE("coordinate normalizer flattens a curved function near a point") {
  // f = x1 + 0.05 x1^2 near 0 (plus cutoff far away to stay grid-friendly).
  GridSpec spec{{Axis::interval(-2.0, 2.0, 257), Axis::interval(-2.0, 2.0, 257)}};
  auto f = GridFunction::sample(spec, [](const Vec& x) { return x[0] + 0.05 * x[0] * x[0]; });
  const Vec p{0.0, 0.0};
  auto res = build_coordinate_normalizer(f, p);

  // Theta(p) = p.
  const Vec img = res.theta.apply(p);
  CHECK(std::fabs(img[0] - p[0]) <= 1e-8);
  CHECK(std::fabs(img[1] - p[1]) <= 1e-8);

  // f o Theta = x1 + c on the reported neighborhood.
  double worst = 0.0;
  for (const auto& y : sample_box(-res.delta, res.delta, 200)) {
    const Vec q = res.theta.apply(y);
    worst = std::max(worst, std::fabs(f.value(q) - y[0] - res.c));
  }
  CHECK(worst <= 1e-5);

  // f = x1 exactly: identity normalizer, c = 0.
  auto fx = GridFunction::sample(spec, [](const Vec& x) { return x[0]; });
  auto res2 = build_coordinate_normalizer(fx, p);
  CHECK(std::fabs(res2.c) <= 1e-9);
  for (const auto& y : sample_box(-0.2, 0.2, 50)) {
    const Vec q = res2.theta.apply(y);
    CHECK(std::fabs(q[0] - y[0]) <= 1e-7);
    CHECK(std::fabs(q[1] - y[1]) <= 1e-7);
  }
}

TEST_CASE("pullback respects composition") {
  BumpBasis bb = make_bump(1.0);
  GridSpec spec{{Axis::interval(-1.5, 1.5, 129), Axis::interval(-1.5, 1.5, 129)}};
  auto u = GridFunction::sample(
      spec, [&](const Vec& x) { return bb.eval(x[0] / 1.2) * bb.eval(x[1] / 1.2) * x[0]; });
  auto A = SymplecticMap::translation({0.1, 0.0});
  auto tw = SymplecticMap::radial_twist(2, 0, {0.0, 0.0}, plateau_profile(0.7, 0.3, 0.8));
  auto C = SymplecticMap::composition({A, tw});
  auto lhs = pullback(C, u);
  auto rhs = pullback(tw, pullback(A, u));
  CHECK((lhs - rhs).sup_norm() <= 2e-4);  // interpolation-limited

  // Exact when u is closed-form linear: compare coordinates directly.
  double worst = 0.0;
  for (const auto& p : sample_box(-1.0, 1.0, 100)) {
    const double via_c = C.apply(p)[0];
    const double via_two = tw.apply(A.apply(p))[0];
    worst = std::max(worst, std::fabs(via_c - via_two));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("map serialization round trip") {
  BumpBasis bb = make_bump(1.0);
  GridSpec line{{Axis::interval(-2.0, 2.0, 129)}};
  auto prof = grid_profile(
      GridFunction::sample(line, [&](const Vec& x) { return 0.2 * bb.eval(x[0]) * x[0]; }));
  auto m = SymplecticMap::composition(
      {SymplecticMap::shear(2, 0, 1, prof),
       SymplecticMap::radial_twist(2, 0, {0.1, 0.2}, plateau_profile(kPi, 0.3, 0.7)),
       SymplecticMap::translation({0.5, -0.25}).inverse()});
  auto j = m.to_json();
  auto m2 = SymplecticMap::from_json(j);
  for (const auto& p : sample_box(-1.0, 1.0, 50)) {
    const Vec a = m.apply(p), b = m2.apply(p);
    CHECK(std::fabs(a[0] - b[0]) <= 1e-14);
    CHECK(std::fabs(a[1] - b[1]) <= 1e-14);
  }
}
