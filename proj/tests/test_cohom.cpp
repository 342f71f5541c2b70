#include "doctest.h"

#include <cmath>
#include <complex>

#include "hamrep/cohom.hpp"
#include "hamrep/gridfn.hpp"
#include "hamrep/util.hpp"

using namespace hamrep;

namespace {

GridSpec circle(size_t n) { return GridSpec{{Axis::periodic(2.0 * kPi, n)}}; }

GridSpec cylinder(size_t nt, size_t nx) {
  return GridSpec{{Axis::periodic(2.0 * kPi, nt), Axis::interval(-1.0, 1.0, nx)}};
}

}  // namespace

TEST_CASE("denominator lower bound vs directly computed gap") {
  CHECK(denom_lower_bound(1) == doctest::Approx(4.0 / (2.0 * std::sqrt(2.0) + 1.0)));
  CHECK(denom_lower_bound(-1) == denom_lower_bound(1));
  CHECK(denom_lower_bound(5) == doctest::Approx(4.0 / (10.0 * std::sqrt(2.0) + 1.0)));
  CHECK_THROWS_AS(denom_lower_bound(0), ArgumentError);

  // Direct complex arithmetic oracle for small n.
  for (long n = 1; n <= 64; ++n) {
    const std::complex<double> e = std::exp(std::complex<double>(0.0, n * kAlpha)) - 1.0;
    CHECK(unit_circle_gap(n) == doctest::Approx(std::abs(e)).epsilon(1e-10));
  }
  CHECK(unit_circle_gap(1) == doctest::Approx(2.0 * std::fabs(std::sin(std::sqrt(2.0) * kPi))));

  for (long n = 1; n <= 10000; ++n) {
    CHECK(unit_circle_gap(n) >= denom_lower_bound(n));
  }
}

TEST_CASE("solve_twisted: zero input") {
  auto f = GridFunction::zeros(circle(256));
  auto sol = solve_twisted(f);
  CHECK(sol.g.sup_norm() == 0.0);
  CHECK(sol.residual_sup == 0.0);
  auto frag = verify_twisted(f, sol);
  CHECK(frag.pass());
}

TEST_CASE("solve_twisted: single mode closed form") {
  auto f = GridFunction::sample(circle(256),
                                [](const std::vector<double>& x) { return std::cos(x[0]); });
  auto sol = solve_twisted(f);
  CHECK(sol.residual_sup <= 1e-10);

  // g(t) = Re(e^{it} / (e^{i alpha} - 1))
  const std::complex<double> denom = std::exp(std::complex<double>(0.0, kAlpha)) - 1.0;
  double err = 0.0;
  for (size_t j = 0; j < 256; ++j) {
    const double t = f.spec().axes[0].coord(j);
    const std::complex<double> gex = std::exp(std::complex<double>(0.0, t)) / denom;
    err = std::max(err, std::fabs(sol.g.values()[j] - gex.real()));
  }
  CHECK(err <= 1e-12);
  CHECK(verify_twisted(f, sol).pass());
}

TEST_CASE("solve_twisted: cylinder with bump fiber") {
  BumpBasis b = make_bump(1.0);
  auto f = GridFunction::sample(cylinder(256, 65), [&](const std::vector<double>& x) {
    return std::cos(x[0]) * b.eval(x[1]);
  });
  auto sol = solve_twisted(f);
  CHECK(sol.residual_sup <= 1e-9);
  CHECK(sol.deriv_bound_ratio <= 2.0);
  CHECK(verify_twisted(f, sol).pass());

  // Support in x is preserved: fibers where the bump vanishes stay zero.
  for (size_t j = 0; j < 256; ++j) {
    CHECK(std::fabs(sol.g.values()[j * 65 + 0]) <= 1e-14);   // x = -1
    CHECK(std::fabs(sol.g.values()[j * 65 + 64]) <= 1e-14);  // x = +1
  }
}

TEST_CASE("solve_twisted: nonzero fiber mean rejected") {
  auto f = GridFunction::sample(circle(128),
                                [](const std::vector<double>& x) { return 1.0 + std::cos(x[0]); });
  CHECK_THROWS_AS(solve_twisted(f), PreconditionError);
}

TEST_CASE("solve_twisted: under-resolved input rejected") {
  // Nyquist-adjacent content trips the spectral tail audit.
  auto f = GridFunction::sample(
      circle(64), [](const std::vector<double>& x) { return std::cos(31 * x[0]); });
  CHECK_THROWS_AS(solve_twisted(f), ResolutionError);
}

TEST_CASE("verify_twisted flags a corrupted solution") {
  auto f = GridFunction::sample(circle(256),
                                [](const std::vector<double>& x) { return std::cos(x[0]); });
  auto sol = solve_twisted(f);
  sol.g.mutable_values()[17] += 0.1;
  auto frag = verify_twisted(f, sol);
  CHECK(!frag.pass());
  double measured = 0.0;
  for (const auto& c : frag.checks) {
    if (c.name == "residual_sup") measured = c.value;
  }
  CHECK(measured == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("solution linearity") {
  BumpBasis b = make_bump(1.0);
  auto f1 = GridFunction::sample(cylinder(128, 33), [&](const std::vector<double>& x) {
    return std::cos(x[0]) * b.eval(x[1]);
  });
  auto f2 = GridFunction::sample(cylinder(128, 33), [&](const std::vector<double>& x) {
    return std::sin(2 * x[0]) * b.eval(x[1] * 1.5);
  });
  const double a = 0.7, c = -1.3;
  auto combo = a * f1 + c * f2;
  auto s1 = solve_twisted(f1), s2 = solve_twisted(f2), sc = solve_twisted(combo);
  auto lin = a * s1.g + c * s2.g - sc.g;
  CHECK(lin.sup_norm() <= 1e-10);
}

TEST_CASE("spectral shift is exact for band-limited data") {
  auto g = GridFunction::sample(circle(64), [](const std::vector<double>& x) {
    return std::sin(3 * x[0]) - 0.4 * std::cos(7 * x[0]);
  });
  auto shifted = spectral_shift(g, kAlpha);
  double err = 0.0;
  for (size_t j = 0; j < 64; ++j) {
    const double t = g.spec().axes[0].coord(j) + kAlpha;
    err = std::max(err,
                   std::fabs(shifted.values()[j] - (std::sin(3 * t) - 0.4 * std::cos(7 * t))));
  }
  CHECK(err <= 1e-12);
}
