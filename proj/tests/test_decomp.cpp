#include "doctest.h"

#include <cmath>

#include "hamrep/decomp.hpp"
#include "hamrep/gridfn.hpp"
#include "hamrep/util.hpp"

using namespace hamrep;

namespace {

GridSpec cube2(size_t n) {
  return GridSpec{{Axis::interval(-1.0, 1.0, n), Axis::interval(-1.0, 1.0, n)}};
}

}  // namespace

TEST_CASE("split_zero_mean: zero input") {
  BumpBasis b = make_bump(1.0);
  auto f = GridFunction::zeros(cube2(65));
  auto s = split_zero_mean(f, b);
  REQUIRE(s.parts.size() == 2);
  CHECK(s.parts[0].sup_norm() == 0.0);
  CHECK(s.parts[1].sup_norm() == 0.0);
}

TEST_CASE("split_zero_mean: 1-d degenerates to identity") {
  BumpBasis b = make_bump(1.0);
  GridSpec line{{Axis::interval(-1.0, 1.0, 129)}};
  auto f = GridFunction::sample(line, [&](const std::vector<double>& x) {
    return b.eval(x[0] * 1.5) * x[0];  // odd, zero mean, compact support
  });
  auto s = split_zero_mean(f, b);
  REQUIRE(s.parts.size() == 1);
  auto diff = s.parts[0] - f;
  CHECK(diff.sup_norm() <= 1e-13);
}

TEST_CASE("split_zero_mean: 2-d product case with quadrature oracle") {
  BumpBasis b = make_bump(1.0);
  auto f = GridFunction::sample(cube2(129), [&](const std::vector<double>& x) {
    return b.eval(x[0] * 1.5) * b.eval(x[1] * 1.5) * x[0] * x[1];
  });
  REQUIRE(std::fabs(integral(f)) <= 1e-12);
  auto s = split_zero_mean(f, b);
  REQUIRE(s.parts.size() == 2);
  auto frag = verify_split(f, s);
  CHECK(frag.pass());
  // Constants are finite and reported for m = 1..3.
  for (double c : s.constants_achieved) {
    CHECK(c > 0.0);
    CHECK(c < 100.0);
  }
}

TEST_CASE("split_zero_mean: constants stable across resolutions") {
  BumpBasis b = make_bump(1.0);
  std::array<double, 3> prev{};
  bool have_prev = false;
  for (size_t n : {129, 257}) {
    auto f = GridFunction::sample(cube2(n), [&](const std::vector<double>& x) {
      return b.eval(x[0] * 1.4) * b.eval(x[1] * 1.4) * std::sin(3 * x[0] + 1.0) * x[1];
    });
    // x1-odd factor makes the integral vanish.
    REQUIRE(std::fabs(integral(f)) <= 1e-10);
    auto s = split_zero_mean(f, b);
    if (have_prev) {
      for (int m = 0; m < 3; ++m) {
        const double rel = std::fabs(s.constants_achieved[m] - prev[m]) /
                           std::max(prev[m], 1e-12);
        CHECK(rel <= 0.2);
      }
    }
    prev = s.constants_achieved;
    have_prev = true;
  }
}

TEST_CASE("split_zero_mean rejects nonzero integral") {
  BumpBasis b = make_bump(1.0);
  auto f = GridFunction::sample(cube2(65), [&](const std::vector<double>& x) {
    return b.eval(x[0] * 1.5) * b.eval(x[1] * 1.5);
  });
  CHECK_THROWS_AS(split_zero_mean(f, b), PreconditionError);
}

TEST_CASE("localize: single element cover returns f") {
  GridSpec torus{{Axis::periodic(2.0, 64, -1.0), Axis::periodic(2.0, 64, -1.0)}};
  auto f = GridFunction::sample(torus, [](const std::vector<double>& x) {
    return std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
  });
  std::vector<Box> cover{Box{{-1.0, -1.0}, {1.0, 1.0}}};
  auto res = localize(f, cover);
  REQUIRE(res.parts.size() == 1);
  CHECK((res.parts[0] - f).sup_norm() == 0.0);
}

TEST_CASE("localize: two overlapping boxes on the torus") {
  GridSpec torus{{Axis::periodic(2.0, 128, -1.0), Axis::periodic(2.0, 128, -1.0)}};
  BumpBasis b = make_bump(1.0);
  // Zero-mean bump straddling the overlap region near x0 = 0.
  auto f = GridFunction::sample(torus, [&](const std::vector<double>& x) {
    return b.eval(x[0] * 2.0) * b.eval(x[1] * 2.0) * std::sin(kPi * x[0]) * 0.5;
  });
  REQUIRE(std::fabs(integral(f)) <= 1e-12);
  std::vector<Box> cover{
      Box{{-1.1, -1.0}, {0.25, 1.0}},
      Box{{-0.25, -1.0}, {1.1, 1.0}},
  };
  auto res = localize(f, cover);
  REQUIRE(res.parts.size() == 2);
  auto frag = verify_localize(f, res);
  CHECK(frag.pass());
  CHECK(res.bound_ratio < 50.0);
}

TEST_CASE("localize: bound ratio stable across resolutions") {
  BumpBasis b = make_bump(1.0);
  std::vector<Box> cover{
      Box{{-1.1, -1.0}, {0.25, 1.0}},
      Box{{-0.25, -1.0}, {1.1, 1.0}},
  };
  double prev = -1.0;
  for (size_t n : {128, 256}) {
    GridSpec torus{{Axis::periodic(2.0, n, -1.0), Axis::periodic(2.0, n, -1.0)}};
    auto f = GridFunction::sample(torus, [&](const std::vector<double>& x) {
      return b.eval(x[0] * 2.0) * b.eval(x[1] * 2.0) * std::sin(kPi * x[0]) * 0.5;
    });
    auto res = localize(f, cover);
    if (prev > 0) CHECK(std::fabs(res.bound_ratio - prev) / prev <= 0.2);
    prev = res.bound_ratio;
  }
}

TEST_CASE("localize: zero function gives zero parts") {
  GridSpec torus{{Axis::periodic(2.0, 64, -1.0), Axis::periodic(2.0, 64, -1.0)}};
  auto f = GridFunction::zeros(torus);
  std::vector<Box> cover{
      Box{{-1.1, -1.0}, {0.25, 1.0}},
      Box{{-0.25, -1.0}, {1.1, 1.0}},
  };
  auto res = localize(f, cover);
  for (const auto& p : res.parts) CHECK(p.sup_norm() == 0.0);
}

TEST_CASE("localize: disconnected cover rejected") {
  GridSpec torus{{Axis::periodic(2.0, 64, -1.0), Axis::periodic(2.0, 64, -1.0)}};
  auto f = GridFunction::zeros(torus);
  // Two disjoint boxes cannot cover the torus; the gap is detected first.
  std::vector<Box> cover{
      Box{{-0.9, -1.0}, {-0.5, 1.0}},
      Box{{0.5, -1.0}, {0.9, 1.0}},
  };
  CHECK_THROWS_AS(localize(f, cover), CoverError);
}
