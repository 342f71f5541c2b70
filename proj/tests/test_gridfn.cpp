#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "hamrep/gridfn.hpp"
#include "hamrep/util.hpp"

using namespace hamrep;

namespace {

GridSpec circle_grid(size_t n, double period = 2.0 * kPi) {
  return GridSpec{{Axis::periodic(period, n)}};
}

}  // namespace

TEST_CASE("bump basis: plateau, support, partition of unity") {
  BumpBasis b = make_bump(1.0);
  CHECK(b.eval(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.eval(0.7) == 0.0);
  CHECK(b.eval(0.5) + b.eval(-0.5) == doctest::Approx(1.0).epsilon(1e-13));

  // Partition of unity at many sample points, shifts i = -2..2.
  for (int k = 0; k <= 1000; ++k) {
    const double t = -1.0 + 2.0 * k / 1000.0;
    double s = 0.0;
    for (int i = -2; i <= 2; ++i) s += b.eval(t + i);
    CHECK(std::fabs(s - 1.0) <= 1e-12);
  }
  // 0 <= r <= 1 on the stored grid.
  for (size_t i = 0; i < b.r.size(); ++i) {
    CHECK(b.r.values()[i] >= 0.0);
    CHECK(b.r.values()[i] <= 1.0);
  }
}

TEST_CASE("bump sharpness out of range") {
  CHECK_THROWS_AS(make_bump(100.0), ResolutionError);
}

TEST_CASE("tensor bump: plateau value, integral scaling, support") {
  BumpBasis b = make_bump(1.0);
  GridFunction R2 = tensor_bump(b, 2, 1.0);
  CHECK(R2.value({0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));

  // integral(R^eps) = eps^d, forced by the partition identity.
  CHECK(integral(R2) == doctest::Approx(1.0).epsilon(1e-10));
  GridFunction Rq = tensor_bump(b, 2, 0.25);
  CHECK(integral(Rq) == doctest::Approx(0.0625).epsilon(1e-10));

  GridFunction R1 = tensor_bump(b, 1, 0.5);
  CHECK(R1.value({0.4}) == 0.0);  // r(0.8) = 0
}

TEST_CASE("deriv_sup_norm: spectral consistency on the circle") {
  auto f1 = GridFunction::sample(circle_grid(256),
                                 [](const std::vector<double>& x) { return std::sin(x[0]); });
  CHECK(deriv_sup_norm(f1, 3) == doctest::Approx(1.0).epsilon(1e-8));
  auto f2 = GridFunction::sample(circle_grid(256),
                                 [](const std::vector<double>& x) { return std::sin(2 * x[0]); });
  CHECK(deriv_sup_norm(f2, 1) == doctest::Approx(2.0).epsilon(1e-8));

  GridFunction z = GridFunction::zeros(circle_grid(64));
  CHECK(deriv_sup_norm(z, 2) == 0.0);

  CHECK_THROWS_AS(deriv_sup_norm(f1, 5), ArgumentError);
  CHECK_THROWS_AS(deriv_sup_norm(f1, 0), ArgumentError);
}

TEST_CASE("deriv scaling law on interval axes") {
  BumpBasis b = make_bump(1.0);
  for (double eps : {0.5, 0.25}) {
    GridSpec s1{{Axis::interval(-1.0, 1.0, 513)}};
    GridSpec se{{Axis::interval(-eps, eps, 513)}};
    auto f = GridFunction::sample(s1, [&](const std::vector<double>& x) { return b.eval(x[0]); });
    auto fe =
        GridFunction::sample(se, [&](const std::vector<double>& x) { return b.eval(x[0] / eps); });
    for (int m : {1, 2}) {
      const double lhs = deriv_sup_norm(fe, m);
      const double rhs = std::pow(eps, -m) * deriv_sup_norm(f, m);
      CHECK(std::fabs(lhs - rhs) / rhs <= 1e-6);
    }
  }
}

TEST_CASE("integral: constants and trig orthogonality") {
  GridSpec sq{{Axis::interval(0.0, 1.0, 65), Axis::interval(0.0, 1.0, 65)}};
  auto one = GridFunction::sample(sq, [](const std::vector<double>&) { return 1.0; });
  CHECK(integral(one) == doctest::Approx(1.0).epsilon(1e-14));

  auto c = GridFunction::sample(circle_grid(64),
                                [](const std::vector<double>& x) { return std::cos(x[0]); });
  CHECK(std::fabs(integral(c)) <= 1e-12);
}

TEST_CASE("fiber integrals") {
  GridSpec sq{{Axis::interval(-1.0, 1.0, 65), Axis::interval(-1.0, 1.0, 65)}};
  auto fx = GridFunction::sample(sq, [](const std::vector<double>& x) { return x[0]; });
  CHECK(fiber_integral(fx, 0).sup_norm() <= 1e-13);

  auto one = GridFunction::sample(sq, [](const std::vector<double>&) { return 1.0; });
  auto g = fiber_integral(one, 0);
  CHECK(g.dim() == 1);
  CHECK(g.values()[3] == doctest::Approx(2.0).epsilon(1e-14));

  GridSpec cyl{{Axis::periodic(2.0 * kPi, 64), Axis::interval(-1.0, 1.0, 33)}};
  auto h = GridFunction::sample(
      cyl, [](const std::vector<double>& x) { return std::cos(x[0]) * x[1]; });
  CHECK(fiber_integral(h, 0).sup_norm() <= 1e-12);

  CHECK_THROWS_AS(fiber_integral(h, 5), ArgumentError);
}

TEST_CASE("interpolation accuracy and compact-support convention") {
  GridSpec cyl{{Axis::periodic(2.0 * kPi, 256)}};
  auto f = GridFunction::sample(cyl,
                                [](const std::vector<double>& x) { return std::sin(3 * x[0]); });
  for (double t : {0.1, 1.7, 4.3, 6.1}) {
    CHECK(f.value({t}) == doctest::Approx(std::sin(3 * t)).epsilon(5e-8));
    CHECK(f.deriv({t}, 0) == doctest::Approx(3 * std::cos(3 * t)).epsilon(1e-6));
  }
  BumpBasis b = make_bump(1.0);
  GridSpec iv{{Axis::interval(-1.0, 1.0, 129)}};
  auto g = GridFunction::sample(iv, [&](const std::vector<double>& x) { return b.eval(x[0]); });
  CHECK(g.value({1.5}) == 0.0);
  CHECK(g.value({0.2}) == doctest::Approx(b.eval(0.2)).epsilon(1e-10));
}

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS(GridSpec{{Axis::interval(1.0, 0.0, 64)}}.validate(), ArgumentError);
  CHECK_THROWS_AS(GridSpec{{Axis::interval(0.0, 1.0, 4)}}.validate(), ArgumentError);
  GridSpec ok{{Axis::interval(0.0, 1.0, 16)}};
  std::vector<double> bad(16, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(GridFunction(ok, bad), ArgumentError);
}

TEST_CASE("serialization round trip and checksum detection") {
  GridSpec cyl{{Axis::periodic(2.0 * kPi, 32), Axis::interval(-1.0, 1.0, 17)}};
  auto f = GridFunction::sample(
      cyl, [](const std::vector<double>& x) { return std::sin(x[0]) + x[1] * x[1]; });
  const std::string path = "test_gridfn_roundtrip.gfn";
  save_gridfn(f, path);
  GridFunction g = load_gridfn(path);
  REQUIRE(g.size() == f.size());
  for (size_t i = 0; i < f.size(); ++i) CHECK(g.values()[i] == f.values()[i]);

  // Flip one payload byte; loader must report a checksum mismatch.
  {
    FILE* fp = std::fopen(path.c_str(), "r+b");
    REQUIRE(fp != nullptr);
    std::fseek(fp, -9, SEEK_END);
    int c = std::fgetc(fp);
    std::fseek(fp, -9, SEEK_END);
    std::fputc(c ^ 0x40, fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(load_gridfn(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("csv export") {
  GridSpec iv{{Axis::interval(0.0, 1.0, 9)}};
  auto f = GridFunction::sample(iv, [](const std::vector<double>& x) { return x[0]; });
  export_csv(f, "test_gridfn.csv");
  FILE* fp = std::fopen("test_gridfn.csv", "r");
  REQUIRE(fp != nullptr);
  char line[128];
  REQUIRE(std::fgets(line, sizeof(line), fp) != nullptr);
  CHECK(std::string(line) == "x0,value\n");
  std::fclose(fp);
  std::remove("test_gridfn.csv");
}
