#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "dce_sphere/error.hpp"
#include "dce_sphere/spectrum.hpp"

using namespace dce;
using std::numbers::pi;

namespace {

const BoundaryConfig kDD = BoundaryConfig::dirichlet(Shell::Outer);
const BoundaryConfig kDDInner = BoundaryConfig::dirichlet(Shell::Inner);
const BoundaryConfig kND = BoundaryConfig::neumann_inner();
const BoundaryConfig kDN = BoundaryConfig::neumann_outer();

double fd_domega(const BoundaryConfig& c, int l, int s, const CavityGeometry& g) {
  const double rb = g.radius(c.moving);
  const double h = 1e-6 * rb;
  // Roots to near machine precision so the difference is not noise-limited.
  const double up = solve_frequency(c, l, s, g.with_radius(c.moving, rb + h), 1e-15).omega;
  const double dn = solve_frequency(c, l, s, g.with_radius(c.moving, rb - h), 1e-15).omega;
  return (up - dn) / (2 * h);
}

}  // namespace

TEST_CASE("configuration validation and labels") {
  CHECK(kDD.tag() == "DD");
  CHECK(kND.tag() == "ND");
  CHECK(kDN.tag() == "DN");
  CHECK(kDD.legend() == "DD\xCC\x83");
  CHECK(kDDInner.legend() == "D\xCC\x83" "D");
  CHECK(kND.legend() == "ND\xCC\x83");
  CHECK(kDN.legend() == "D\xCC\x83N");
  CHECK_THROWS_AS((BoundaryConfig{Boundary::Neumann, Boundary::Dirichlet, Shell::Inner}.validate()),
                  DomainError);
  CHECK_THROWS_AS((BoundaryConfig{Boundary::Neumann, Boundary::Neumann, Shell::Inner}.validate()),
                  DomainError);
  CHECK_THROWS_AS((CavityGeometry{2.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((CavityGeometry{0.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS(solve_frequencies(kDD, 0, 0, CavityGeometry{}), DomainError);
}

TEST_CASE("characteristic residual") {
  const CavityGeometry g{1, 2};
  CHECK(std::abs(characteristic(kDD, 0, pi, g)) < 1e-15);
  CHECK(std::abs(characteristic(kDD, 0, pi / 2, g)) > 0.1);
  CHECK(std::abs(characteristic(kND, 0, pi, CavityGeometry{1, 1.59809})) < 1e-5);
  CHECK_THROWS_AS(characteristic(kDD, 0, -1.0, g), DomainError);
}

TEST_CASE("DD l = 0 roots are equally spaced") {
  for (const CavityGeometry g : {CavityGeometry{1, 2}, CavityGeometry{0.3, 5.1},
                                 CavityGeometry{100, 101}}) {
    const auto f = solve_frequencies(kDD, 0, 10, g);
    REQUIRE(f.size() == 10);
    for (const auto& m : f) {
      CHECK(m.omega == doctest::Approx(m.s * pi / g.width()).epsilon(1e-11));
    }
  }
}

TEST_CASE("published curve points") {
  CHECK(solve_frequency(kDD, 1, 1, CavityGeometry{1, 2.04904}).omega / pi ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(solve_frequency(kDN, 0, 1, CavityGeometry{1, 1.4303}).omega / pi ==
        doctest::Approx(1.0).epsilon(1e-3));

  const std::vector<double> x2 = {2.0};
  const auto p = frequency_map(kND, 2, 1, x2);
  REQUIRE(p[0].ok);
  CHECK(std::abs(p[0].y - 2.59321) < 2e-3);
  const auto z = frequency_map_point(kDN, 0, 2, 0.0);
  REQUIRE(z.ok);
  CHECK(z.x == 0.0);
  CHECK(std::abs(z.y - 1.43135) < 2e-3);
}

TEST_CASE("DD l = 0 map is the line y = x + s") {
  const std::vector<double> xs = {0.0, 0.5, 1.0, 2.5};
  for (int s = 1; s <= 3; ++s) {
    for (const auto& p : frequency_map(kDD, 0, s, xs)) {
      REQUIRE(p.ok);
      CHECK(p.y == doctest::Approx(std::max(p.x, kMapZeroAbscissa) + s).epsilon(1e-10));
    }
  }
}

TEST_CASE("implicit frequency derivative") {
  const CavityGeometry g{1, 2};
  CHECK(domega_dr_beta(kDD, 0, 1, g) == doctest::Approx(-pi).epsilon(1e-10));
  CHECK(domega_dr_beta(kDDInner, 0, 2, g) == doctest::Approx(2 * pi).epsilon(1e-10));

  const double x = domega_dr_beta(kND, 1, 1, g);
  CHECK(std::abs(x - fd_domega(kND, 1, 1, g)) / std::abs(x) < 1e-6);

  for (const auto& c : {kDD, kDDInner, kND, kDN})
    for (int l : {0, 2, 5})
      for (int s : {1, 3}) {
        const CavityGeometry gg{1.3, 2.9};
        const double an = domega_dr_beta(c, l, s, gg);
        CHECK(std::abs(an - fd_domega(c, l, s, gg)) / std::abs(an) < 1e-6);
      }
}

TEST_CASE("asymptotic frequencies") {
  CHECK(asymptotic_frequency(kDD, 1, CavityGeometry{100, 101}) == doctest::Approx(pi));
  CHECK(asymptotic_frequency(kND, 1, CavityGeometry{100, 101}) == doctest::Approx(pi / 2));
  CHECK(asymptotic_frequency(kDN, 3, CavityGeometry{1, 2}) == doctest::Approx(2.5 * pi));

  const CavityGeometry thin{100, 101};
  for (const auto& c : {kDD, kND, kDN})
    for (int l = 0; l <= 3; ++l)
      for (int s = 1; s <= 3; ++s) {
        const double w = solve_frequency(c, l, s, thin).omega;
        CHECK(std::abs(w / asymptotic_frequency(c, s, thin) - 1) < 1e-2);
      }
}

TEST_CASE("monotone roots and dimensional scaling") {
  for (const auto& c : {kDD, kND, kDN})
    for (int l : {0, 1, 4, 9}) {
      const auto f = solve_frequencies(c, l, 8, CavityGeometry{1, 3});
      for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i].omega > f[i - 1].omega);
      const auto scaled = solve_frequencies(c, l, 8, CavityGeometry{3.7, 11.1});
      for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(scaled[i].omega * 3.7 == doctest::Approx(f[i].omega).epsilon(1e-11));
        CHECK(scaled[i].domega_dr_beta * 3.7 * 3.7 ==
              doctest::Approx(f[i].domega_dr_beta).epsilon(1e-9));
      }
    }
}

TEST_CASE("no root is skipped") {
  // A grid four times finer than the solver's scan sees the same number of
  // sign changes below the s_max-th root.
  for (const auto& c : {kDD, kND, kDN})
    for (int l : {0, 3, 12})
      for (const CavityGeometry g : {CavityGeometry{1, 1.1}, CavityGeometry{1, 2},
                                     CavityGeometry{1, 10}}) {
        const auto f = solve_frequencies(c, l, 6, g);
        const double top = 0.5 * (f[5].omega + solve_frequency(c, l, 7, g).omega);
        const int n = count_sign_changes(c, l, 1e-6 / g.width(), top, pi / (32 * g.width()), g);
        CHECK(n == 6);
      }
}

TEST_CASE("first mixed roots sit below the DD root") {
  const CavityGeometry g{1, 2};
  const double dd = solve_frequency(kDD, 0, 1, g).omega;
  CHECK(solve_frequency(kND, 0, 1, g).omega < dd);
  CHECK(solve_frequency(kDN, 0, 1, g).omega < dd);
}
