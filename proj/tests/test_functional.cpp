#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "support.hpp"
#include "swflow/functional.hpp"

using namespace swflow;
using testing_support::max_abs;
using testing_support::max_abs_diff;
using testing_support::random_form;
using testing_support::random_spinor;

TEST_SUITE("functional") {

TEST_CASE("energy density closed forms") {
  const auto lat = build_lattice(4, 4, 1.5);
  const auto p0 = make_params(0.0, lat, 2);
  CHECK(max_abs(energy_density(SpinorField(lat, 2), LinkField(lat), p0).values()) == 0.0);
  CHECK(sw_functional(SpinorField(lat, 2), LinkField(lat), p0) == 0.0);

  SpinorField c(lat, 2);
  for (std::size_t x = 0; x < lat->site_count(); ++x) c(x, 1) = Complex(0.0, std::sqrt(3.0));
  const auto e = energy_density(c, LinkField(lat), p0);
  for (std::size_t x = 0; x < lat->site_count(); ++x) CHECK(e[x] == doctest::Approx(9.0 / 8.0).epsilon(1e-15));
  CHECK(sw_functional(c, LinkField(lat), p0) == doctest::Approx(std::pow(1.5, 4) * 9.0 / 8.0).epsilon(1e-14));

  SpinorField one(lat, 2);
  for (std::size_t x = 0; x < lat->site_count(); ++x) one(x, 0) = 1.0;
  const auto em = energy_density(one, LinkField(lat), make_params(-1.0, lat, 2));
  for (std::size_t x = 0; x < lat->site_count(); ++x) CHECK(em[x] == doctest::Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("functional agrees with the direct summation oracle") {
  const auto lat = build_lattice(4, 6, 2.0);
  InitialDataSpec spec;
  spec.kind = InitialKind::maxwell_mode;
  spec.amplitude = 0.8;
  const auto [phi, a] = make_initial(spec, lat, 2);
  const auto params = make_params(0.0, lat, 2);
  const double sw = sw_functional(phi, a, params);
  CHECK(oracle::rel(sw, 0.5 * std::pow(norms(curvature(a)).l2, 2)) <= 1e-12);
  CHECK(oracle::rel(sw, oracle::sw(phi, a, 0.0)) <= 1e-12);

  const auto rphi = random_spinor(lat, 2, 31);
  const auto ra = random_form<1>(lat, 32);
  const auto p = make_params(-0.4, lat, 2);
  CHECK(oracle::rel(sw_functional(rphi, ra, p), oracle::sw(rphi, ra, -0.4)) <= 1e-12);
  const auto e = energy_density(rphi, ra, p);
  double err = 0.0;
  for (std::size_t x = 0; x < lat->site_count(); ++x) err = std::max(err, std::abs(e[x] - oracle::density(rphi, ra, -0.4, x)));
  CHECK(err <= 1e-12 * max_abs(e.values()));
}

TEST_CASE("flow velocity closed forms") {
  const auto lat = build_lattice(4, 4, 1.0);
  const auto params = make_params(0.0, lat, 2);
  SpinorField c(lat, 2);
  for (std::size_t x = 0; x < lat->site_count(); ++x) c(x, 0) = 2.0;
  const auto v = flow_rhs(c, LinkField(lat), params);
  for (std::size_t x = 0; x < lat->site_count(); ++x) {
    CHECK(v.psi(x, 0) == Complex(-2.0, 0.0));
    CHECK(v.psi(x, 1) == Complex(0.0, 0.0));
  }
  CHECK(max_abs(v.b.values()) == 0.0);

  LinkField pure = d_site_to_link(random_form<0>(lat, 3));
  for (auto& x : pure.values()) x *= 2.0;
  const auto w = flow_rhs(SpinorField(lat, 2), pure, params);
  CHECK(norms(w.psi).sup == 0.0);
  CHECK(max_abs(w.b.values()) <= 1e-11);
}

TEST_CASE("critical configurations are stationary") {
  const auto lat = build_lattice(4, 5, 1.0);
  const auto params = make_params(-1.0, lat, 2);
  SpinorField one(lat, 2);
  for (std::size_t x = 0; x < lat->site_count(); ++x) one(x, 1) = std::polar(1.0, 0.3);
  const auto v = flow_rhs(one, LinkField(lat), params);
  // roundoff of the stencil, amplified by 2m / h^2
  CHECK(norms(v.psi).sup <= 1e-13);
  CHECK(max_abs(v.b.values()) <= 1e-13);
}

TEST_CASE("flow velocity agrees with the explicit stencil oracle") {
  const auto lat = build_lattice(4, 5, 1.7);
  const auto phi = random_spinor(lat, 2, 41);
  const auto a = random_form<1>(lat, 42, 2.0);
  const auto v = flow_rhs(phi, a, make_params(0.6, lat, 2));
  const auto o = oracle::rhs(phi, a, 0.6);
  CHECK(max_abs_diff(v.psi.values(), o.psi) <= 1e-12 * norms(v.psi).sup);
  CHECK(max_abs_diff(v.b.values(), o.b) <= 1e-12 * max_abs(v.b.values()));
}

TEST_CASE("variational pairing: finite differences") {
  const auto lat = build_lattice(4, 6, 1.0);
  InitialDataSpec spec;
  spec.seed = 5;
  spec.amplitude = 0.7;
  const auto [phi, a] = make_initial(spec, lat, 2);
  const auto params = make_params(0.3, lat, 2);
  const auto rep = gradient_check(phi, a, params, 1e-4, 17);
  CHECK(rep.samples == 20);
  CHECK(rep.max_rel_err <= 1e-6);

  const auto zero = gradient_check(SpinorField(lat, 2), LinkField(lat), params, 1e-4, 1);
  CHECK(zero.max_abs_err <= 1e-12);

  // O(step^2): halving the step divides the truncation error by about four
  const auto coarse = gradient_check(phi, a, params, 2e-2, 17);
  const auto fine = gradient_check(phi, a, params, 1e-2, 17);
  const double ratio = coarse.max_abs_err / fine.max_abs_err;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
  CHECK_THROWS_AS(gradient_check(phi, a, params, 0.0, 1), DomainError);
}

TEST_CASE("gauge behaviour of the functional and the velocity") {
  const auto lat = build_lattice(4, 5, 1.2);
  const auto phi = random_spinor(lat, 2, 51);
  const auto a = random_form<1>(lat, 52);
  const auto chi = random_form<0>(lat, 53, std::numbers::pi);
  const auto params = make_params(0.25, lat, 2);
  const auto [gphi, ga] = gauge_transform(phi, a, chi);
  CHECK(oracle::rel(sw_functional(phi, a, params), sw_functional(gphi, ga, params)) <= 1e-12);
  const auto v = flow_rhs(phi, a, params);
  const auto gv = flow_rhs(gphi, ga, params);
  double psi_err = 0.0;
  for (std::size_t x = 0; x < lat->site_count(); ++x)
    for (int c = 0; c < 2; ++c) psi_err = std::max(psi_err, std::abs(gv.psi(x, c) - std::polar(1.0, -chi[x]) * v.psi(x, c)));
  CHECK(psi_err <= 1e-12 * norms(v.psi).sup);
  CHECK(max_abs_diff(gv.b.values(), v.b.values()) <= 1e-12 * max_abs(v.b.values()));
}

TEST_CASE("non-negative density for S >= 0") {
  const auto lat = build_lattice(4, 5, 1.0);
  const auto e = energy_density(random_spinor(lat, 2, 61), random_form<1>(lat, 62), make_params(0.5, lat, 2));
  for (double v : e.values()) CHECK(v >= 0.0);
}

TEST_CASE("parameter validation") {
  const auto lat = build_lattice(4, 4, 1.0);
  CHECK_THROWS_AS(make_params(std::nan(""), lat, 2), ConfigError);
  CHECK_THROWS_AS(make_params(0.0, lat, 0), ConfigError);
  CHECK_THROWS_AS(flow_rhs(SpinorField(lat, 2), LinkField(build_lattice(4, 5, 1.0)), make_params(0.0, lat, 2)),
                  ShapeError);
  CHECK_THROWS_AS(sw_functional(SpinorField(lat, 3), LinkField(lat), make_params(0.0, lat, 2)), ShapeError);
}

}
