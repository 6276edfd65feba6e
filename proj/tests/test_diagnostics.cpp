#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "support.hpp"
#include "swflow/diagnostics.hpp"

using namespace swflow;
using namespace swflow::diagnostics;
using testing_support::max_abs;
using testing_support::random_form;
using testing_support::random_spinor;

namespace {

FlowHistory run(const LatticePtr& lat, const InitialDataSpec& spec, double S, int steps, int every,
                double cfl = 0.1) {
  const auto params = make_params(S, lat, 2);
  auto [phi, a] = make_initial(spec, lat, 2);
  IntegratorConfig cfg;
  cfg.cfl = cfl;
  cfg.t_end = steps * cfl_dt(*lat, cfl);
  cfg.snapshot_every = every;
  return evolve(FlowState{0.0, std::move(phi), std::move(a)}, params, cfg);
}

InitialDataSpec random_spec(std::uint64_t seed, double amp) {
  InitialDataSpec s;
  s.seed = seed;
  s.amplitude = amp;
  return s;
}

FlowHistory gauge_history(const FlowHistory& h, const SiteScalarField& chi) {
  FlowHistory out = h;
  for (auto& s : out.snapshots) {
    auto [p, a] = gauge_transform(s.phi, s.a, chi);
    s.phi = std::move(p);
    s.a = std::move(a);
  }
  return out;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("cutoff") {
  CHECK(cutoff_value(0.0, 2.0) == 1.0);
  CHECK(cutoff_value(0.5, 2.0) == 1.0);
  CHECK(cutoff_value(1.0, 2.0) == 0.0);
  CHECK(cutoff_value(3.0, 2.0) == 0.0);
  CHECK(cutoff_value(0.75, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = cutoff_value(i * 1e-3, 1.0);
    CHECK(v <= prev);
    prev = v;
  }
  // C^1 at both ends of the transition
  const double e = 1e-7;
  CHECK(std::abs(cutoff_value(0.25 + e, 1.0) - 1.0) <= 1e-12);
  CHECK(cutoff_value(0.5 - e, 1.0) <= 1e-12);
}

TEST_CASE("heat kernel") {
  const std::vector<double> zero(4, 0.0);
  CHECK(heat_kernel(zero, 0.3, 4) == doctest::Approx(std::pow(4 * std::numbers::pi * 0.3, -2.0)).epsilon(1e-15));
  const std::vector<double> v{0.1, -0.2, 0.3, 0.05};
  const std::vector<double> w{-0.1, 0.2, -0.3, -0.05};
  CHECK(heat_kernel(v, 0.1, 4) == heat_kernel(w, 0.1, 4));
  CHECK(heat_kernel(v, 0.1, 4) > 0.0);
  CHECK_THROWS_AS(heat_kernel(v, 0.0, 4), DomainError);
  CHECK_THROWS_AS(heat_kernel(v, -1.0, 4), DomainError);

  // lattice mass of G cut^2 at tau = (L/16)^2, m = 4, n = 16
  const auto lat = build_lattice(4, 16, 1.0);
  const Point x0(4, 0.5);
  const double tau = std::pow(1.0 / 16, 2);
  double mass = 0.0;
  for (std::size_t s = 0; s < lat->site_count(); ++s) {
    const auto y = nearest_image(*lat, lat->position(s), x0);
    const double c = cutoff_value(std::sqrt(oracle::norm2(y)), 1.0);
    mass += heat_kernel(y, tau, 4) * c * c;
  }
  mass *= lat->cell_volume();
  CHECK(mass > 0.9);
  CHECK(mass <= 1.0);
}

TEST_CASE("energy report on a stationary zero configuration") {
  const auto lat = build_lattice(4, 4, 1.0);
  InitialDataSpec zero;
  zero.kind = InitialKind::constant;
  zero.amplitude = 0.0;
  const auto h = run(lat, zero, 0.0, 5, 1);
  const auto rows = energy_report(h);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.sw == 0.0);
    CHECK_FALSE(r.increase);
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(*rows[i].identity_residual <= 1e-12);
  CHECK_FALSE(rows.back().identity_residual.has_value());
  FlowHistory one = h;
  one.snapshots.resize(1);
  one.steps.resize(1);
  CHECK_THROWS_AS(energy_report(one), PreconditionError);
  CHECK(energy_records(one).size() == 1);
}

TEST_CASE("energy identity residual is second order in the step") {
  const auto lat = build_lattice(4, 6, 1.0);
  const auto spec = random_spec(3, 0.5);
  const auto coarse = energy_report(run(lat, spec, 0.0, 10, 1, 0.1));
  const auto fine = energy_report(run(lat, spec, 0.0, 20, 1, 0.05));
  double rc = 0.0, rf = 0.0;
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
    rc = std::max(rc, *coarse[i].identity_residual);
    CHECK_FALSE(coarse[i].increase);
  }
  for (std::size_t i = 0; i + 1 < fine.size(); ++i) rf = std::max(rf, *fine[i].identity_residual);
  CHECK(rc / rf >= 3.5);
}

TEST_CASE("maximum principle") {
  const auto lat = build_lattice(4, 4, 8.0);
  InitialDataSpec spec;
  spec.kind = InitialKind::constant;
  spec.amplitude = 0.5;
  const auto h = run(lat, spec, -1.0, 400, 10, 0.1);
  CHECK(h.snapshots.back().t == doctest::Approx(20.0));
  const auto mp = max_principle_check(h);
  CHECK(mp.pass);
  CHECK(mp.bound == doctest::Approx(1.0 + 1e-9).epsilon(1e-15));
  double worst = 0.0;
  for (const auto& s : h.snapshots) {
    const double y = 1.0 / (1.0 + (1.0 / 0.25 - 1.0) * std::exp(-s.t / 2.0));
    worst = std::max(worst, std::abs(s.phi.norm2_at(0) - y));
  }
  CHECK(worst <= 1e-6);

  const auto hr = run(build_lattice(4, 6, 1.0), random_spec(2, 0.6), 0.0, 100, 10);
  const auto mr = max_principle_check(hr);
  CHECK(mr.pass);
  CHECK(mr.margin >= 0.0);
  CHECK(mr.bound == doctest::Approx(norms(hr.snapshots[0].phi).sup * (1 + 1e-9)).epsilon(1e-15));

  InitialDataSpec zero = spec;
  zero.amplitude = 0.0;
  for (const auto& s : run(lat, zero, -1.0, 20, 5).snapshots) CHECK(norms(s.phi).sup == 0.0);

  FlowHistory bad = hr;
  for (auto& z : bad.snapshots.back().phi.values()) z *= 1e3;
  CHECK_FALSE(max_principle_check(bad).pass);
}

TEST_CASE("local energies") {
  const auto lat = build_lattice(4, 6, 1.0);
  const auto params = make_params(0.2, lat, 2);
  const Point x0{0.5, 0.1, 0.9, 0.33};
  CHECK(local_energy(SpinorField(lat, 2), LinkField(lat), x0, 0.3, LocalEnergyMode::detector, params) == 0.0);
  const auto phi = random_spinor(lat, 2, 5);
  const auto a = random_form<1>(lat, 6);
  for (double R : {0.1, 0.3, 0.5}) {
    CAPTURE(R);
    CHECK(oracle::rel(local_energy(phi, a, x0, R, LocalEnergyMode::detector, params),
                      oracle::local_energy(phi, a, 0.2, x0, R, true)) <= 1e-12);
    CHECK(oracle::rel(local_energy(phi, a, x0, R, LocalEnergyMode::sw, params),
                      oracle::local_energy(phi, a, 0.2, x0, R, false)) <= 1e-12);
  }
  LinkField a2 = a;
  for (auto& v : a2.values()) v *= 2.0;
  const SpinorField none(lat, 2);
  CHECK(local_energy(none, a2, x0, 0.4, LocalEnergyMode::detector, params) ==
        doctest::Approx(4.0 * local_energy(none, a, x0, 0.4, LocalEnergyMode::detector, params)).epsilon(1e-14));
  CHECK_THROWS_AS(local_energy(phi, a, x0, 0.0, LocalEnergyMode::sw, params), DomainError);
  CHECK_THROWS_AS(local_energy(phi, a, x0, 0.6, LocalEnergyMode::sw, params), DomainError);
}

TEST_CASE("detector flags concentrated data only") {
  const auto lat = build_lattice(5, 8, 1.0);
  const auto params = make_params(0.0, lat, 4);
  const auto config = default_detector_config(*lat);
  CHECK(config.delta == 0.05);
  CHECK(config.radii == std::vector<double>{0.25, 0.125, 0.0625});

  InitialDataSpec smooth = random_spec(1, 0.01);
  auto [sp, sa] = make_initial(smooth, lat, 4);
  CHECK(detect_singular_set(FlowState{0.0, sp, sa}, config, params).flagged.empty());

  InitialDataSpec bubble;
  bubble.kind = InitialKind::bubble;
  bubble.amplitude = 1.1;
  auto [bp, ba] = make_initial(bubble, lat, 4);
  const FlowState snap{0.0, bp, ba};
  const auto scan = detect_singular_set(snap, config, params);
  REQUIRE_FALSE(scan.flagged.empty());
  const Point centre(5, 0.5);
  CHECK(scan.flagged == std::vector<std::size_t>{lat->nearest_site(centre)});

  auto huge = config;
  huge.delta = 1e9;
  CHECK(detect_singular_set(snap, huge, params).flagged.empty());

  // antitone in delta, intersection over radii
  std::size_t prev = lat->site_count() + 1;
  for (double d : {1e-4, 1e-3, 1e-2, 0.05, 0.2}) {
    auto c = config;
    c.delta = d;
    c.radii = {0.25, 0.125};
    const auto f = detect_singular_set(snap, c, params).flagged;
    CHECK(f.size() <= prev);
    prev = f.size();
    auto c2 = c;
    c2.radii.push_back(0.0625);
    const auto f2 = detect_singular_set(snap, c2, params).flagged;
    CHECK(std::includes(f.begin(), f.end(), f2.begin(), f2.end()));
  }

  // energies agree with the local energy at every radius
  const std::size_t probe = lat->nearest_site(centre);
  for (std::size_t r = 0; r < config.radii.size(); ++r) {
    const auto pos = lat->position(probe);
    CHECK(oracle::rel(scan.energies[probe * 3 + r],
                      local_energy(bp, ba, pos, config.radii[r], LocalEnergyMode::detector, params)) <= 1e-12);
  }

  auto bad = config;
  bad.radii = {0.3};
  CHECK_THROWS_AS(detect_singular_set(snap, bad, params), DomainError);
  bad.radii.clear();
  CHECK_THROWS_AS(detect_singular_set(snap, bad, params), DomainError);
}

TEST_CASE("Vitali selection") {
  const auto lat = build_lattice(4, 10, 1.0);
  const double R = 0.1;
  const std::vector<std::size_t> one{123};
  const auto r1 = vitali_cover(*lat, one, R);
  CHECK(r1.centers == one);
  CHECK(r1.hausdorff_sum == doctest::Approx(1.0));

  const int a[] = {0, 0, 0, 0};
  const int b[] = {3, 0, 0, 0};
  const std::vector<std::size_t> two{lat->index(a), lat->index(b)};
  CHECK(vitali_cover(*lat, two, R).centers.size() == 2);

  const int c[] = {0, 1, 0, 0};
  const int d[] = {1, 0, 0, 0};
  const std::vector<std::size_t> cluster{lat->index(a), lat->index(c), lat->index(d)};
  const auto rc = vitali_cover(*lat, cluster, R);
  CHECK(rc.centers.size() == 1);
  for (std::size_t s : cluster) CHECK(torus_distance(*lat, lat->position(s), lat->position(rc.centers[0])) <= 5 * R);

  const auto m5 = build_lattice(5, 6, 1.0);
  CHECK(vitali_cover(*m5, std::vector<std::size_t>{7}, 0.2).hausdorff_sum == doctest::Approx(1.0));
  CHECK(covering_reference_bound(5, 2.0, 0.05) == doctest::Approx(std::pow(5.0, 5) * 40.0));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> flagged;
    for (std::size_t s = 0; s < lat->site_count(); ++s)
      if (rng() % 97 == 0) flagged.push_back(s);
    const double radius = 0.05 + 0.01 * trial;
    const auto rep = vitali_cover(*lat, flagged, radius);
    for (std::size_t i = 0; i < rep.centers.size(); ++i)
      for (std::size_t j = i + 1; j < rep.centers.size(); ++j)
        CHECK(torus_distance(*lat, lat->position(rep.centers[i]), lat->position(rep.centers[j])) > 2 * radius);
    for (std::size_t s : flagged) {
      bool covered = false;
      for (std::size_t cidx : rep.centers)
        covered = covered || torus_distance(*lat, lat->position(s), lat->position(cidx)) <= 5 * radius;
      CHECK(covered);
    }
    CHECK(rep.hausdorff_sum == doctest::Approx(static_cast<double>(rep.centers.size())));
  }
  CHECK_THROWS_AS(vitali_cover(*lat, one, 0.0), DomainError);
}

TEST_CASE("monotonicity quantities against the quadrature oracle") {
  const auto lat = build_lattice(4, 6, 1.0);
  const auto h = run(lat, random_spec(4, 0.6), 0.5, 40, 2);
  const double dt = cfl_dt(*lat, 0.1);
  const double R = std::sqrt(10 * dt);
  const double t0 = 40 * dt;  // slab = [0, 30 dt]
  const Point x0{0.5, 0.5, 0.25, 0.0};
  const auto q = monotonicity_quantities(h, Probe{x0, t0, R});
  const auto [phi_o, f_o] = oracle::phi_and_f(h, x0, t0, R);
  CHECK(q.Phi > 0.0);
  CHECK(q.F > 0.0);
  CHECK(oracle::rel(q.Phi, phi_o) <= 1e-12);
  CHECK(oracle::rel(q.F, f_o) <= 1e-12);

  // gauge invariance
  const auto chi = random_form<0>(lat, 77, std::numbers::pi);
  const auto gq = monotonicity_quantities(gauge_history(h, chi), Probe{x0, t0, R});
  CHECK(oracle::rel(q.Phi, gq.Phi) <= 1e-12);
  CHECK(oracle::rel(q.F, gq.F) <= 1e-12);

  // a slab whose ends fall between snapshots uses the piecewise-linear interpolant
  const double t1 = 41.3 * dt;
  const auto mid = monotonicity_quantities(h, Probe{x0, t1, R});
  CHECK(std::isfinite(mid.Phi));
  CHECK(mid.Phi > 0.0);

  CHECK_THROWS_AS(monotonicity_quantities(h, Probe{x0, t0, std::sqrt(t0) / 2 * 1.01}), PreconditionError);
  CHECK_THROWS_AS(monotonicity_quantities(h, Probe{x0, 80 * dt, R}), PreconditionError);
  CHECK_THROWS_AS(monotonicity_quantities(h, Probe{x0, t0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(monotonicity_quantities(h, Probe{{0.5, 0.5}, t0, R}), PreconditionError);
  // fewer than three snapshots inside the slab
  CHECK_THROWS_AS(monotonicity_quantities(h, Probe{x0, 10 * dt, std::sqrt(dt)}), PreconditionError);
}

TEST_CASE("monotonicity quantities vanish at critical points") {
  const auto lat = build_lattice(4, 6, 1.0);
  InitialDataSpec zero;
  zero.kind = InitialKind::constant;
  zero.amplitude = 0.0;
  const auto h = run(lat, zero, 0.0, 20, 2);
  const double dt = cfl_dt(*lat, 0.1);
  const Point x0(4, 0.5);
  const auto q = monotonicity_quantities(h, Probe{x0, 20 * dt, std::sqrt(5 * dt)});
  CHECK(q.Phi == 0.0);
  CHECK(q.F == 0.0);

  // phi = 0 and a pure gauge: F vanishes, Phi too
  FlowHistory flat = h;
  LinkField pure = d_site_to_link(random_form<0>(lat, 3));
  for (auto& v : pure.values()) v *= 2.0;
  for (auto& s : flat.snapshots) s.a = pure;
  const auto qf = monotonicity_quantities(flat, Probe{x0, 20 * dt, std::sqrt(5 * dt)});
  CHECK(std::abs(qf.F) <= 1e-12);
  CHECK(std::abs(qf.Phi) <= 1e-12);
}

TEST_CASE("monotonicity scan") {
  const auto lat = build_lattice(4, 6, 1.0);
  const double dt = cfl_dt(*lat, 0.1);
  InitialDataSpec zero;
  zero.kind = InitialKind::constant;
  zero.amplitude = 0.0;
  const Point x0(4, 0.5);
  const auto hz = run(lat, zero, 0.0, 40, 1);
  const auto tz = monotonicity_scan(hz, x0, 40 * dt, {std::sqrt(8 * dt), std::sqrt(4 * dt), std::sqrt(6 * dt)});
  REQUIRE(tz.rows.size() == 3);
  CHECK(tz.rows[0].R < tz.rows[1].R);
  CHECK(tz.rows[1].R < tz.rows[2].R);
  for (const auto& r : tz.rows) CHECK(r.Phi == 0.0);
  CHECK(tz.attainable);
  CHECK(tz.fitted_a == 0.0);
  CHECK(tz.fitted_c == 0.0);

  const auto h = run(lat, random_spec(6, 0.6), 0.0, 40, 1);
  const auto t = monotonicity_scan(h, x0, 40 * dt, {std::sqrt(4 * dt), std::sqrt(6 * dt), std::sqrt(8 * dt)});
  CHECK(t.attainable);
  CHECK(std::isfinite(t.fitted_a));
  CHECK(std::isfinite(t.fitted_c));
  CHECK(t.fitted_a >= 0.0);
  CHECK(t.fitted_c >= 0.0);
  for (const auto& r : t.rows) CHECK(r.Phi >= 0.0);
  // the fitted expression is non-decreasing
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    const auto& lo = t.rows[i];
    const auto& hi = t.rows[i + 1];
    const double vlo = std::exp(t.fitted_a * lo.R) * lo.Phi + t.fitted_c * lo.R * lo.R * t.sw0;
    const double vhi = std::exp(t.fitted_a * hi.R) * hi.Phi + t.fitted_c * hi.R * hi.R * t.sw0;
    CHECK(vhi >= vlo * (1 - 1e-12));
  }
  CHECK(monotonicity_a_grid().size() == 26);
  CHECK(monotonicity_a_grid().back() == doctest::Approx(0.01 * (1 << 24)));
  CHECK_THROWS_AS(monotonicity_scan(h, x0, 40 * dt, {std::sqrt(40 * dt)}), PreconditionError);
}

TEST_CASE("blow-up rescaling is exact at the samples") {
  const auto lat = build_lattice(4, 8, 1.0);
  const auto h = run(lat, random_spec(8, 0.7), 0.0, 4, 2);
  const auto& snap = h.snapshots[1];
  const std::size_t xn = 77;
  const auto r = rescale_blowup(h, xn, snap.t, 2);
  const double Rn = 2 * lat->spacing();
  CHECK(r.scale == Rn);
  CHECK(r.lattice->spacing() == 0.5);
  CHECK(r.lattice->extent() == 8);
  const auto f = curvature(snap.a);
  const auto fr = curvature(r.a);
  const auto D = covariant_diff(snap.phi, snap.a);
  const auto Dr = covariant_diff(r.phi, r.a);
  const auto base = lat->coords(xn);
  double ef = 0.0, ed = 0.0, ep = 0.0;
  for (std::size_t j = 0; j < lat->site_count(); ++j) {
    auto c = r.lattice->coords(j);
    for (int k = 0; k < 4; ++k) c[static_cast<std::size_t>(k)] += base[static_cast<std::size_t>(k)];
    const std::size_t x = lat->index(c);
    double f2 = 0.0, fr2 = 0.0;
    for (int p = 0; p < 6; ++p) {
      f2 += f(x, p) * f(x, p);
      fr2 += fr(j, p) * fr(j, p);
    }
    ef = std::max(ef, std::abs(fr2 - std::pow(Rn, 4) * f2) / std::max(1.0, fr2));
    double d2 = 0.0, dr2 = 0.0;
    for (int k = 0; k < 4; ++k)
      for (int s = 0; s < 2; ++s) {
        d2 += std::norm(D(x, k, s));
        dr2 += std::norm(Dr(j, k, s));
      }
    ed = std::max(ed, std::abs(dr2 - Rn * Rn * d2) / std::max(1.0, dr2));
    ep = std::max(ep, std::abs(std::sqrt(r.phi.norm2_at(j)) - std::sqrt(snap.phi.norm2_at(x))));
  }
  CHECK(ef <= 1e-12);
  CHECK(ed <= 1e-12);
  CHECK(ep == 0.0);
  CHECK(Rn * norms(r.phi).sup == Rn * norms(snap.phi).sup);

  CHECK_THROWS_AS(rescale_blowup(h, xn, snap.t, 3), DomainError);
  CHECK_THROWS_AS(rescale_blowup(h, xn, snap.t, 1), DomainError);
  CHECK_THROWS_AS(rescale_blowup(h, xn, snap.t + 1e-3, 2), DomainError);
}

TEST_CASE("curvature profile") {
  const auto lat = build_lattice(4, 16, 1.0);
  const Point x0(4, 0.5);
  const std::vector<double> radii{0.1875, 0.375};
  for (const auto& row : curvature_profile(PlaquetteField(lat), x0, radii)) CHECK(row.value == 0.0);

  // constant synthetic curvature: value(2r)/value(r) = 4 up to ball discretisation
  PlaquetteField c(lat, 0.3);
  const auto rows = curvature_profile(c, x0, radii);
  const double ratio = rows[1].value / rows[0].value;
  const auto g = oracle::grid_of(*lat);
  const double counted = 4.0 * static_cast<double>(oracle::ball_count(g, 0.375)) /
                         (16.0 * static_cast<double>(oracle::ball_count(g, 0.1875)));
  CHECK(ratio == doctest::Approx(counted).epsilon(1e-12));
  CHECK(std::abs(ratio - 4.0) <= 0.4);

  const auto f = random_form<2>(lat, 3);
  for (const auto& row : curvature_profile(f, x0, std::vector<double>{0.1, 0.2, 0.5}))
    CHECK(oracle::rel(row.value, oracle::profile(f, x0, row.r)) <= 1e-12);
  CHECK_THROWS_AS(curvature_profile(f, x0, std::vector<double>{0.6}), DomainError);

  const auto small = build_lattice(4, 6, 1.0);
  const auto phi = random_spinor(small, 2, 1);
  const auto a = random_form<1>(small, 2);
  const auto p = curvature_scaling_profile(phi, a, x0, std::vector<double>{0.3}, make_params(0.0, small, 2));
  CHECK(oracle::rel(p[0].value, oracle::profile(curvature(a), x0, 0.3)) <= 1e-12);
}

}
