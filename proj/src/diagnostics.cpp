#include "swflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "swflow/parallel.hpp"

namespace swflow::diagnostics {

namespace {

constexpr double kBallSlack = 1e-12;

bool in_ball(double dist2, double R) { return dist2 <= R * R * (1.0 + kBallSlack); }

// Nearest-image offsets of every site from x0, row-major (site, axis).
std::vector<double> site_offsets(const Lattice& lat, std::span<const double> x0) {
  const int m = lat.dim();
  std::vector<double> out(lat.site_count() * static_cast<std::size_t>(m));
  parallel_for(lat.site_count(), [&](std::size_t x) {
    const Point y = nearest_image(lat, lat.position(x), x0);
    std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(x * static_cast<std::size_t>(m)));
  });
  return out;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void check_point(const Lattice& lat, std::span<const double> x0, const char* op) {
  if (static_cast<int>(x0.size()) != lat.dim()) {
    throw DomainError(std::string(op) + ": point must have m coordinates");
  }
}

// |D phi|^2 + |f|^2 at one site.
double detector_density(const SpinorField& phi, const ConnectionField& a, std::size_t x) {
  const Lattice& lat = phi.lattice();
  const int m = lat.dim();
  const int N = phi.fiber();
  const double h = lat.spacing();
  const double inv_h = 1.0 / h;
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    const Complex u = link_phase(h, a(x, k));
    const std::size_t xf = lat.forward(x, k);
    for (int c = 0; c < N; ++c) s += std::norm((u * phi(xf, c) - phi(x, c)) * inv_h);
  }
  for (int p = 0; p < lat.pair_count(); ++p) {
    const auto [j, k] = lat.pair(p);
    const double f = ((a(lat.forward(x, j), k) - a(x, k)) - (a(lat.forward(x, k), j) - a(x, j))) * inv_h;
    s += f * f;
  }
  return s;
}

}  // namespace

double cutoff_value(double r, double L) {
  const double inner = 0.25 * L;
  if (r <= inner) return 1.0;
  if (r >= 0.5 * L) return 0.0;
  const double u = (r - inner) / inner;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double heat_kernel(std::span<const double> offset, double tau, int m) {
  if (!(tau > 0.0)) throw DomainError("heat_kernel: tau must be positive");
  return std::pow(4.0 * std::numbers::pi * tau, -0.5 * m) * std::exp(-squared_norm(offset) / (4.0 * tau));
}

// ---------------------------------------------------------------- energy

std::vector<EnergyRecord> energy_records(const FlowHistory& history) {
  const ModelParams& params = history.params;
  std::vector<EnergyRecord> out;
  out.reserve(history.snapshots.size());
  for (std::size_t i = 0; i < history.snapshots.size(); ++i) {
    const FlowState& s = history.snapshots[i];
    EnergyRecord r;
    r.step = i < history.steps.size() ? history.steps[i] : i;
    r.t = s.t;
    r.sw = sw_functional(s.phi, s.a, params);
    r.sup_phi = norms(s.phi).sup;
    r.dissipation = dissipation(flow_rhs(s.phi, s.a, params));
    out.push_back(r);
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    const double dt = out[i + 1].t - out[i].t;
    const double rate = (out[i + 1].sw - out[i].sw) / dt;
    out[i].dsw_dt = rate;
    out[i].identity_residual = std::abs(rate + 0.5 * (out[i].dissipation + out[i + 1].dissipation));
    out[i].increase = out[i + 1].sw > out[i].sw + 1e-10 * std::max(1.0, std::abs(out[i].sw));
  }
  return out;
}

std::vector<EnergyRecord> energy_report(const FlowHistory& history) {
  if (history.snapshots.size() < 2) throw PreconditionError("energy_report: needs at least two snapshots");
  return energy_records(history);
}

MaxPrincipleResult max_principle_check(const FlowHistory& history) {
  if (history.snapshots.empty()) throw PreconditionError("max_principle_check: empty history");
  MaxPrincipleResult r;
  for (const auto& s : history.snapshots) r.sup_per_snapshot.push_back(norms(s.phi).sup);
  const double sup0 = r.sup_per_snapshot.front();
  r.bound = std::max(sup0, std::sqrt(std::abs(history.params.S))) * (1.0 + 1e-9);
  r.max_sup = *std::max_element(r.sup_per_snapshot.begin(), r.sup_per_snapshot.end());
  r.margin = r.bound - r.max_sup;
  r.pass = r.max_sup <= r.bound;
  return r;
}

// ------------------------------------------------------- local energies

double local_energy(const SpinorField& phi, const ConnectionField& a, std::span<const double> x0, double R,
                    LocalEnergyMode mode, const ModelParams& params) {
  require_same_lattice(phi.lattice(), a.lattice(), "local_energy");
  const Lattice& lat = phi.lattice();
  check_point(lat, x0, "local_energy");
  if (!(R > 0.0) || R > lat.injectivity_radius()) throw DomainError("local_energy: R must lie in (0, L/2]");
  const std::vector<double> offsets = site_offsets(lat, x0);
  const auto m = static_cast<std::size_t>(lat.dim());
  auto inside = [&](std::size_t x) {
    return in_ball(squared_norm(std::span<const double>(offsets.data() + x * m, m)), R);
  };
  if (mode == LocalEnergyMode::detector) {
    const double sum = deterministic_sum(lat.site_count(), [&](std::size_t x) {
      return inside(x) ? detector_density(phi, a, x) : 0.0;
    });
    return std::pow(R, 4.0 - lat.dim()) * lat.cell_volume() * sum;
  }
  const SiteScalarField e = energy_density(phi, a, params);
  return lat.cell_volume() *
         deterministic_sum(lat.site_count(), [&](std::size_t x) { return inside(x) ? e[x] : 0.0; });
}

DetectorConfig default_detector_config(const Lattice& lattice) {
  const double L = lattice.length();
  return DetectorConfig{0.05, {L / 4.0, L / 8.0, L / 16.0}, L / 4.0};
}

namespace {

// Integer offsets (in the nearest-image representative range) of a ball.
std::vector<std::vector<int>> ball_offsets(const Lattice& lat, double R) {
  const int m = lat.dim();
  const int n = lat.extent();
  const int lo = -(n / 2);
  const int hi = (n + 1) / 2 - 1;
  const double h = lat.spacing();
  std::vector<std::vector<int>> out;
  std::vector<int> o(static_cast<std::size_t>(m), lo);
  while (true) {
    double d2 = 0.0;
    for (int v : o) d2 += (v * h) * (v * h);
    if (in_ball(d2, R)) out.push_back(o);
    int k = m - 1;
    while (k >= 0 && o[static_cast<std::size_t>(k)] == hi) {
      o[static_cast<std::size_t>(k)] = lo;
      --k;
    }
    if (k < 0) break;
    ++o[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace

DetectorScan detect_singular_set(const FlowState& snapshot, const DetectorConfig& config,
                                 const ModelParams& params) {
  const SpinorField& phi = snapshot.phi;
  const ConnectionField& a = snapshot.a;
  require_same_lattice(phi.lattice(), a.lattice(), "detect_singular_set");
  if (params.lattice) require_same_lattice(*params.lattice, phi.lattice(), "detect_singular_set");
  const Lattice& lat = phi.lattice();
  if (config.radii.empty()) throw DomainError("detect_singular_set: radius grid is empty");
  if (!(config.delta > 0.0)) throw DomainError("detect_singular_set: delta must be positive");
  const double rmax = config.R1 > 0.0 ? std::min(config.R1, lat.injectivity_radius()) : lat.injectivity_radius();
  for (double R : config.radii) {
    if (!(R > 0.0) || R > rmax * (1.0 + kBallSlack)) {
      throw DomainError("detect_singular_set: radii must lie in (0, min(i(M), R1)]");
    }
  }

  const std::size_t S = lat.site_count();
  const int m = lat.dim();
  const int n = lat.extent();
  std::vector<double> density(S);
  parallel_for(S, [&](std::size_t x) { density[x] = detector_density(phi, a, x); });

  DetectorScan scan;
  scan.radii = config.radii;
  const std::size_t nr = config.radii.size();
  scan.energies.assign(S * nr, 0.0);
  for (std::size_t r = 0; r < nr; ++r) {
    const double R = config.radii[r];
    const auto offsets = ball_offsets(lat, R);
    const double weight = std::pow(R, 4.0 - m) * lat.cell_volume();
    parallel_for(S, [&](std::size_t x) {
      int c[kMaxDim];
      int y[kMaxDim];
      lat.coords(x, std::span<int>(c, static_cast<std::size_t>(m)));
      double s = 0.0;
      for (const auto& o : offsets) {
        for (int k = 0; k < m; ++k) {
          int v = c[k] + o[static_cast<std::size_t>(k)];
          if (v < 0) v += n;
          if (v >= n) v -= n;
          y[k] = v;
        }
        s += density[lat.index(std::span<const int>(y, static_cast<std::size_t>(m)))];
      }
      scan.energies[x * nr + r] = weight * s;
    });
  }
  for (std::size_t x = 0; x < S; ++x) {
    bool all = true;
    for (std::size_t r = 0; r < nr && all; ++r) all = scan.energies[x * nr + r] >= config.delta;
    if (all) scan.flagged.push_back(x);
  }
  return scan;
}

DetectorReport vitali_cover(const Lattice& lattice, std::span<const std::size_t> flagged, double R) {
  if (!(R > 0.0)) throw DomainError("vitali_cover: R must be positive");
  DetectorReport rep;
  rep.R = R;
  rep.flagged.assign(flagged.begin(), flagged.end());
  std::vector<Point> centers;
  for (std::size_t s : flagged) {
    const Point x = lattice.position(s);
    bool disjoint = true;
    for (const auto& c : centers) {
      if (torus_distance(lattice, x, c) <= 2.0 * R) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) {
      centers.push_back(x);
      rep.centers.push_back(s);
    }
  }
  rep.hausdorff_sum = static_cast<double>(rep.centers.size()) * std::pow(5.0 * R, lattice.dim() - 4);
  return rep;
}

double covering_reference_bound(int m, double sw0, double delta) {
  if (!(delta > 0.0)) throw DomainError("covering_reference_bound: delta must be positive");
  return std::pow(5.0, m) * sw0 / delta;
}

// ------------------------------------------------------- monotonicity

void validate_probe(const Lattice& lattice, const Probe& probe) {
  if (static_cast<int>(probe.x0.size()) != lattice.dim()) {
    throw PreconditionError("probe: x0 must have m coordinates");
  }
  if (!(probe.t0 > 0.0)) throw PreconditionError("probe: t0 must be positive");
  const double cap = std::min(lattice.injectivity_radius(), 0.5 * std::sqrt(probe.t0));
  if (!(probe.R > 0.0) || probe.R > cap * (1.0 + kBallSlack)) {
    throw PreconditionError("probe: R=" + std::to_string(probe.R) +
                            " violates 0 < R <= min(L/2, sqrt(t0)/2)=" + std::to_string(cap));
  }
}

namespace {

struct SlabIntegrands {
  double phi = 0.0;
  double f = 0.0;
};

SlabIntegrands snapshot_integrands(const FlowState& s, const ModelParams& params, const Probe& probe,
                                   const std::vector<double>& offsets, const std::vector<double>& cut2) {
  const Lattice& lat = s.phi.lattice();
  const int m = lat.dim();
  const int N = s.phi.fiber();
  const double h = lat.spacing();
  const double inv_h = 1.0 / h;
  const double tau = probe.t0 - s.t;
  const double t = -tau;
  const double coef = 1.0 / (2.0 * t);
  const SiteScalarField e = energy_density(s.phi, s.a, params);
  const PlaquetteField f = curvature(s.a);
  const FlowVelocity v = flow_rhs(s.phi, s.a, params);
  const auto mu = static_cast<std::size_t>(m);

  std::vector<double> phi_terms(lat.site_count());
  std::vector<double> f_terms(lat.site_count());
  parallel_for(lat.site_count(), [&](std::size_t x) {
    const std::span<const double> y(offsets.data() + x * mu, mu);
    const double w = cut2[x] * heat_kernel(y, tau, m);
    phi_terms[x] = e[x] * w;
    if (w == 0.0) {
      f_terms[x] = 0.0;
      return;
    }
    double vv = 0.0;
    for (int j = 0; j < m; ++j) {
      double contraction = 0.0;
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        const double Fkj = k < j ? f(x, lat.pair_index(k, j)) : -f(x, lat.pair_index(j, k));
        contraction += y[static_cast<std::size_t>(k)] * Fkj;
      }
      const double comp = v.b(x, j) + coef * contraction;
      vv += comp * comp;
    }
    double ww = 0.0;
    for (int c = 0; c < N; ++c) {
      Complex acc = v.psi(x, c);
      for (int k = 0; k < m; ++k) {
        const Complex Dk = (link_phase(h, s.a(x, k)) * s.phi(lat.forward(x, k), c) - s.phi(x, c)) * inv_h;
        acc += coef * y[static_cast<std::size_t>(k)] * Dk;
      }
      ww += std::norm(acc);
    }
    f_terms[x] = tau * (vv + 2.0 * ww) * w;
  });
  const double hm = lat.cell_volume();
  return {hm * deterministic_sum(phi_terms.size(), [&](std::size_t i) { return phi_terms[i]; }),
          hm * deterministic_sum(f_terms.size(), [&](std::size_t i) { return f_terms[i]; })};
}

}  // namespace

MonotonicityValues monotonicity_quantities(const FlowHistory& history, const Probe& probe) {
  if (history.snapshots.empty()) throw PreconditionError("monotonicity: empty history");
  const Lattice& lat = history.snapshots.front().phi.lattice();
  validate_probe(lat, probe);
  const double t_lo = probe.t0 - 4.0 * probe.R * probe.R;
  const double t_hi = probe.t0 - probe.R * probe.R;
  const double tol = 1e-12 * std::max(1.0, std::abs(probe.t0));
  const auto& snaps = history.snapshots;

  if (snaps.front().t > t_lo + tol || snaps.back().t < t_hi - tol) {
    throw PreconditionError("monotonicity: history does not cover the slab [" + std::to_string(t_lo) + ", " +
                            std::to_string(t_hi) + "]");
  }
  std::size_t inside = 0;
  for (const auto& s : snaps)
    if (s.t >= t_lo - tol && s.t <= t_hi + tol) ++inside;
  if (inside < 3) throw PreconditionError("monotonicity: fewer than 3 snapshots inside the slab");

  std::size_t first = 0;
  for (std::size_t i = 0; i < snaps.size(); ++i)
    if (snaps[i].t <= t_lo + tol) first = i;
  std::size_t last = snaps.size() - 1;
  for (std::size_t i = snaps.size(); i-- > 0;)
    if (snaps[i].t >= t_hi - tol) last = i;
  if (!(snaps[last].t < probe.t0)) {
    throw PreconditionError("monotonicity: the snapshot closing the slab is not earlier than t0");
  }

  const std::vector<double> offsets = site_offsets(lat, probe.x0);
  const auto mu = static_cast<std::size_t>(lat.dim());
  std::vector<double> cut2(lat.site_count());
  for (std::size_t x = 0; x < cut2.size(); ++x) {
    const double c = cutoff_value(std::sqrt(squared_norm(std::span<const double>(offsets.data() + x * mu, mu))),
                                  lat.length());
    cut2[x] = c * c;
  }

  std::vector<double> times;
  std::vector<SlabIntegrands> g;
  for (std::size_t i = first; i <= last; ++i) {
    times.push_back(snaps[i].t);
    g.push_back(snapshot_integrands(snaps[i], history.params, probe, offsets, cut2));
  }

  double int_phi = 0.0;
  double int_f = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = std::max(times[i], t_lo);
    const double b = std::min(times[i + 1], t_hi);
    if (!(b > a)) continue;
    const double span = times[i + 1] - times[i];
    auto lerp = [&](double v0, double v1, double t) { return v0 + (v1 - v0) * (t - times[i]) / span; };
    int_phi += 0.5 * (b - a) * (lerp(g[i].phi, g[i + 1].phi, a) + lerp(g[i].phi, g[i + 1].phi, b));
    int_f += 0.5 * (b - a) * (lerp(g[i].f, g[i + 1].f, a) + lerp(g[i].f, g[i + 1].f, b));
  }
  return {probe.R * probe.R * int_phi, probe.R * int_f};
}

std::vector<double> monotonicity_a_grid() {
  std::vector<double> grid{0.0};
  for (int k = 0; k <= 24; ++k) grid.push_back(0.01 * std::ldexp(1.0, k));
  return grid;
}

MonotonicityTable monotonicity_scan(const FlowHistory& history, const Point& x0, double t0,
                                    std::vector<double> radii) {
  if (history.snapshots.empty()) throw PreconditionError("monotonicity_scan: empty history");
  if (radii.empty()) throw PreconditionError("monotonicity_scan: no radii");
  std::sort(radii.begin(), radii.end());
  const Lattice& lat = history.snapshots.front().phi.lattice();
  for (double R : radii) validate_probe(lat, Probe{x0, t0, R});

  MonotonicityTable table;
  const FlowState& s0 = history.snapshots.front();
  table.sw0 = sw_functional(s0.phi, s0.a, history.params);
  for (double R : radii) {
    const auto q = monotonicity_quantities(history, Probe{x0, t0, R});
    table.rows.push_back({R, q.Phi, q.F});
  }

  double best = std::numeric_limits<double>::infinity();
  for (double a : monotonicity_a_grid()) {
    double c = 0.0;
    bool feasible = true;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const auto& lo = table.rows[i];
      const auto& hi = table.rows[i + 1];
      const double deficit = std::exp(a * lo.R) * lo.Phi - std::exp(a * hi.R) * hi.Phi;
      if (deficit <= 0.0) continue;
      const double gain = table.sw0 * (hi.R * hi.R - lo.R * lo.R);
      if (!(gain > 0.0)) {
        feasible = false;
        break;
      }
      c = std::max(c, deficit / gain);
    }
    if (feasible && a + c < best) {
      best = a + c;
      table.fitted_a = a;
      table.fitted_c = c;
    }
  }
  if (!std::isfinite(best)) {
    table.attainable = false;
    table.fitted_a = std::numeric_limits<double>::quiet_NaN();
    table.fitted_c = std::numeric_limits<double>::quiet_NaN();
  }
  return table;
}

// ---------------------------------------------------------- rescaling

RescaledFields rescale_blowup(const FlowHistory& history, std::size_t x_n, double t_n, int k) {
  if (history.snapshots.empty()) throw DomainError("rescale_blowup: empty history");
  const Lattice& lat = history.snapshots.front().phi.lattice();
  if (k < 2 || lat.extent() % k != 0) {
    throw DomainError("rescale_blowup: ratio k=" + std::to_string(k) + " must be >= 2 and divide n=" +
                      std::to_string(lat.extent()));
  }
  if (x_n >= lat.site_count()) throw DomainError("rescale_blowup: site index out of range");
  const FlowState* snap = nullptr;
  for (const auto& s : history.snapshots) {
    if (std::abs(s.t - t_n) <= 1e-12 * std::max(1.0, std::abs(t_n))) snap = &s;
  }
  if (!snap) throw DomainError("rescale_blowup: t_n=" + std::to_string(t_n) + " is not a snapshot time");

  const int m = lat.dim();
  const int n = lat.extent();
  RescaledFields out;
  out.scale = k * lat.spacing();
  out.origin = x_n;
  out.lattice = build_lattice(m, n, static_cast<double>(n) / k);
  out.phi = SpinorField(out.lattice, snap->phi.fiber());
  out.a = ConnectionField(out.lattice);
  const std::vector<int> base = lat.coords(x_n);
  parallel_for(lat.site_count(), [&](std::size_t j) {
    int c[kMaxDim];
    out.lattice->coords(j, std::span<int>(c, static_cast<std::size_t>(m)));
    for (int i = 0; i < m; ++i) c[i] += base[static_cast<std::size_t>(i)];
    const std::size_t x = lat.index(std::span<const int>(c, static_cast<std::size_t>(m)));
    for (int s = 0; s < out.phi.fiber(); ++s) out.phi(j, s) = snap->phi(x, s);
    for (int d = 0; d < m; ++d) out.a(j, d) = out.scale * snap->a(x, d);
  });
  return out;
}

// ---------------------------------------------------------- profile

std::vector<ProfileRow> curvature_profile(const PlaquetteField& f, std::span<const double> x0,
                                          std::span<const double> r_list) {
  const Lattice& lat = f.lattice();
  check_point(lat, x0, "curvature_profile");
  for (double r : r_list) {
    if (!(r > 0.0) || r > lat.injectivity_radius()) throw DomainError("curvature_profile: r must lie in (0, L/2]");
  }
  const std::vector<double> offsets = site_offsets(lat, x0);
  const auto mu = static_cast<std::size_t>(lat.dim());
  const int P = f.components();
  std::vector<ProfileRow> rows;
  for (double r : r_list) {
    const double sum = deterministic_sum(lat.site_count(), [&](std::size_t x) {
      if (!in_ball(squared_norm(std::span<const double>(offsets.data() + x * mu, mu)), r)) return 0.0;
      double s = 0.0;
      for (int p = 0; p < P; ++p) s += f(x, p) * f(x, p);
      return s;
    });
    rows.push_back({r, std::pow(r, 2.0 - lat.dim()) * lat.cell_volume() * sum});
  }
  return rows;
}

std::vector<ProfileRow> curvature_scaling_profile(const SpinorField& phi, const ConnectionField& a,
                                                  std::span<const double> x0, std::span<const double> r_list,
                                                  const ModelParams& params) {
  require_same_lattice(phi.lattice(), a.lattice(), "curvature_scaling_profile");
  if (params.lattice) require_same_lattice(*params.lattice, a.lattice(), "curvature_scaling_profile");
  return curvature_profile(curvature(a), x0, r_list);
}

}  // namespace swflow::diagnostics
