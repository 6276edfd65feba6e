#include "swflow/functional.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swflow/parallel.hpp"

namespace swflow {

namespace {

void check_shapes(const SpinorField& phi, const ConnectionField& a, const ModelParams& params, const char* op) {
  require_same_lattice(phi.lattice(), a.lattice(), op);
  if (params.lattice) require_same_lattice(*params.lattice, phi.lattice(), op);
  if (params.N != 0 && params.N != phi.fiber()) {
    throw ShapeError(std::string(op) + ": spinor fiber does not match model parameters");
  }
}

void link_phases(const ConnectionField& a, std::vector<Complex>& u) {
  const double h = a.lattice().spacing();
  const auto& va = a.values();
  u.resize(va.size());
  parallel_for(va.size(), [&](std::size_t i) { u[i] = link_phase(h, va[i]); });
}

// Energy density at one site, evaluated directly from the fields.
double site_energy(const SpinorField& phi, const ConnectionField& a, double S, std::size_t x) {
  const Lattice& lat = phi.lattice();
  const int m = lat.dim();
  const int N = phi.fiber();
  const double h = lat.spacing();
  const double inv_h = 1.0 / h;

  double grad = 0.0;
  for (int k = 0; k < m; ++k) {
    const Complex u = link_phase(h, a(x, k));
    const std::size_t xf = lat.forward(x, k);
    for (int c = 0; c < N; ++c) grad += std::norm((u * phi(xf, c) - phi(x, c)) * inv_h);
  }
  double curv = 0.0;
  for (int p = 0; p < lat.pair_count(); ++p) {
    const auto [j, k] = lat.pair(p);
    const double f = ((a(lat.forward(x, j), k) - a(x, k)) - (a(lat.forward(x, k), j) - a(x, j))) * inv_h;
    curv += f * f;
  }
  const double r2 = phi.norm2_at(x);
  return grad + 0.5 * curv + 0.25 * S * r2 + 0.125 * r2 * r2;
}

// One pass over the sites: psi = -D*D phi - (S + |phi|^2) phi / 4 and
// b = -d*f - J, with the dimension fixed at compile time.
template <int M>
void rhs_sweep(const SpinorField& phi, const std::vector<Complex>& u, const LinkField& dstar_f, double S,
               FlowVelocity& v) {
  const Lattice& lat = phi.lattice();
  const int N = phi.fiber();
  const double inv_h = 1.0 / lat.spacing();
  const double inv_h2 = inv_h * inv_h;
  parallel_for(lat.site_count(), [&](std::size_t x) {
    const Complex* px = phi.at(x);
    const Complex* pf[M];
    const Complex* pb[M];
    Complex uf[M], ub[M];
    for (int k = 0; k < M; ++k) {
      const std::size_t xb = lat.backward(x, k);
      pf[k] = phi.at(lat.forward(x, k));
      pb[k] = phi.at(xb);
      uf[k] = u[x * M + static_cast<std::size_t>(k)];
      ub[k] = std::conj(u[xb * M + static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < M; ++k) {
      double overlap = 0.0;
      for (int c = 0; c < N; ++c) overlap += (std::conj(px[c]) * (uf[k] * pf[k][c])).imag();
      v.b(x, k) = -dstar_f(x, k) - overlap * inv_h;
    }
    const double pot = 0.25 * (S + phi.norm2_at(x));
    Complex* out = v.psi.at(x);
    for (int c = 0; c < N; ++c) {
      // h^2 D*D phi
      Complex lap = 2.0 * M * px[c];
      for (int k = 0; k < M; ++k) lap -= uf[k] * pf[k][c] + ub[k] * pb[k][c];
      out[c] = -lap * inv_h2 - pot * px[c];
    }
  });
}

}  // namespace

ModelParams make_params(double S, LatticePtr lattice, int N) {
  if (!std::isfinite(S)) throw ConfigError("model: S must be finite");
  if (N < 1) throw ConfigError("model: fiber dimension must be >= 1");
  return ModelParams{S, std::move(lattice), N};
}

PlaquetteField curvature(const ConnectionField& a) { return d_link_to_plaq(a); }

SiteScalarField energy_density(const SpinorField& phi, const ConnectionField& a, const ModelParams& params) {
  check_shapes(phi, a, params, "energy_density");
  SiteScalarField e(phi.lattice_ptr());
  parallel_for(phi.lattice().site_count(), [&](std::size_t x) { e[x] = site_energy(phi, a, params.S, x); });
  return e;
}

double sw_functional(const SpinorField& phi, const ConnectionField& a, const ModelParams& params) {
  check_shapes(phi, a, params, "sw_functional");
  const Lattice& lat = phi.lattice();
  return lat.cell_volume() *
         deterministic_sum(lat.site_count(), [&](std::size_t x) { return site_energy(phi, a, params.S, x); });
}

FlowVelocity flow_rhs(const SpinorField& phi, const ConnectionField& a, const ModelParams& params) {
  FlowVelocity v;
  RhsWorkspace ws;
  flow_rhs(phi, a, params, v, ws);
  return v;
}

void flow_rhs(const SpinorField& phi, const ConnectionField& a, const ModelParams& params, FlowVelocity& v,
              RhsWorkspace& ws) {
  check_shapes(phi, a, params, "flow_rhs");
  const Lattice& lat = phi.lattice();
  const int m = lat.dim();
  const int N = phi.fiber();
  const double S = params.S;

  link_phases(a, ws.phases);

  if (!v.psi.lattice_ptr() || !(v.psi.lattice() == lat) || v.psi.fiber() != N) v.psi = SpinorField(phi.lattice_ptr(), N);
  if (!v.b.lattice_ptr() || !(v.b.lattice() == lat)) v.b = LinkField(a.lattice_ptr());
  d_link_to_plaq(a, ws.f);
  codiff_plaq_to_link(ws.f, ws.dstar_f);
  const LinkField& dstar_f = ws.dstar_f;

  switch (m) {
    case 4: rhs_sweep<4>(phi, ws.phases, dstar_f, S, v); break;
    case 5: rhs_sweep<5>(phi, ws.phases, dstar_f, S, v); break;
    case 6: rhs_sweep<6>(phi, ws.phases, dstar_f, S, v); break;
    default: rhs_sweep<7>(phi, ws.phases, dstar_f, S, v); break;
  }
}

double dissipation(const FlowVelocity& v) {
  const Lattice& lat = v.psi.lattice();
  const int m = lat.dim();
  return lat.cell_volume() * deterministic_sum(lat.site_count(), [&](std::size_t x) {
           double s = 2.0 * v.psi.norm2_at(x);
           for (int k = 0; k < m; ++k) s += v.b(x, k) * v.b(x, k);
           return s;
         });
}

GradientReport gradient_check(const SpinorField& phi, const ConnectionField& a, const ModelParams& params,
                              double step, std::uint64_t seed, int samples) {
  if (!(step > 0.0)) throw DomainError("gradient_check: step must be positive");
  check_shapes(phi, a, params, "gradient_check");
  const Lattice& lat = phi.lattice();
  const FlowVelocity v = flow_rhs(phi, a, params);
  const double hm = lat.cell_volume();
  const std::size_t S = lat.site_count();
  const std::size_t spinor_coords = 2 * S * static_cast<std::size_t>(phi.fiber());
  const std::size_t total = spinor_coords + a.values().size();

  std::mt19937_64 rng(seed);
  GradientReport report;
  SpinorField p = phi;
  ConnectionField q = a;
  for (int s = 0; s < samples; ++s) {
    const std::size_t coord = rng() % total;
    double fd = 0.0;
    double predicted = 0.0;
    if (coord < spinor_coords) {
      const std::size_t entry = coord / 2;
      const bool imag = coord % 2 == 1;
      const Complex dir = imag ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
      Complex& slot = p.values()[entry];
      const Complex orig = slot;
      slot = orig + step * dir;
      const double up = sw_functional(p, q, params);
      slot = orig - step * dir;
      const double down = sw_functional(p, q, params);
      slot = orig;
      fd = (up - down) / (2.0 * step);
      predicted = -hm * 2.0 * (std::conj(dir) * v.psi.values()[entry]).real();
    } else {
      const std::size_t entry = coord - spinor_coords;
      double& slot = q.values()[entry];
      const double orig = slot;
      slot = orig + step;
      const double up = sw_functional(p, q, params);
      slot = orig - step;
      const double down = sw_functional(p, q, params);
      slot = orig;
      fd = (up - down) / (2.0 * step);
      predicted = -hm * v.b.values()[entry];
    }
    const double abs_err = std::abs(fd - predicted);
    const double scale = std::max(std::abs(fd), std::abs(predicted));
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    if (scale > 1e-12) report.max_rel_err = std::max(report.max_rel_err, abs_err / scale);
    ++report.samples;
  }
  return report;
}

}  // namespace swflow
