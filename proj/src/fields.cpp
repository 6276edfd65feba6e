#include "swflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "swflow/parallel.hpp"

namespace swflow {

SpinorField::SpinorField(LatticePtr lattice, int N) : lattice_(std::move(lattice)), N_(N) {
  if (N < 1) throw ConfigError("spinor fiber dimension must be >= 1");
  values_.assign(lattice_->site_count() * static_cast<std::size_t>(N), Complex(0.0, 0.0));
}

double SpinorField::norm2_at(std::size_t site) const noexcept {
  const Complex* p = at(site);
  double s = 0.0;
  for (int c = 0; c < N_; ++c) s += std::norm(p[c]);
  return s;
}

LinkSpinorField::LinkSpinorField(LatticePtr lattice, int N)
    : lattice_(std::move(lattice)),
      N_(N),
      values_(lattice_->site_count() * static_cast<std::size_t>(lattice_->dim()) * static_cast<std::size_t>(N)) {}

std::pair<SpinorField, ConnectionField> gauge_transform(const SpinorField& phi, const ConnectionField& a,
                                                        const SiteScalarField& chi) {
  require_same_lattice(phi.lattice(), a.lattice(), "gauge_transform");
  require_same_lattice(phi.lattice(), chi.lattice(), "gauge_transform");
  const Lattice& lat = phi.lattice();
  const int N = phi.fiber();

  SpinorField out_phi(phi.lattice_ptr(), N);
  parallel_for(lat.site_count(), [&](std::size_t x) {
    const Complex g = std::polar(1.0, -chi[x]);
    for (int c = 0; c < N; ++c) out_phi(x, c) = g * phi(x, c);
  });

  ConnectionField out_a = d_site_to_link(chi);
  auto& va = out_a.values();
  const auto& src = a.values();
  for (std::size_t i = 0; i < va.size(); ++i) va[i] = src[i] + 2.0 * va[i];
  return {std::move(out_phi), std::move(out_a)};
}

LinkSpinorField covariant_diff(const SpinorField& phi, const ConnectionField& a) {
  require_same_lattice(phi.lattice(), a.lattice(), "covariant_diff");
  const Lattice& lat = phi.lattice();
  const int m = lat.dim();
  const int N = phi.fiber();
  const double h = lat.spacing();
  const double inv_h = 1.0 / h;
  LinkSpinorField out(phi.lattice_ptr(), N);
  parallel_for(lat.site_count(), [&](std::size_t x) {
    for (int k = 0; k < m; ++k) {
      const Complex u = link_phase(h, a(x, k));
      const std::size_t xf = lat.forward(x, k);
      for (int c = 0; c < N; ++c) out(x, k, c) = (u * phi(xf, c) - phi(x, c)) * inv_h;
    }
  });
  return out;
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "random_fourier") return InitialKind::random_fourier;
  if (name == "bubble") return InitialKind::bubble;
  if (name == "maxwell_mode") return InitialKind::maxwell_mode;
  if (name == "constant") return InitialKind::constant;
  throw ConfigError("unknown initial data kind '" + name + "'");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::random_fourier: return "random_fourier";
    case InitialKind::bubble: return "bubble";
    case InitialKind::maxwell_mode: return "maxwell_mode";
    case InitialKind::constant: return "constant";
  }
  return "unknown";
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Mode {
  std::vector<int> k;
  double coefficient;
  double phase;
};

std::vector<Mode> draw_modes(std::mt19937_64& rng, int m, int max_mode) {
  std::vector<Mode> modes(kRandomModes);
  const auto span = static_cast<std::uint64_t>(2 * max_mode + 1);
  for (auto& mode : modes) {
    mode.k.resize(static_cast<std::size_t>(m));
    double k2 = 0.0;
    for (auto& ki : mode.k) {
      ki = static_cast<int>(rng() % span) - max_mode;
      k2 += static_cast<double>(ki) * ki;
    }
    mode.coefficient = (2.0 * unit_uniform(rng) - 1.0) / (1.0 + k2);
    mode.phase = 2.0 * std::numbers::pi * unit_uniform(rng);
  }
  return modes;
}

double evaluate_modes(const std::vector<Mode>& modes, std::span<const int> coords, int n) {
  double v = 0.0;
  for (const auto& mode : modes) {
    // k.x * 2 pi / L with x = h * coords = L * coords / n
    long dot = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) dot += static_cast<long>(mode.k[i]) * coords[i];
    const long reduced = ((dot % n) + n) % n;
    v += mode.coefficient * std::cos(2.0 * std::numbers::pi * static_cast<double>(reduced) / n + mode.phase);
  }
  return v;
}

void validate(const InitialDataSpec& spec, const Lattice& lat) {
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw ConfigError("initial data: amplitude must be finite and >= 0");
  }
  if (spec.kind == InitialKind::random_fourier && (spec.max_mode < 1 || 2 * spec.max_mode >= lat.extent())) {
    throw ConfigError("initial data: max_mode must satisfy 1 <= max_mode < n/2");
  }
  if (spec.width > 0.25 * lat.length()) throw ConfigError("initial data: width must lie in (0, L/4]");
  if (!spec.center.empty() && static_cast<int>(spec.center.size()) != lat.dim()) {
    throw ConfigError("initial data: center must have m coordinates");
  }
}

}  // namespace

std::pair<SpinorField, ConnectionField> make_initial(const InitialDataSpec& spec, const LatticePtr& lattice,
                                                     int N) {
  const Lattice& lat = *lattice;
  validate(spec, lat);
  const int m = lat.dim();
  SpinorField phi(lattice, N);
  ConnectionField a(lattice);
  const double amp = spec.amplitude;

  switch (spec.kind) {
    case InitialKind::constant:
      for (std::size_t x = 0; x < lat.site_count(); ++x) phi(x, 0) = Complex(amp, 0.0);
      break;

    case InitialKind::maxwell_mode: {
      const double L = lat.length();
      for (std::size_t x = 0; x < lat.site_count(); ++x) {
        const double x1 = lat.spacing() * lat.coords(x)[0];
        a(x, 1) = amp * std::sin(2.0 * std::numbers::pi * x1 / L);
      }
      break;
    }

    case InitialKind::bubble: {
      const Point center = spec.center.empty() ? Point(static_cast<std::size_t>(m), 0.5 * lat.length()) : spec.center;
      const double w = spec.width > 0.0 ? spec.width : lat.length() / 16.0;
      parallel_for(lat.site_count(), [&](std::size_t x) {
        const Point y = nearest_image(lat, lat.position(x), center);
        double r2 = 0.0;
        for (double v : y) r2 += v * v;
        const double g = std::exp(-r2 / (2.0 * w * w));
        phi(x, 0) = Complex(amp * g, 0.0);
        a(x, 0) = -amp * (y[1] / w) * g;
        a(x, 1) = amp * (y[0] / w) * g;
      });
      break;
    }

    case InitialKind::random_fourier: {
      std::mt19937_64 rng(spec.seed);
      std::vector<std::vector<Mode>> spinor_modes(static_cast<std::size_t>(2 * N));
      for (auto& modes : spinor_modes) modes = draw_modes(rng, m, spec.max_mode);
      std::vector<std::vector<Mode>> link_modes(static_cast<std::size_t>(m));
      for (auto& modes : link_modes) modes = draw_modes(rng, m, spec.max_mode);
      const int n = lat.extent();
      parallel_for(lat.site_count(), [&](std::size_t x) {
        int c[kMaxDim];
        lat.coords(x, std::span<int>(c, static_cast<std::size_t>(m)));
        const std::span<const int> cs(c, static_cast<std::size_t>(m));
        for (int s = 0; s < N; ++s) {
          const double re = evaluate_modes(spinor_modes[static_cast<std::size_t>(2 * s)], cs, n);
          const double im = evaluate_modes(spinor_modes[static_cast<std::size_t>(2 * s + 1)], cs, n);
          phi(x, s) = Complex(amp * re, amp * im);
        }
        for (int k = 0; k < m; ++k) a(x, k) = amp * evaluate_modes(link_modes[static_cast<std::size_t>(k)], cs, n);
      });
      break;
    }
  }
  return {std::move(phi), std::move(a)};
}

namespace {

template <class PointwiseSq>
Norms norms_impl(const Lattice& lat, PointwiseSq&& sq) {
  const std::size_t S = lat.site_count();
  const double total = deterministic_sum(S, sq);
  double sup2 = 0.0;
  for (std::size_t x = 0; x < S; ++x) sup2 = std::max(sup2, sq(x));
  return {std::sqrt(lat.cell_volume() * total), std::sqrt(sup2)};
}

template <int D>
Norms form_norms(const Form<D>& f) {
  const int C = f.components();
  return norms_impl(f.lattice(), [&](std::size_t x) {
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += f(x, c) * f(x, c);
    return s;
  });
}

}  // namespace

Norms norms(const SpinorField& phi) {
  return norms_impl(phi.lattice(), [&](std::size_t x) { return phi.norm2_at(x); });
}
Norms norms(const LinkField& a) { return form_norms(a); }
Norms norms(const PlaquetteField& f) { return form_norms(f); }
Norms norms(const SiteScalarField& s) { return form_norms(s); }
Norms norms(const LinkSpinorField& d) {
  const int m = d.lattice().dim();
  const int N = d.fiber();
  return norms_impl(d.lattice(), [&](std::size_t x) {
    double s = 0.0;
    for (int k = 0; k < m; ++k)
      for (int c = 0; c < N; ++c) s += std::norm(d(x, k, c));
    return s;
  });
}

double real_inner(const SpinorField& u, const SpinorField& v) {
  require_same_lattice(u.lattice(), v.lattice(), "real_inner");
  if (u.fiber() != v.fiber()) throw ShapeError("real_inner: fiber dimensions differ");
  const int N = u.fiber();
  return u.lattice().cell_volume() * deterministic_sum(u.lattice().site_count(), [&](std::size_t x) {
           double s = 0.0;
           for (int c = 0; c < N; ++c) s += (std::conj(u(x, c)) * v(x, c)).real();
           return s;
         });
}

}  // namespace swflow
