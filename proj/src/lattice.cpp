#include "swflow/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "swflow/parallel.hpp"

namespace swflow {

Lattice::Lattice(int m, int n, double length) : m_(m), n_(n), length_(length) {
  if (m < kMinDim || m > kMaxDim) {
    throw ConfigError("lattice: m=" + std::to_string(m) + " outside supported range 4..7");
  }
  if (n < 4) throw ConfigError("lattice: n=" + std::to_string(n) + " must be >= 4");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("lattice: length must be positive and finite");
  }
  double count = std::pow(static_cast<double>(n), m);
  if (count > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw ConfigError("lattice: n^m exceeds the supported site count");
  }
  sites_ = 1;
  for (int k = 0; k < m; ++k) sites_ *= static_cast<std::size_t>(n);
  cell_volume_ = std::pow(spacing(), m);

  strides_.assign(static_cast<std::size_t>(m), 1);
  for (int k = m - 2; k >= 0; --k) {
    strides_[static_cast<std::size_t>(k)] =
        strides_[static_cast<std::size_t>(k + 1)] * static_cast<std::size_t>(n);
  }

  fwd_.resize(sites_ * static_cast<std::size_t>(m));
  bwd_.resize(sites_ * static_cast<std::size_t>(m));
  std::vector<int> c(static_cast<std::size_t>(m));
  for (std::size_t s = 0; s < sites_; ++s) {
    coords(s, c);
    for (int k = 0; k < m; ++k) {
      const auto ck = c[static_cast<std::size_t>(k)];
      const auto stride = strides_[static_cast<std::size_t>(k)];
      const std::size_t up = ck + 1 < n ? s + stride : s - stride * static_cast<std::size_t>(n - 1);
      const std::size_t down = ck > 0 ? s - stride : s + stride * static_cast<std::size_t>(n - 1);
      fwd_[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(up);
      bwd_[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(down);
    }
  }

  pair_lookup_.fill(-1);
  for (int j = 0; j < m; ++j) {
    for (int k = j + 1; k < m; ++k) {
      pair_lookup_[static_cast<std::size_t>(j * kMaxDim + k)] = static_cast<int>(pairs_.size());
      pairs_.emplace_back(j, k);
    }
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) triples_.push_back({i, j, k});
}

void Lattice::coords(std::size_t site, std::span<int> out) const noexcept {
  for (int k = m_ - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = static_cast<int>(site % static_cast<std::size_t>(n_));
    site /= static_cast<std::size_t>(n_);
  }
}

std::vector<int> Lattice::coords(std::size_t site) const {
  std::vector<int> c(static_cast<std::size_t>(m_));
  coords(site, c);
  return c;
}

std::size_t Lattice::index(std::span<const int> c) const noexcept {
  std::size_t s = 0;
  for (int k = 0; k < m_; ++k) {
    int v = c[static_cast<std::size_t>(k)] % n_;
    if (v < 0) v += n_;
    s += static_cast<std::size_t>(v) * strides_[static_cast<std::size_t>(k)];
  }
  return s;
}

Point Lattice::position(std::size_t site) const {
  std::vector<int> c = coords(site);
  Point x(static_cast<std::size_t>(m_));
  const double h = spacing();
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = h * c[k];
  return x;
}

std::size_t Lattice::nearest_site(std::span<const double> x) const {
  std::vector<int> c(static_cast<std::size_t>(m_));
  const double h = spacing();
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = static_cast<int>(std::llround(x[k] / h) % n_);
  }
  return index(c);
}

LatticePtr build_lattice(int m, int n, double length) {
  return std::make_shared<const Lattice>(m, n, length);
}

int form_components(int m, int degree) {
  switch (degree) {
    case 0: return 1;
    case 1: return m;
    case 2: return m * (m - 1) / 2;
    case 3: return m * (m - 1) * (m - 2) / 6;
    default: throw UnsupportedError("form degree must be 0..3");
  }
}

void require_same_lattice(const Lattice& a, const Lattice& b, const char* op) {
  if (!(a == b)) throw ShapeError(std::string(op) + ": fields live on different lattices");
}

LinkField d_site_to_link(const SiteScalarField& chi) {
  const Lattice& lat = chi.lattice();
  const int m = lat.dim();
  const double inv_h = 1.0 / lat.spacing();
  LinkField out(chi.lattice_ptr());
  parallel_for(lat.site_count(), [&](std::size_t x) {
    for (int k = 0; k < m; ++k) out(x, k) = (chi[lat.forward(x, k)] - chi[x]) * inv_h;
  });
  return out;
}

PlaquetteField d_link_to_plaq(const LinkField& a) {
  PlaquetteField out(a.lattice_ptr());
  d_link_to_plaq(a, out);
  return out;
}

void d_link_to_plaq(const LinkField& a, PlaquetteField& out) {
  const Lattice& lat = a.lattice();
  const int P = lat.pair_count();
  const double inv_h = 1.0 / lat.spacing();
  if (!out.lattice_ptr() || !(out.lattice() == lat))
    out = PlaquetteField(a.lattice_ptr());
  parallel_for(lat.site_count(), [&](std::size_t x) {
    for (int p = 0; p < P; ++p) {
      const auto [j, k] = lat.pair(p);
      out(x, p) = ((a(lat.forward(x, j), k) - a(x, k)) - (a(lat.forward(x, k), j) - a(x, j))) * inv_h;
    }
  });
}

CubeField d_plaq_to_cube(const PlaquetteField& f) {
  const Lattice& lat = f.lattice();
  const int T = lat.triple_count();
  const double inv_h = 1.0 / lat.spacing();
  CubeField out(f.lattice_ptr());
  parallel_for(lat.site_count(), [&](std::size_t x) {
    for (int t = 0; t < T; ++t) {
      const auto& [i, j, k] = lat.triple(t);
      const int jk = lat.pair_index(j, k);
      const int ik = lat.pair_index(i, k);
      const int ij = lat.pair_index(i, j);
      out(x, t) = ((f(lat.forward(x, i), jk) - f(x, jk)) - (f(lat.forward(x, j), ik) - f(x, ik)) +
                   (f(lat.forward(x, k), ij) - f(x, ij))) *
                  inv_h;
    }
  });
  return out;
}

LinkField codiff_plaq_to_link(const PlaquetteField& f) {
  LinkField out(f.lattice_ptr());
  codiff_plaq_to_link(f, out);
  return out;
}

void codiff_plaq_to_link(const PlaquetteField& f, LinkField& out) {
  const Lattice& lat = f.lattice();
  const int m = lat.dim();
  const double inv_h = 1.0 / lat.spacing();
  if (!out.lattice_ptr() || !(out.lattice() == lat))
    out = LinkField(f.lattice_ptr());
  // (d* f)_l(y) = sum_{j != l} (F_jl(y - e_j) - F_jl(y)) / h, F antisymmetric.
  parallel_for(lat.site_count(), [&](std::size_t y) {
    for (int l = 0; l < m; ++l) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j == l) continue;
        const std::size_t yb = lat.backward(y, j);
        if (j < l) {
          const int p = lat.pair_index(j, l);
          acc += f(yb, p) - f(y, p);
        } else {
          const int p = lat.pair_index(l, j);
          acc -= f(yb, p) - f(y, p);
        }
      }
      out(y, l) = acc * inv_h;
    }
  });
}

SiteScalarField codiff_link_to_site(const LinkField& b) {
  const Lattice& lat = b.lattice();
  const int m = lat.dim();
  const double inv_h = 1.0 / lat.spacing();
  SiteScalarField out(b.lattice_ptr());
  parallel_for(lat.site_count(), [&](std::size_t x) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) acc += b(lat.backward(x, k), k) - b(x, k);
    out[x] = acc * inv_h;
  });
  return out;
}

template <int Degree>
double inner(const Form<Degree>& a, const Form<Degree>& b) {
  require_same_lattice(a.lattice(), b.lattice(), "inner");
  const auto& va = a.values();
  const auto& vb = b.values();
  return a.lattice().cell_volume() * deterministic_sum(va.size(), [&](std::size_t i) { return va[i] * vb[i]; });
}

template double inner<0>(const Form<0>&, const Form<0>&);
template double inner<1>(const Form<1>&, const Form<1>&);
template double inner<2>(const Form<2>&, const Form<2>&);
template double inner<3>(const Form<3>&, const Form<3>&);

Point nearest_image(const Lattice& lattice, std::span<const double> x, std::span<const double> x0) {
  const double L = lattice.length();
  const double half = 0.5 * L;
  Point d(static_cast<std::size_t>(lattice.dim()));
  for (std::size_t k = 0; k < d.size(); ++k) {
    double v = x[k] - x0[k];
    v -= L * std::floor((v + half) / L);
    if (v >= half) v -= L;
    if (v < -half) v += L;
    d[k] = v;
  }
  return d;
}

double torus_distance(const Lattice& lattice, std::span<const double> x, std::span<const double> x0) {
  const Point d = nearest_image(lattice, x, x0);
  double s = 0.0;
  for (double v : d) s += v * v;
  return std::sqrt(s);
}

}  // namespace swflow
