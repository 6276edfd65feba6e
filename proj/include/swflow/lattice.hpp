#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "swflow/error.hpp"

namespace swflow {

inline constexpr int kMinDim = 4;
inline constexpr int kMaxDim = 7;

/// A point of R^m (or of the torus [0, L)^m).
using Point = std::vector<double>;

/// Flat periodic m-torus [0, L)^m sampled by n sites per axis.
///
/// Sites are indexed lexicographically with the last axis fastest. A link
/// (x, k) joins x to x + h e_k; a plaquette (x, j<k) is the square at x
/// spanned by e_j and e_k; a cube (x, i<j<k) likewise. Pairs and triples are
/// numbered lexicographically: (0,1), (0,2), ..., (1,2), ...
class Lattice {
 public:
  Lattice(int m, int n, double length);

  int dim() const noexcept { return m_; }
  int extent() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  std::size_t site_count() const noexcept { return sites_; }
  /// Quadrature weight h^m attributed to every site.
  double cell_volume() const noexcept { return cell_volume_; }
  double volume() const noexcept { return cell_volume_ * static_cast<double>(sites_); }
  /// Injectivity radius of the flat torus, L/2.
  double injectivity_radius() const noexcept { return 0.5 * length_; }

  std::size_t forward(std::size_t site, int k) const noexcept {
    return fwd_[site * static_cast<std::size_t>(m_) + static_cast<std::size_t>(k)];
  }
  std::size_t backward(std::size_t site, int k) const noexcept {
    return bwd_[site * static_cast<std::size_t>(m_) + static_cast<std::size_t>(k)];
  }

  /// Per-axis integer coordinates of a site, written to out[0..m).
  void coords(std::size_t site, std::span<int> out) const noexcept;
  std::vector<int> coords(std::size_t site) const;
  /// Site index of integer coordinates, wrapped periodically.
  std::size_t index(std::span<const int> coords) const noexcept;
  /// Physical position x = h * coords in [0, L)^m.
  Point position(std::size_t site) const;
  /// Site closest to a point (componentwise rounding, wrapped).
  std::size_t nearest_site(std::span<const double> x) const;

  int pair_count() const noexcept { return static_cast<int>(pairs_.size()); }
  int triple_count() const noexcept { return static_cast<int>(triples_.size()); }
  /// Index of the ordered pair j<k.
  int pair_index(int j, int k) const noexcept { return pair_lookup_[j * kMaxDim + k]; }
  std::pair<int, int> pair(int p) const noexcept { return pairs_[static_cast<std::size_t>(p)]; }
  const std::array<int, 3>& triple(int t) const noexcept { return triples_[static_cast<std::size_t>(t)]; }

  bool operator==(const Lattice& o) const noexcept {
    return m_ == o.m_ && n_ == o.n_ && length_ == o.length_;
  }

 private:
  int m_;
  int n_;
  double length_;
  double cell_volume_;
  std::size_t sites_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint32_t> fwd_;
  std::vector<std::uint32_t> bwd_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::array<int, 3>> triples_;
  std::array<int, kMaxDim * kMaxDim> pair_lookup_{};
};

using LatticePtr = std::shared_ptr<const Lattice>;

/// Validated constructor: 4 <= m <= 7, n >= 4, L > 0.
LatticePtr build_lattice(int m, int n, double length);

/// Number of components of a degree-p form in dimension m.
int form_components(int m, int degree);

/// Real discrete p-form: one value per (site, component). Degree 0 lives on
/// sites, 1 on links, 2 on plaquettes, 3 on cubes.
template <int Degree>
class Form {
 public:
  Form() = default;
  explicit Form(LatticePtr lattice, double fill = 0.0)
      : lattice_(std::move(lattice)),
        components_(form_components(lattice_->dim(), Degree)),
        values_(lattice_->site_count() * static_cast<std::size_t>(components_), fill) {}

  const Lattice& lattice() const noexcept { return *lattice_; }
  const LatticePtr& lattice_ptr() const noexcept { return lattice_; }
  int components() const noexcept { return components_; }

  double& operator()(std::size_t site, int c) noexcept {
    return values_[site * static_cast<std::size_t>(components_) + static_cast<std::size_t>(c)];
  }
  double operator()(std::size_t site, int c) const noexcept {
    return values_[site * static_cast<std::size_t>(components_) + static_cast<std::size_t>(c)];
  }
  double& operator[](std::size_t site) noexcept { return values_[site]; }
  double operator[](std::size_t site) const noexcept { return values_[site]; }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const Form& o) const { return *lattice_ == *o.lattice_ && values_ == o.values_; }

 private:
  LatticePtr lattice_;
  int components_ = 0;
  std::vector<double> values_;
};

using SiteScalarField = Form<0>;
using LinkField = Form<1>;
using PlaquetteField = Form<2>;
using CubeField = Form<3>;

/// Throws ShapeError unless both lattices are identical.
void require_same_lattice(const Lattice& a, const Lattice& b, const char* op);

/// (d chi)_k(x) = (chi(x + h e_k) - chi(x)) / h
LinkField d_site_to_link(const SiteScalarField& chi);
/// f_jk(x) = [(a_k(x+h e_j) - a_k(x)) - (a_j(x+h e_k) - a_j(x))] / h, j<k
PlaquetteField d_link_to_plaq(const LinkField& a);
/// In-place variants; `out` is reshaped when its lattice differs.
void d_link_to_plaq(const LinkField& a, PlaquetteField& out);
/// Alternating sum over the faces of each elementary cube.
CubeField d_plaq_to_cube(const PlaquetteField& f);
/// Exact adjoint of d_link_to_plaq under the h^m-weighted pairing.
LinkField codiff_plaq_to_link(const PlaquetteField& f);
void codiff_plaq_to_link(const PlaquetteField& f, LinkField& out);
/// Exact adjoint of d_site_to_link under the h^m-weighted pairing.
SiteScalarField codiff_link_to_site(const LinkField& b);

/// h^m * sum over all entries of a*b.
template <int Degree>
double inner(const Form<Degree>& a, const Form<Degree>& b);

/// Componentwise representative of x - x0 in [-L/2, L/2)^m.
Point nearest_image(const Lattice& lattice, std::span<const double> x, std::span<const double> x0);
/// Euclidean length of nearest_image(x, x0).
double torus_distance(const Lattice& lattice, std::span<const double> x, std::span<const double> x0);

}  // namespace swflow
