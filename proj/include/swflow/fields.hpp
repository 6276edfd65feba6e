#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swflow/lattice.hpp"

namespace swflow {

using Complex = std::complex<double>;

/// Section of the spinor bundle: a complex N-vector per site.
class SpinorField {
 public:
  SpinorField() = default;
  SpinorField(LatticePtr lattice, int N);

  const Lattice& lattice() const noexcept { return *lattice_; }
  const LatticePtr& lattice_ptr() const noexcept { return lattice_; }
  int fiber() const noexcept { return N_; }

  Complex& operator()(std::size_t site, int c) noexcept {
    return values_[site * static_cast<std::size_t>(N_) + static_cast<std::size_t>(c)];
  }
  const Complex& operator()(std::size_t site, int c) const noexcept {
    return values_[site * static_cast<std::size_t>(N_) + static_cast<std::size_t>(c)];
  }
  const Complex* at(std::size_t site) const noexcept { return values_.data() + site * static_cast<std::size_t>(N_); }
  Complex* at(std::size_t site) noexcept { return values_.data() + site * static_cast<std::size_t>(N_); }

  /// |phi(x)|^2
  double norm2_at(std::size_t site) const noexcept;

  std::vector<Complex>& values() noexcept { return values_; }
  const std::vector<Complex>& values() const noexcept { return values_; }

  bool operator==(const SpinorField& o) const {
    return *lattice_ == *o.lattice_ && N_ == o.N_ && values_ == o.values_;
  }

 private:
  LatticePtr lattice_;
  int N_ = 0;
  std::vector<Complex> values_;
};

/// Real carrier a of the connection A = i a (A_0 = 0), one value per link.
using ConnectionField = LinkField;

/// Spinor-valued field on links, e.g. the covariant differences D_k phi(x).
class LinkSpinorField {
 public:
  LinkSpinorField(LatticePtr lattice, int N);

  const Lattice& lattice() const noexcept { return *lattice_; }
  int fiber() const noexcept { return N_; }
  Complex& operator()(std::size_t site, int k, int c) noexcept { return values_[offset(site, k) + static_cast<std::size_t>(c)]; }
  const Complex& operator()(std::size_t site, int k, int c) const noexcept {
    return values_[offset(site, k) + static_cast<std::size_t>(c)];
  }
  const std::vector<Complex>& values() const noexcept { return values_; }

 private:
  std::size_t offset(std::size_t site, int k) const noexcept {
    return (site * static_cast<std::size_t>(lattice_->dim()) + static_cast<std::size_t>(k)) *
           static_cast<std::size_t>(N_);
  }
  LatticePtr lattice_;
  int N_;
  std::vector<Complex> values_;
};

/// Parallel transporter of the link (x, k): exp(i h a_k(x) / 2). The half
/// comes from the 1/2 in front of A in the covariant derivative.
inline Complex link_phase(double h, double a) noexcept { return std::polar(1.0, 0.5 * h * a); }

/// g = exp(i chi): phi -> exp(-i chi) phi, a -> a + 2 d chi.
std::pair<SpinorField, ConnectionField> gauge_transform(const SpinorField& phi, const ConnectionField& a,
                                                        const SiteScalarField& chi);

/// D_k phi(x) = [U_k(x) phi(x + h e_k) - phi(x)] / h with U_k = link_phase.
/// Covariant: under gauge_transform, D_k phi(x) -> exp(-i chi(x)) D_k phi(x).
LinkSpinorField covariant_diff(const SpinorField& phi, const ConnectionField& a);

enum class InitialKind { random_fourier, bubble, maxwell_mode, constant };

InitialKind parse_initial_kind(const std::string& name);
std::string to_string(InitialKind kind);

/// Presets for initial data.
///
/// - random_fourier: every real component is a sum of kRandomModes cosines
///   with integer wave vectors in [-max_mode, max_mode]^m, uniform amplitudes
///   damped by 1/(1+|k|^2) and uniform phases. Randomness comes from
///   std::mt19937_64 seeded with `seed`, mapped to doubles as (x >> 11) 2^-53.
/// - bubble: phi = amplitude g e_1, a_1 = -amplitude (y_2/w) g,
///   a_2 = amplitude (y_1/w) g with g = exp(-|y|^2 / 2w^2), y the nearest
///   image of x - center.
/// - maxwell_mode: phi = 0, a_2(x) = amplitude sin(2 pi x_1 / L).
/// - constant: phi = (amplitude, 0, ..., 0), a = 0.
struct InitialDataSpec {
  InitialKind kind = InitialKind::random_fourier;
  double amplitude = 0.1;
  std::uint64_t seed = 0;
  int max_mode = 2;
  /// Empty means the torus midpoint (L/2, ..., L/2).
  Point center;
  /// Non-positive means L/16.
  double width = 0.0;

  bool operator==(const InitialDataSpec&) const = default;
};

inline constexpr int kRandomModes = 8;

/// Throws ConfigError on amplitude < 0, width above L/4, a random_fourier
/// max_mode outside [1, n/2), or a center of the wrong dimension.
std::pair<SpinorField, ConnectionField> make_initial(const InitialDataSpec& spec, const LatticePtr& lattice,
                                                     int N);

struct Norms {
  double l2 = 0.0;
  double sup = 0.0;
};

/// l2 = sqrt(h^m sum |.|^2), sup = max over sites of the pointwise modulus.
Norms norms(const SpinorField& phi);
Norms norms(const LinkField& a);
Norms norms(const PlaquetteField& f);
Norms norms(const SiteScalarField& s);
Norms norms(const LinkSpinorField& d);

/// Real pairing h^m sum Re<u, v> used for the spinor part of the L^2 metric.
double real_inner(const SpinorField& u, const SpinorField& v);

}  // namespace swflow
