#pragma once

#include <cstdint>

#include "swflow/fields.hpp"

namespace swflow {

/// Model constants. S plays the role of the scalar curvature; on the flat
/// torus it is a free synthetic coefficient of the |phi|^2 potential.
struct ModelParams {
  double S = 0.0;
  LatticePtr lattice;
  int N = 0;
};

/// Validated constructor (finite S, N >= 1).
ModelParams make_params(double S, LatticePtr lattice, int N);

/// Real carrier f of F_A = i f; same as d_link_to_plaq(a).
PlaquetteField curvature(const ConnectionField& a);

/// e = sum_k |D_k phi|^2 + 1/2 sum_{j<k} f_jk^2 + S/4 |phi|^2 + 1/8 |phi|^4,
/// where links and plaquettes are attributed to their base site.
SiteScalarField energy_density(const SpinorField& phi, const ConnectionField& a, const ModelParams& params);

/// h^m * sum of energy_density.
double sw_functional(const SpinorField& phi, const ConnectionField& a, const ModelParams& params);

/// Negative L^2 gradient of the discrete functional:
///   dSW(phi + e dphi, a + e da)/de = -h^m sum [2 Re<dphi, psi> + sum_k da_k b_k].
/// psi = -D*D phi - (S + |phi|^2) phi / 4
/// b   = -d* f - J,  J_k(x) = Im<phi(x), U_k(x) phi(x + h e_k)> / h.
struct FlowVelocity {
  SpinorField psi;
  LinkField b;
};

FlowVelocity flow_rhs(const SpinorField& phi, const ConnectionField& a, const ModelParams& params);

/// Scratch storage reused across flow_rhs calls.
struct RhsWorkspace {
  std::vector<Complex> phases;
  PlaquetteField f;
  LinkField dstar_f;
};

/// flow_rhs writing into `v`, which is reshaped only when needed.
void flow_rhs(const SpinorField& phi, const ConnectionField& a, const ModelParams& params, FlowVelocity& v,
              RhsWorkspace& ws);

/// h^m sum (2 |psi|^2 + |b|^2), the instantaneous decay rate -dSW/dt.
double dissipation(const FlowVelocity& v);

struct GradientReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  int samples = 0;
};

/// Compares central differences of sw_functional along random coordinate
/// directions (spinor real/imaginary parts and link values) with the
/// pairing predicted by flow_rhs. When both sides are below 1e-12 the
/// sample contributes its absolute error only.
GradientReport gradient_check(const SpinorField& phi, const ConnectionField& a, const ModelParams& params,
                              double step, std::uint64_t seed, int samples = 20);

}  // namespace swflow
