#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swflow/flow.hpp"

namespace swflow::diagnostics {

/// Radial cutoff: 1 on [0, L/4], 0 on [L/2, inf), and the quintic
/// smoothstep 1 - (10u^3 - 15u^4 + 6u^5), u = (r - L/4)/(L/4), between.
double cutoff_value(double r, double L);

/// Backward heat kernel (4 pi tau)^{-m/2} exp(-|offset|^2 / 4 tau).
/// Throws DomainError for tau <= 0.
double heat_kernel(std::span<const double> offset, double tau, int m);

// ---------------------------------------------------------------- energy

struct EnergyRecord {
  std::uint64_t step = 0;
  double t = 0.0;
  double sw = 0.0;
  double sup_phi = 0.0;
  /// h^m sum (2|psi|^2 + |b|^2) at this snapshot.
  double dissipation = 0.0;
  /// Quantities of the interval to the next snapshot; empty on the last record.
  std::optional<double> dsw_dt;
  std::optional<double> identity_residual;
  bool increase = false;
};

/// Per-snapshot energy bookkeeping. The residual of the interval
/// [t_k, t_k+1] is |dSW/dt + (D_k + D_k+1)/2|, D the dissipation; it decays
/// quadratically in the snapshot spacing. `increase` marks SW_k+1 above
/// SW_k + 1e-10 max(1, |SW_k|). Accepts a single snapshot.
std::vector<EnergyRecord> energy_records(const FlowHistory& history);

/// energy_records for histories of at least two snapshots
/// (PreconditionError otherwise).
std::vector<EnergyRecord> energy_report(const FlowHistory& history);

struct MaxPrincipleResult {
  bool pass = true;
  double bound = 0.0;
  double max_sup = 0.0;
  /// bound - max_sup; negative on failure.
  double margin = 0.0;
  std::vector<double> sup_per_snapshot;
};

/// sup|phi(t)| <= max{sup|phi_0|, sqrt|S|} (1 + 1e-9) for every snapshot.
MaxPrincipleResult max_principle_check(const FlowHistory& history);

// ------------------------------------------------------- local energies

enum class LocalEnergyMode {
  /// R^{4-m} h^m sum_{B_R} (|D phi|^2 + |f|^2)
  detector,
  /// h^m sum_{B_R} e, no radius weight
  sw,
};

/// Ball membership uses the nearest-image distance, |y| <= R. R in (0, L/2].
double local_energy(const SpinorField& phi, const ConnectionField& a, std::span<const double> x0, double R,
                    LocalEnergyMode mode, const ModelParams& params);

struct DetectorConfig {
  double delta = 0.05;
  std::vector<double> radii;
  double R1 = 0.0;
};

/// delta = 0.05, radii {L/4, L/8, L/16}, R1 = L/4.
DetectorConfig default_detector_config(const Lattice& lattice);

struct DetectorScan {
  std::vector<double> radii;
  /// energies[site * radii.size() + r]: detector-mode local energy.
  std::vector<double> energies;
  /// Sites whose local energy reaches delta at every radius, ascending.
  std::vector<std::size_t> flagged;
};

/// Flags x iff R^{4-m} int_{B_R(x)} (|D phi|^2 + |f|^2) >= delta for every R
/// of the grid.
DetectorScan detect_singular_set(const FlowState& snapshot, const DetectorConfig& config,
                                 const ModelParams& params);

struct DetectorReport {
  double R = 0.0;
  std::vector<std::size_t> flagged;
  std::vector<std::size_t> centers;
  /// sum over centers of (5R)^{m-4}
  double hausdorff_sum = 0.0;
  /// 5^m SW_0 / delta, the covering estimate with unit constant.
  double reference_bound = 0.0;
};

/// Greedy Vitali selection over `flagged` in the given order: a site becomes
/// a center when its distance to every earlier center exceeds 2R. Selected
/// R-balls are disjoint and the 5R-balls cover every flagged site.
DetectorReport vitali_cover(const Lattice& lattice, std::span<const std::size_t> flagged, double R);

double covering_reference_bound(int m, double sw0, double delta);

// ------------------------------------------------------- monotonicity

struct Probe {
  Point x0;
  double t0 = 0.0;
  double R = 0.0;
};

/// Throws PreconditionError unless 0 < R <= min(L/2, sqrt(t0)/2).
void validate_probe(const Lattice& lattice, const Probe& probe);

struct MonotonicityValues {
  double Phi = 0.0;
  double F = 0.0;
};

/// Phi = R^2 int_{t0-4R^2}^{t0-R^2} h^m sum e cut^2 G dt and
/// F = R int tau h^m sum [|b + (y_k/2t) F_k.|^2 + 2|psi + (y_k/2t) D_k phi|^2] cut^2 G dt,
/// with t = t_s - t0 < 0, tau = -t, y the nearest image of x - x0. The time
/// integral is exact for the piecewise-linear interpolant of the snapshot
/// integrands. Requires snapshots bracketing the slab, before t0, with at
/// least three inside it.
MonotonicityValues monotonicity_quantities(const FlowHistory& history, const Probe& probe);

struct MonotonicityRow {
  double R = 0.0;
  double Phi = 0.0;
  double F = 0.0;
};

struct MonotonicityTable {
  std::vector<MonotonicityRow> rows;
  double sw0 = 0.0;
  bool attainable = true;
  double fitted_a = 0.0;
  double fitted_c = 0.0;
};

/// Search grid for the exponent a: 0 and 0.01 * 2^k, k = 0..24.
std::vector<double> monotonicity_a_grid();

/// Rows sorted by R. For each a of the grid the smallest c >= 0 making
/// R -> e^{aR} Phi(R) + c R^2 SW_0 non-decreasing is computed exactly; the
/// pair with the smallest a + c is reported, or attainable = false.
MonotonicityTable monotonicity_scan(const FlowHistory& history, const Point& x0, double t0,
                                    std::vector<double> radii);

// ---------------------------------------------------------- rescaling

struct RescaledFields {
  LatticePtr lattice;
  double scale = 0.0;  ///< R_n = k h
  std::size_t origin = 0;
  SpinorField phi;
  ConnectionField a;
};

/// Zoom by R_n = k h around site x_n of the snapshot at time t_n: the new
/// lattice has spacing 1/k and the same n; site j maps to x_n + j h,
/// phi' = phi, a' = R_n a. Then f' = R_n^2 f and D'phi' = R_n D phi at the
/// samples. DomainError if k < 2, k does not divide n, or t_n is not a
/// snapshot time.
RescaledFields rescale_blowup(const FlowHistory& history, std::size_t x_n, double t_n, int k);

// ---------------------------------------------------------- profile

struct ProfileRow {
  double r = 0.0;
  double value = 0.0;
};

/// r^{2-m} h^m sum_{B_r(x0)} |f|^2 for each r in (0, L/2].
std::vector<ProfileRow> curvature_profile(const PlaquetteField& f, std::span<const double> x0,
                                          std::span<const double> r_list);
std::vector<ProfileRow> curvature_scaling_profile(const SpinorField& phi, const ConnectionField& a,
                                                  std::span<const double> x0, std::span<const double> r_list,
                                                  const ModelParams& params);

}  // namespace swflow::diagnostics
