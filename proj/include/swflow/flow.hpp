#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "swflow/functional.hpp"

namespace swflow {

struct FlowState {
  double t = 0.0;
  SpinorField phi;
  ConnectionField a;
};

enum class Scheme { euler, rk4 };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4;
  double cfl = 0.1;
  double t_end = 0.0;
  int snapshot_every = 10;
  /// Accept cfl > 1. Only useful to provoke instabilities on purpose.
  bool allow_unstable = false;

  bool operator==(const IntegratorConfig&) const = default;
};

/// Time-ordered snapshots of one trajectory. `steps[i]` is the integrator
/// step count at which `snapshots[i]` was recorded.
struct FlowHistory {
  ModelParams params;
  double dt = 0.0;
  int snapshot_every = 1;
  std::vector<FlowState> snapshots;
  std::vector<std::uint64_t> steps;
};

/// Raised when a step produces a non-finite value. Carries the time of the
/// last finite state and, from evolve, the history recorded so far.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& what) : Error("blowup", what), time_(time) {}
  double time() const noexcept { return time_; }
  const FlowHistory& partial() const noexcept { return partial_; }
  void set_partial(FlowHistory h) { partial_ = std::move(h); }

 private:
  double time_;
  FlowHistory partial_;
};

/// dt = cfl h^2 / (2m), cfl in (0, 1].
double cfl_dt(const Lattice& lattice, double cfl);

/// Step size used by evolve; honours allow_unstable.
double integrator_dt(const Lattice& lattice, const IntegratorConfig& config);

/// One explicit update of size dt (any finite sign). No finiteness check.
FlowState advance(const FlowState& state, const ModelParams& params, double dt, Scheme scheme);

/// advance() with dt > 0, throwing BlowUpError if the result is not finite.
FlowState step(const FlowState& state, const ModelParams& params, double dt, Scheme scheme);

/// Called for every recorded snapshot, in order.
using SnapshotObserver = std::function<void(const FlowState&, std::uint64_t step)>;

/// Integrates from initial.t to initial.t + t_end with the CFL step; the last
/// step is shortened to land on the end time. Records the initial state,
/// every snapshot_every-th step and the final state.
FlowHistory evolve(const FlowState& initial, const ModelParams& params, const IntegratorConfig& config,
                   const SnapshotObserver& observer = {});

bool all_finite(const FlowState& state);

/// Snapshot file contents: one state plus the lattice/model metadata.
struct Snapshot {
  FlowState state;
  ModelParams params;
};

/// Binary little-endian layout:
///   "SWFL" | u32 version=1 | u32 m | u32 n | f64 L | f64 t | f64 S | u32 N |
///   spinor (sites x N x (re, im) f64) | connection (sites x m f64)
std::vector<unsigned char> encode_snapshot(const FlowState& state, const ModelParams& params);
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const FlowState& state, const ModelParams& params, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

inline constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace swflow
