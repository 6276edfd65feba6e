#include "swflow/flow.hpp"

#include <cmath>
#include <utility>

#include "swflow/parallel.hpp"

namespace swflow {

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "rk4") return Scheme::rk4;
  throw ConfigError("unknown integrator '" + name + "'");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::euler ? "euler" : "rk4"; }

double cfl_dt(const Lattice& lattice, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  const double h = lattice.spacing();
  return cfl * h * h / (2.0 * lattice.dim());
}

double integrator_dt(const Lattice& lattice, const IntegratorConfig& config) {
  if (config.allow_unstable && config.cfl > 1.0 && std::isfinite(config.cfl)) {
    const double h = lattice.spacing();
    return config.cfl * h * h / (2.0 * lattice.dim());
  }
  return cfl_dt(lattice, config.cfl);
}

namespace {

void reshape_like(const FlowState& src, FlowState& dst) {
  if (!dst.phi.lattice_ptr() || !(dst.phi.lattice() == src.phi.lattice()) || dst.phi.fiber() != src.phi.fiber())
    dst.phi = SpinorField(src.phi.lattice_ptr(), src.phi.fiber());
  if (!dst.a.lattice_ptr() || !(dst.a.lattice() == src.a.lattice())) dst.a = LinkField(src.a.lattice_ptr());
}

// out = base + c * v
void combine(const FlowState& base, const FlowVelocity& v, double c, FlowState& out) {
  reshape_like(base, out);
  out.t = base.t;
  const auto& bp = base.phi.values();
  const auto& vp = v.psi.values();
  auto& op = out.phi.values();
  parallel_for(bp.size(), [&](std::size_t i) { op[i] = bp[i] + c * vp[i]; });
  const auto& ba = base.a.values();
  const auto& vb = v.b.values();
  auto& oa = out.a.values();
  parallel_for(ba.size(), [&](std::size_t i) { oa[i] = ba[i] + c * vb[i]; });
}

// Stage buffers kept alive across steps of one trajectory.
class Stepper {
 public:
  Stepper(const ModelParams& params, Scheme scheme) : params_(params), scheme_(scheme) {}

  void advance(const FlowState& state, double dt, FlowState& next) {
    if (scheme_ == Scheme::euler) {
      flow_rhs(state.phi, state.a, params_, k_[0], ws_);
      combine(state, k_[0], dt, next);
      next.t = state.t + dt;
      return;
    }
    flow_rhs(state.phi, state.a, params_, k_[0], ws_);
    combine(state, k_[0], 0.5 * dt, stage_);
    flow_rhs(stage_.phi, stage_.a, params_, k_[1], ws_);
    combine(state, k_[1], 0.5 * dt, stage_);
    flow_rhs(stage_.phi, stage_.a, params_, k_[2], ws_);
    combine(state, k_[2], dt, stage_);
    flow_rhs(stage_.phi, stage_.a, params_, k_[3], ws_);

    reshape_like(state, next);
    next.t = state.t + dt;
    const double w = dt / 6.0;
    {
      const auto& b = state.phi.values();
      auto& o = next.phi.values();
      const auto &v1 = k_[0].psi.values(), &v2 = k_[1].psi.values(), &v3 = k_[2].psi.values(),
                 &v4 = k_[3].psi.values();
      parallel_for(b.size(), [&](std::size_t i) { o[i] = b[i] + w * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]); });
    }
    {
      const auto& b = state.a.values();
      auto& o = next.a.values();
      const auto &v1 = k_[0].b.values(), &v2 = k_[1].b.values(), &v3 = k_[2].b.values(), &v4 = k_[3].b.values();
      parallel_for(b.size(), [&](std::size_t i) { o[i] = b[i] + w * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]); });
    }
  }

 private:
  const ModelParams& params_;
  Scheme scheme_;
  RhsWorkspace ws_;
  FlowVelocity k_[4];
  FlowState stage_;
};

void require_positive(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step: dt must be positive and finite");
}

}  // namespace

FlowState advance(const FlowState& state, const ModelParams& params, double dt, Scheme scheme) {
  FlowState next;
  Stepper(params, scheme).advance(state, dt, next);
  return next;
}

bool all_finite(const FlowState& state) {
  for (const auto& z : state.phi.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  for (double v : state.a.values())
    if (!std::isfinite(v)) return false;
  return std::isfinite(state.t);
}

namespace {

void require_finite(const FlowState& from, const FlowState& next) {
  if (!all_finite(next)) {
    throw BlowUpError(from.t, "non-finite field values after step from t=" + std::to_string(from.t));
  }
}

}  // namespace

FlowState step(const FlowState& state, const ModelParams& params, double dt, Scheme scheme) {
  require_positive(dt);
  FlowState next = advance(state, params, dt, scheme);
  require_finite(state, next);
  return next;
}

FlowHistory evolve(const FlowState& initial, const ModelParams& params, const IntegratorConfig& config,
                   const SnapshotObserver& observer) {
  if (config.snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
  if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end)) throw ConfigError("t_end must be finite and >= 0");
  const double dt = integrator_dt(initial.phi.lattice(), config);

  FlowHistory history;
  history.params = params;
  history.dt = dt;
  history.snapshot_every = config.snapshot_every;
  history.snapshots.push_back(initial);
  history.steps.push_back(0);
  if (observer) observer(initial, 0);

  const std::uint64_t nsteps =
      config.t_end > 0.0 ? static_cast<std::uint64_t>(std::ceil(config.t_end / dt - 1e-9)) : 0;
  const double t_start = initial.t;
  FlowState state = initial;
  FlowState next;
  Stepper stepper(params, config.scheme);
  for (std::uint64_t k = 1; k <= nsteps; ++k) {
    const double t_target = k == nsteps ? t_start + config.t_end : t_start + static_cast<double>(k) * dt;
    try {
      const double h = t_target - state.t;
      require_positive(h);
      stepper.advance(state, h, next);
      require_finite(state, next);
    } catch (BlowUpError& e) {
      e.set_partial(std::move(history));
      throw;
    }
    std::swap(state, next);
    state.t = t_target;
    if (k % static_cast<std::uint64_t>(config.snapshot_every) == 0 || k == nsteps) {
      history.snapshots.push_back(state);
      history.steps.push_back(k);
      if (observer) observer(state, k);
    }
  }
  return history;
}

}  // namespace swflow
