#include "swflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <regex>

#include "swflow/clifford.hpp"

namespace swflow {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == "configuration") return kExitConfiguration;
  if (k == "blowup") return kExitBlowUp;
  if (k == "format") return kExitFormat;
  if (k == "domain") return kExitDomain;
  if (k == "precondition") return kExitPrecondition;
  if (k == "shape") return kExitShape;
  if (k == "unsupported") return kExitUnsupported;
  return kExitFailure;
}

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

std::string snapshot_name(std::uint64_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snap_%08llu.swfl", static_cast<unsigned long long>(step));
  return buf;
}

void write_energy_csv(const FlowHistory& history, const fs::path& path) {
  auto out = open_output(path);
  out << "step,t,sw,sup_phi,dsw_dt,identity_residual\n";
  for (const auto& r : diagnostics::energy_records(history)) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.sw) << ',' << format_double(r.sup_phi)
        << ',' << (r.dsw_dt ? format_double(*r.dsw_dt) : "") << ','
        << (r.identity_residual ? format_double(*r.identity_residual) : "") << '\n';
  }
}

void write_summary(const RunConfig& config, const FlowHistory& history, const std::string& status,
                   const fs::path& path) {
  auto out = open_output(path);
  out << "status = " << status << '\n';
  out << "snapshots = " << history.snapshots.size() << '\n';
  if (!history.snapshots.empty()) {
    const auto& first = history.snapshots.front();
    const auto& last = history.snapshots.back();
    out << "t_final = " << format_double(last.t) << '\n';
    out << "dt = " << format_double(history.dt) << '\n';
    out << "sw_initial = " << format_double(sw_functional(first.phi, first.a, history.params)) << '\n';
    out << "sw_final = " << format_double(sw_functional(last.phi, last.a, history.params)) << '\n';
    const auto mp = diagnostics::max_principle_check(history);
    out << "sup_bound = " << format_double(mp.bound) << '\n';
    out << "sup_max = " << format_double(mp.max_sup) << '\n';
    out << "max_principle = " << (mp.pass ? "pass" : "fail") << '\n';
    if (history.snapshots.size() >= 2) {
      std::size_t increases = 0;
      for (const auto& r : diagnostics::energy_records(history)) increases += r.increase ? 1 : 0;
      out << "energy_increases = " << increases << '\n';
    }
  }
  out << "\n# configuration\n" << serialize_config(config);
}

const FlowState& pick_snapshot(const FlowHistory& history, const std::optional<double>& t) {
  if (!t) return history.snapshots.back();
  for (const auto& s : history.snapshots) {
    if (std::abs(s.t - *t) <= 1e-12 * std::max(1.0, std::abs(*t))) return s;
  }
  throw DomainError("no snapshot at t=" + format_double(*t));
}

Point default_center(const Lattice& lat) { return Point(static_cast<std::size_t>(lat.dim()), 0.5 * lat.length()); }

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error[" << e.kind() << "]: " << one_line(e.what()) << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error[internal]: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
}

int run_command(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const ModelParams params = config_params(config);
  auto [phi, a] = make_initial(config.init, params.lattice, params.N);
  // validates cfl before anything touches the disk
  (void)integrator_dt(*params.lattice, config.flow);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw ConfigError("cannot create output directory " + out_dir.string());
  static const std::regex snap_re(R"(snap_\d+\.swfl)");
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (std::regex_match(entry.path().filename().string(), snap_re)) fs::remove(entry.path());
  }

  const FlowState initial{0.0, std::move(phi), std::move(a)};
  const auto observer = [&](const FlowState& s, std::uint64_t step) {
    write_snapshot(s, params, out_dir / snapshot_name(step));
  };

  FlowHistory history;
  try {
    history = evolve(initial, params, config.flow, observer);
  } catch (const BlowUpError& e) {
    write_energy_csv(e.partial(), out_dir / "energy.csv");
    write_summary(config, e.partial(), "blowup at t=" + format_double(e.time()), out_dir / "summary.txt");
    log << "blow-up after t=" << format_double(e.time()) << "; " << e.partial().snapshots.size()
        << " snapshots kept in " << out_dir.string() << '\n';
    throw;
  }
  write_energy_csv(history, out_dir / "energy.csv");
  write_summary(config, history, "ok", out_dir / "summary.txt");
  const auto& first = history.snapshots.front();
  const auto& last = history.snapshots.back();
  log << "snapshots=" << history.snapshots.size() << " t_final=" << format_double(last.t)
      << " sw_initial=" << format_double(sw_functional(first.phi, first.a, params))
      << " sw_final=" << format_double(sw_functional(last.phi, last.a, params)) << '\n';
  return kExitOk;
}

FlowHistory load_history(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw PreconditionError("history directory " + dir.string() + " does not exist");
  static const std::regex snap_re(R"(snap_(\d+)\.swfl)");
  std::vector<std::pair<std::uint64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, snap_re)) files.emplace_back(std::stoull(m[1].str()), entry.path());
  }
  if (files.empty()) throw PreconditionError("no snapshots in " + dir.string());
  std::sort(files.begin(), files.end());

  FlowHistory history;
  for (const auto& [step, path] : files) {
    Snapshot snap = read_snapshot(path);
    if (history.snapshots.empty()) {
      history.params = snap.params;
    } else {
      const auto& prev = history.snapshots.back();
      if (!(snap.state.phi.lattice() == prev.phi.lattice()) || snap.params.N != history.params.N ||
          snap.params.S != history.params.S) {
        throw FormatError(path.string() + " does not match the lattice or model of the other snapshots");
      }
      if (!(snap.state.t > prev.t)) throw FormatError("snapshot times are not increasing at " + path.string());
      // share one lattice object across the history
      SpinorField phi(prev.phi.lattice_ptr(), snap.params.N);
      LinkField a(prev.a.lattice_ptr());
      phi.values() = std::move(snap.state.phi.values());
      a.values() = std::move(snap.state.a.values());
      snap.state.phi = std::move(phi);
      snap.state.a = std::move(a);
    }
    history.snapshots.push_back(std::move(snap.state));
    history.steps.push_back(step);
  }
  return history;
}

int diagnose_command(const DiagnoseOptions& o, std::ostream& log) {
  const FlowHistory history = load_history(o.history);
  const Lattice& lat = history.snapshots.front().phi.lattice();
  const fs::path out_dir = o.out.empty() ? o.history : o.out;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw FormatError("cannot create " + out_dir.string() + ": " + ec.message());
  const Point x0 = o.x0 ? *o.x0 : default_center(lat);
  if (static_cast<int>(x0.size()) != lat.dim()) throw DomainError("--x0 needs m coordinates");
  const double L = lat.length();

  if (o.kind == "monotonicity") {
    const double t0 = o.t0 ? *o.t0 : history.snapshots.back().t;
    std::vector<double> radii = o.radii;
    if (radii.empty()) {
      const double span = t0 - history.snapshots.front().t;
      const double cap = std::min({0.5 * L, 0.5 * std::sqrt(std::max(t0, 0.0)), 0.5 * std::sqrt(std::max(span, 0.0))});
      radii = {0.5 * cap, 0.75 * cap, cap};
    }
    const auto table = diagnostics::monotonicity_scan(history, x0, t0, radii);
    auto out = open_output(out_dir / "monotonicity.csv");
    out << "R,Phi,F,fitted_a,fitted_c\n";
    for (const auto& r : table.rows) {
      out << format_double(r.R) << ',' << format_double(r.Phi) << ',' << format_double(r.F) << ','
          << format_double(table.fitted_a) << ',' << format_double(table.fitted_c) << '\n';
    }
    log << "rows=" << table.rows.size() << " sw0=" << format_double(table.sw0);
    if (table.attainable) {
      log << " fitted_a=" << format_double(table.fitted_a) << " fitted_c=" << format_double(table.fitted_c) << '\n';
    } else {
      log << " fit=unattainable\n";
    }
    return kExitOk;
  }

  if (o.kind == "detect") {
    const FlowState& snap = pick_snapshot(history, o.t0);
    auto config = diagnostics::default_detector_config(lat);
    if (o.delta) config.delta = *o.delta;
    if (!o.radii.empty()) {
      config.radii = o.radii;
      config.R1 = lat.injectivity_radius();
    }
    const auto scan = diagnostics::detect_singular_set(snap, config, history.params);
    const double R = *std::min_element(config.radii.begin(), config.radii.end());
    auto report = diagnostics::vitali_cover(lat, scan.flagged, R);
    const auto& s0 = history.snapshots.front();
    report.reference_bound =
        diagnostics::covering_reference_bound(lat.dim(), sw_functional(s0.phi, s0.a, history.params), config.delta);

    auto out = open_output(out_dir / "detector.csv");
    out << "site";
    for (int k = 0; k < lat.dim(); ++k) out << ",x" << k;
    for (double r : scan.radii) out << ",E_" << format_double(r);
    out << ",flagged\n";
    const std::size_t nr = scan.radii.size();
    std::size_t next_flag = 0;
    for (std::size_t x = 0; x < lat.site_count(); ++x) {
      out << x;
      for (double p : lat.position(x)) out << ',' << format_double(p);
      for (std::size_t r = 0; r < nr; ++r) out << ',' << format_double(scan.energies[x * nr + r]);
      const bool flagged = next_flag < scan.flagged.size() && scan.flagged[next_flag] == x;
      if (flagged) ++next_flag;
      out << ',' << (flagged ? 1 : 0) << '\n';
    }
    log << "t=" << format_double(snap.t) << " delta=" << format_double(config.delta)
        << " flagged=" << scan.flagged.size() << " centers=" << report.centers.size()
        << " cover_R=" << format_double(R) << " hausdorff_sum=" << format_double(report.hausdorff_sum)
        << " reference_bound=" << format_double(report.reference_bound) << '\n';
    return kExitOk;
  }

  if (o.kind == "profile") {
    const FlowState& snap = pick_snapshot(history, o.t0);
    const std::vector<double> radii = o.radii.empty() ? std::vector<double>{L / 16, L / 8, L / 4, L / 2} : o.radii;
    const auto rows = diagnostics::curvature_scaling_profile(snap.phi, snap.a, x0, radii, history.params);
    auto out = open_output(out_dir / "profile.csv");
    out << "r,value\n";
    for (const auto& r : rows) out << format_double(r.r) << ',' << format_double(r.value) << '\n';
    log << "t=" << format_double(snap.t) << " rows=" << rows.size() << '\n';
    return kExitOk;
  }

  if (o.kind == "rescale") {
    const FlowState& snap = pick_snapshot(history, o.t0);
    const std::size_t site = lat.nearest_site(x0);
    const auto r = diagnostics::rescale_blowup(history, site, snap.t, o.ratio);
    const ModelParams params{history.params.S, r.lattice, history.params.N};
    write_snapshot(FlowState{0.0, r.phi, r.a}, params, out_dir / "rescaled.swfl");
    log << "t=" << format_double(snap.t) << " site=" << site << " k=" << o.ratio
        << " R_n=" << format_double(r.scale) << " sup_f=" << format_double(norms(curvature(r.a)).sup) << '\n';
    return kExitOk;
  }

  throw ConfigError("unknown diagnostic '" + o.kind + "' (monotonicity, detect, profile, rescale)");
}

int check_command(const std::string& kind, const RunConfig& config, std::ostream& log) {
  if (kind == "clifford") {
    const auto rep = clifford::gamma_matrices(config.m);
    const double defect = clifford::anticommutator_defect(rep);
    double herm = 0.0;
    for (const auto& g : rep.gammas) herm = std::max(herm, (g - g.adjoint()).cwiseAbs().maxCoeff());
    log << "m=" << rep.m << " N=" << rep.N << " anticommutator_defect=" << format_double(defect)
        << " hermiticity_defect=" << format_double(herm);
    if (config.m % 2 == 0) {
      const auto P = clifford::chirality_projector(rep);
      log << " chirality_rank=" << format_double(P.trace().real());
    }
    log << " fiber_dim=" << resolved_fiber(config) << '\n';
    return defect <= 1e-13 && herm <= 1e-13 ? kExitOk : kExitFailure;
  }

  const ModelParams params = config_params(config);
  const auto [phi, a] = make_initial(config.init, params.lattice, params.N);

  if (kind == "gauge") {
    const Lattice& lat = *params.lattice;
    SiteScalarField chi(params.lattice);
    std::mt19937_64 rng(config.init.seed ^ 0x9e3779b97f4a7c15ULL);
    for (auto& v : chi.values()) v = 2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5);
    const auto [gphi, ga] = gauge_transform(phi, a, chi);
    const double sw = sw_functional(phi, a, params);
    const double gsw = sw_functional(gphi, ga, params);
    const double sw_err = std::abs(gsw - sw) / std::max(1.0, std::abs(sw));
    double modulus_err = 0.0;
    for (std::size_t x = 0; x < lat.site_count(); ++x) {
      modulus_err = std::max(modulus_err, std::abs(std::sqrt(gphi.norm2_at(x)) - std::sqrt(phi.norm2_at(x))));
    }
    const PlaquetteField f = curvature(a);
    const PlaquetteField gf = curvature(ga);
    double f_err = 0.0;
    for (std::size_t i = 0; i < f.values().size(); ++i) f_err = std::max(f_err, std::abs(gf.values()[i] - f.values()[i]));
    const double f_scale = std::max(1.0, norms(f).sup);
    log << "sw_rel_err=" << format_double(sw_err) << " modulus_err=" << format_double(modulus_err)
        << " curvature_err=" << format_double(f_err / f_scale) << '\n';
    return sw_err <= 1e-12 && modulus_err <= 1e-12 && f_err <= 1e-12 * f_scale ? kExitOk : kExitFailure;
  }

  if (kind == "gradient") {
    const auto report = gradient_check(phi, a, params, 1e-4, config.init.seed);
    log << "samples=" << report.samples << " max_rel_err=" << format_double(report.max_rel_err)
        << " max_abs_err=" << format_double(report.max_abs_err) << '\n';
    return report.max_rel_err <= 1e-6 ? kExitOk : kExitFailure;
  }

  throw ConfigError("unknown check '" + kind + "' (clifford, gauge, gradient)");
}

}  // namespace swflow
