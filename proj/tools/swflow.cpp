#include <iostream>

#include <CLI11.hpp>

#include "swflow/commands.hpp"
#include "swflow/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gradient flow of the Seiberg-Witten functional on a flat lattice torus"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for site sweeps")->check(CLI::Range(1, 256));

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "evolve the configured initial data");
  run->add_option("--config", config_path, "INI configuration file")->required();
  run->add_option("--out", out_dir, "output directory (overrides [output] dir)");

  swflow::DiagnoseOptions diag;
  std::vector<double> x0;
  double t0 = 0.0;
  double delta = 0.0;
  auto* diagnose = app.add_subcommand("diagnose", "analyse a stored history");
  diagnose->add_option("kind", diag.kind, "monotonicity | detect | profile | rescale")
      ->required()
      ->check(CLI::IsMember({"monotonicity", "detect", "profile", "rescale"}));
  diagnose->add_option("--history", diag.history, "directory holding snap_<step>.swfl files")->required();
  diagnose->add_option("--out", diag.out, "output directory (defaults to the history)");
  auto* x0_opt = diagnose->add_option("--x0", x0, "probe point, m coordinates")->delimiter(',');
  auto* t0_opt = diagnose->add_option("--t0", t0, "probe time / snapshot time");
  diagnose->add_option("--radii", diag.radii, "radius grid")->delimiter(',');
  auto* delta_opt = diagnose->add_option("--delta", delta, "detector threshold");
  diagnose->add_option("--ratio", diag.ratio, "rescaling ratio k");

  std::string check_kind;
  auto* check = app.add_subcommand("check", "self-checks on the configured lattice");
  check->add_option("kind", check_kind, "clifford | gauge | gradient")
      ->required()
      ->check(CLI::IsMember({"clifford", "gauge", "gradient"}));
  check->add_option("--config", config_path, "INI configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[usage]: " << e.what() << '\n';
    return swflow::kExitConfiguration;
  }
  swflow::set_thread_count(threads);

  return swflow::guarded(
      [&]() -> int {
        if (*run) {
          const auto config = swflow::load_config(config_path);
          const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
          if (dir.empty()) throw swflow::ConfigError("no output directory: pass --out or set [output] dir");
          return swflow::run_command(config, dir, std::cout);
        }
        if (*diagnose) {
          if (*x0_opt) diag.x0 = x0;
          if (*t0_opt) diag.t0 = t0;
          if (*delta_opt) diag.delta = delta;
          return swflow::diagnose_command(diag, std::cout);
        }
        return swflow::check_command(check_kind, swflow::load_config(config_path), std::cout);
      },
      std::cerr);
}
