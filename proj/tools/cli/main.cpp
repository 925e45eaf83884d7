#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hmcert/spec_json.hpp"

namespace {

using hmcert::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--curve", cfg.curve_path, "curve spec (JSON)");
  sub->add_option("--map", cfg.map_path, "boundary parametrization spec (JSON)");
  sub->add_option("--grid-n", cfg.grid_n, "T-profile grid size (power of two)");
  sub->add_option("--tol", cfg.tol, "quadrature tolerance");
  sub->add_option("--fourier-n", cfg.fourier_n, "initial Fourier order (power of two)");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--jobs", cfg.jobs, "worker threads for sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify harmonic extensions of weak homeomorphisms onto Jordan curves"};
  app.set_version_flag("--version", std::string(hmcert::version()));
  app.require_subcommand(1);

  RunConfig cfg;
  auto* certify = app.add_subcommand("certify", "evaluate T[f] and write certificate.json, tprofile.csv, oracle.json");
  auto* render = app.add_subcommand("render", "write render.svg with the image of rings and spokes");
  auto* sweep = app.add_subcommand("sweep", "certify a grid of polar cosine curves into sweep.csv");
  auto* curve_info = app.add_subcommand("curve-info", "print curve diagnostics as JSON");
  auto* map_info = app.add_subcommand("map-info", "print parametrization diagnostics as JSON");
  for (auto* sub : {certify, render, sweep, curve_info, map_info}) add_common(sub, cfg);
  render->add_option("--rings", cfg.rings, "number of concentric circles");
  render->add_option("--spokes", cfg.spokes, "number of radii");
  render->add_option("--stroke-width", cfg.stroke_width, "stroke width in image units (0 = automatic)");
  sweep->add_option("--sweep", cfg.sweep_path, "sweep spec (JSON)")->required();
  sweep->add_flag("--timing", cfg.timing, "append a runtime column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hmcert::cli::kExitError;
  }

  if (certify->parsed()) return hmcert::cli::cmd_certify(cfg, std::cerr);
  if (render->parsed()) return hmcert::cli::cmd_render(cfg, std::cerr);
  if (sweep->parsed()) return hmcert::cli::cmd_sweep(cfg, std::cerr);
  if (curve_info->parsed()) return hmcert::cli::cmd_curve_info(cfg, std::cout, std::cerr);
  return hmcert::cli::cmd_map_info(cfg, std::cout, std::cerr);
}
