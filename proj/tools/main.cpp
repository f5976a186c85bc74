#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "rydsense/cli.hpp"
#include "rydsense/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rydsense: dressed-Rydberg transduction, chiral mirror shifts, Ramsey readout"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool json = false;
  unsigned threads = 0;  // 0 = hardware concurrency

  auto* scan = app.add_subcommand("dressed-scan",
                                  "scan the detuning plane and export shift/fom maps as CSV");
  scan->add_option("--config", config_path, "run configuration (JSON)")->required();
  scan->add_option("--out", out_path, "output CSV path")->required();
  scan->add_flag("--json", json, "machine-readable summary on stdout");
  scan->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* chiral = app.add_subcommand("chiral-shift",
                                    "chiral mirror shift report (closed form, resonant, ratios)");
  chiral->add_option("--config", config_path, "run configuration (JSON)")->required();
  chiral->add_flag("--json", json, "emit one flat JSON object");

  auto* ramsey = app.add_subcommand("ramsey", "simulate the echo sequence and export the trace");
  ramsey->add_option("--config", config_path, "run configuration (JSON)")->required();
  ramsey->add_option("--out", out_path, "output CSV path")->required();
  ramsey->add_flag("--json", json, "machine-readable summary on stdout");

  auto* green = app.add_subcommand("verify-green",
                                   "cross-check the Green-tensor quadrature against the closed form");
  green->add_option("--config", config_path, "run configuration (JSON)")->required();
  green->add_flag("--json", json, "machine-readable summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  return rydsense::cli::guarded(std::cerr, [&]() {
    const rydsense::RunConfig cfg = rydsense::RunConfig::load(config_path);
    if (scan->parsed())
      return rydsense::cli::cmd_dressed_scan(cfg, out_path, json, threads, std::cout, std::cerr);
    if (chiral->parsed()) return rydsense::cli::cmd_chiral_shift(cfg, json, std::cout, std::cerr);
    if (ramsey->parsed())
      return rydsense::cli::cmd_ramsey(cfg, out_path, json, std::cout, std::cerr);
    return rydsense::cli::cmd_verify_green(cfg, json, std::cout, std::cerr);
  });
}
