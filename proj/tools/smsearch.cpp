// smsearch: run, batch and plot the multi-UAV set-membership search.
#include <iostream>

#include "CLI11.hpp"
#include "smsearch/report.hpp"
#include "smsearch/runner.hpp"

using namespace smsearch;

int main(int argc, char** argv) {
  CLI::App app{"Set-membership multi-UAV target search"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "one simulation");
  run->add_option("--config", ro.config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", ro.seed, "run seed")->required();
  run->add_option("--out", ro.out_dir, "output directory")->required();
  run->add_flag("--dump-perception", ro.dump_perception, "per-frame images and sets");
  run->add_flag("--dump-mpc", ro.dump_mpc, "score table of every planning round");
  run->add_option("--snapshot-every", ro.snapshot_every, "estimate snapshot period in steps")->check(CLI::NonNegativeNumber);

  std::string b_config, b_seeds, b_out;
  auto* batch = app.add_subcommand("batch", "several seeds and their aggregate");
  batch->add_option("--config", b_config, "scenario JSON")->required()->check(CLI::ExistingFile);
  batch->add_option("--seeds", b_seeds, "seed range a..b")->required();
  batch->add_option("--out", b_out, "output directory")->required();

  std::string p_out;
  auto* plot = app.add_subcommand("plot", "SVG charts from aggregate.csv");
  plot->add_option("--out", p_out, "batch output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_one(ro, std::cerr);
    if (*batch) return run_batch(b_config, parse_seed_range(b_seeds), b_out, std::cerr);
    if (*plot) {
      for (const auto& f : render_plots(p_out)) std::cout << p_out << "/" << f << '\n';
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
