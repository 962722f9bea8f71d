#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relaybc/experiments.hpp"
#include "relaybc/json_io.hpp"
#include "relaybc/validate.hpp"

namespace {

// exit codes: 0 ok, 1 error, 2 at least one infeasible point
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

relaybc::NetworkConfig load_or_default(const std::string& path) {
  if (path.empty()) return relaybc::NetworkConfig::reference();
  return relaybc::load_config(path);
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output: " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relaybc: throughput-maximizing resource allocation for a "
               "relay-enabled backscatter network"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string preset_name = "custom";
  std::string csv_path;
  std::string style_name = "auto";
  std::string axis_name;
  std::vector<double> axis_values;
  std::uint64_t seed = 42;
  int threads = 1;

  bool exhaustive = false;
  std::string per_split_path;
  auto* solve = app.add_subcommand("solve", "solve one scenario, emit JSON");
  solve->add_option("--config", config_path, "JSON scenario file");
  solve->add_option("--out", out_path, "output path (default stdout)");
  solve->add_flag("--exhaustive", exhaustive,
                  "solve by exhaustive split enumeration instead");
  solve->add_option("--per-split-out", per_split_path,
                    "with --exhaustive: CSV of every enumerated split");

  auto* sweep = app.add_subcommand("sweep", "run a preset sweep, emit CSV");
  sweep->add_option("--config", config_path, "JSON scenario file");
  sweep->add_option("--preset", preset_name,
                    "fig2-convergence | fig3-alpha1 | fig4-gap | "
                    "fig5-schemes | fig6-related | fig7-hap-position | "
                    "fig8-subframes | custom");
  sweep->add_option("--axis", axis_name, "config field for custom sweeps");
  sweep->add_option("--values", axis_values, "axis values for custom sweeps");
  sweep->add_option("--out", out_path, "CSV output path");
  sweep->add_option("--threads", threads, "worker threads");
  sweep->add_option("--seed", seed, "unused by sweeps; kept for parity");

  auto* plot = app.add_subcommand("plot", "render one of this tool's CSVs");
  plot->add_option("--in", csv_path, "CSV produced by `sweep`")->required();
  plot->add_option("--style", style_name, "auto | line | scatter | heatmap");
  plot->add_option("--out", out_path, "SVG output path")->required();

  auto* validate = app.add_subcommand("validate", "run the invariant suites");
  validate->add_option("--seed", seed, "RNG seed for the randomized suites");
  validate->add_option("--out", out_path, "optional report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const relaybc::NetworkConfig cfg = load_or_default(config_path);
      const relaybc::ChannelState chan = relaybc::channel_gains(cfg);
      relaybc::SolverReport rep;
      if (exhaustive) {
        std::vector<relaybc::PerSplitResult> table;
        rep = relaybc::exhaustive_allocate(chan, cfg, {}, &table);
        if (!per_split_path.empty()) {
          std::string csv = "M,N,feasible,P0_w,P1_w,beta,throughput_bits\n";
          char line[160];
          for (const auto& row : table) {
            std::snprintf(line, sizeof(line),
                          "%d,%d,%d,%.12g,%.12g,%.12g,%.12g\n", row.M, row.N,
                          row.feasible ? 1 : 0, row.P0, row.P1, row.beta,
                          row.throughput);
            csv += line;
          }
          write_text(per_split_path, csv);
        }
      } else {
        rep = relaybc::allocate(chan, cfg);
      }
      write_text(out_path, relaybc::report_to_json(rep, cfg).dump(2) + "\n");
      return rep.feasible ? kExitOk : kExitInfeasible;
    }

    if (sweep->parsed()) {
      relaybc::SweepSpec spec;
      spec.preset = relaybc::preset_from_string(preset_name);
      spec.base = load_or_default(config_path);
      spec.axis = axis_name;
      spec.values = axis_values;
      spec.threads = threads;
      if (spec.preset == relaybc::Preset::custom && axis_name.empty()) {
        std::cerr << "custom sweeps need --axis and --values\n";
        return kExitError;
      }
      const relaybc::SweepOutput out = relaybc::run_sweep(spec);
      write_text(out_path, out.csv);
      return out.any_infeasible ? kExitInfeasible : kExitOk;
    }

    if (plot->parsed()) {
      relaybc::PlotStyle style = relaybc::PlotStyle::automatic;
      if (style_name == "line") style = relaybc::PlotStyle::line;
      else if (style_name == "scatter") style = relaybc::PlotStyle::scatter;
      else if (style_name == "heatmap") style = relaybc::PlotStyle::heatmap;
      else if (style_name != "auto") {
        std::cerr << "unknown style: " << style_name << "\n";
        return kExitError;
      }
      relaybc::emit_plot(csv_path, style, out_path);
      return kExitOk;
    }

    if (validate->parsed()) {
      const auto suites = relaybc::run_validation_suites(seed);
      std::string report;
      bool all_pass = true;
      for (const auto& s : suites) {
        report += std::string(s.pass ? "[PASS] " : "[FAIL] ") + s.name;
        if (!s.detail.empty()) report += " (" + s.detail + ")";
        report += "\n";
        all_pass = all_pass && s.pass;
      }
      std::cout << report;
      if (!out_path.empty()) write_text(out_path, report);
      return all_pass ? kExitOk : kExitError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
