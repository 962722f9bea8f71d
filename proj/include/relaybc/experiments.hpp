#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaybc/allocator.hpp"
#include "relaybc/oracle.hpp"

namespace relaybc {

enum class Scheme {
  proposed,
  bc_only,
  relay_bc_fixed,
  opportunistic_relay_bc,
  related_continuous_upper,
};

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SchemeResult {
  bool feasible = false;
  std::string note;
  double throughput = 0.0;
  // Concrete allocation when the scheme produces one (the continuous
  // upper-bound comparator does not).
  std::optional<Allocation> allocation;
  int iterations = 0;
};

// Throughput of one comparison scheme on a single scenario.
SchemeResult scheme_throughput(Scheme scheme, const ChannelState& chan,
                               const NetworkConfig& cfg,
                               const SolverOptions& opts = {});

/// Bundled experiment presets. The string ids are the CLI-facing names.
enum class Preset {
  convergence,     // "fig2-convergence": SCA iterate traces
  alpha1_compare,  // "fig3-alpha1": three-step vs exhaustive over alpha1
  gap_trend,       // "fig4-gap": relaxation gap over the block size
  scheme_compare,  // "fig5-schemes": fixed-time baselines over alpha1
  related_compare, // "fig6-related": continuous upper-bound comparator
  hap_position,    // "fig7-hap-position": throughput over the HAP grid
  subframe_split,  // "fig8-subframes": M/N split over alpha1
  custom,          // caller-provided axis
};

const char* to_string(Preset p);
Preset preset_from_string(const std::string& s);

struct SweepSpec {
  Preset preset = Preset::custom;
  std::string axis;            // config field swept in custom mode
  std::vector<double> values;  // axis values (custom mode; presets fill it)
  NetworkConfig base;          // already carries any overrides
  SolverOptions solver;
  int threads = 1;
  std::string out_path;
};

struct SweepRow {
  std::string preset;
  std::string variant;  // e.g. "pmax=20" or "L=1000"
  double axis = 0.0;
  std::optional<double> axis2;  // second coordinate (HAP grid)
  std::string scheme;
  double throughput = 0.0;
  std::optional<Allocation> allocation;
  std::string case_label;
  int iterations = 0;
  std::string status;  // "ok" or "infeasible:<stage>"
};

struct SweepOutput {
  std::vector<std::string> header;     // column names of the emitted CSV
  std::vector<SweepRow> rows;          // solution rows (empty for traces)
  std::string csv;                     // full file content
  bool any_infeasible = false;
};

// Runs a preset (or custom axis) sweep. Deterministic: given the same spec
// and config the CSV is byte-identical, regardless of the thread count.
SweepOutput run_sweep(const SweepSpec& spec);

// Re-derives each solution row's throughput from its own allocation columns
// and compares; returns the first inconsistent row index or -1.
long audit_csv_rows(const std::vector<SweepRow>& rows,
                    const NetworkConfig& base, double rel_tol = 1e-9);

enum class PlotStyle { automatic, line, scatter, heatmap };

// Renders one of this tool's CSV files as an SVG. Throws
// std::runtime_error on malformed input.
void emit_plot(const std::string& csv_path, PlotStyle style,
               const std::string& out_svg);

}  // namespace relaybc
