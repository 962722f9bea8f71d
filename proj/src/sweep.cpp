#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relaybc/experiments.hpp"
#include "relaybc/linmap.hpp"

namespace relaybc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
  return out;
}

const std::vector<std::string>& solution_header() {
  static const std::vector<std::string> h = {
      "preset", "variant", "axis", "axis2",      "scheme",
      "throughput_bits", "M",  "N",  "P0_w",     "P1_w",
      "beta",   "case",    "iterations", "status"};
  return h;
}

const std::vector<std::string>& trace_header() {
  static const std::vector<std::string> h = {"preset", "variant", "iteration",
                                             "rho",    "a",       "b",
                                             "t_bits"};
  return h;
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

std::string row_to_csv(const SweepRow& r) {
  std::vector<std::string> cells;
  cells.push_back(r.preset);
  cells.push_back(r.variant);
  cells.push_back(fmt(r.axis));
  cells.push_back(fmt_opt(r.axis2));
  cells.push_back(r.scheme);
  cells.push_back(fmt(r.throughput));
  if (r.allocation) {
    cells.push_back(std::to_string(r.allocation->M));
    cells.push_back(std::to_string(r.allocation->N));
    cells.push_back(fmt(r.allocation->P0));
    cells.push_back(fmt(r.allocation->P1));
    cells.push_back(fmt(r.allocation->beta));
  } else {
    cells.insert(cells.end(), 5, std::string());
  }
  cells.push_back(r.case_label);
  cells.push_back(std::to_string(r.iterations));
  cells.push_back(r.status);
  return join_csv(cells);
}

SweepRow make_row(const std::string& preset, const std::string& variant,
                  double axis, std::optional<double> axis2,
                  const std::string& scheme, const SchemeResult& sr,
                  const ChannelState& chan, const NetworkConfig& cfg) {
  SweepRow row;
  row.preset = preset;
  row.variant = variant;
  row.axis = axis;
  row.axis2 = axis2;
  row.scheme = scheme;
  row.iterations = sr.iterations;
  if (!sr.feasible) {
    row.status = sr.note.empty() ? "infeasible" : sr.note;
    return row;
  }
  row.status = "ok";
  row.throughput = sr.throughput;
  row.allocation = sr.allocation;
  if (sr.allocation) {
    row.case_label = to_string(rate_sum(*sr.allocation, chan, cfg).case_label);
  }
  return row;
}

// Runs tasks 0..n-1 on up to `threads` workers; results are indexed so the
// output order never depends on scheduling.
void parallel_for(int n, int threads,
                  const std::function<void(int)>& task) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

NetworkConfig with_alpha1(NetworkConfig cfg, double a1) {
  cfg.alpha1 = a1;
  return cfg;
}

struct PointJob {
  NetworkConfig cfg;
  std::string variant;
  double axis = 0.0;
  std::optional<double> axis2;
  std::vector<Scheme> schemes;
};

std::vector<SweepRow> run_point_jobs(const SweepSpec& spec,
                                     const std::string& preset_name,
                                     const std::vector<PointJob>& jobs) {
  std::vector<std::vector<SweepRow>> per_job(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int i) {
    const PointJob& job = jobs[i];
    ChannelState chan;
    try {
      chan = channel_gains(job.cfg);
    } catch (const std::exception& e) {
      for (Scheme s : job.schemes) {
        SweepRow row;
        row.preset = preset_name;
        row.variant = job.variant;
        row.axis = job.axis;
        row.axis2 = job.axis2;
        row.scheme = to_string(s);
        row.status = std::string("infeasible:") + e.what();
        per_job[i].push_back(std::move(row));
      }
      return;
    }
    for (Scheme s : job.schemes) {
      const SchemeResult sr = scheme_throughput(s, chan, job.cfg, spec.solver);
      per_job[i].push_back(make_row(preset_name, job.variant, job.axis,
                                    job.axis2, to_string(s), sr, chan,
                                    job.cfg));
    }
  });
  std::vector<SweepRow> rows;
  for (auto& v : per_job) {
    for (auto& r : v) rows.push_back(std::move(r));
  }
  return rows;
}

// Exhaustive-search companion rows for the alpha1 and gap presets.
SweepRow exhaustive_row(const std::string& preset, const std::string& variant,
                        double axis, const NetworkConfig& cfg) {
  SweepRow row;
  row.preset = preset;
  row.variant = variant;
  row.axis = axis;
  row.scheme = "exhaustive";
  row.iterations = 1;
  ChannelState chan;
  try {
    chan = channel_gains(cfg);
    const SolverReport rep = exhaustive_allocate(chan, cfg);
    if (!rep.feasible) {
      row.status = "infeasible:" + rep.failed_stage;
      return row;
    }
    row.status = "ok";
    row.throughput = rep.throughput;
    row.allocation = rep.allocation;
    row.case_label = to_string(rep.breakdown.case_label);
  } catch (const std::exception& e) {
    row.status = std::string("infeasible:") + e.what();
  }
  return row;
}

SweepOutput finish_solution_sweep(std::vector<SweepRow> rows) {
  SweepOutput out;
  out.header = solution_header();
  out.csv = join_csv(out.header);
  for (const auto& r : rows) {
    out.csv += row_to_csv(r);
    if (r.status != "ok" && r.status != "derived") out.any_infeasible = true;
  }
  out.rows = std::move(rows);
  return out;
}

SweepOutput run_convergence(const SweepSpec& spec) {
  SweepOutput out;
  out.header = trace_header();
  out.csv = join_csv(out.header);
  for (double pmax : {20.0, 30.0}) {
    NetworkConfig cfg = spec.base;
    cfg.alpha1 = 2.5;
    cfg.Pmax = pmax;
    cfg.P = std::min(cfg.P, cfg.Pmax);
    const ChannelState chan = channel_gains(cfg);
    std::vector<ScaIterate> trace;
    const ContinuousSolution sol =
        solve_case1_highrho(chan, cfg, spec.solver, &trace);
    const std::string variant = "pmax=" + fmt(pmax);
    if (!sol.feasible) {
      out.any_infeasible = true;
      out.csv += join_csv({to_string(spec.preset), variant, "0", "", "", "",
                           "infeasible:" + sol.failed_stage});
      continue;
    }
    int it = 1;
    for (const auto& step : trace) {
      out.csv += join_csv({to_string(spec.preset), variant,
                           std::to_string(it++), fmt(step.rho), fmt(step.a),
                           fmt(step.b), fmt(step.t)});
    }
  }
  return out;
}

SweepOutput run_gap_trend(const SweepSpec& spec) {
  struct Variant {
    double alpha1, pmax;
  };
  const std::vector<Variant> variants = {
      {3.9, 20.0}, {4.0, 20.0}, {2.6, 30.0}, {2.9, 30.0}};
  std::vector<double> l_values = spec.values;
  if (l_values.empty()) l_values = linspace_step(20.0, 100.0, 10.0);

  std::vector<PointJob> jobs;
  for (const auto& v : variants) {
    for (double L : l_values) {
      PointJob job;
      job.cfg = with_alpha1(spec.base, v.alpha1);
      job.cfg.Pmax = v.pmax;
      job.cfg.L = static_cast<int>(std::lround(L));
      job.variant = "alpha1=" + fmt(v.alpha1) + ";pmax=" + fmt(v.pmax);
      job.axis = L;
      job.schemes = {Scheme::proposed};
      jobs.push_back(std::move(job));
    }
  }
  std::vector<SweepRow> rows =
      run_point_jobs(spec, to_string(spec.preset), jobs);

  // Companion exhaustive rows plus derived gap rows.
  std::vector<SweepRow> all;
  std::vector<SweepRow> exact(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int i) {
    exact[i] = exhaustive_row(to_string(spec.preset), jobs[i].variant,
                              jobs[i].axis, jobs[i].cfg);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    all.push_back(rows[i]);
    all.push_back(exact[i]);
    SweepRow gap;
    gap.preset = to_string(spec.preset);
    gap.variant = jobs[i].variant;
    gap.axis = jobs[i].axis;
    gap.scheme = "gap";
    if (rows[i].status == "ok" && exact[i].status == "ok") {
      gap.throughput = exact[i].throughput - rows[i].throughput;
      gap.status = "derived";
    } else {
      gap.status = "infeasible:component";
    }
    all.push_back(std::move(gap));
  }
  return finish_solution_sweep(std::move(all));
}

SweepOutput run_alpha1_compare(const SweepSpec& spec) {
  std::vector<double> axis = spec.values;
  if (axis.empty()) axis = linspace_step(2.5, 4.0, 0.1);
  std::vector<PointJob> jobs;
  for (double pmax : {20.0, 30.0}) {
    for (double a1 : axis) {
      PointJob job;
      job.cfg = with_alpha1(spec.base, a1);
      job.cfg.Pmax = pmax;
      job.variant = "pmax=" + fmt(pmax);
      job.axis = a1;
      job.schemes = {Scheme::proposed};
      jobs.push_back(std::move(job));
    }
  }
  std::vector<SweepRow> proposed =
      run_point_jobs(spec, to_string(spec.preset), jobs);
  std::vector<SweepRow> exact(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int i) {
    exact[i] = exhaustive_row(to_string(spec.preset), jobs[i].variant,
                              jobs[i].axis, jobs[i].cfg);
  });
  std::vector<SweepRow> all;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    all.push_back(proposed[i]);
    all.push_back(exact[i]);
  }
  return finish_solution_sweep(std::move(all));
}

SweepOutput run_scheme_compare(const SweepSpec& spec) {
  std::vector<double> axis = spec.values;
  if (axis.empty()) axis = linspace_step(2.5, 4.0, 0.1);
  std::vector<PointJob> jobs;
  for (double a1 : axis) {
    PointJob job;
    job.cfg = with_alpha1(spec.base, a1);
    job.variant = "";
    job.axis = a1;
    job.schemes = {Scheme::proposed, Scheme::bc_only, Scheme::relay_bc_fixed,
                   Scheme::opportunistic_relay_bc};
    jobs.push_back(std::move(job));
  }
  return finish_solution_sweep(
      run_point_jobs(spec, to_string(spec.preset), jobs));
}

SweepOutput run_related_compare(const SweepSpec& spec) {
  std::vector<double> axis = spec.values;
  if (axis.empty()) axis = linspace_step(2.5, 4.0, 0.1);
  std::vector<PointJob> jobs;
  for (int L : {spec.base.L, 1000}) {
    for (double a1 : axis) {
      PointJob job;
      job.cfg = with_alpha1(spec.base, a1);
      job.cfg.L = L;
      job.variant = "L=" + std::to_string(L);
      job.axis = a1;
      job.schemes = {Scheme::proposed};
      jobs.push_back(std::move(job));
    }
  }
  for (double a1 : axis) {
    PointJob job;
    job.cfg = with_alpha1(spec.base, a1);
    job.variant = "";
    job.axis = a1;
    job.schemes = {Scheme::related_continuous_upper};
    jobs.push_back(std::move(job));
  }
  return finish_solution_sweep(
      run_point_jobs(spec, to_string(spec.preset), jobs));
}

SweepOutput run_hap_position(const SweepSpec& spec) {
  std::vector<double> axis = spec.values;
  if (axis.empty()) axis = linspace_step(5.0, 95.0, 10.0);
  std::vector<PointJob> jobs;
  for (double pmax : {20.0, 30.0}) {
    for (double x : axis) {
      for (double y : axis) {
        PointJob job;
        job.cfg = spec.base;
        job.cfg.Pmax = pmax;
        job.cfg.P = std::min(job.cfg.P, pmax);
        job.cfg.coord_r = {x, y};
        job.variant = "pmax=" + fmt(pmax);
        job.axis = x;
        job.axis2 = y;
        job.schemes = {Scheme::proposed};
        jobs.push_back(std::move(job));
      }
    }
  }
  return finish_solution_sweep(
      run_point_jobs(spec, to_string(spec.preset), jobs));
}

SweepOutput run_subframe_split(const SweepSpec& spec) {
  std::vector<double> axis = spec.values;
  if (axis.empty()) axis = linspace_step(2.5, 4.0, 0.1);
  std::vector<PointJob> jobs;
  for (double a1 : axis) {
    PointJob job;
    job.cfg = with_alpha1(spec.base, a1);
    job.variant = "";
    job.axis = a1;
    job.schemes = {Scheme::proposed};
    jobs.push_back(std::move(job));
  }
  return finish_solution_sweep(
      run_point_jobs(spec, to_string(spec.preset), jobs));
}

SweepOutput run_custom(const SweepSpec& spec) {
  std::vector<PointJob> jobs;
  for (double v : spec.values) {
    PointJob job;
    job.cfg = spec.base;
    if (spec.axis == "alpha1") job.cfg.alpha1 = v;
    else if (spec.axis == "alpha2") job.cfg.alpha2 = v;
    else if (spec.axis == "alpha3") job.cfg.alpha3 = v;
    else if (spec.axis == "Pmax") job.cfg.Pmax = v;
    else if (spec.axis == "P") job.cfg.P = v;
    else if (spec.axis == "Pc") job.cfg.Pc = v;
    else if (spec.axis == "eta") job.cfg.eta = v;
    else if (spec.axis == "L") job.cfg.L = static_cast<int>(std::lround(v));
    else if (spec.axis == "hap_x") job.cfg.coord_r.x = v;
    else if (spec.axis == "hap_y") job.cfg.coord_r.y = v;
    else throw std::invalid_argument("unknown sweep axis: " + spec.axis);
    job.variant = "";
    job.axis = v;
    job.schemes = {Scheme::proposed};
    jobs.push_back(std::move(job));
  }
  return finish_solution_sweep(
      run_point_jobs(spec, to_string(spec.preset), jobs));
}

}  // namespace

const char* to_string(Preset p) {
  switch (p) {
    case Preset::convergence: return "fig2-convergence";
    case Preset::alpha1_compare: return "fig3-alpha1";
    case Preset::gap_trend: return "fig4-gap";
    case Preset::scheme_compare: return "fig5-schemes";
    case Preset::related_compare: return "fig6-related";
    case Preset::hap_position: return "fig7-hap-position";
    case Preset::subframe_split: return "fig8-subframes";
    case Preset::custom: return "custom";
  }
  return "?";
}

Preset preset_from_string(const std::string& s) {
  for (Preset p : {Preset::convergence, Preset::alpha1_compare,
                   Preset::gap_trend, Preset::scheme_compare,
                   Preset::related_compare, Preset::hap_position,
                   Preset::subframe_split, Preset::custom}) {
    if (s == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown preset: " + s);
}

SweepOutput run_sweep(const SweepSpec& spec) {
  spec.base.validate();
  switch (spec.preset) {
    case Preset::convergence: return run_convergence(spec);
    case Preset::alpha1_compare: return run_alpha1_compare(spec);
    case Preset::gap_trend: return run_gap_trend(spec);
    case Preset::scheme_compare: return run_scheme_compare(spec);
    case Preset::related_compare: return run_related_compare(spec);
    case Preset::hap_position: return run_hap_position(spec);
    case Preset::subframe_split: return run_subframe_split(spec);
    case Preset::custom: return run_custom(spec);
  }
  throw std::logic_error("unreachable preset");
}

long audit_csv_rows(const std::vector<SweepRow>& rows,
                    const NetworkConfig& base, double rel_tol) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    if (r.status != "ok" || !r.allocation) continue;
    NetworkConfig cfg = base;
    // Rebuild the per-row scenario exactly as the sweep constructed it.
    if (!r.variant.empty()) {
      std::istringstream vs(r.variant);
      std::string tok;
      while (std::getline(vs, tok, ';')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const double val = std::stod(tok.substr(eq + 1));
        if (key == "pmax") cfg.Pmax = val;
        if (key == "alpha1") cfg.alpha1 = val;
        if (key == "L") cfg.L = static_cast<int>(std::lround(val));
      }
    }
    if (r.preset == "fig7-hap-position") {
      cfg.coord_r = {r.axis, r.axis2.value_or(cfg.coord_r.y)};
      cfg.P = std::min(cfg.P, cfg.Pmax);
    } else if (r.preset != "custom" && r.preset != "fig4-gap") {
      cfg.alpha1 = r.axis;
    } else if (r.preset == "fig4-gap") {
      cfg.L = static_cast<int>(std::lround(r.axis));
    }
    const ChannelState chan = channel_gains(cfg);
    const double again = rate_sum(*r.allocation, chan, cfg).r_sum;
    if (std::abs(again - r.throughput) >
        rel_tol * std::max(1.0, std::abs(r.throughput))) {
      return static_cast<long>(i);
    }
  }
  return -1;
}

}  // namespace relaybc
