#include "relaybc/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaybc/linmap.hpp"

namespace relaybc {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double clamp(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

// Generous upper bound for the auxiliary rate variable's box.
double t_box_bound(const ReducedRates& rr, const NetworkConfig& cfg) {
  const double reach = 2.0 + std::abs(rr.A) + std::abs(rr.B) +
                       cfg.Pmax * (rr.csr + rr.csd) +
                       cfg.Pmax * rr.crd * 10.0 * cfg.L;
  return 2.0 * rr.TsW * (std::log2(reach) + 1.0) + 1.0;
}

// min of the two reduced rate constraints at a feasible point.
double case1_objective(const ReducedRates& rr, double rho, double P0,
                       double P1, LogGuard* guard) {
  return std::min(rr.r_sr(rho, P0, guard), rr.r_d(rho, P0, P1, guard));
}

ContinuousSolution infeasible_solution(ContinuousCase branch,
                                       std::string stage) {
  ContinuousSolution s;
  s.feasible = false;
  s.branch = branch;
  s.failed_stage = std::move(stage);
  return s;
}

}  // namespace

const char* to_string(ContinuousCase c) {
  switch (c) {
    case ContinuousCase::case1_highrho: return "case1-highrho";
    case ContinuousCase::case1_lowrho: return "case1-lowrho";
    case ContinuousCase::case2: return "case2";
  }
  return "?";
}

const char* to_string(IntegerRule r) {
  switch (r) {
    case IntegerRule::floor_rule: return "floor";
    case IntegerRule::ceil_rule: return "ceil";
    case IntegerRule::tie_floor: return "condition1";
    case IntegerRule::tie_ceil: return "condition2";
  }
  return "?";
}

double optimal_beta(double P0, const ChannelState& chan,
                    const NetworkConfig& cfg) {
  const double need = cfg.Pc / (cfg.eta * chan.g_sr);
  if (P0 < need * (1.0 - 1e-12)) {
    throw std::domain_error(
        "carrier power cannot sustain the backscatter circuit");
  }
  return clamp(1.0 - cfg.Pc / (cfg.eta * P0 * chan.g_sr), 0.0, 1.0);
}

namespace {

// Exact solve of the rho >= 1/2 problem at a fixed share: with rho held,
// the budget constraint is linear in (a, b) and every rate constraint is
// concave, so no convexification is needed. Returns (a, b, t).
KernelResult solve_fixed_share(double rho, const ReducedRates& rr,
                               const ChannelState& chan,
                               const NetworkConfig& cfg,
                               const KernelOptions& kopts, double t_hi,
                               double start_a, double start_b,
                               double start_t) {
  const double s = 1.0 - rho;
  const double P = cfg.P;
  ConcaveProgram pol;
  pol.dim = 3;  // (a, b, t)
  pol.lower.resize(3);
  pol.upper.resize(3);
  pol.lower << 0.0, 0.0, -t_hi;
  pol.upper << cfg.Pmax * s, cfg.Pmax * s, t_hi;
  pol.objective = [](const Eigen::VectorXd& x) { return x[2]; };
  pol.gradient = [](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g[2] = 1.0;
    return g;
  };
  ConstraintFn c1{"C1-2",
                  [P, rho](const Eigen::VectorXd& x) {
                    return x[0] - x[1] + x[1] / rho - P * (1.0 / rho - 1.0);
                  },
                  [rho](const Eigen::VectorXd&) {
                    Eigen::VectorXd g(3);
                    g << 1.0, -1.0 + 1.0 / rho, 0.0;
                    return g;
                  }};
  pol.constraints.push_back(std::move(c1));
  ConstraintFn c7{"C7-2",
                  [&chan, &cfg, s](const Eigen::VectorXd& x) {
                    return cfg.Pc * s - cfg.eta * x[0] * chan.g_sr;
                  },
                  [&chan, &cfg](const Eigen::VectorXd&) {
                    Eigen::VectorXd g(3);
                    g << -cfg.eta * chan.g_sr, 0.0, 0.0;
                    return g;
                  }};
  pol.constraints.push_back(std::move(c7));
  ConstraintFn c8{"C8-2",
                  [&rr, rho, s](const Eigen::VectorXd& x) {
                    return x[2] - rr.TsW * rho *
                                      log2_soft(rr.A + x[0] * rr.csr / s);
                  },
                  [&rr, rho, s](const Eigen::VectorXd& x) {
                    Eigen::VectorXd g(3);
                    g << -rr.TsW * rho * (rr.csr / s) *
                             dlog2_soft(rr.A + x[0] * rr.csr / s),
                        0.0, 1.0;
                    return g;
                  }};
  pol.constraints.push_back(std::move(c8));
  ConstraintFn c9{
      "C9-3",
      [&rr, rho, s](const Eigen::VectorXd& x) {
        const double e_val =
            rr.TsW * s *
            log2_soft(rr.B + (x[0] * rr.csd + x[1] * rr.crd) / s);
        const double w_val = rr.TsW * (2.0 * rho - 1.0) *
                             log2_soft(rr.B + x[0] * rr.csd / s);
        return x[2] - e_val - w_val;
      },
      [&rr, rho, s](const Eigen::VectorXd& x) {
        const double de =
            dlog2_soft(rr.B + (x[0] * rr.csd + x[1] * rr.crd) / s);
        const double dw = dlog2_soft(rr.B + x[0] * rr.csd / s);
        Eigen::VectorXd g(3);
        g << -rr.TsW * rr.csd * de -
                 rr.TsW * (2.0 * rho - 1.0) * (rr.csd / s) * dw,
            -rr.TsW * rr.crd * de, 1.0;
        return g;
      }};
  pol.constraints.push_back(std::move(c9));

  Eigen::VectorXd start(3);
  start << start_a, start_b, start_t;
  return maximize_concave(pol, kopts, start);
}

}  // namespace

ContinuousSolution solve_case1_highrho(const ChannelState& chan,
                                       const NetworkConfig& cfg,
                                       const SolverOptions& opts,
                                       std::vector<ScaIterate>* trace,
                                       LogGuard* guard) {
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  const double rho_lo = 0.5;
  const double rho_hi = 1.0 - 1.0 / (10.0 * cfg.L);
  const double t_hi = t_box_bound(rr, cfg);
  const double P = cfg.P;
  const double Pmax = cfg.Pmax;
  const double a_need = cfg.Pc / (cfg.eta * chan.g_sr);  // a >= a_need*(1-rho)

  auto project_start = [&](double rho, double a, double b) {
    ScaIterate pt;
    pt.rho = clamp(rho, rho_lo + 1e-4, rho_hi - 1e-4);
    const double s = 1.0 - pt.rho;
    const double a_min = a_need * s;
    const double a_max = std::min(Pmax * s, P * s / pt.rho);
    pt.a = clamp(a, a_min + 1e-9 * (1.0 + a_min), a_max);
    const double b_max =
        std::min(Pmax * s, P - pt.rho * pt.a / s);
    pt.b = clamp(b, 0.0, std::max(0.0, b_max));
    return pt;
  };

  ScaIterate pt = project_start(
      opts.rho0, opts.a0,
      opts.b0.value_or(P * (1.0 - opts.rho0) / 2.0));

  auto build_program = [&](const SurrogateBundle& sur) {
    ConcaveProgram prog;
    prog.dim = 4;  // (rho, a, b, t)
    prog.lower.resize(4);
    prog.upper.resize(4);
    prog.lower << rho_lo, 0.0, 0.0, -t_hi;
    prog.upper << rho_hi, Pmax, Pmax, t_hi;
    prog.objective = [](const Eigen::VectorXd& x) { return x[3]; };
    prog.gradient = [](const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      g[3] = 1.0;
      return g;
    };

    ConstraintFn c1;
    c1.name = "C1-3";
    c1.value = [&, sur](const Eigen::VectorXd& x) {
      return x[1] - x[2] + sur.f_ub(x[0], x[2]) - P * (sur.y_lb(x[0]) - 1.0);
    };
    c1.gradient = [&, sur](const Eigen::VectorXd& x) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      const double dr = x[0] - sur.pt.rho;
      g[0] = sur.pt.f_rho + 2.0 * sur.pt.f_rhorho * dr - P * sur.pt.y_rho;
      g[1] = 1.0;
      g[2] = -1.0 + sur.pt.f_b;
      return g;
    };
    prog.constraints.push_back(std::move(c1));

    ConstraintFn c6a;
    c6a.name = "C6-1a";
    c6a.value = [&](const Eigen::VectorXd& x) {
      return x[1] - Pmax * (1.0 - x[0]);
    };
    c6a.gradient = [&](const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      g[0] = Pmax;
      g[1] = 1.0;
      return g;
    };
    prog.constraints.push_back(std::move(c6a));

    ConstraintFn c6b;
    c6b.name = "C6-1b";
    c6b.value = [&](const Eigen::VectorXd& x) {
      return x[2] - Pmax * (1.0 - x[0]);
    };
    c6b.gradient = [&](const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      g[0] = Pmax;
      g[2] = 1.0;
      return g;
    };
    prog.constraints.push_back(std::move(c6b));

    ConstraintFn c7;
    c7.name = "C7-2";
    c7.value = [&](const Eigen::VectorXd& x) {
      return cfg.Pc * (1.0 - x[0]) - cfg.eta * x[1] * chan.g_sr;
    };
    c7.gradient = [&](const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      g[0] = cfg.Pc;
      g[1] = -cfg.eta * chan.g_sr;
      return g;
    };
    prog.constraints.push_back(std::move(c7));

    ConstraintFn c8;
    c8.name = "C8-4";
    c8.value = [&, sur](const Eigen::VectorXd& x) {
      return x[3] - sur.g_lb(x[0], x[1]);
    };
    c8.gradient = [&, sur](const Eigen::VectorXd& x) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      g[0] = -sur.pt.g_rho;
      g[1] = -(sur.pt.g_a + 2.0 * sur.pt.g_aa * (x[1] - sur.pt.a));
      g[3] = 1.0;
      return g;
    };
    prog.constraints.push_back(std::move(c8));

    ConstraintFn c9;
    c9.name = "C9-5";
    c9.value = [&, sur](const Eigen::VectorXd& x) {
      const double s = 1.0 - x[0];
      const double e_val =
          rr.TsW * s * log2_soft(rr.B + (x[1] * rr.csd + x[2] * rr.crd) / s);
      return x[3] - e_val - sur.w_lb(x[0], x[1]);
    };
    c9.gradient = [&, sur](const Eigen::VectorXd& x) {
      const double s = 1.0 - x[0];
      const double q = x[1] * rr.csd + x[2] * rr.crd;
      const double arg = rr.B + q / s;
      const double dl = dlog2_soft(arg);
      // e = TsW * s * log2_soft(arg); d e/d s = TsW*(log2_soft - (q/s)*dl)
      const double de_ds = rr.TsW * (log2_soft(arg) - (q / s) * dl);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
      g[0] = de_ds - sur.pt.w_rho;  // d e/d rho = -d e/d s
      g[1] = -rr.TsW * rr.csd * dl -
             (sur.pt.w_a + 2.0 * sur.pt.w_aa * (x[1] - sur.pt.a));
      g[2] = -rr.TsW * rr.crd * dl;
      g[3] = 1.0;
      return g;
    };
    prog.constraints.push_back(std::move(c9));
    return prog;
  };

  auto true_t = [&](const ScaIterate& it) {
    const double g_val = sca_g(rr, it.rho, it.a, guard);
    const double d_val = sca_e(rr, it.rho, it.a, it.b, guard) +
                         sca_w(rr, it.rho, it.a, guard);
    return std::min(g_val, d_val);
  };

  ContinuousSolution best =
      infeasible_solution(ContinuousCase::case1_highrho, "sca-initialization");
  double t_prev = -1e300;
  double best_true_t = -1e300;
  ScaIterate best_iterate{};
  int restarts = 0;
  bool converged = false;
  for (int iter = 0; iter < opts.sca_max_iter; ++iter) {
    const SurrogatePoint sp =
        make_surrogate_point(pt.rho, pt.a, pt.b, chan, cfg);
    const SurrogateBundle sur = sca_surrogates(sp);
    ConcaveProgram prog = build_program(sur);

    Eigen::VectorXd start(4);
    start << pt.rho, pt.a, pt.b,
        std::min(true_t(pt), t_hi) - 1e-3 * (1.0 + std::abs(true_t(pt)));
    const KernelResult res = maximize_concave(prog, opts.kernel, start);

    if (res.status == SolveStatus::infeasible) {
      if (iter == 0 && restarts < 5) {
        ++restarts;
        pt = project_start(0.5 * (pt.rho + 0.75),
                           0.5 * (pt.a + 0.5 * Pmax * (1.0 - pt.rho)),
                           0.5 * (pt.b + 0.5 * Pmax * (1.0 - pt.rho)));
        --iter;
        continue;
      }
      if (!best.feasible) {
        return infeasible_solution(ContinuousCase::case1_highrho,
                                   "sca-subproblem");
      }
      break;
    }

    ScaIterate next{res.x[0], res.x[1], res.x[2], 0.0};
    next.t = true_t(next);
    if (trace) trace->push_back(next);

    if (!best.feasible || next.t >= best_true_t) {
      best.feasible = true;
      best.failed_stage.clear();
      best.rho = next.rho;
      best.P0 = next.a / (1.0 - next.rho);
      best.P1 = next.b / (1.0 - next.rho);
      best.t = res.x[3];  // the solver's auxiliary rate variable
      best_true_t = next.t;
      best_iterate = next;
    }
    if (std::abs(next.t - t_prev) <=
        opts.sca_tol * std::max(1.0, std::abs(next.t))) {
      converged = true;
      break;
    }
    t_prev = next.t;
    pt = next;
  }
  if (!best.feasible) return best;

  // Value of the exact fixed-share problem; adopts the point when better.
  auto consider_share = [&](double rho) {
    const double t_start = std::min(best_true_t, t_hi) -
                           1e-3 * (1.0 + std::abs(best_true_t));
    const KernelResult res =
        solve_fixed_share(rho, rr, chan, cfg, opts.kernel, t_hi,
                          best_iterate.a, best_iterate.b, t_start);
    if (res.status == SolveStatus::infeasible) return -1e300;
    if (res.x[2] >= best.t) {
      best.rho = rho;
      best.P0 = res.x[0] / (1.0 - rho);
      best.P1 = res.x[1] / (1.0 - rho);
      best.t = res.x[2];
    }
    return res.x[2];
  };

  // Re-solving the powers at the final share recovers the optimum's
  // binding structure exactly (the iteration approaches it only in the
  // limit); the previous point stays feasible, so t never drops.
  consider_share(best.rho);

  if (!converged) {
    // The iteration ran out of budget while still moving: its step size is
    // throttled by the quadratic correction of the budget surrogate. The
    // share is a single scalar here, so finish with a direct search over
    // rho on the exact fixed-share value.
    const int coarse = 24;
    double g_lo = rho_lo, g_hi = rho_hi;
    double best_rho = best.rho;
    double best_val = best.t;
    for (int i = 0; i <= coarse; ++i) {
      const double rho = rho_lo + (rho_hi - rho_lo) * i / coarse;
      const double v = consider_share(rho);
      if (v > best_val) {
        best_val = v;
        best_rho = rho;
      }
    }
    g_lo = std::max(rho_lo, best_rho - (rho_hi - rho_lo) / coarse);
    g_hi = std::min(rho_hi, best_rho + (rho_hi - rho_lo) / coarse);
    const double golden = 0.6180339887498949;
    double x1 = g_hi - golden * (g_hi - g_lo);
    double x2 = g_lo + golden * (g_hi - g_lo);
    double f1 = consider_share(x1);
    double f2 = consider_share(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        g_lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = g_lo + golden * (g_hi - g_lo);
        f2 = consider_share(x2);
      } else {
        g_hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = g_hi - golden * (g_hi - g_lo);
        f1 = consider_share(x1);
      }
    }
  }

  best.P0 = clamp(best.P0, 0.0, Pmax);
  best.P1 = clamp(best.P1, 0.0, Pmax);
  best.beta = optimal_beta(best.P0, chan, cfg);
  best.branch = ContinuousCase::case1_highrho;
  return best;
}

ContinuousSolution solve_case1_lowrho(const ChannelState& chan,
                                      const NetworkConfig& cfg,
                                      const SolverOptions& opts,
                                      LogGuard* guard) {
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  const double rho_min = 1.0 / (10.0 * cfg.L);
  const double t_hi = t_box_bound(rr, cfg);
  const double P = cfg.P;
  const double Pmax = cfg.Pmax;

  ConcaveProgram prog;
  prog.dim = 4;  // (rho, u, v, t)
  prog.lower.resize(4);
  prog.upper.resize(4);
  prog.lower << rho_min, 0.0, 0.0, -t_hi;
  prog.upper << 0.5, Pmax, Pmax, t_hi;
  prog.objective = [](const Eigen::VectorXd& x) { return x[3]; };
  prog.gradient = [](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[3] = 1.0;
    return g;
  };

  ConstraintFn c1;
  c1.name = "C1-4";
  c1.value = [&](const Eigen::VectorXd& x) { return x[1] + x[2] - P; };
  c1.gradient = [&](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[1] = 1.0;
    g[2] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c1));

  ConstraintFn c6u;
  c6u.name = "C6-2a";
  c6u.value = [&](const Eigen::VectorXd& x) { return x[1] - Pmax * x[0]; };
  c6u.gradient = [&](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[0] = -Pmax;
    g[1] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c6u));

  ConstraintFn c6v;
  c6v.name = "C6-2b";
  c6v.value = [&](const Eigen::VectorXd& x) {
    return x[2] - Pmax * (1.0 - x[0]);
  };
  c6v.gradient = [&](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[0] = Pmax;
    g[2] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c6v));

  ConstraintFn c7;
  c7.name = "C7-3";
  c7.value = [&](const Eigen::VectorXd& x) {
    return cfg.Pc * x[0] - cfg.eta * x[1] * chan.g_sr;
  };
  c7.gradient = [&](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[0] = cfg.Pc;
    g[1] = -cfg.eta * chan.g_sr;
    return g;
  };
  prog.constraints.push_back(std::move(c7));

  ConstraintFn c8;
  c8.name = "C8-5";
  c8.value = [&](const Eigen::VectorXd& x) {
    const double arg = rr.A + x[1] * rr.csr / x[0];
    return x[3] - rr.TsW * x[0] * log2_soft(arg);
  };
  c8.gradient = [&](const Eigen::VectorXd& x) {
    const double arg = rr.A + x[1] * rr.csr / x[0];
    const double dl = dlog2_soft(arg);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[0] = -rr.TsW * log2_soft(arg) +
           rr.TsW * (x[1] * rr.csr / x[0]) * dl;
    g[1] = -rr.TsW * rr.csr * dl;
    g[3] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c8));

  ConstraintFn c9;
  c9.name = "C9-6";
  c9.value = [&](const Eigen::VectorXd& x) {
    const double arg = rr.B + (x[1] * rr.csd + x[2] * rr.crd) / x[0];
    return x[3] - rr.TsW * x[0] * log2_soft(arg);
  };
  c9.gradient = [&](const Eigen::VectorXd& x) {
    const double q = x[1] * rr.csd + x[2] * rr.crd;
    const double arg = rr.B + q / x[0];
    const double dl = dlog2_soft(arg);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g[0] = -rr.TsW * log2_soft(arg) + rr.TsW * (q / x[0]) * dl;
    g[1] = -rr.TsW * rr.csd * dl;
    g[2] = -rr.TsW * rr.crd * dl;
    g[3] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c9));

  // Strictly feasible start when one exists in closed form.
  Eigen::VectorXd start(4);
  const double rho_s = clamp(0.25, rho_min + 1e-6, 0.5 - 1e-6);
  const double u_lo = cfg.Pc * rho_s / (cfg.eta * chan.g_sr);
  const double u_hi = std::min(Pmax * rho_s, P);
  const double u_s = u_lo + 0.5 * (u_hi - u_lo);
  const double v_s =
      0.5 * std::min(Pmax * (1.0 - rho_s), std::max(0.0, P - u_s));
  start << rho_s, u_s, v_s, -0.5 * t_hi;

  const KernelResult res = maximize_concave(prog, opts.kernel, start);
  if (res.status == SolveStatus::infeasible) {
    return infeasible_solution(ContinuousCase::case1_lowrho, "lowrho-kernel");
  }

  ContinuousSolution sol;
  sol.feasible = true;
  sol.branch = ContinuousCase::case1_lowrho;
  sol.rho = res.x[0];
  sol.P0 = clamp(res.x[1] / res.x[0], 0.0, Pmax);
  sol.P1 = clamp(res.x[2] / (1.0 - res.x[0]), 0.0, Pmax);
  sol.t = res.x[3];  // the solver's auxiliary rate variable
  sol.beta = optimal_beta(sol.P0, chan, cfg);
  return sol;
}

ContinuousSolution solve_case1(const ChannelState& chan,
                               const NetworkConfig& cfg,
                               const SolverOptions& opts,
                               std::vector<ScaIterate>* trace,
                               LogGuard* guard) {
  const ContinuousSolution hi = solve_case1_highrho(chan, cfg, opts, trace, guard);
  const ContinuousSolution lo = solve_case1_lowrho(chan, cfg, opts, guard);
  if (!hi.feasible && !lo.feasible) {
    return infeasible_solution(ContinuousCase::case1_highrho,
                               "case1-both-branches");
  }
  if (!hi.feasible) return lo;
  if (!lo.feasible) return hi;
  return hi.t >= lo.t ? hi : lo;
}

ContinuousSolution solve_case2(const ChannelState& chan,
                               const NetworkConfig& cfg,
                               const SolverOptions& opts) {
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  const double rho_lo = cfg.P / cfg.Pmax;
  const double rho_hi =
      std::min(1.0, cfg.P * cfg.eta * chan.g_sr / cfg.Pc);
  if (rho_lo > rho_hi) {
    return infeasible_solution(ContinuousCase::case2, "case2-interval");
  }

  const double theta = cfg.P * rr.csd;  // P*g_sr*g_sd/noise_bw
  auto q_prime = [&](double rho) {
    const double arg = rr.B + theta / rho;
    return rr.TsW *
           (std::log2(arg) - theta / ((rr.B * rho + theta) * kLn2));
  };

  double rho_star;
  if (q_prime(rho_hi) >= 0.0) {
    rho_star = rho_hi;
  } else if (q_prime(rho_lo) <= 0.0) {
    rho_star = rho_lo;
  } else {
    rho_star = bisect_decreasing(q_prime, rho_lo, rho_hi, opts.bisect_tol);
  }

  ContinuousSolution sol;
  sol.feasible = true;
  sol.branch = ContinuousCase::case2;
  sol.rho = rho_star;
  sol.P0 = cfg.P / rho_star;
  sol.P1 = 0.0;
  sol.beta = optimal_beta(sol.P0, chan, cfg);
  sol.t = rr.r_sr(rho_star, sol.P0);
  return sol;
}

IntegerSplit integer_convert(const ContinuousSolution& cont,
                             const ChannelState& chan,
                             const NetworkConfig& cfg) {
  const double m_star = clamp(cont.rho * cfg.L, 0.0, cfg.L);
  IntegerSplit split;

  const double scale = std::max({std::abs(cont.P0), std::abs(cont.P1), 1e-30});
  const bool powers_equal = std::abs(cont.P0 - cont.P1) <= 1e-6 * scale;

  auto value_at = [&](int M) {
    Allocation alloc;
    alloc.M = M;
    alloc.N = cfg.L - M;
    alloc.P0 = cont.P0;
    alloc.P1 = cont.P1;
    alloc.beta = cont.beta;
    alloc.eigenvalues = optimal_eigenvalues(alloc.M, alloc.N);
    return rate_sum(alloc, chan, cfg).r_sum;
  };

  if (powers_equal) {
    const int mf = static_cast<int>(std::floor(m_star));
    const int mc = static_cast<int>(std::ceil(m_star));
    if (mf == mc) {
      split.M = mf;
      split.rule = IntegerRule::tie_floor;
    } else if (value_at(mf) >= value_at(mc)) {
      split.M = mf;
      split.rule = IntegerRule::tie_floor;
    } else {
      split.M = mc;
      split.rule = IntegerRule::tie_ceil;
    }
  } else if (cont.P0 > cont.P1) {
    split.M = static_cast<int>(std::floor(m_star));
    split.rule = IntegerRule::floor_rule;
  } else {
    split.M = static_cast<int>(std::ceil(m_star));
    split.rule = IntegerRule::ceil_rule;
  }
  split.M = std::max(0, std::min(cfg.L, split.M));

  // The direct-link case fixes P0 = P*L/M afterwards; flooring may push
  // that past the peak-power cap, in which case the ceiling is the
  // smallest split satisfying both the budget and the cap.
  if (cont.branch == ContinuousCase::case2) {
    const double peak_ok =
        split.M > 0 && cfg.P * cfg.L / split.M <= cfg.Pmax * (1.0 + 1e-12);
    if (!peak_ok) {
      split.M = std::min(cfg.L, static_cast<int>(std::ceil(m_star)));
      split.rule = IntegerRule::ceil_rule;
    }
  }
  split.N = cfg.L - split.M;
  return split;
}

PowerSolution reoptimize_powers(int M, int N, const ChannelState& chan,
                                const NetworkConfig& cfg,
                                const SolverOptions& opts, LogGuard* guard) {
  if (M + N != cfg.L || M < 0 || N < 0) {
    throw std::invalid_argument("split must satisfy M + N = L");
  }
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  PowerSolution out;

  if (chan.g_sd > chan.g_sr) {  // direct-link case: closed form
    if (M == 0) {
      out.failed_stage = "power-recompute: M = 0";
      return out;
    }
    // Peak cap binds instead of the budget for very small M.
    out.P0 = std::min(cfg.P * cfg.L / M, cfg.Pmax);
    out.P1 = 0.0;
    try {
      out.beta = optimal_beta(out.P0, chan, cfg);
    } catch (const std::domain_error&) {
      out.failed_stage = "power-recompute: circuit power";
      return out;
    }
    out.t = rr.r_sr(static_cast<double>(M) / cfg.L, out.P0, guard);
    out.feasible = true;
    return out;
  }

  if (M == 0) {  // no backscatter phase: nothing to transmit
    out.feasible = true;
    return out;
  }
  const double rho = static_cast<double>(M) / cfg.L;
  if (N == 0) {
    out.P0 = std::min(cfg.P, cfg.Pmax);
    out.P1 = 0.0;
    try {
      out.beta = optimal_beta(out.P0, chan, cfg);
    } catch (const std::domain_error&) {
      out.failed_stage = "power-reoptimization: circuit power";
      return out;
    }
    out.t = case1_objective(rr, 1.0, out.P0, 0.0, guard);
    out.feasible = true;
    return out;
  }

  const double t_hi = t_box_bound(rr, cfg);
  ConcaveProgram prog;
  prog.dim = 3;  // (P0, P1, t)
  prog.lower.resize(3);
  prog.upper.resize(3);
  prog.lower << 0.0, 0.0, -t_hi;
  prog.upper << cfg.Pmax, cfg.Pmax, t_hi;
  prog.objective = [](const Eigen::VectorXd& x) { return x[2]; };
  prog.gradient = [](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g[2] = 1.0;
    return g;
  };

  ConstraintFn c1;
  c1.name = "C1-5";
  c1.value = [&, rho](const Eigen::VectorXd& x) {
    return rho * x[0] + (1.0 - rho) * x[1] - cfg.P;
  };
  c1.gradient = [&, rho](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g[0] = rho;
    g[1] = 1.0 - rho;
    return g;
  };
  prog.constraints.push_back(std::move(c1));

  ConstraintFn c7;
  c7.name = "C7-1";
  c7.value = [&](const Eigen::VectorXd& x) {
    return cfg.Pc - cfg.eta * x[0] * chan.g_sr;
  };
  c7.gradient = [&](const Eigen::VectorXd&) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g[0] = -cfg.eta * chan.g_sr;
    return g;
  };
  prog.constraints.push_back(std::move(c7));

  ConstraintFn c8;
  c8.name = "C8-6";
  c8.value = [&, rho](const Eigen::VectorXd& x) {
    return x[2] - rr.TsW * rho * log2_soft(rr.A + x[0] * rr.csr);
  };
  c8.gradient = [&, rho](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    g[0] = -rr.TsW * rho * rr.csr * dlog2_soft(rr.A + x[0] * rr.csr);
    g[2] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c8));

  ConstraintFn c9;
  c9.name = "C9-7";
  c9.value = [&, rho](const Eigen::VectorXd& x) {
    double rd;
    if (rho >= 0.5) {
      rd = rr.TsW * (1.0 - rho) *
               log2_soft(rr.B + x[0] * rr.csd + x[1] * rr.crd) +
           rr.TsW * (2.0 * rho - 1.0) * log2_soft(rr.B + x[0] * rr.csd);
    } else {
      rd = rr.TsW * rho *
           log2_soft(rr.B + x[0] * rr.csd +
                     (1.0 - rho) * x[1] * rr.crd / rho);
    }
    return x[2] - rd;
  };
  c9.gradient = [&, rho](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
    if (rho >= 0.5) {
      const double d1 = dlog2_soft(rr.B + x[0] * rr.csd + x[1] * rr.crd);
      const double d2 = dlog2_soft(rr.B + x[0] * rr.csd);
      g[0] = -rr.TsW * rr.csd * ((1.0 - rho) * d1 + (2.0 * rho - 1.0) * d2);
      g[1] = -rr.TsW * (1.0 - rho) * rr.crd * d1;
    } else {
      const double d1 = dlog2_soft(rr.B + x[0] * rr.csd +
                                   (1.0 - rho) * x[1] * rr.crd / rho);
      g[0] = -rr.TsW * rho * rr.csd * d1;
      g[1] = -rr.TsW * (1.0 - rho) * rr.crd * d1;
    }
    g[2] = 1.0;
    return g;
  };
  prog.constraints.push_back(std::move(c9));

  Eigen::VectorXd start(3);
  const double p0_lo = cfg.Pc / (cfg.eta * chan.g_sr);
  const double p0_hi = std::min(cfg.Pmax, cfg.P / rho);
  const double p0_s = p0_lo + 0.6 * std::max(0.0, p0_hi - p0_lo);
  const double p1_s =
      0.5 * std::min(cfg.Pmax, std::max(0.0, (cfg.P - rho * p0_s)) /
                                   (1.0 - rho));
  start << p0_s, p1_s, -0.5 * t_hi;

  const KernelResult res = maximize_concave(prog, opts.kernel, start);
  if (res.status == SolveStatus::infeasible) {
    out.failed_stage = "power-reoptimization: kernel";
    return out;
  }
  out.P0 = clamp(res.x[0], 0.0, cfg.Pmax);
  out.P1 = clamp(res.x[1], 0.0, cfg.Pmax);
  out.beta = optimal_beta(out.P0, chan, cfg);
  out.t = case1_objective(rr, rho, out.P0, out.P1, guard);
  out.feasible = true;
  return out;
}

SolverReport allocate(const ChannelState& chan, const NetworkConfig& cfg,
                      const SolverOptions& opts) {
  cfg.validate();
  SolverReport report;
  LogGuard guard;

  if (cfg.Pc > cfg.eta * cfg.Pmax * chan.g_sr * (1.0 + 1e-12)) {
    report.failed_stage = "prc-feasibility";
    return report;
  }

  const bool case1 = chan.g_sd <= chan.g_sr;
  ContinuousSolution cont =
      case1 ? solve_case1(chan, cfg, opts, &report.sca_trace, &guard)
            : solve_case2(chan, cfg, opts);
  report.continuous = cont;
  report.iterations =
      case1 ? static_cast<int>(report.sca_trace.size()) : 1;
  if (!cont.feasible) {
    report.failed_stage = cont.failed_stage;
    report.log_guard_activations = guard.activations;
    return report;
  }

  const IntegerSplit split = integer_convert(cont, chan, cfg);
  report.integer_rule = split.rule;

  const PowerSolution pw =
      reoptimize_powers(split.M, split.N, chan, cfg, opts, &guard);
  if (!pw.feasible) {
    report.failed_stage = pw.failed_stage;
    report.log_guard_activations = guard.activations;
    return report;
  }

  report.allocation.M = split.M;
  report.allocation.N = split.N;
  report.allocation.P0 = pw.P0;
  report.allocation.P1 = pw.P1;
  report.allocation.beta = pw.beta;
  report.allocation.eigenvalues = optimal_eigenvalues(split.M, split.N);

  const auto violations = check_constraints(report.allocation, chan, cfg);
  if (!violations.empty()) {
    report.failed_stage = "constraint-audit: " + violations.front().name;
    report.log_guard_activations = guard.activations;
    return report;
  }

  report.breakdown = rate_sum(report.allocation, chan, cfg);
  report.throughput = report.breakdown.r_sum;
  report.feasible = true;
  report.log_guard_activations = guard.activations;
  return report;
}

}  // namespace relaybc
