#include "relaybc/convex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaybc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool strictly_inside_box(const ConcaveProgram& prog, const VectorXd& x) {
  for (int i = 0; i < prog.dim; ++i) {
    if (!(x[i] > prog.lower[i] && x[i] < prog.upper[i])) return false;
  }
  return true;
}

bool strictly_feasible(const ConcaveProgram& prog, const VectorXd& x) {
  if (!strictly_inside_box(prog, x)) return false;
  for (const auto& c : prog.constraints) {
    const double v = c.value(x);
    if (!(v < 0.0) || !std::isfinite(v)) return false;
  }
  return true;
}

// Central-difference Hessian of a function given through its gradient.
MatrixXd fd_hessian(const std::function<VectorXd(const VectorXd&)>& grad,
                    const VectorXd& x) {
  const int n = static_cast<int>(x.size());
  MatrixXd H(n, n);
  VectorXd xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    H.col(j) = (grad(xp) - grad(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return 0.5 * (H + H.transpose());
}

void check_gradient(const std::function<double(const VectorXd&)>& f,
                    const std::function<VectorXd(const VectorXd&)>& grad,
                    const VectorXd& x, const std::string& label) {
  const VectorXd g = grad(x);
  VectorXd xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
    const double scale = std::max({1.0, std::abs(fd), std::abs(g[i])});
    if (std::abs(fd - g[i]) > 1e-4 * scale) {
      throw std::logic_error("gradient check failed for " + label +
                             " at coordinate " + std::to_string(i));
    }
  }
}

struct BarrierEval {
  double value = std::numeric_limits<double>::infinity();
  bool ok = false;
};

BarrierEval barrier_value(const ConcaveProgram& prog, double mu,
                          const VectorXd& x) {
  BarrierEval out;
  if (!strictly_inside_box(prog, x)) return out;
  double v = -prog.objective(x);
  if (!std::isfinite(v)) return out;
  for (const auto& c : prog.constraints) {
    const double g = c.value(x);
    if (!(g < 0.0) || !std::isfinite(g)) return out;
    v -= mu * std::log(-g);
  }
  for (int i = 0; i < prog.dim; ++i) {
    v -= mu * (std::log(x[i] - prog.lower[i]) + std::log(prog.upper[i] - x[i]));
  }
  out.value = v;
  out.ok = std::isfinite(v);
  return out;
}

// Minimizes the barrier function for a fixed mu with damped Newton steps.
// Returns the number of iterations spent.
int newton_minimize(const ConcaveProgram& prog, double mu, VectorXd& x,
                    int budget) {
  const int n = prog.dim;
  int used = 0;
  while (used < budget) {
    ++used;
    VectorXd grad = -prog.gradient(x);
    MatrixXd hess = -fd_hessian(prog.gradient, x);
    for (const auto& c : prog.constraints) {
      const double g = c.value(x);
      const VectorXd cg = c.gradient(x);
      const MatrixXd ch = fd_hessian(c.gradient, x);
      grad += mu * cg / (-g);
      hess += mu * (cg * cg.transpose() / (g * g) + ch / (-g));
    }
    for (int i = 0; i < n; ++i) {
      const double dl = x[i] - prog.lower[i];
      const double du = prog.upper[i] - x[i];
      grad[i] += mu * (1.0 / du - 1.0 / dl);
      hess(i, i) += mu * (1.0 / (dl * dl) + 1.0 / (du * du));
    }

    Eigen::LDLT<MatrixXd> ldlt(hess);
    VectorXd dir;
    if (ldlt.info() == Eigen::Success) {
      dir = ldlt.solve(-grad);
    }
    if (ldlt.info() != Eigen::Success || !dir.allFinite() ||
        dir.dot(grad) >= 0.0) {
      dir = -grad;  // descent fallback
    }

    const double decrement = -dir.dot(grad);
    if (!(decrement > 0.0)) break;

    // Fraction-to-boundary on the box, then backtrack through the
    // nonlinear constraints and an Armijo test.
    double alpha = 1.0;
    for (int i = 0; i < n; ++i) {
      if (dir[i] > 0.0) {
        alpha = std::min(alpha, 0.995 * (prog.upper[i] - x[i]) / dir[i]);
      } else if (dir[i] < 0.0) {
        alpha = std::min(alpha, 0.995 * (prog.lower[i] - x[i]) / dir[i]);
      }
    }
    const BarrierEval here = barrier_value(prog, mu, x);
    bool stepped = false;
    for (int bt = 0; bt < 60 && alpha > 0.0; ++bt) {
      VectorXd xt = x + alpha * dir;
      const BarrierEval trial = barrier_value(prog, mu, xt);
      if (trial.ok && trial.value <= here.value - 0.25 * alpha * decrement) {
        x = xt;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) break;
    // Newton decrement scaled by the barrier's own magnitude.
    if (decrement < 1e-12 * std::max(1.0, std::abs(here.value))) break;
  }
  return used;
}

// Phase-1: minimize the common slack s over (x, s) with g_k(x) <= s.
bool phase1_start(const ConcaveProgram& prog, const KernelOptions& opts,
                  VectorXd& x0) {
  ConcaveProgram aux;
  const int n = prog.dim;
  aux.dim = n + 1;
  aux.lower.resize(n + 1);
  aux.upper.resize(n + 1);
  aux.lower.head(n) = prog.lower;
  aux.upper.head(n) = prog.upper;

  VectorXd mid = 0.5 * (prog.lower + prog.upper);
  double worst = 0.0;
  for (const auto& c : prog.constraints) {
    const double v = c.value(mid);
    if (!std::isfinite(v)) return false;
    worst = std::max(worst, v);
  }
  const double s_hi = 2.0 * worst + 1.0;
  aux.lower[n] = -s_hi;
  aux.upper[n] = s_hi;

  aux.objective = [n](const VectorXd& z) { return -z[n]; };
  aux.gradient = [n](const VectorXd& z) {
    VectorXd g = VectorXd::Zero(n + 1);
    g[n] = -1.0;
    return g;
  };
  for (const auto& c : prog.constraints) {
    ConstraintFn shifted;
    shifted.name = c.name;
    shifted.value = [&c, n](const VectorXd& z) {
      return c.value(z.head(n)) - z[n];
    };
    shifted.gradient = [&c, n](const VectorXd& z) {
      VectorXd g(n + 1);
      g.head(n) = c.gradient(z.head(n));
      g[n] = -1.0;
      return g;
    };
    aux.constraints.push_back(std::move(shifted));
  }

  VectorXd z(n + 1);
  z.head(n) = mid;
  z[n] = worst + 0.5;
  if (!strictly_feasible(aux, z)) return false;

  double mu = std::max(1.0, s_hi);
  const int m = static_cast<int>(aux.constraints.size()) + 2 * (n + 1);
  int budget = opts.max_iter;
  while (budget > 0) {
    budget -= newton_minimize(aux, mu, z, std::min(budget, 40));
    if (z[n] < -1e-9 * std::max(1.0, s_hi)) break;  // strictly feasible found
    if (mu * m < 1e-10 * std::max(1.0, s_hi)) break;
    mu *= opts.barrier_shrink;
  }
  if (z[n] >= 0.0) return false;
  x0 = z.head(n);
  return strictly_feasible(prog, x0);
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

KernelResult maximize_concave(const ConcaveProgram& prog,
                              const KernelOptions& opts) {
  const VectorXd mid = 0.5 * (prog.lower + prog.upper);
  return maximize_concave(prog, opts, mid);
}

KernelResult maximize_concave(const ConcaveProgram& prog,
                              const KernelOptions& opts,
                              const Eigen::VectorXd& start) {
  if (prog.dim < 1 || prog.dim > 6) {
    throw std::invalid_argument("kernel dimension must be in [1, 6]");
  }
  if (prog.lower.size() != prog.dim || prog.upper.size() != prog.dim) {
    throw std::invalid_argument("box bounds must match the dimension");
  }
  for (int i = 0; i < prog.dim; ++i) {
    if (!(prog.lower[i] < prog.upper[i])) {
      throw std::invalid_argument("box must have positive width");
    }
  }

  KernelResult res;
  res.x = start;
  if (!strictly_feasible(prog, res.x)) {
    // Shrink toward the box midpoint, then fall back to phase-1.
    const VectorXd mid = 0.5 * (prog.lower + prog.upper);
    bool found = false;
    VectorXd probe = start.size() == prog.dim ? start : mid;
    for (int k = 0; k < 8 && !found; ++k) {
      probe = mid + std::pow(0.5, k + 1) * (probe - mid);
      found = strictly_feasible(prog, probe);
    }
    if (found) {
      res.x = probe;
    } else if (!phase1_start(prog, opts, res.x)) {
      res.status = SolveStatus::infeasible;
      return res;
    }
  }

  if (opts.check_gradients) {
    check_gradient(prog.objective, prog.gradient, res.x, "objective");
    for (const auto& c : prog.constraints) {
      check_gradient(c.value, c.gradient, res.x, c.name);
    }
  }

  const int m = static_cast<int>(prog.constraints.size()) + 2 * prog.dim;
  const double f0 = prog.objective(res.x);
  double mu = opts.barrier_mu0 * 0.01 * std::max(1.0, std::abs(f0));
  int budget = opts.max_iter;
  res.status = SolveStatus::max_iter;
  while (budget > 0) {
    const int spent = newton_minimize(prog, mu, res.x, std::min(budget, 50));
    budget -= spent;
    res.iterations += spent;
    const double f = prog.objective(res.x);
    const double gap_target = 0.01 * opts.tol * std::max(1.0, std::abs(f));
    if (mu * m <= gap_target) {
      res.status = SolveStatus::optimal;
      break;
    }
    mu *= opts.barrier_shrink;
  }
  res.objective = prog.objective(res.x);
  return res;
}

double bisect_decreasing(const std::function<double(double)>& f, double lo,
                         double hi, double tol) {
  if (!(lo < hi)) throw std::domain_error("bisection needs lo < hi");
  if (f(lo) <= 0.0) return lo;
  if (f(hi) >= 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace relaybc
