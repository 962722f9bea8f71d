#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace relaybc {

/// One smooth convex inequality g(x) <= 0 with an analytic gradient.
struct ConstraintFn {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

/// Small dense concave maximization problem: maximize objective(x) subject
/// to constraints g_k(x) <= 0 and box bounds lower < x < upper. Dimension is
/// capped at 6; every subproblem in this project fits.
struct ConcaveProgram {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::vector<ConstraintFn> constraints;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class SolveStatus { optimal, max_iter, infeasible };

const char* to_string(SolveStatus s);

struct KernelOptions {
  double tol = 1e-8;            // relative objective convergence
  int max_iter = 500;           // total Newton iteration cap
  double barrier_mu0 = 1.0;     // initial barrier weight (scaled internally)
  double barrier_shrink = 0.12; // outer multiplier applied to mu
  bool check_gradients = false; // verify analytic gradients by differences
};

struct KernelResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  int iterations = 0;
};

// Log-barrier interior-point solve. Hessians are formed by central
// differences of the supplied gradients. Deterministic: identical inputs
// produce identical iterate sequences. When no strictly feasible point is
// found (box midpoint, then phase-1 slack minimization) the result carries
// SolveStatus::infeasible rather than throwing.
KernelResult maximize_concave(const ConcaveProgram& prog,
                              const KernelOptions& opts);
KernelResult maximize_concave(const ConcaveProgram& prog,
                              const KernelOptions& opts,
                              const Eigen::VectorXd& start);

// Root of a nonincreasing scalar function on [lo, hi]. Returns lo when
// f(lo) <= 0, hi when f(hi) >= 0, otherwise bisects until the bracket is
// narrower than tol. Throws std::domain_error when lo >= hi.
double bisect_decreasing(const std::function<double(double)>& f, double lo,
                         double hi, double tol);

}  // namespace relaybc
