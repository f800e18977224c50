#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hfde/op_matrices.hpp"
#include "hfde/system.hpp"

namespace hfde {

/** Taylor polynomials of the initial data, one per state: subtracting them
 *  leaves a problem with zero initial conditions. */
std::vector<ShiftPolynomial> initial_shift(const FractionalSystem& system);

/** Solve the system on [0, T].
 *
 *  The unknowns are the node values of z_i = y_i - shift_i.  In marching mode
 *  each node is an n-dimensional implicit system (damped Newton with a
 *  finite-difference Jacobian): nodes 1..m-1 come from the sample-and-hold
 *  coefficient equations, node m from the triangular one.  Global mode poses
 *  all n*m coefficient equations at once and Newton-iterates the stack; it is
 *  the cross-check for the marching scheme.
 */
SolveResult solve_hf(const FractionalSystem& system, const SolveConfig& config);

/** Contraction bound n*L*T^alpha / Gamma(alpha+1): the fixed-point iteration
 *  behind the scheme is guaranteed to converge when this lies in (0, 1).
 *  Orders outside (0, 1] are reported NotApplicable, L = 0 Degenerate. */
ContractionReport contraction_bound(std::size_t n, double L, double alpha, double T);

/** Heuristic Lipschitz constant of the RHS over the solved trajectory's
 *  bounding box: max directional slope on a 5-point-per-axis lattice. */
double estimate_lipschitz(const FractionalSystem& system,
                          const std::vector<std::vector<double>>& nodes);

/** Exact solution callable: t -> all n state values. */
using ExactSolutionFn = std::function<std::vector<double>(double)>;

struct ConvergenceRow {
    double h;
    std::vector<double> infErrors;  ///< per state, max-over-nodes |y - exact|
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::vector<double> observedOrders;  ///< per state; NaN when exact
    std::vector<bool> exactStates;       ///< true when all errors ~ 0
};

/** Solve at each step width and report per-state error norms and the
 *  observed order log(e1/e2)/log(h1/h2) averaged over consecutive rows. */
ConvergenceStudy convergence_study(const FractionalSystem& system,
                                   const ExactSolutionFn& exact,
                                   std::span<const double> stepWidths,
                                   const SolveConfig& base = {});

}  // namespace hfde
