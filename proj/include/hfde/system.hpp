#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfde/grid.hpp"
#include "hfde/series.hpp"

namespace hfde {

/** Right-hand side of one state equation: f_i(t, y_1..y_n). */
using RhsFn = std::function<double(double t, std::span<const double> y)>;

/** A system of Caputo-derivative equations D^{alpha_i} y_i = f_i(t, y).
 *
 *  Each state carries its own order alpha_i in (0, 2.5] and the ceil(alpha_i)
 *  initial values y_i(0), y_i'(0), ... needed by a Caputo problem of that
 *  order.
 */
struct FractionalSystem {
    std::string name;
    std::vector<std::string> stateNames;        ///< n entries, used for output headers
    std::vector<double> orders;                 ///< n entries, each in (0, 2.5]
    std::vector<std::vector<double>> initData;  ///< per state, ceil(order) values
    std::vector<RhsFn> rhs;                     ///< n entries
    double T = 1.0;                             ///< horizon

    std::size_t size() const { return orders.size(); }

    /** Throw std::invalid_argument if any structural invariant is violated. */
    void validate() const;
};

enum class SolveMode { Marching, GlobalFixedPoint };

struct SolveConfig {
    std::size_t m = 0;         ///< subinterval count (0: derive from h)
    double h = 0.0;            ///< step width (0: derive from m)
    double newtonTol = 1e-12;  ///< Newton residual tolerance (scaled by node magnitude)
    int maxNewtonIters = 50;
    double jacobianStep = 1e-7;  ///< relative finite-difference step
    SolveMode mode = SolveMode::Marching;
    /** Lipschitz constant for the contraction diagnostic; NaN = estimate. */
    double lipschitz = std::numeric_limits<double>::quiet_NaN();
};

/** Advisory contraction diagnostic n*L*T^alpha / Gamma(alpha+1). */
struct ContractionReport {
    enum class Verdict {
        Guaranteed,     ///< bound in (0, 1): fixed-point iteration contracts
        NotGuaranteed,  ///< bound >= 1: no guarantee (solve may still succeed)
        NotApplicable,  ///< some order outside (0, 1]: theorem does not cover it
        Degenerate      ///< L = 0: constant RHS, bound trivially outside (0, 1)
    };

    double value = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::NotApplicable;
    double lipschitz = 0.0;
    bool heuristicLipschitz = false;
    std::string note;
};

const char* to_string(ContractionReport::Verdict v);

struct SolveDiagnostics {
    SolveMode mode = SolveMode::Marching;
    std::vector<int> newtonIters;  ///< marching: per node 1..m; global: one entry
    double maxResidual = 0.0;      ///< largest accepted scaled residual
    ContractionReport contraction;
};

/** Taylor polynomial of the initial data: sum of y^(k)(0) t^k / k!. */
class ShiftPolynomial {
public:
    explicit ShiftPolynomial(std::span<const double> derivatives);

    double operator()(double t) const;
    std::span<const double> coefficients() const { return coeffs_; }

private:
    std::vector<double> coeffs_;  // t^k coefficient = derivative[k]/k!
};

/** Full solver output: y node values plus the pieces they were built from
 *  (the zero-initial-condition series z_i and the initial-data shifts). */
struct SolveResult {
    Grid grid;
    std::vector<std::string> stateNames;
    std::vector<std::vector<double>> nodes;  ///< (m+1) rows of n state values
    std::vector<HFSeries> zSeries;           ///< series of z_i = y_i - shift_i
    std::vector<ShiftPolynomial> shifts;
    SolveDiagnostics diagnostics;

    /** Evaluate state i anywhere in [0, T] via z-series + shift. */
    double y_value(std::size_t state, double t) const;
};

/** Newton failed at a node; carries the node index and last residual. */
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t node, double residual)
        : std::runtime_error(what), node_(node), residual_(residual) {}
    std::size_t node() const { return node_; }
    double residual() const { return residual_; }

private:
    std::size_t node_;
    double residual_;
};

/** A model RHS produced a non-finite value (or an invalid denominator). */
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hfde
