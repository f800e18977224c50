#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hfde/system.hpp"

namespace hfde {

/** Node values produced by an independent reference method. */
struct OracleResult {
    Grid grid;
    std::vector<std::string> stateNames;
    std::vector<std::vector<double>> nodes;  ///< (m+1) rows of n values
    std::string method;                      ///< "rk4" | "pece" | "exact"
};

/** Classical fixed-step fourth-order Runge-Kutta; requires every order = 1. */
OracleResult rk4_solve(const FractionalSystem& system, const Grid& grid);

/** Fractional Adams-Bashforth-Moulton predictor-corrector (P(EC)^mu E with
 *  mu = correctorIters).  Handles the same order range and Taylor-polynomial
 *  initial shift as the main solver, but shares none of its machinery. */
OracleResult pece_solve(const FractionalSystem& system, const Grid& grid,
                        int correctorIters = 1);

/** Closed-form solutions used by the verification commands. */
struct ExactSolution {
    std::string name;
    std::vector<std::string> stateNames;
    std::vector<std::function<double(double)>> states;
};

/** Known names: "frac-integral-of-t" (order-alpha integral of f(t)=t),
 *  "example-6.2" (e^t sin t, e^t cos t), "eq-20-sum" (t^2/2 + t^3/6 + t^4/24).
 *  alpha is only consulted by frac-integral-of-t. */
ExactSolution exact_solution(const std::string& name, double alpha = 1.0);

/** Per-state comparison of two node matrices (b is the reference). */
struct ErrorReport {
    std::vector<std::vector<double>> absErrors;  ///< (m+1) x n, |a - b|
    std::vector<double> infNorms;                ///< per state, max over nodes
    std::vector<double> pctErrorAtEnd;           ///< per state, 100|a-b|/|b| at t=T
};

ErrorReport error_report(const std::vector<std::vector<double>>& a,
                         const std::vector<std::vector<double>>& b);

}  // namespace hfde
