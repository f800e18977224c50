#include "hfde/oracles.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hfde/op_matrices.hpp"
#include "hfde/solver.hpp"

namespace hfde {

namespace {

void check_finite(double v, const char* method, const FractionalSystem& system, std::size_t state,
                  double t) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << method << ": non-finite value for state " << system.stateNames[state] << " of '"
            << system.name << "' at t=" << t;
        throw ModelError(msg.str());
    }
}

}  // namespace

OracleResult rk4_solve(const FractionalSystem& system, const Grid& grid) {
    system.validate();
    for (double a : system.orders)
        if (a != 1.0)
            throw std::invalid_argument("rk4_solve: requires all orders = 1, got " +
                                        std::to_string(a));
    const std::size_t n = system.size(), m = grid.m;
    const double h = grid.h;

    OracleResult out;
    out.grid = grid;
    out.stateNames = system.stateNames;
    out.method = "rk4";
    out.nodes.assign(m + 1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        out.nodes[0][i] = system.initData[i][0];

    std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
    auto eval = [&](double t, const std::vector<double>& y, std::vector<double>& k) {
        for (std::size_t i = 0; i < n; ++i) {
            k[i] = system.rhs[i](t, y);
            check_finite(k[i], "rk4_solve", system, i, t);
        }
    };

    for (std::size_t j = 0; j < m; ++j) {
        const double t = grid.node(j);
        const std::vector<double>& y = out.nodes[j];
        eval(t, y, k1);
        for (std::size_t i = 0; i < n; ++i)
            stage[i] = y[i] + 0.5 * h * k1[i];
        eval(t + 0.5 * h, stage, k2);
        for (std::size_t i = 0; i < n; ++i)
            stage[i] = y[i] + 0.5 * h * k2[i];
        eval(t + 0.5 * h, stage, k3);
        for (std::size_t i = 0; i < n; ++i)
            stage[i] = y[i] + h * k3[i];
        eval(t + h, stage, k4);
        for (std::size_t i = 0; i < n; ++i)
            out.nodes[j + 1][i] =
                y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

OracleResult pece_solve(const FractionalSystem& system, const Grid& grid, int correctorIters) {
    system.validate();
    if (correctorIters < 1 || correctorIters > 10)
        throw std::invalid_argument("pece_solve: correctorIters must be in [1, 10], got " +
                                    std::to_string(correctorIters));
    const std::size_t n = system.size(), m = grid.m;
    const double h = grid.h;

    std::vector<ShiftPolynomial> shifts = initial_shift(system);

    // Per-state quadrature weights of the Adams-Bashforth-Moulton scheme.
    // predictor: scaleP * sum b_{j-k} g_k            b_d = (d+1)^a - d^a
    // corrector: scaleC * (g_{j+1} + head_j g_0 + sum c_{j-k} g_k), with
    //   c_d = (d+2)^{a+1} + d^{a+1} - 2 (d+1)^{a+1}
    //   head_j = j^{a+1} - (j-a)(j+1)^a
    std::vector<double> scaleP(n), scaleC(n);
    std::vector<std::vector<double>> b(n, std::vector<double>(m));
    std::vector<std::vector<double>> c(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const double a = system.orders[i];
        scaleP[i] = std::pow(h, a) / gamma_fn(a + 1.0);
        scaleC[i] = std::pow(h, a) / gamma_fn(a + 2.0);
        for (std::size_t d = 0; d < m; ++d) {
            const double dd = static_cast<double>(d);
            b[i][d] = std::pow(dd + 1.0, a) - std::pow(dd, a);
            c[i][d] = std::pow(dd + 2.0, a + 1.0) + std::pow(dd, a + 1.0) -
                      2.0 * std::pow(dd + 1.0, a + 1.0);
        }
    }

    std::vector<std::vector<double>> z(m + 1, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> g(m + 1, std::vector<double>(n, 0.0));
    std::vector<double> y(n), shiftRow(n);

    auto eval_g = [&](std::size_t j, const std::vector<double>& zRow, std::vector<double>& out) {
        const double t = grid.node(j);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = zRow[i] + shifts[i](t);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = system.rhs[i](t, y);
            check_finite(out[i], "pece_solve", system, i, t);
        }
    };

    eval_g(0, z[0], g[0]);
    std::vector<double> pred(n), gNew(n), cand(n);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double a = system.orders[i];
            const double jj = static_cast<double>(j);
            double accP = 0.0, accC = 0.0;
            for (std::size_t k = 0; k <= j; ++k)
                accP += b[i][j - k] * g[k][i];
            const double head =
                std::pow(jj, a + 1.0) - (jj - a) * std::pow(jj + 1.0, a);
            accC = head * g[0][i];
            for (std::size_t k = 1; k <= j; ++k)
                accC += c[i][j - k] * g[k][i];
            pred[i] = scaleP[i] * accP;
            cand[i] = accC;  // stash the corrector history sum
        }
        std::vector<double> zNext = pred;
        for (int it = 0; it < correctorIters; ++it) {
            eval_g(j + 1, zNext, gNew);
            for (std::size_t i = 0; i < n; ++i)
                zNext[i] = scaleC[i] * (gNew[i] + cand[i]);
        }
        z[j + 1] = zNext;
        eval_g(j + 1, zNext, g[j + 1]);  // final evaluation enters the history
    }

    OracleResult out;
    out.grid = grid;
    out.stateNames = system.stateNames;
    out.method = "pece";
    out.nodes.assign(m + 1, std::vector<double>(n));
    for (std::size_t j = 0; j <= m; ++j) {
        const double t = grid.node(j);
        for (std::size_t i = 0; i < n; ++i)
            out.nodes[j][i] = z[j][i] + shifts[i](t);
    }
    return out;
}

ExactSolution exact_solution(const std::string& name, double alpha) {
    ExactSolution sol;
    sol.name = name;
    if (name == "frac-integral-of-t") {
        if (!(alpha > 0.0))
            throw std::invalid_argument("exact_solution: frac-integral-of-t needs alpha > 0");
        const double denom = gamma_fn(2.0 + alpha);
        sol.stateNames = {"Jt"};
        sol.states = {[alpha, denom](double t) { return std::pow(t, 1.0 + alpha) / denom; }};
    } else if (name == "example-6.2") {
        sol.stateNames = {"x", "y"};
        sol.states = {[](double t) { return std::exp(t) * std::sin(t); },
                      [](double t) { return std::exp(t) * std::cos(t); }};
    } else if (name == "eq-20-sum") {
        sol.stateNames = {"sum"};
        sol.states = {[](double t) {
            return t * t / 2.0 + t * t * t / 6.0 + t * t * t * t / 24.0;
        }};
    } else {
        throw std::invalid_argument(
            "exact_solution: unknown name '" + name +
            "' (known: frac-integral-of-t, example-6.2, eq-20-sum)");
    }
    return sol;
}

ErrorReport error_report(const std::vector<std::vector<double>>& a,
                         const std::vector<std::vector<double>>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("error_report: row counts differ or empty input");
    const std::size_t rows = a.size(), n = a[0].size();

    ErrorReport report;
    report.absErrors.assign(rows, std::vector<double>(n));
    report.infNorms.assign(n, 0.0);
    report.pctErrorAtEnd.assign(n, 0.0);
    for (std::size_t j = 0; j < rows; ++j) {
        if (a[j].size() != n || b[j].size() != n)
            throw std::invalid_argument("error_report: column counts differ at row " +
                                        std::to_string(j));
        for (std::size_t i = 0; i < n; ++i) {
            const double err = std::fabs(a[j][i] - b[j][i]);
            report.absErrors[j][i] = err;
            report.infNorms[i] = std::max(report.infNorms[i], err);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double ref = b[rows - 1][i], err = report.absErrors[rows - 1][i];
        report.pctErrorAtEnd[i] = (err == 0.0) ? 0.0 : 100.0 * err / std::fabs(ref);
    }
    return report;
}

}  // namespace hfde
