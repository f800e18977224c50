#include "hfde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hfde {

// ---------------------------------------------------------------------------
// FractionalSystem / supporting types
// ---------------------------------------------------------------------------

void FractionalSystem::validate() const {
    const std::size_t n = orders.size();
    if (n == 0)
        throw std::invalid_argument("FractionalSystem: empty system");
    if (stateNames.size() != n || initData.size() != n || rhs.size() != n)
        throw std::invalid_argument("FractionalSystem '" + name +
                                    "': stateNames/orders/initData/rhs lengths disagree");
    if (!(T > 0.0))
        throw std::invalid_argument("FractionalSystem '" + name + "': horizon must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(orders[i] > 0.0) || orders[i] > 2.5)
            throw std::invalid_argument("FractionalSystem '" + name + "': order " +
                                        std::to_string(orders[i]) + " of state " +
                                        stateNames[i] + " outside (0, 2.5]");
        const auto need = static_cast<std::size_t>(std::ceil(orders[i]));
        if (initData[i].size() != need)
            throw std::invalid_argument(
                "FractionalSystem '" + name + "': state " + stateNames[i] + " needs " +
                std::to_string(need) + " initial value(s), got " +
                std::to_string(initData[i].size()));
        if (!rhs[i])
            throw std::invalid_argument("FractionalSystem '" + name + "': missing RHS for state " +
                                        stateNames[i]);
    }
}

ShiftPolynomial::ShiftPolynomial(std::span<const double> derivatives)
    : coeffs_(derivatives.begin(), derivatives.end()) {
    if (coeffs_.empty())
        throw std::invalid_argument("ShiftPolynomial: need at least the initial value");
    double factorial = 1.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        factorial *= static_cast<double>(k);
        coeffs_[k] /= factorial;
    }
}

double ShiftPolynomial::operator()(double t) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        acc = acc * t + coeffs_[k];
    return acc;
}

const char* to_string(ContractionReport::Verdict v) {
    switch (v) {
        case ContractionReport::Verdict::Guaranteed: return "guaranteed";
        case ContractionReport::Verdict::NotGuaranteed: return "not-guaranteed";
        case ContractionReport::Verdict::NotApplicable: return "not-applicable";
        case ContractionReport::Verdict::Degenerate: return "degenerate";
    }
    return "unknown";
}

double SolveResult::y_value(std::size_t state, double t) const {
    if (state >= zSeries.size())
        throw std::invalid_argument("SolveResult: state index out of range");
    return shifts[state](t) + zSeries[state](t);
}

std::vector<ShiftPolynomial> initial_shift(const FractionalSystem& system) {
    system.validate();
    std::vector<ShiftPolynomial> shifts;
    shifts.reserve(system.size());
    for (const auto& init : system.initData)
        shifts.emplace_back(init);
    return shifts;
}

// ---------------------------------------------------------------------------
// Small dense linear algebra
// ---------------------------------------------------------------------------

namespace {

/** Solve A x = b in place by Gaussian elimination with partial pivoting.
 *  A is row-major N x N; returns x in b. */
void solve_linear(std::vector<double>& A, std::vector<double>& b) {
    const std::size_t N = b.size();
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(A[col * N + col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double v = std::fabs(A[r * N + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0)
            throw SolverError("singular Jacobian in Newton step", 0, 0.0);
        if (pivot != col) {
            for (std::size_t c = col; c < N; ++c)
                std::swap(A[pivot * N + c], A[col * N + c]);
            std::swap(b[pivot], b[col]);
        }
        const double diag = A[col * N + col];
        for (std::size_t r = col + 1; r < N; ++r) {
            const double factor = A[r * N + col] / diag;
            if (factor == 0.0)
                continue;
            A[r * N + col] = 0.0;
            for (std::size_t c = col + 1; c < N; ++c)
                A[r * N + c] -= factor * A[col * N + c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t col = N; col-- > 0;) {
        double acc = b[col];
        for (std::size_t c = col + 1; c < N; ++c)
            acc -= A[col * N + c] * b[c];
        b[col] = acc / A[col * N + col];
    }
}

struct SolverContext {
    const FractionalSystem* system;
    const SolveConfig* config;
    Grid grid;
    std::size_t n;
    std::vector<std::vector<double>> shiftVals;  // (m+1) x n
    // Per-state views into the operational matrices of that state's order.
    std::vector<std::span<const double>> ss, st, ts, tt;
    std::vector<double> scaleT;  // tt[0] of each state

    std::vector<double> yBuffer;

    /** e row: f_i(t_j, z + shift_j); throws ModelError on non-finite values. */
    void eval_rhs(std::size_t j, std::span<const double> z, std::span<double> out) {
        const double t = grid.node(j);
        for (std::size_t i = 0; i < n; ++i)
            yBuffer[i] = z[i] + shiftVals[j][i];
        for (std::size_t i = 0; i < n; ++i) {
            const double v = system->rhs[i](t, yBuffer);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "model '" << system->name << "': non-finite RHS for state "
                    << system->stateNames[i] << " at t=" << t << " (node " << j << ")";
                throw ModelError(msg.str());
            }
            out[i] = v;
        }
    }
};

/** Known part of the node-j equations, from history rows e[0..j-1]:
 *  nodes 1..m-1 use the sample-and-hold coefficient equation, node m the
 *  triangular one (which also carries z_{m-1}).  The implicit remainder is
 *  scaleT_i * (e_ij - e_{i,j-1}) and is handled by the Newton residual. */
void node_base(const SolverContext& ctx, std::size_t j,
               const std::vector<std::vector<double>>& e,
               const std::vector<std::vector<double>>& z, std::vector<double>& base) {
    const std::size_t m = ctx.grid.m;
    for (std::size_t i = 0; i < ctx.n; ++i) {
        double acc = 0.0;
        if (j < m) {
            const auto ss = ctx.ss[i], ts = ctx.ts[i];
            for (std::size_t k = 0; k < j; ++k)
                acc += e[k][i] * ss[j - k];
            for (std::size_t k = 0; k + 1 < j; ++k)
                acc += (e[k + 1][i] - e[k][i]) * ts[j - k];
        } else {
            const auto st = ctx.st[i], tt = ctx.tt[i];
            for (std::size_t k = 0; k < m; ++k)
                acc += e[k][i] * st[m - 1 - k];
            for (std::size_t k = 0; k + 1 < m; ++k)
                acc += (e[k + 1][i] - e[k][i]) * tt[m - 1 - k];
            acc += z[m - 1][i];
        }
        base[i] = acc;
    }
}

struct NodeSolveOutcome {
    int iterations = 0;
    double scaledResidual = 0.0;
};

/** Damped Newton on the n-dimensional implicit system of one node. */
NodeSolveOutcome newton_node(SolverContext& ctx, std::size_t j, const std::vector<double>& base,
                             std::span<const double> ePrev, std::vector<double>& z,
                             std::vector<double>& eOut) {
    const std::size_t n = ctx.n;
    const double tol = ctx.config->newtonTol;

    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i)
        scale[i] = std::max(1.0, std::fabs(base[i]));

    auto residual = [&](const std::vector<double>& zTry, std::vector<double>& fTry,
                        std::vector<double>& G) -> double {
        ctx.eval_rhs(j, zTry, fTry);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            G[i] = zTry[i] - base[i] - ctx.scaleT[i] * (fTry[i] - ePrev[i]);
            worst = std::max(worst, std::fabs(G[i]) / scale[i]);
        }
        return worst;
    };

    // Predictor e_ij ~ e_{i,j-1}: the implicit correction vanishes.
    z = base;
    std::vector<double> f(n), G(n), fTry(n), GTry(n), zTry(n), step(n);
    std::vector<double> J(n * n), rhs(n);
    double resid = residual(z, f, G);

    NodeSolveOutcome out;
    while (resid > tol) {
        if (out.iterations >= ctx.config->maxNewtonIters) {
            std::ostringstream msg;
            msg << "Newton did not converge at node " << j << " (t=" << ctx.grid.node(j)
                << "): scaled residual " << resid << " after " << out.iterations
                << " iterations (tol " << tol << ")";
            throw SolverError(msg.str(), j, resid);
        }
        // Finite-difference Jacobian, one RHS evaluation per column.
        for (std::size_t c = 0; c < n; ++c) {
            step[c] = ctx.config->jacobianStep * std::max(1.0, std::fabs(z[c]));
            zTry = z;
            zTry[c] += step[c];
            ctx.eval_rhs(j, zTry, fTry);
            for (std::size_t i = 0; i < n; ++i) {
                const double Gc =
                    zTry[i] - base[i] - ctx.scaleT[i] * (fTry[i] - ePrev[i]);
                J[i * n + c] = (Gc - G[i]) / step[c];
            }
        }
        std::vector<double> A(J);
        rhs = G;
        solve_linear(A, rhs);  // rhs := J^{-1} G

        // Damped update: halve up to 10 times while the residual would grow;
        // keep the best candidate seen in case nothing improves.
        double lambda = 1.0, bestResid = resid;
        std::vector<double> bestZ(z), bestF(f), bestG(G);
        for (int attempt = 0; attempt <= 10; ++attempt) {
            for (std::size_t i = 0; i < n; ++i)
                zTry[i] = z[i] - lambda * rhs[i];
            const double r = residual(zTry, fTry, GTry);
            if (r < bestResid) {
                bestResid = r;
                bestZ = zTry;
                bestF = fTry;
                bestG = GTry;
            }
            if (r < resid)
                break;
            lambda *= 0.5;
        }
        z = bestZ;
        f = bestF;
        G = bestG;
        resid = bestResid;
        ++out.iterations;
    }
    eOut = f;
    out.scaledResidual = resid;
    return out;
}

/** All coefficient equations at once (the cross-check mode): unknowns are
 *  z at nodes 1..m, state-major within a node. */
void solve_global(SolverContext& ctx, std::vector<std::vector<double>>& z,
                  std::vector<std::vector<double>>& e, SolveDiagnostics& diag) {
    const std::size_t n = ctx.n, m = ctx.grid.m, N = n * m;
    const double tol = ctx.config->newtonTol;

    auto unpack = [&](const std::vector<double>& Z) {
        for (std::size_t j = 1; j <= m; ++j)
            for (std::size_t i = 0; i < n; ++i)
                z[j][i] = Z[(j - 1) * n + i];
    };

    auto residual = [&](const std::vector<double>& Z, std::vector<double>& R) {
        unpack(Z);
        for (std::size_t j = 0; j <= m; ++j)
            ctx.eval_rhs(j, z[j], e[j]);
        for (std::size_t j = 1; j <= m; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                if (j < m) {
                    const auto ss = ctx.ss[i], ts = ctx.ts[i];
                    for (std::size_t k = 0; k < j; ++k)
                        acc += e[k][i] * ss[j - k];
                    for (std::size_t k = 0; k < j; ++k)
                        acc += (e[k + 1][i] - e[k][i]) * ts[j - k];
                    R[(j - 1) * n + i] = z[j][i] - acc;
                } else {
                    const auto st = ctx.st[i], tt = ctx.tt[i];
                    for (std::size_t k = 0; k < m; ++k)
                        acc += e[k][i] * st[m - 1 - k];
                    for (std::size_t k = 0; k < m; ++k)
                        acc += (e[k + 1][i] - e[k][i]) * tt[m - 1 - k];
                    R[(j - 1) * n + i] = z[j][i] - z[j - 1][i] - acc;
                }
            }
        }
    };

    std::vector<double> Z(N, 0.0), R(N), RTry(N), ZTry(N), Rbest(N), Zbest(N);
    std::vector<double> J(N * N), step(N), dz(N);

    auto scaled_norm = [&](const std::vector<double>& res, const std::vector<double>& at) {
        double zMax = 0.0;
        for (double v : at)
            zMax = std::max(zMax, std::fabs(v));
        const double scale = std::max(1.0, zMax);
        double worst = 0.0;
        for (double v : res)
            worst = std::max(worst, std::fabs(v));
        return worst / scale;
    };

    residual(Z, R);
    double resid = scaled_norm(R, Z);
    int iters = 0;
    while (resid > tol) {
        if (iters >= ctx.config->maxNewtonIters)
            throw SolverError("global Newton did not converge: scaled residual " +
                                  std::to_string(resid) + " after " + std::to_string(iters) +
                                  " iterations",
                              m, resid);
        for (std::size_t c = 0; c < N; ++c) {
            step[c] = ctx.config->jacobianStep * std::max(1.0, std::fabs(Z[c]));
            ZTry = Z;
            ZTry[c] += step[c];
            residual(ZTry, RTry);
            for (std::size_t r = 0; r < N; ++r)
                J[r * N + c] = (RTry[r] - R[r]) / step[c];
        }
        std::vector<double> A(J);
        dz = R;
        solve_linear(A, dz);

        double lambda = 1.0, bestResid = resid;
        Zbest = Z;
        Rbest = R;
        for (int attempt = 0; attempt <= 10; ++attempt) {
            for (std::size_t c = 0; c < N; ++c)
                ZTry[c] = Z[c] - lambda * dz[c];
            residual(ZTry, RTry);
            const double r = scaled_norm(RTry, ZTry);
            if (r < bestResid) {
                bestResid = r;
                Zbest = ZTry;
                Rbest = RTry;
            }
            if (r < resid)
                break;
            lambda *= 0.5;
        }
        Z = Zbest;
        R = Rbest;
        resid = bestResid;
        ++iters;
    }
    residual(Z, R);  // leave z and e holding the accepted iterate
    diag.newtonIters.assign(1, iters);
    diag.maxResidual = resid;
}

}  // namespace

// ---------------------------------------------------------------------------
// solve_hf
// ---------------------------------------------------------------------------

SolveResult solve_hf(const FractionalSystem& system, const SolveConfig& config) {
    system.validate();
    if (!(config.newtonTol > 0.0))
        throw std::invalid_argument("SolveConfig: newtonTol must be positive");
    if (config.maxNewtonIters < 1)
        throw std::invalid_argument("SolveConfig: maxNewtonIters must be >= 1");
    if (!(config.jacobianStep > 0.0))
        throw std::invalid_argument("SolveConfig: jacobianStep must be positive");
    if (config.m > 0 && config.h > 0.0)
        throw std::invalid_argument("SolveConfig: set either m or h, not both");

    Grid grid;
    if (config.m > 0)
        grid = Grid(config.m, system.T);
    else if (config.h > 0.0)
        grid = Grid::from_step(config.h, system.T);
    else
        throw std::invalid_argument("SolveConfig: grid unspecified, set m or h");

    const std::size_t n = system.size(), m = grid.m;

    SolverContext ctx;
    ctx.system = &system;
    ctx.config = &config;
    ctx.grid = grid;
    ctx.n = n;
    ctx.yBuffer.resize(n);

    std::vector<ShiftPolynomial> shifts = initial_shift(system);
    ctx.shiftVals.assign(m + 1, std::vector<double>(n));
    for (std::size_t j = 0; j <= m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            ctx.shiftVals[j][i] = shifts[i](grid.node(j));

    // One operational-matrix set per distinct order, shared across states.
    std::map<double, OpMatrixSet> matrices;
    for (double a : system.orders)
        if (!matrices.count(a))
            matrices.emplace(a, build_generalized(a, grid));
    ctx.ss.resize(n);
    ctx.st.resize(n);
    ctx.ts.resize(n);
    ctx.tt.resize(n);
    ctx.scaleT.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const OpMatrixSet& set = matrices.at(system.orders[i]);
        ctx.ss[i] = set.Pss.first_row();
        ctx.st[i] = set.Pst.first_row();
        ctx.ts[i] = set.Pts.first_row();
        ctx.tt[i] = set.Ptt.first_row();
        ctx.scaleT[i] = set.Ptt.first_row()[0];
    }

    std::vector<std::vector<double>> z(m + 1, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> e(m + 1, std::vector<double>(n, 0.0));

    SolveDiagnostics diag;
    diag.mode = config.mode;

    if (config.mode == SolveMode::Marching) {
        ctx.eval_rhs(0, z[0], e[0]);  // also proves the RHS is finite at t=0
        diag.newtonIters.reserve(m);
        std::vector<double> base(n);
        for (std::size_t j = 1; j <= m; ++j) {
            node_base(ctx, j, e, z, base);
            NodeSolveOutcome outcome = newton_node(ctx, j, base, e[j - 1], z[j], e[j]);
            diag.newtonIters.push_back(outcome.iterations);
            diag.maxResidual = std::max(diag.maxResidual, outcome.scaledResidual);
        }
    } else {
        solve_global(ctx, z, e, diag);
    }

    SolveResult result;
    result.grid = grid;
    result.stateNames = system.stateNames;
    result.nodes.assign(m + 1, std::vector<double>(n));
    for (std::size_t j = 0; j <= m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            result.nodes[j][i] = z[j][i] + ctx.shiftVals[j][i];
    result.zSeries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> column(m + 1);
        for (std::size_t j = 0; j <= m; ++j)
            column[j] = z[j][i];
        result.zSeries.push_back(sample_to_hf(column, grid));
    }
    result.shifts = std::move(shifts);

    // Advisory contraction diagnostic (Lipschitz constant estimated from the
    // solved trajectory unless the caller supplied one).
    double L = config.lipschitz;
    bool heuristic = false;
    if (!std::isfinite(L)) {
        L = estimate_lipschitz(system, result.nodes);
        heuristic = true;
    }
    const bool applicable = std::all_of(system.orders.begin(), system.orders.end(),
                                        [](double a) { return a > 0.0 && a <= 1.0; });
    if (!applicable) {
        result.diagnostics.contraction.verdict = ContractionReport::Verdict::NotApplicable;
        result.diagnostics.contraction.lipschitz = L;
        result.diagnostics.contraction.heuristicLipschitz = heuristic;
        result.diagnostics.contraction.note =
            "contraction theorem stated for orders in (0, 1] only";
    } else {
        // Mixed orders: report the worst case over the per-state orders.
        ContractionReport worst;
        for (double a : system.orders) {
            ContractionReport r = contraction_bound(n, L, a, system.T);
            if (std::isnan(worst.value) || r.value > worst.value)
                worst = r;
        }
        worst.lipschitz = L;
        worst.heuristicLipschitz = heuristic;
        result.diagnostics.contraction = worst;
    }
    result.diagnostics.mode = diag.mode;
    result.diagnostics.newtonIters = std::move(diag.newtonIters);
    result.diagnostics.maxResidual = diag.maxResidual;
    return result;
}

// ---------------------------------------------------------------------------
// Contraction diagnostic
// ---------------------------------------------------------------------------

ContractionReport contraction_bound(std::size_t n, double L, double alpha, double T) {
    if (n == 0)
        throw std::invalid_argument("contraction_bound: n must be >= 1");
    if (L < 0.0)
        throw std::invalid_argument("contraction_bound: L must be nonnegative");
    if (!(T > 0.0))
        throw std::invalid_argument("contraction_bound: T must be positive");

    ContractionReport report;
    report.lipschitz = L;
    if (!(alpha > 0.0) || alpha > 1.0) {
        report.verdict = ContractionReport::Verdict::NotApplicable;
        report.note = "theorem not applicable: order " + std::to_string(alpha) +
                      " outside (0, 1]";
        return report;
    }
    report.value = static_cast<double>(n) * L * std::pow(T, alpha) / gamma_fn(alpha + 1.0);
    if (L == 0.0) {
        report.verdict = ContractionReport::Verdict::Degenerate;
        report.note = "trivially constant RHS (L = 0)";
    } else if (report.value < 1.0) {
        report.verdict = ContractionReport::Verdict::Guaranteed;
    } else {
        report.verdict = ContractionReport::Verdict::NotGuaranteed;
    }
    return report;
}

double estimate_lipschitz(const FractionalSystem& system,
                          const std::vector<std::vector<double>>& nodes) {
    system.validate();
    const std::size_t n = system.size();
    if (nodes.empty())
        throw std::invalid_argument("estimate_lipschitz: empty trajectory");

    // Bounding box of the trajectory, expanded by 5% of each width.
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (const auto& row : nodes)
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], row[i]);
            hi[i] = std::max(hi[i], row[i]);
        }
    constexpr std::size_t kPoints = 5;
    std::vector<std::size_t> counts(n);
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double width = hi[i] - lo[i];
        const double center = 0.5 * (hi[i] + lo[i]);
        if (width < 1e-6 * std::max(1.0, std::fabs(center))) {
            counts[i] = 1;  // flat axis: no usable slope information
            delta[i] = 0.0;
        } else {
            const double pad = 0.05 * width;
            lo[i] -= pad;
            hi[i] += pad;
            counts[i] = kPoints;
            delta[i] = (hi[i] - lo[i]) / static_cast<double>(kPoints - 1);
        }
    }

    std::size_t slicePoints = 1;
    for (std::size_t i = 0; i < n; ++i)
        slicePoints *= counts[i];
    std::vector<std::size_t> stride(n);
    {
        std::size_t s = 1;
        for (std::size_t i = n; i-- > 0;) {  // state n-1 fastest
            stride[i] = s;
            s *= counts[i];
        }
    }

    std::vector<double> y(n), f(n);
    std::vector<double> slice(slicePoints * n);
    double L = 0.0;
    for (std::size_t tIdx = 0; tIdx < kPoints; ++tIdx) {
        const double t = system.T * static_cast<double>(tIdx) / (kPoints - 1);
        for (std::size_t p = 0; p < slicePoints; ++p) {
            std::size_t rem = p;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t digit = rem / stride[i];
                rem %= stride[i];
                y[i] = counts[i] == 1 ? lo[i] : lo[i] + delta[i] * static_cast<double>(digit);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double v = system.rhs[i](t, y);
                slice[p * n + i] = std::isfinite(v) ? v : 0.0;
            }
        }
        // Neighbor differences along every state axis within the slice.
        for (std::size_t axis = 0; axis < n; ++axis) {
            if (counts[axis] == 1)
                continue;
            for (std::size_t p = 0; p < slicePoints; ++p) {
                const std::size_t digit = (p / stride[axis]) % counts[axis];
                if (digit + 1 >= counts[axis])
                    continue;
                const std::size_t q = p + stride[axis];
                for (std::size_t i = 0; i < n; ++i) {
                    const double slope =
                        std::fabs(slice[q * n + i] - slice[p * n + i]) / delta[axis];
                    L = std::max(L, slope);
                }
            }
        }
    }
    return L;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

ConvergenceStudy convergence_study(const FractionalSystem& system, const ExactSolutionFn& exact,
                                   std::span<const double> stepWidths, const SolveConfig& base) {
    if (!exact)
        throw std::invalid_argument("convergence_study: exact solution callable required");
    if (stepWidths.empty())
        throw std::invalid_argument("convergence_study: need at least one step width");

    const std::size_t n = system.size();
    ConvergenceStudy study;
    std::vector<double> magnitudes(n, 0.0);
    for (double h : stepWidths) {
        SolveConfig cfg = base;
        cfg.h = h;
        cfg.m = 0;
        SolveResult result = solve_hf(system, cfg);
        ConvergenceRow row;
        row.h = h;
        row.infErrors.assign(n, 0.0);
        for (std::size_t j = 0; j < result.nodes.size(); ++j) {
            const std::vector<double> ref = exact(result.grid.node(j));
            if (ref.size() != n)
                throw std::invalid_argument("convergence_study: exact solution returned " +
                                            std::to_string(ref.size()) + " values, expected " +
                                            std::to_string(n));
            for (std::size_t i = 0; i < n; ++i) {
                row.infErrors[i] =
                    std::max(row.infErrors[i], std::fabs(result.nodes[j][i] - ref[i]));
                magnitudes[i] = std::max(magnitudes[i], std::fabs(ref[i]));
            }
        }
        study.rows.push_back(std::move(row));
    }

    study.observedOrders.assign(n, std::numeric_limits<double>::quiet_NaN());
    study.exactStates.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double floor = 1e-13 * std::max(1.0, magnitudes[i]);
        bool allTiny = true;
        for (const auto& row : study.rows)
            allTiny = allTiny && row.infErrors[i] < floor;
        if (allTiny) {
            study.exactStates[i] = true;  // order reported as "exact"
            continue;
        }
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t r = 0; r + 1 < study.rows.size(); ++r) {
            const double e1 = study.rows[r].infErrors[i], e2 = study.rows[r + 1].infErrors[i];
            const double h1 = study.rows[r].h, h2 = study.rows[r + 1].h;
            if (e1 <= 0.0 || e2 <= 0.0 || h1 == h2)
                continue;
            sum += std::log(e1 / e2) / std::log(h1 / h2);
            ++pairs;
        }
        if (pairs > 0)
            study.observedOrders[i] = sum / static_cast<double>(pairs);
    }
    return study;
}

}  // namespace hfde
