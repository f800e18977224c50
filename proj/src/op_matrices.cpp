#include "hfde/op_matrices.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hfde {

UpperToeplitz::UpperToeplitz(std::vector<double> firstRow) : row_(std::move(firstRow)) {
    if (row_.empty())
        throw std::invalid_argument("UpperToeplitz: first row must be non-empty");
}

double UpperToeplitz::at(std::size_t i, std::size_t j) const {
    if (i >= row_.size() || j >= row_.size())
        throw std::invalid_argument("UpperToeplitz: index out of range");
    return j >= i ? row_[j - i] : 0.0;
}

std::vector<double> UpperToeplitz::apply_left(std::span<const double> x) const {
    const std::size_t m = row_.size();
    if (x.size() != m)
        throw std::invalid_argument("UpperToeplitz: vector length " + std::to_string(x.size()) +
                                    " does not match m=" + std::to_string(m));
    std::vector<double> y(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= j; ++i)
            acc += x[i] * row_[j - i];
        y[j] = acc;
    }
    return y;
}

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: argument must be positive, got " + std::to_string(x));
    return std::tgamma(x);
}

namespace {

/** Node samples and their first differences of the integrated basis pulses.
 *
 *  sigma[k-1] holds the (unscaled) sample of the integrated sample-and-hold
 *  pulse at node k, phi[k-1] the triangular counterpart; xi and psi are the
 *  corresponding first differences:
 *      sigma_k = k^a - (k-1)^a
 *      xi_k    = (k+1)^a - 2 k^a + (k-1)^a
 *      phi_k   = k^{a+1} - (k-1)^a (k+a)
 *      psi_k   = phi_{k+1} - phi_k
 */
struct PulseWeights {
    std::vector<double> sigma, xi, phi, psi;  // entry [k-1] is the k-th value
};

double phi_direct(double a, double k) {
    return std::pow(k, a + 1.0) - std::pow(k - 1.0, a) * (k + a);
}

/** Cancellation-aware forms for large k: the direct differences of k^a lose
 *  up to ~2 log2(k) bits, so factor out k^a and use expm1/log1p instead. */
double sigma_stable(double a, double k) {
    return -std::pow(k, a) * std::expm1(a * std::log1p(-1.0 / k));
}

double xi_stable(double a, double k) {
    return std::pow(k, a) *
           (std::expm1(a * std::log1p(1.0 / k)) + std::expm1(a * std::log1p(-1.0 / k)));
}

double phi_stable(double a, double k) {
    return -std::pow(k, a + 1.0) *
           std::expm1(a * std::log1p(-1.0 / k) + std::log1p(a / k));
}

PulseWeights pulse_weights(double a, std::size_t kmax) {
    // For integral orders the direct formulas are exact integer arithmetic;
    // otherwise switch to the stabilized forms once cancellation sets in.
    const bool integral = (a == std::floor(a));
    const double directLimit = integral ? static_cast<double>(kmax) + 2.0 : 32.0;

    PulseWeights w;
    w.sigma.resize(kmax);
    w.xi.resize(kmax);
    w.phi.resize(kmax + 1);  // one extra so psi_k = phi_{k+1} - phi_k reaches kmax
    w.psi.resize(kmax);
    for (std::size_t i = 0; i < kmax; ++i) {
        const double k = static_cast<double>(i + 1);
        if (k <= directLimit) {
            w.sigma[i] = std::pow(k, a) - std::pow(k - 1.0, a);
            w.xi[i] = std::pow(k + 1.0, a) - 2.0 * std::pow(k, a) + std::pow(k - 1.0, a);
            w.phi[i] = phi_direct(a, k);
        } else {
            w.sigma[i] = sigma_stable(a, k);
            w.xi[i] = xi_stable(a, k);
            w.phi[i] = phi_stable(a, k);
        }
    }
    {
        const double k = static_cast<double>(kmax + 1);
        w.phi[kmax] = k <= directLimit ? phi_direct(a, k) : phi_stable(a, k);
    }
    for (std::size_t i = 0; i < kmax; ++i)
        w.psi[i] = w.phi[i + 1] - w.phi[i];
    return w;
}

}  // namespace

OpMatrixSet build_first_order(const Grid& grid) {
    const std::size_t m = grid.m;
    const double h = grid.h;
    std::vector<double> ss(m, h), st(m, 0.0), ts(m, h / 2.0), tt(m, 0.0);
    ss[0] = 0.0;
    ts[0] = 0.0;
    st[0] = h;
    tt[0] = h / 2.0;
    return OpMatrixSet{1.0, grid, UpperToeplitz(std::move(ss)), UpperToeplitz(std::move(st)),
                       UpperToeplitz(std::move(ts)), UpperToeplitz(std::move(tt))};
}

OpMatrixSet build_generalized(double alpha, const Grid& grid) {
    if (!(alpha > 0.0))
        throw std::domain_error("build_generalized: order must be positive, got " +
                                std::to_string(alpha));
    const std::size_t m = grid.m;
    const double scaleS = std::pow(grid.h, alpha) / gamma_fn(alpha + 1.0);
    const double scaleT = std::pow(grid.h, alpha) / gamma_fn(alpha + 2.0);

    PulseWeights w = pulse_weights(alpha, m > 0 ? m - 1 : 0);
    std::vector<double> ss(m), st(m), ts(m), tt(m);
    ss[0] = 0.0;
    st[0] = scaleS;
    ts[0] = 0.0;
    tt[0] = scaleT;
    for (std::size_t k = 1; k < m; ++k) {
        ss[k] = scaleS * w.sigma[k - 1];
        st[k] = scaleS * w.xi[k - 1];
        ts[k] = scaleT * w.phi[k - 1];
        tt[k] = scaleT * w.psi[k - 1];
    }
    return OpMatrixSet{alpha, grid, UpperToeplitz(std::move(ss)), UpperToeplitz(std::move(st)),
                       UpperToeplitz(std::move(ts)), UpperToeplitz(std::move(tt))};
}

HFSeries frac_integrate(const HFSeries& series, const OpMatrixSet& mats) {
    require_same_grid(series.grid(), mats.grid, "frac_integrate");
    const std::size_t m = mats.grid.m;
    std::vector<double> cS = mats.Pss.apply_left(series.sh_coeffs());
    std::vector<double> fromT = mats.Pts.apply_left(series.tf_coeffs());
    for (std::size_t j = 0; j < m; ++j)
        cS[j] += fromT[j];
    std::vector<double> cT = mats.Pst.apply_left(series.sh_coeffs());
    std::vector<double> tT = mats.Ptt.apply_left(series.tf_coeffs());
    for (std::size_t j = 0; j < m; ++j)
        cT[j] += tT[j];
    const double last = cS[m - 1] + cT[m - 1];
    return HFSeries(mats.grid, std::move(cS), std::move(cT), last);
}

}  // namespace hfde
