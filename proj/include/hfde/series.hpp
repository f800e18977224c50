#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hfde/grid.hpp"

namespace hfde {

/** Hybrid-function series: piecewise-linear interpolant of node samples.
 *
 *  On subinterval [ih, (i+1)h) the value is cS[i] + cT[i]*(t - ih)/h, i.e.
 *  cS holds the left node samples and cT the rise across each subinterval
 *  (sample-and-hold plus right-handed triangular parts).  The sample at the
 *  final node t = T is kept separately so no information is lost at the
 *  right end of the interval.
 */
class HFSeries {
public:
    /** Assemble from raw coefficients.  cS and cT must have grid.m entries.
     *  Cross-consistency (cT being the first differences of the samples) is
     *  the caller's responsibility; series produced by fractional integration
     *  satisfy it only up to rounding. */
    HFSeries(Grid grid, std::vector<double> cS, std::vector<double> cT, double lastSample);

    const Grid& grid() const { return grid_; }
    std::span<const double> sh_coeffs() const { return cS_; }
    std::span<const double> tf_coeffs() const { return cT_; }
    double last_sample() const { return last_; }

    /** Sample value at node j (0 <= j <= m). */
    double node_value(std::size_t j) const;
    /** All m+1 node samples. */
    std::vector<double> node_values() const;

    /** Evaluate the interpolant at t in [0, T]; throws domain error outside. */
    double operator()(double t) const;

private:
    Grid grid_;
    std::vector<double> cS_, cT_;
    double last_;
};

/** Build a series from m+1 equidistant samples f(0), f(h), ..., f(mh). */
HFSeries sample_to_hf(std::span<const double> samples, const Grid& grid);

/** Convenience: sample a callable at the grid nodes and expand it. */
HFSeries sample_to_hf(const std::function<double(double)>& f, const Grid& grid);

/** Evaluate the interpolant (operator() in free-function form). */
double hf_eval(const HFSeries& series, double t);

HFSeries hf_add(const HFSeries& a, const HFSeries& b);
HFSeries hf_scale(const HFSeries& a, double k);

/** Node-wise product: every node sample of the result is the product of the
 *  operand samples at that node. */
HFSeries hf_multiply(const HFSeries& a, const HFSeries& b);

/** Node-wise n-th power; n = 0 yields the constant-1 series. */
HFSeries hf_power(const HFSeries& g, unsigned n);

/** Closed-form inner products of the basis over [0, T).
 *
 *  Distinct indices give zero (disjoint supports); the diagonals are
 *  ∫ S_i^2 = h and ∫ T_i^2 = h/3.
 */
struct InnerProducts {
    double shDiagonal;  ///< ∫ S_i(t)^2 dt = h
    double tfDiagonal;  ///< ∫ T_i(t)^2 dt = h/3

    double sh(std::size_t i, std::size_t j) const { return i == j ? shDiagonal : 0.0; }
    double tf(std::size_t i, std::size_t j) const { return i == j ? tfDiagonal : 0.0; }
};

InnerProducts hf_inner_products(const Grid& grid);

}  // namespace hfde
