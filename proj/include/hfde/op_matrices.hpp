#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hfde/grid.hpp"
#include "hfde/series.hpp"

namespace hfde {

/** Upper-triangular Toeplitz matrix, stored as its first row r_0..r_{m-1}.
 *
 *  Entry (i, j) is r_{j-i} for j >= i and 0 below the diagonal.  Left
 *  multiplication by a row vector is the causal convolution
 *  y[j] = sum_{i<=j} x[i] * r[j-i], which is all the solver ever needs.
 */
class UpperToeplitz {
public:
    explicit UpperToeplitz(std::vector<double> firstRow);

    std::size_t size() const { return row_.size(); }
    std::span<const double> first_row() const { return row_; }

    double at(std::size_t i, std::size_t j) const;

    /** y = x * M for a row vector x of length m. */
    std::vector<double> apply_left(std::span<const double> x) const;

private:
    std::vector<double> row_;
};

/** The four operational matrices that integrate a hybrid-function series:
 *  S->S, S->T, T->S and T->T blocks of the order-alpha integrator. */
struct OpMatrixSet {
    double alpha = 1.0;
    Grid grid;
    UpperToeplitz Pss, Pst, Pts, Ptt;
};

/** First-order integrator blocks: Pss = h*[0,1,1,...], Pst = h*[1,0,...],
 *  Pts = (h/2)*[0,1,1,...], Ptt = (h/2)*[1,0,...]. */
OpMatrixSet build_first_order(const Grid& grid);

/** Order-alpha integrator blocks.  The first rows are built from the node
 *  samples of the fractionally integrated basis pulses, so integrating any
 *  series that the basis represents exactly is node-exact.  Reduces to
 *  build_first_order at alpha = 1. */
OpMatrixSet build_generalized(double alpha, const Grid& grid);

/** Apply the order-alpha integrator to a series: node j of the result
 *  approximates the Riemann-Liouville integral of the interpolant at t_j. */
HFSeries frac_integrate(const HFSeries& series, const OpMatrixSet& mats);

/** Gamma function for positive arguments (<= 1e-13 relative error). */
double gamma_fn(double x);

}  // namespace hfde
