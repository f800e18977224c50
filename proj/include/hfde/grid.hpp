#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfde {

/** Uniform grid on [0, T] with m subintervals of width h = T/m.
 *
 *  Nodes are t_j = j*h for j = 0..m.  A grid is the common backbone of every
 *  series, operational matrix and solver result; operations that combine two
 *  objects require their grids to match exactly.
 */
struct Grid {
    std::size_t m = 0;  ///< number of subintervals (>= 1)
    double h = 0.0;     ///< subinterval width
    double T = 0.0;     ///< horizon, T = m*h

    Grid() = default;

    Grid(std::size_t subintervals, double horizon)
        : m(subintervals), h(0.0), T(horizon) {
        if (m == 0)
            throw std::invalid_argument("Grid: subinterval count must be >= 1");
        if (!(horizon > 0.0))
            throw std::invalid_argument("Grid: horizon must be positive");
        h = T / static_cast<double>(m);
    }

    /** Build a grid from a requested step width.  The step must divide the
     *  horizon into a whole number of subintervals (up to rounding slop). */
    static Grid from_step(double step, double horizon) {
        if (!(step > 0.0))
            throw std::invalid_argument("Grid: step width must be positive");
        if (!(horizon > 0.0))
            throw std::invalid_argument("Grid: horizon must be positive");
        double count = horizon / step;
        auto rounded = static_cast<std::size_t>(count + 0.5);
        if (rounded == 0 || std::abs(count - static_cast<double>(rounded)) > 1e-8 * count)
            throw std::invalid_argument(
                "Grid: step " + std::to_string(step) +
                " does not divide horizon " + std::to_string(horizon));
        return Grid(rounded, horizon);
    }

    double node(std::size_t j) const { return static_cast<double>(j) * h; }

    bool operator==(const Grid& other) const {
        return m == other.m && h == other.h && T == other.T;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }
};

/** Throw if two grids differ; `what` names the operation for the message. */
inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": grid mismatch (m=" +
                                    std::to_string(a.m) + " vs m=" + std::to_string(b.m) + ")");
}

}  // namespace hfde
