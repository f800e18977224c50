#include "hfde/series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hfde {

HFSeries::HFSeries(Grid grid, std::vector<double> cS, std::vector<double> cT, double lastSample)
    : grid_(grid), cS_(std::move(cS)), cT_(std::move(cT)), last_(lastSample) {
    if (grid_.m == 0)
        throw std::invalid_argument("HFSeries: invalid grid");
    if (cS_.size() != grid_.m || cT_.size() != grid_.m)
        throw std::invalid_argument("HFSeries: coefficient length " + std::to_string(cS_.size()) +
                                    "/" + std::to_string(cT_.size()) + " does not match m=" +
                                    std::to_string(grid_.m));
}

double HFSeries::node_value(std::size_t j) const {
    if (j > grid_.m)
        throw std::invalid_argument("HFSeries: node index " + std::to_string(j) + " > m");
    return j == grid_.m ? last_ : cS_[j];
}

std::vector<double> HFSeries::node_values() const {
    std::vector<double> out(cS_);
    out.push_back(last_);
    return out;
}

double HFSeries::operator()(double t) const {
    if (!(t >= 0.0) || t > grid_.T)
        throw std::domain_error("HFSeries: t=" + std::to_string(t) + " outside [0, " +
                                std::to_string(grid_.T) + "]");
    if (t == grid_.T)
        return last_;
    auto i = static_cast<std::size_t>(t / grid_.h);
    if (i >= grid_.m)
        i = grid_.m - 1;
    // Exact at nodes either way: if t/h rounds down to the previous
    // subinterval the fraction becomes 1 and cS[i] + cT[i] is the next sample.
    return cS_[i] + cT_[i] * ((t - static_cast<double>(i) * grid_.h) / grid_.h);
}

HFSeries sample_to_hf(std::span<const double> samples, const Grid& grid) {
    if (samples.size() != grid.m + 1)
        throw std::invalid_argument("sample_to_hf: got " + std::to_string(samples.size()) +
                                    " samples, need m+1=" + std::to_string(grid.m + 1));
    std::vector<double> cS(samples.begin(), samples.end() - 1);
    std::vector<double> cT(grid.m);
    for (std::size_t i = 0; i < grid.m; ++i)
        cT[i] = samples[i + 1] - samples[i];
    return HFSeries(grid, std::move(cS), std::move(cT), samples[grid.m]);
}

HFSeries sample_to_hf(const std::function<double(double)>& f, const Grid& grid) {
    std::vector<double> samples(grid.m + 1);
    for (std::size_t j = 0; j <= grid.m; ++j)
        samples[j] = f(grid.node(j));
    return sample_to_hf(samples, grid);
}

double hf_eval(const HFSeries& series, double t) { return series(t); }

HFSeries hf_add(const HFSeries& a, const HFSeries& b) {
    require_same_grid(a.grid(), b.grid(), "hf_add");
    const std::size_t m = a.grid().m;
    std::vector<double> cS(m), cT(m);
    for (std::size_t i = 0; i < m; ++i) {
        cS[i] = a.sh_coeffs()[i] + b.sh_coeffs()[i];
        cT[i] = a.tf_coeffs()[i] + b.tf_coeffs()[i];
    }
    return HFSeries(a.grid(), std::move(cS), std::move(cT), a.last_sample() + b.last_sample());
}

HFSeries hf_scale(const HFSeries& a, double k) {
    const std::size_t m = a.grid().m;
    std::vector<double> cS(m), cT(m);
    for (std::size_t i = 0; i < m; ++i) {
        cS[i] = k * a.sh_coeffs()[i];
        cT[i] = k * a.tf_coeffs()[i];
    }
    return HFSeries(a.grid(), std::move(cS), std::move(cT), k * a.last_sample());
}

HFSeries hf_multiply(const HFSeries& a, const HFSeries& b) {
    require_same_grid(a.grid(), b.grid(), "hf_multiply");
    const std::size_t m = a.grid().m;
    std::vector<double> cS(m), cT(m);
    for (std::size_t i = 0; i < m; ++i) {
        cS[i] = a.sh_coeffs()[i] * b.sh_coeffs()[i];
        // (a_i + da)(b_i + db) - a_i*b_i expanded, da = a.cT[i], db = b.cT[i]:
        // the result's node samples are the products of the operand samples.
        cT[i] = a.sh_coeffs()[i] * b.tf_coeffs()[i] + a.tf_coeffs()[i] * b.sh_coeffs()[i] +
                a.tf_coeffs()[i] * b.tf_coeffs()[i];
    }
    return HFSeries(a.grid(), std::move(cS), std::move(cT), a.last_sample() * b.last_sample());
}

HFSeries hf_power(const HFSeries& g, unsigned n) {
    std::vector<double> nodes = g.node_values();
    for (double& v : nodes)
        v = std::pow(v, static_cast<double>(n));
    return sample_to_hf(nodes, g.grid());
}

InnerProducts hf_inner_products(const Grid& grid) {
    return InnerProducts{grid.h, grid.h / 3.0};
}

}  // namespace hfde
