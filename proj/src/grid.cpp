#include "g2fit/grid.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "g2fit/errors.hpp"

namespace g2fit {

DelayGrid::DelayGrid(std::vector<double> tau, double bin_width)
    : tau_(std::move(tau)), bin_width_(bin_width), max_abs_tau_(0) {
    if (tau_.empty()) throw ValidationError("delay grid is empty");
    if (!(bin_width_ > 0) || !std::isfinite(bin_width_))
        throw ValidationError("bin width must be positive and finite");
    for (std::size_t i = 0; i < tau_.size(); ++i) {
        if (!std::isfinite(tau_[i]))
            throw ValidationError("delay at bin " + std::to_string(i) + " is not finite");
        if (i > 0) {
            const double step = tau_[i] - tau_[i - 1];
            if (!(step > 0))
                throw ValidationError("delays must be strictly increasing at bin " +
                                      std::to_string(i));
            if (std::abs(step - bin_width_) > 1e-9 * bin_width_)
                throw ValidationError("non-uniform delay spacing at bin " + std::to_string(i) +
                                      ": step " + std::to_string(step) + " vs bin width " +
                                      std::to_string(bin_width_));
        }
        max_abs_tau_ = std::max(max_abs_tau_, std::abs(tau_[i]));
    }
}

DelayGrid DelayGrid::uniform(double tau_min, double bin_width, std::size_t n_bins) {
    std::vector<double> tau(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) tau[i] = tau_min + static_cast<double>(i) * bin_width;
    return DelayGrid(std::move(tau), bin_width);
}

DelayGrid DelayGrid::symmetric(double bin_width, std::size_t n_bins_per_side) {
    std::vector<double> tau(2 * n_bins_per_side);
    for (std::size_t i = 0; i < 2 * n_bins_per_side; ++i) {
        const double k = static_cast<double>(i) - static_cast<double>(n_bins_per_side);
        tau[i] = (k + 0.5) * bin_width;
    }
    return DelayGrid(std::move(tau), bin_width);
}

bool DelayGrid::same_grid(const DelayGrid& other, double rel_tol) const {
    if (tau_.size() != other.tau_.size()) return false;
    const double scale = std::max(std::abs(bin_width_), std::abs(other.bin_width_));
    if (std::abs(bin_width_ - other.bin_width_) > rel_tol * scale) return false;
    for (std::size_t i = 0; i < tau_.size(); ++i) {
        const double tol = rel_tol * std::max({std::abs(tau_[i]), std::abs(other.tau_[i]), 1.0});
        if (std::abs(tau_[i] - other.tau_[i]) > tol) return false;
    }
    return true;
}

}  // namespace g2fit
