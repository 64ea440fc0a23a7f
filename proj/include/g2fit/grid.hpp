#pragma once

#include <cstddef>
#include <vector>

namespace g2fit {

/// Uniformly spaced bin centers for the delay axis.
///
/// Delays, decay rates and the repetition period all share one time unit
/// fixed by the input file; the library never converts units.
class DelayGrid {
  public:
    // Validates: non-empty, strictly increasing, spacing uniform and equal
    // to bin_width within 1e-9 relative tolerance.
    DelayGrid(std::vector<double> tau, double bin_width);

    // n_bins centers starting at tau_min, spaced by bin_width.
    static DelayGrid uniform(double tau_min, double bin_width, std::size_t n_bins);

    // 2n bins symmetric about zero, centers at +-(k + 0.5) * bin_width.
    static DelayGrid symmetric(double bin_width, std::size_t n_bins_per_side);

    const std::vector<double>& tau() const { return tau_; }
    double bin_width() const { return bin_width_; }
    std::size_t size() const { return tau_.size(); }
    double max_abs_tau() const { return max_abs_tau_; }

    bool same_grid(const DelayGrid& other, double rel_tol = 1e-9) const;

  private:
    std::vector<double> tau_;
    double bin_width_;
    double max_abs_tau_;
};

}  // namespace g2fit
