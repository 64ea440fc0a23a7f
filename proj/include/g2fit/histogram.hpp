#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2fit/grid.hpp"

namespace g2fit {

/// The measured shot record: per-bin photon coincidence counts on a delay grid.
class Histogram {
  public:
    // Validates: one count per bin, every count >= 0.
    Histogram(DelayGrid grid, std::vector<std::int64_t> counts, std::string unit = "");

    const DelayGrid& grid() const { return grid_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    const std::string& unit() const { return unit_; }
    std::size_t size() const { return counts_.size(); }
    std::int64_t total_photons() const { return total_; }
    std::int64_t max_count() const { return max_count_; }

    // Value equality: exact delays and counts; bin width within the grid's
    // own uniformity tolerance (re-derived widths can differ by an ulp).
    bool operator==(const Histogram& other) const {
        return grid_.tau() == other.grid_.tau() && grid_.same_grid(other.grid_) &&
               counts_ == other.counts_ && unit_ == other.unit_;
    }

  private:
    DelayGrid grid_;
    std::vector<std::int64_t> counts_;
    std::string unit_;
    std::int64_t total_ = 0;
    std::int64_t max_count_ = 0;
};

}  // namespace g2fit
