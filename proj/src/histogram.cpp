#include "g2fit/histogram.hpp"

#include <utility>

#include "g2fit/errors.hpp"

namespace g2fit {

Histogram::Histogram(DelayGrid grid, std::vector<std::int64_t> counts, std::string unit)
    : grid_(std::move(grid)), counts_(std::move(counts)), unit_(std::move(unit)) {
    if (counts_.size() != grid_.size())
        throw ValidationError("histogram has " + std::to_string(counts_.size()) +
                              " counts for " + std::to_string(grid_.size()) + " bins");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] < 0)
            throw ValidationError("negative count at bin " + std::to_string(i));
        total_ += counts_[i];
        max_count_ = std::max(max_count_, counts_[i]);
    }
}

}  // namespace g2fit
