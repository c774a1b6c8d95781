#include "varbreak/series.hpp"

#include <cmath>
#include <string>

#include "varbreak/errors.hpp"

namespace varbreak {

ResidualSeries::ResidualSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw DomainError("residual series needs at least 2 values, got " +
                          std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DomainError("residual series value " + std::to_string(i + 1) + " is not finite");
        }
    }
}

SubsampleWindow::SubsampleWindow(std::size_t offset, std::size_t length, std::size_t n)
    : offset_(offset), length_(length), n_(n) {
    if (length < 2) {
        throw WindowBoundsError("window length must be at least 2, got " + std::to_string(length));
    }
    if (offset > n || length > n - offset) {
        throw WindowBoundsError("window [" + std::to_string(offset + 1) + ", " +
                                std::to_string(offset + length) + "] exceeds sample size " +
                                std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    center_ = (2.0 * static_cast<double>(offset) / nd + static_cast<double>(length) / nd) / 2.0;
    gamma_ = std::log(static_cast<double>(length)) / std::log(nd);
}

SubsampleWindow SubsampleWindow::full(std::size_t n) { return SubsampleWindow(0, n, n); }

SubsampleWindow SubsampleWindow::from_gamma(double gamma, double start_fraction, std::size_t n) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw DomainError("gamma must lie in (0, 1]");
    }
    if (!(start_fraction >= 0.0 && start_fraction < 1.0)) {
        throw DomainError("window start fraction must lie in [0, 1)");
    }
    const double nd = static_cast<double>(n);
    // Guard floor(n^1) against pow rounding just below n.
    auto length = static_cast<std::size_t>(std::floor(std::pow(nd, gamma) + 1e-9));
    auto offset = static_cast<std::size_t>(std::floor(start_fraction * nd));
    SubsampleWindow window(offset, length, n);
    window.gamma_ = gamma;
    return window;
}

std::span<const double> SubsampleWindow::slice(const ResidualSeries& series) const {
    if (series.size() != n_) {
        throw WindowBoundsError("window built for n = " + std::to_string(n_) +
                                " applied to a series of length " + std::to_string(series.size()));
    }
    return series.values().subspan(offset_, length_);
}

}  // namespace varbreak
