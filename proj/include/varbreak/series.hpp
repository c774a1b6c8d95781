#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace varbreak {

/// Residuals u_1..u_n fed to the CUSUM-of-squares statistics.
///
/// Construction validates n >= 2 and that every value is finite, so any
/// ResidualSeries in hand is usable by the statistics.
class ResidualSeries {
public:
    explicit ResidualSeries(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    std::vector<double> values_;
};

/// Contiguous analysis window t = offset+1 .. offset+length (1-based time).
///
/// The center r0 = (2*offset/n + length/n)/2 is the window midpoint in
/// rescaled time and anchors the variance polynomial.
class SubsampleWindow {
public:
    /// Throws WindowBoundsError if offset + length > n or length < 2.
    SubsampleWindow(std::size_t offset, std::size_t length, std::size_t n);

    /// Window covering the whole sample.
    static SubsampleWindow full(std::size_t n);

    /// Window of length floor(n^gamma) starting at floor(start_fraction * n).
    static SubsampleWindow from_gamma(double gamma, double start_fraction, std::size_t n);

    std::size_t offset() const noexcept { return offset_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t sample_size() const noexcept { return n_; }
    double center() const noexcept { return center_; }

    /// Exponent gamma with length = floor(n^gamma); log(length)/log(n) when the
    /// window was not built from gamma.
    double gamma() const noexcept { return gamma_; }

    bool is_full() const noexcept { return offset_ == 0 && length_ == n_; }

    /// The window's values from a series of matching length.
    std::span<const double> slice(const ResidualSeries& series) const;

private:
    std::size_t offset_;
    std::size_t length_;
    std::size_t n_;
    double center_;
    double gamma_;
};

}  // namespace varbreak
