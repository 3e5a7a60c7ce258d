#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace repdesc {

/// Neumaier-compensated accumulator (Kahan-Babuska variant).
///
/// Accumulation order is part of the library contract: every routine feeds
/// values strictly left to right in input order, so a given sequence produces
/// the same bits on every conforming platform, and reordering-induced drift
/// stays out of the million-sample benchmark runs.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sum of `values`, left to right, compensated.
inline double compensated_sum(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

/// Dot product accumulated left to right, compensated. Callers validate that
/// the sizes match.
inline double compensated_dot(std::span<const double> a, std::span<const double> b) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
    return acc.value();
}

}  // namespace repdesc
