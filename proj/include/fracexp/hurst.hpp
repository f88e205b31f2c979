#pragma once

#include "fracexp/errors.hpp"

#include <cmath>
#include <string>

namespace fracexp {

/// Hurst exponent restricted to the long-memory regime 1/2 < h < 1.
class HurstParam {
public:
    explicit HurstParam(double h) : h_(h) {
        if (!(h > 0.5 && h < 1.0))
            throw DomainError("Hurst index must satisfy 1/2 < H < 1 (got " + std::to_string(h) + ")");
    }

    double value() const noexcept { return h_; }
    double two_h() const noexcept { return 2.0 * h_; }
    /// H(2H-1), the constant in front of the kernel.
    double kernel_constant() const noexcept { return h_ * (2.0 * h_ - 1.0); }

    friend bool operator==(HurstParam a, HurstParam b) noexcept { return a.h_ == b.h_; }

private:
    double h_;
};

/// Closed time interval [lo, hi] with 0 <= lo <= hi < inf.
class Interval {
public:
    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo)
            throw DomainError("invalid interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double length() const noexcept { return hi_ - lo_; }

private:
    double lo_;
    double hi_;
};

/// |x|^p with 0 mapped to 0, computed as exp(p ln|x|).
inline double abs_pow(double x, double p) {
    const double a = std::fabs(x);
    if (a == 0.0) return 0.0;
    return std::exp(p * std::log(a));
}

}  // namespace fracexp
