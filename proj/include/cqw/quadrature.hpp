#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cqw {

// Uniformly spaced sample points x_i = start + i * step, i in [0, count).
struct UniformGrid {
    double start = 0.0;
    double step = 0.0;
    std::size_t count = 0;

    static UniformGrid spanning(double lo, double hi, std::size_t count);

    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double stop() const { return at(count - 1); }
    std::vector<double> points() const;
};

// Composite Simpson rule over uniformly spaced samples. An even number of
// intervals is required; otherwise the last interval falls back to the
// 3/8 rule on the final four samples.
double simpson(std::span<const double> values, double step);

// Simpson integral of the pointwise product a * b (* c when given).
double simpson_product(std::span<const double> a, std::span<const double> b, double step);
double simpson_product(std::span<const double> a, std::span<const double> b,
                       std::span<const double> c, double step);

}  // namespace cqw
