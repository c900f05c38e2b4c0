#include "cqw/quadrature.hpp"

#include "cqw/errors.hpp"

namespace cqw {

UniformGrid UniformGrid::spanning(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) {
        throw ConfigError("grid needs at least two points over a nonempty interval");
    }
    return UniformGrid{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

std::vector<double> UniformGrid::points() const {
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) xs[i] = at(i);
    return xs;
}

double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);

    // Simpson needs an odd sample count; peel a 3/8 panel off the end otherwise.
    const std::size_t simpson_end = (n % 2 == 1) ? n - 1 : n - 4;
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < simpson_end; i += 2) odd += f[i];
    for (std::size_t i = 2; i < simpson_end; i += 2) even += f[i];
    double total = simpson_end == 0 ? 0.0 : h / 3.0 * (f[0] + 4.0 * odd + 2.0 * even + f[simpson_end]);
    if (simpson_end != n - 1) {
        const std::size_t k = simpson_end;
        total += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    return total;
}

double simpson_product(std::span<const double> a, std::span<const double> b, double h) {
    if (a.size() != b.size()) throw ConfigError("quadrature operands differ in length");
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return simpson(prod, h);
}

double simpson_product(std::span<const double> a, std::span<const double> b,
                       std::span<const double> c, double h) {
    if (a.size() != b.size() || a.size() != c.size()) {
        throw ConfigError("quadrature operands differ in length");
    }
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i] * c[i];
    return simpson(prod, h);
}

}  // namespace cqw
