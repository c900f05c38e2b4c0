#pragma once

// Dense finite-difference Hamiltonian -psi'' + V psi on a uniform grid with
// Dirichlet edges. Eigenvalues come from Sturm-sequence bisection on the
// tridiagonal matrix, so no dense eigensolver is needed.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

class SturmFd {
public:
    SturmFd(const std::function<double(double)>& v, double x_lo, double x_hi, double h) : h_(h) {
        const long n = std::lround((x_hi - x_lo) / h) - 1;
        diag_.resize(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) diag_[static_cast<std::size_t>(i)] = 2.0 / (h * h) + v(x_lo + double(i + 1) * h);
        off2_ = 1.0 / (h * h * h * h);
    }

    // Number of eigenvalues strictly below x.
    long count_below(double x) const {
        long neg = 0;
        double q = 1.0;
        for (std::size_t i = 0; i < diag_.size(); ++i) {
            q = diag_[i] - x - (i == 0 ? 0.0 : off2_ / q);
            if (q == 0.0) q = -1e-300;
            if (q < 0.0) ++neg;
        }
        return neg;
    }

    // k-th eigenvalue (0-based) bracketed in [lo, hi].
    double eigenvalue(long k, double lo, double hi, double tol = 1e-12) const {
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(mid) > k) hi = mid; else lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    double step() const { return h_; }

private:
    double h_;
    double off2_;
    std::vector<double> diag_;
};

// Two neighbouring wells of a biased cascade: well 0 on [0, d], well 1 on
// [period, period + d] lowered by b; each barrier is v1 minus the bias
// accumulated so far.
inline double two_well_potential(double v1, double v2, double b, double d, double period, double x) {
    if (x < 0.0) return v1;
    if (x <= d) return v2;
    if (x < period) return v1 - b;
    if (x <= period + d) return v2 - b;
    return v1 - 2.0 * b;
}

}  // namespace oracle
