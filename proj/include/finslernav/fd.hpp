#pragma once

#include <functional>
#include <span>
#include <vector>

#include "finslernav/errors.hpp"

namespace finslernav {

// Central-difference oracle, second-order accurate. Kept independent of the
// jet engine so the two differentiation channels can check each other.
struct FDOracle {
    double step = 1e-4;
    bool richardson = false;

    FDOracle() = default;
    explicit FDOracle(double h, bool rich = false) : step(h), richardson(rich) {
        if (!(h > 0.0)) throw EvaluationError("finite-difference step must be positive");
    }
};

using ScalarFn = std::function<double(std::span<const double>)>;

namespace detail {

inline double fd_partial_step(const ScalarFn& f, std::span<const double> x, int i, double h) {
    std::vector<double> p(x.begin(), x.end());
    p[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + h;
    double fp = f(p);
    p[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - h;
    double fm = f(p);
    return (fp - fm) / (2.0 * h);
}

} // namespace detail

inline double fd_partial(const ScalarFn& f, std::span<const double> x, int i,
                         const FDOracle& oracle = {}) {
    double d1 = detail::fd_partial_step(f, x, i, oracle.step);
    if (!oracle.richardson) return d1;
    double d2 = detail::fd_partial_step(f, x, i, oracle.step * 0.5);
    return (4.0 * d2 - d1) / 3.0;
}

inline std::vector<double> fd_gradient(const ScalarFn& f, std::span<const double> x,
                                       const FDOracle& oracle = {}) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = fd_partial(f, x, static_cast<int>(i), oracle);
    return g;
}

// Dense symmetric Hessian via second-order central stencils.
inline std::vector<std::vector<double>> fd_hessian(const ScalarFn& f, std::span<const double> x,
                                                   const FDOracle& oracle = {}) {
    const std::size_t n = x.size();
    const double h = oracle.step;
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    std::vector<double> p(x.begin(), x.end());
    double f0 = f(p);
    for (std::size_t i = 0; i < n; ++i) {
        p = {x.begin(), x.end()};
        p[i] = x[i] + h;
        double fp = f(p);
        p[i] = x[i] - h;
        double fm = f(p);
        H[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for (std::size_t j = i + 1; j < n; ++j) {
            p = {x.begin(), x.end()};
            p[i] = x[i] + h;
            p[j] = x[j] + h;
            double fpp = f(p);
            p[j] = x[j] - h;
            double fpm = f(p);
            p[i] = x[i] - h;
            double fmm = f(p);
            p[j] = x[j] + h;
            double fmp = f(p);
            H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    }
    return H;
}

} // namespace finslernav
