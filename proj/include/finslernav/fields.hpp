#pragma once

#include <optional>
#include <span>
#include <vector>

#include "finslernav/riemann.hpp"

namespace finslernav {

// Verdict thresholds sit one order above the jet-pipeline noise measured on
// the model charts (<= 1e-9), separating roundoff from genuine violations.
inline constexpr double kConformalTolerance = 1e-7;
inline constexpr double kKillingTolerance = 1e-8;

enum class FieldVerdict { Killing, Homothetic, Conformal, None };

const char* to_string(FieldVerdict v);

struct FieldReport {
    std::vector<Vecd> samples;
    Vecd rho_hat;                  // estimated conformal factor per sample
    double residual_c1 = 0.0;      // max |V_{i|j} + V_{j|i} - 4 rho h_ij|
    double residual_c2 = 0.0;      // max |V^i W_{j|i} + W^i V_{i|j} - 2 rho W_j|
    double residual_killing = 0.0; // max |V_{i|j} + V_{j|i}|
    double rho_mean = 0.0;
    double rho_stdev = 0.0;
    FieldVerdict verdict = FieldVerdict::None;
    bool used_wind_condition = false;
};

// Trace estimate rho = h^{ij} (V_{i|j} + V_{j|i}) / (4n).
double conformal_factor_estimate(const RiemannMetric& h, const Field& V,
                                 std::span<const double> x);

// Scalar-generic version: evaluating on jet coordinates yields the gradient
// of the estimated factor alongside its value.
template <class S>
S conformal_factor_estimate_t(const RiemannMetric& h, const Field& V, std::span<const S> x) {
    const int n = h.dim;
    Matrix<S> dv = cov_deriv_lowered<S>(h, V, x);
    Matrix<S> hinv = inverse(metric_matrix<S>(h, x), "metric inverse");
    S tr = make_like(x[0], 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr += hinv(i, j) * (dv(i, j) + dv(j, i));
    return tr / (4.0 * n);
}

// Both defining conditions of a conformal field on a critical-wind manifold:
// the symmetrized covariant derivative against 4 rho h, and the mixed wind
// condition against 2 rho W. Requires |W|_h = 1 at every sample.
FieldReport check_conformal_kropina(const RiemannMetric& h, const Field& W, const Field& V,
                                    std::span<const Vecd> samples,
                                    std::optional<double> rho_supplied = std::nullopt);

// Riemannian-only variant (first condition alone).
FieldReport check_conformal_riemann(const RiemannMetric& h, const Field& V,
                                    std::span<const Vecd> samples,
                                    std::optional<double> rho_supplied = std::nullopt);

struct RTensorData {
    Matd r;                     // r_ij = (b_{i;j} + b_{j;i}) / 2
    double sigma_hat = 0.0;     // trace fit of r = sigma a
    double anisotropy_residual = 0.0;  // max |r_ij - sigma a_ij|
    double killing_residual = 0.0;     // max |r_ij|
};

// Symmetrized covariant derivative of the 1-form beta with respect to the
// Levi-Civita connection of alpha, with the conformal trace fit.
RTensorData r_tensor(const RiemannMetric& alpha, const Field& beta, std::span<const double> x);

} // namespace finslernav
