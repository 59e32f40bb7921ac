#include "finslernav/fields.hpp"

#include <cmath>

#include "finslernav/finsler.hpp"

namespace finslernav {

const char* to_string(FieldVerdict v) {
    switch (v) {
    case FieldVerdict::Killing: return "killing";
    case FieldVerdict::Homothetic: return "homothetic";
    case FieldVerdict::Conformal: return "conformal";
    case FieldVerdict::None: return "none";
    }
    return "?";
}

double conformal_factor_estimate(const RiemannMetric& h, const Field& V,
                                 std::span<const double> x) {
    const int n = h.dim;
    Matd dv = cov_deriv_lowered<double>(h, V, x);
    MetricAt m = metric_at(h, x);
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr += m.hinv(i, j) * (dv(i, j) + dv(j, i));
    return tr / (4.0 * n);
}

namespace {

FieldReport conformal_report(const RiemannMetric& h, const Field* W, const Field& V,
                             std::span<const Vecd> samples, std::optional<double> rho_supplied) {
    const int n = h.dim;
    FieldReport rep;
    rep.used_wind_condition = W != nullptr;
    rep.samples.assign(samples.begin(), samples.end());
    rep.rho_hat.reserve(samples.size());

    for (const Vecd& x : samples) {
        Matd dv = cov_deriv_lowered<double>(h, V, x);
        MetricAt m = metric_at(h, x);

        double rho = 0.0;
        if (rho_supplied) {
            rho = *rho_supplied;
        } else {
            double tr = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) tr += m.hinv(i, j) * (dv(i, j) + dv(j, i));
            rho = tr / (4.0 * n);
        }
        rep.rho_hat.push_back(rho);

        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double sym = dv(i, j) + dv(j, i);
                rep.residual_killing = std::max(rep.residual_killing, std::fabs(sym));
                rep.residual_c1 = std::max(rep.residual_c1, std::fabs(sym - 4.0 * rho * m.h(i, j)));
            }

        if (W) {
            double wnorm = norm_h(h, *W, x);
            if (std::fabs(wnorm - 1.0) > kRegimeTolerance)
                throw RegimeMismatchError("wind norm is not 1 at a sample point (|W|_h = " +
                                          format_double(wnorm) + ")");
            Matd dw = cov_deriv_lowered<double>(h, *W, x);
            Vecd vup = raised(h, V, x);
            Vecd wup = raised(h, *W, x);
            Vecd wlow = lowered(h, *W, x);
            for (int j = 0; j < n; ++j) {
                double lhs = 0.0;
                for (int i = 0; i < n; ++i)
                    lhs += vup[static_cast<std::size_t>(i)] * dw(j, i) +
                           wup[static_cast<std::size_t>(i)] * dv(i, j);
                rep.residual_c2 = std::max(
                    rep.residual_c2, std::fabs(lhs - 2.0 * rho * wlow[static_cast<std::size_t>(j)]));
            }
        }
    }

    double sum = 0.0;
    for (double r : rep.rho_hat) sum += r;
    rep.rho_mean = sum / static_cast<double>(rep.rho_hat.size());
    double var = 0.0;
    for (double r : rep.rho_hat) var += (r - rep.rho_mean) * (r - rep.rho_mean);
    rep.rho_stdev = std::sqrt(var / static_cast<double>(rep.rho_hat.size()));

    double max_abs_rho = 0.0;
    for (double r : rep.rho_hat) max_abs_rho = std::max(max_abs_rho, std::fabs(r));

    bool conformal = rep.residual_c1 < kConformalTolerance &&
                     (!W || rep.residual_c2 < kConformalTolerance);
    if (!conformal) {
        rep.verdict = FieldVerdict::None;
    } else if (max_abs_rho < kKillingTolerance) {
        rep.verdict = FieldVerdict::Killing;
    } else if (rep.rho_stdev < kKillingTolerance) {
        rep.verdict = FieldVerdict::Homothetic;
    } else {
        rep.verdict = FieldVerdict::Conformal;
    }
    return rep;
}

} // namespace

FieldReport check_conformal_kropina(const RiemannMetric& h, const Field& W, const Field& V,
                                    std::span<const Vecd> samples,
                                    std::optional<double> rho_supplied) {
    if (samples.empty()) throw SpecError("conformal check needs at least one sample point");
    return conformal_report(h, &W, V, samples, rho_supplied);
}

FieldReport check_conformal_riemann(const RiemannMetric& h, const Field& V,
                                    std::span<const Vecd> samples,
                                    std::optional<double> rho_supplied) {
    if (samples.empty()) throw SpecError("conformal check needs at least one sample point");
    return conformal_report(h, nullptr, V, samples, rho_supplied);
}

RTensorData r_tensor(const RiemannMetric& alpha, const Field& beta, std::span<const double> x) {
    const int n = alpha.dim;
    Matd db = cov_deriv_lowered<double>(alpha, beta, x);
    MetricAt m = metric_at(alpha, x);
    RTensorData out;
    out.r = Matd(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.r(i, j) = 0.5 * (db(i, j) + db(j, i));
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr += m.hinv(i, j) * out.r(i, j);
    out.sigma_hat = tr / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.anisotropy_residual =
                std::max(out.anisotropy_residual, std::fabs(out.r(i, j) - out.sigma_hat * m.h(i, j)));
            out.killing_residual = std::max(out.killing_residual, std::fabs(out.r(i, j)));
        }
    return out;
}

} // namespace finslernav
