#include "finslernav/modelspaces.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "finslernav/fields.hpp"

namespace finslernav {

namespace {

std::vector<std::string> identity_matrix_strings(int n) {
    std::vector<std::string> rows;
    (void)rows;
    std::vector<std::string> flat;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) flat.push_back(i == j ? "1" : "0");
    return flat;
}

std::vector<std::vector<std::string>> square(int n, const std::vector<std::string>& flat) {
    std::vector<std::vector<std::string>> m(static_cast<std::size_t>(n),
                                            std::vector<std::string>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                flat[static_cast<std::size_t>(i * n + j)];
    return m;
}

Box centered_box(int n, double half) {
    return Box(static_cast<std::size_t>(n), {-half, half});
}

std::string scaled(double s, const std::string& expr, int dim) {
    if (s == 1.0) return expr;
    return print(Expr::mul(s < 0.0 ? Expr::neg(Expr::number(-s)) : Expr::number(s), parse(expr, dim)));
}

std::string r2_string(int n) {
    std::string r2 = "x1^2";
    for (int i = 2; i <= n; ++i) r2 += "+x" + std::to_string(i) + "^2";
    return r2;
}

} // namespace

ModelSpace euclidean_wind(int n, const Vecd& W) {
    ModelSpace ms;
    ms.spec.dim = n;
    ms.spec.h = square(n, identity_matrix_strings(n));
    double norm = euclid_norm(W);
    for (double w : W) ms.spec.W.push_back(format_double(w));
    ms.spec.sample_box = centered_box(n, 1.0);
    if (std::fabs(norm - 1.0) < kRegimeTolerance) {
        ms.spec.metric_type = "kropina";
        ms.certificates.push_back({CertKind::UnitWind, 1e-9, 0.0});
    } else if (norm < 1.0) {
        ms.spec.metric_type = norm == 0.0 ? "riemannian" : "randers";
        if (norm > 0.0) ms.certificates.push_back({CertKind::SubcriticalWind, 0.0, 0.0});
    } else {
        throw SpecError("constant wind norm exceeds 1");
    }
    ms.certificates.push_back({CertKind::KillingWind, 1e-8, 0.0});
    ms.certificates.push_back({CertKind::FlatZeroCurvature, 1e-8, 0.0});
    return ms;
}

ModelSpace euclidean_conformal(int n, double scale) {
    ModelSpace ms;
    ms.spec.dim = n;
    ms.spec.h = square(n, identity_matrix_strings(n));
    ms.spec.W.push_back("1");
    for (int i = 1; i < n; ++i) ms.spec.W.push_back("0");
    std::vector<std::string> v;
    for (int i = 1; i <= n; ++i) v.push_back(scaled(scale, "x" + std::to_string(i), n));
    ms.spec.V = v;
    ms.spec.metric_type = "kropina";
    // the admissible region needs h(-V, W) > 0 and F(x, -V) < 1
    Box box = centered_box(n, 0.25);
    box[0] = scale >= 0.0 ? std::pair<double, double>{-0.75, -0.25}
                          : std::pair<double, double>{0.25, 0.75};
    ms.spec.sample_box = box;
    ms.certificates.push_back({CertKind::UnitWind, 1e-9, 0.0});
    ms.certificates.push_back({CertKind::KillingWind, 1e-8, 0.0});
    if (scale == 0.0)
        ms.certificates.push_back({CertKind::KillingV, 1e-9, 0.0});
    else
        ms.certificates.push_back({CertKind::ConformalV, 1e-9, scale / 2.0});
    return ms;
}

ModelSpace s3_hopf() {
    // Stereographic chart of the unit 3-sphere; the wind is the pushforward
    // of the rotation field (p1,p2,p3,p4) -> (-p2,p1,-p4,p3) through the
    // projection, which keeps unit h-norm everywhere.
    ModelSpace ms;
    ms.spec.dim = 3;
    std::string conf = "4/(1+" + r2_string(3) + ")^2";
    std::vector<std::string> flat;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) flat.push_back(i == j ? conf : "0");
    ms.spec.h = square(3, flat);
    ms.spec.W = {"-x2-x1*x3", "x1-x2*x3", "(" + r2_string(3) + "-1)/2-x3^2"};
    ms.spec.metric_type = "kropina";
    ms.spec.guard = "0.64-" + r2_string(3);
    ms.spec.sample_box = centered_box(3, 0.46);
    ms.certificates.push_back({CertKind::UnitWind, 1e-9, 0.0});
    ms.certificates.push_back({CertKind::KillingWind, 1e-8, 0.0});
    ms.certificates.push_back({CertKind::SectionalIsotropy, 1e-6, 1.0});
    return ms;
}

namespace {

ModelSpace scaled_hopf_wind(const std::string& name, double s) {
    ModelSpace ms = s3_hopf();
    ms.name = name;
    for (auto& w : ms.spec.W) w = scaled(s, w, 3);
    if (std::fabs(std::fabs(s) - 1.0) < 1e-15) {
        ms.spec.metric_type = "kropina";
    } else {
        ms.spec.metric_type = "randers";
        ms.certificates.clear();
        ms.certificates.push_back({CertKind::SubcriticalWind, 0.0, 0.0});
        ms.certificates.push_back({CertKind::KillingWind, 1e-8, 0.0});
        ms.certificates.push_back({CertKind::SectionalIsotropy, 1e-6, 1.0});
    }
    return ms;
}

ModelSpace with_v(ModelSpace ms, const std::string& name, double vscale,
                  Certificate vcert) {
    ms.name = name;
    std::vector<std::string> v;
    for (const auto& w : ms.spec.W) v.push_back(scaled(vscale, w, ms.spec.dim));
    ms.spec.V = v;
    ms.certificates.push_back(vcert);
    return ms;
}

std::map<std::string, ModelSpace> build_registry() {
    std::map<std::string, ModelSpace> reg;
    auto add = [&](ModelSpace ms, const std::string& name) {
        ms.name = name;
        reg[name] = std::move(ms);
    };

    add(euclidean_wind(2, {1.0, 0.0}), "flat-kropina");
    add(euclidean_wind(3, {1.0, 0.0, 0.0}), "flat-kropina-3d");
    add(euclidean_wind(2, {0.5, 0.0}), "flat-randers");
    add(euclidean_wind(3, {0.5, 0.0, 0.0}), "flat-randers-3d");

    {
        // conformal wind W = -0.15 x: symmetrized derivative -0.3 h = -4c h
        ModelSpace ms;
        ms.spec.dim = 2;
        ms.spec.h = square(2, identity_matrix_strings(2));
        ms.spec.W = {"-0.15*x1", "-0.15*x2"};
        ms.spec.metric_type = "randers";
        ms.spec.sample_box = centered_box(2, 1.0);
        ms.certificates.push_back({CertKind::SubcriticalWind, 0.0, 0.0});
        ms.certificates.push_back({CertKind::WindConformal, 1e-9, 0.075});
        add(std::move(ms), "flat-randers-conformal");
    }
    {
        // holomorphic-type wind: conformal with factor c(x) = -0.1 x1, the
        // position-dependent case of the isotropic S-curvature family
        ModelSpace ms;
        ms.spec.dim = 2;
        ms.spec.h = square(2, identity_matrix_strings(2));
        ms.spec.W = {"0.1*(x1^2-x2^2)", "0.2*x1*x2"};
        ms.spec.metric_type = "randers";
        ms.spec.sample_box = centered_box(2, 1.0);
        ms.certificates.push_back({CertKind::SubcriticalWind, 0.0, 0.0});
        ms.certificates.push_back({CertKind::WindConformalAny, 1e-9, 0.0});
        add(std::move(ms), "flat-randers-holomorphic");
    }
    {
        // warped product: Killing wind over a metric that is not Einstein
        ModelSpace ms;
        ms.spec.dim = 3;
        std::vector<std::string> flat = identity_matrix_strings(3);
        flat[8] = "1+0.3*x1^2";
        ms.spec.h = square(3, flat);
        ms.spec.W = {"0", "0", "0.2"};
        ms.spec.metric_type = "randers";
        ms.spec.sample_box = centered_box(3, 1.0);
        ms.certificates.push_back({CertKind::SubcriticalWind, 0.0, 0.0});
        ms.certificates.push_back({CertKind::KillingWind, 1e-8, 0.0});
        ms.certificates.push_back({CertKind::NonEinstein, 1e-4, 0.0});
        add(std::move(ms), "warped-randers");
    }

    add(s3_hopf(), "s3-hopf");
    add(scaled_hopf_wind("s3-hopf-randers", 0.5), "s3-hopf-randers");
    add(scaled_hopf_wind("s3-hopf-reversed", -1.0), "s3-hopf-reversed");
    add(with_v(s3_hopf(), "s3-hopf-killing", -0.5, {CertKind::KillingV, 1e-8, 0.0}),
        "s3-hopf-killing");
    add(with_v(s3_hopf(), "s3-hopf-critical", -2.0, {CertKind::KillingV, 1e-8, 0.0}),
        "s3-hopf-critical");

    add(euclidean_conformal(2, 1.0), "flat-kropina-conformal");
    add(euclidean_conformal(3, 1.0), "flat-kropina-conformal-3d");

    {
        ModelSpace ms = euclidean_wind(2, {1.0, 0.0});
        ms.spec.V = std::vector<std::string>{"-0.5", "0"};
        ms.certificates.push_back({CertKind::KillingV, 1e-9, 0.0});
        add(std::move(ms), "flat-kropina-composite-randers");
    }
    {
        ModelSpace ms = euclidean_wind(2, {1.0, 0.0});
        ms.spec.V = std::vector<std::string>{"-2", "0"};
        ms.certificates.push_back({CertKind::KillingV, 1e-9, 0.0});
        add(std::move(ms), "flat-kropina-composite-critical");
    }
    {
        // unit-norm wind that rotates with x1: not Killing anywhere generic
        ModelSpace ms;
        ms.spec.dim = 3;
        ms.spec.h = square(3, identity_matrix_strings(3));
        ms.spec.W = {"cos(x1)", "sin(x1)", "0"};
        ms.spec.metric_type = "kropina";
        ms.spec.sample_box = centered_box(3, 1.0);
        ms.certificates.push_back({CertKind::UnitWind, 1e-9, 0.0});
        ms.certificates.push_back({CertKind::KillingResidualExceeds, 1e-4, 0.0});
        add(std::move(ms), "flat-kropina-nonkilling");
    }
    {
        ModelSpace ms;
        ms.spec.dim = 2;
        ms.spec.h = square(2, identity_matrix_strings(2));
        ms.spec.W = {"0.3*x1^2", "0"};
        ms.spec.metric_type = "randers";
        ms.spec.sample_box = centered_box(2, 1.0);
        ms.certificates.push_back({CertKind::SubcriticalWind, 0.0, 0.0});
        ms.certificates.push_back({CertKind::ConformalResidualExceeds, 1e-3, 0.0});
        add(std::move(ms), "flat-randers-nonconformal");
    }
    return reg;
}

const std::map<std::string, ModelSpace>& registry() {
    static const std::map<std::string, ModelSpace> reg = build_registry();
    return reg;
}

const char* cert_name(CertKind k) {
    switch (k) {
    case CertKind::UnitWind: return "unit-wind";
    case CertKind::WindConformalAny: return "wind-conformal-varying";
    case CertKind::SubcriticalWind: return "subcritical-wind";
    case CertKind::KillingWind: return "killing-wind";
    case CertKind::WindConformal: return "wind-conformal";
    case CertKind::SectionalIsotropy: return "sectional-isotropy";
    case CertKind::FlatZeroCurvature: return "flat-zero-curvature";
    case CertKind::ConformalV: return "conformal-v";
    case CertKind::KillingV: return "killing-v";
    case CertKind::KillingResidualExceeds: return "killing-residual-exceeds";
    case CertKind::ConformalResidualExceeds: return "conformal-residual-exceeds";
    case CertKind::NonEinstein: return "non-einstein";
    }
    return "?";
}

std::vector<Vecd> certificate_points(const LoadedSpec& ls, int count) {
    QuasiRandomSequence seq(ls.raw.dim);
    std::vector<Vecd> pts;
    for (int s = 0; pts.size() < static_cast<std::size_t>(count) && s < 8 * count; ++s) {
        Vecd x = seq.box_point(static_cast<std::uint64_t>(s), ls.box);
        if (ls.h.guard && !(ls.h.guard->eval_d(x, ls.h.params) > 0.0)) continue;
        pts.push_back(std::move(x));
    }
    return pts;
}

CertificateResult run_certificate(const LoadedSpec& ls, const Certificate& c) {
    CertificateResult out;
    out.property = cert_name(c.kind);
    out.tolerance = c.tolerance;
    const int n = ls.raw.dim;
    CounterRng rng(0xF1A5);
    std::vector<Vecd> pts = certificate_points(ls, 16);

    switch (c.kind) {
    case CertKind::UnitWind: {
        for (const Vecd& x : pts)
            out.residual = std::max(out.residual, std::fabs(norm_h(ls.h, ls.W, x) - 1.0));
        out.passed = out.residual <= c.tolerance;
        break;
    }
    case CertKind::SubcriticalWind: {
        for (const Vecd& x : pts) out.residual = std::max(out.residual, norm_h(ls.h, ls.W, x));
        out.passed = out.residual < 1.0 - kRegimeTolerance;
        break;
    }
    case CertKind::KillingWind:
    case CertKind::KillingResidualExceeds: {
        for (const Vecd& x : pts) {
            Matd dw = cov_deriv_lowered<double>(ls.h, ls.W, x);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out.residual = std::max(out.residual, std::fabs(dw(i, j) + dw(j, i)));
        }
        out.passed = c.kind == CertKind::KillingWind ? out.residual <= c.tolerance
                                                     : out.residual >= c.tolerance;
        break;
    }
    case CertKind::WindConformal:
    case CertKind::WindConformalAny: {
        for (const Vecd& x : pts) {
            Matd dw = cov_deriv_lowered<double>(ls.h, ls.W, x);
            Matd hm = metric_matrix<double>(ls.h, x);
            double chat = -conformal_factor_estimate(ls.h, ls.W, x);
            if (c.kind == CertKind::WindConformal)
                out.residual = std::max(out.residual, std::fabs(chat - c.expected));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out.residual = std::max(
                        out.residual, std::fabs(dw(i, j) + dw(j, i) + 4.0 * chat * hm(i, j)));
        }
        out.passed = out.residual <= c.tolerance;
        break;
    }
    case CertKind::ConformalResidualExceeds: {
        for (const Vecd& x : pts) {
            Matd dw = cov_deriv_lowered<double>(ls.h, ls.W, x);
            Matd hm = metric_matrix<double>(ls.h, x);
            double rho = conformal_factor_estimate(ls.h, ls.W, x);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out.residual = std::max(
                        out.residual, std::fabs(dw(i, j) + dw(j, i) - 4.0 * rho * hm(i, j)));
        }
        out.passed = out.residual >= c.tolerance;
        break;
    }
    case CertKind::SectionalIsotropy: {
        for (const Vecd& x : pts) {
            IsotropyResult iso = sectional_isotropy(ls.h, x, rng, 4);
            out.residual = std::max(out.residual,
                                    std::max(iso.max_deviation, std::fabs(iso.mean - c.expected)));
        }
        out.passed = out.residual <= c.tolerance;
        break;
    }
    case CertKind::FlatZeroCurvature: {
        std::uint64_t idx = 0;
        for (const Vecd& x : pts) {
            SampleStream stream(rng, idx++);
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            FinslerCurvature fc = finsler_curvature(ls.metric, x, y);
            out.residual = std::max(out.residual, std::fabs(fc.ric));
            out.residual = std::max(out.residual, max_abs(fc.R));
            out.residual = std::max(out.residual, std::fabs(s_curvature(ls.metric, x, y)));
        }
        out.passed = out.residual <= c.tolerance;
        break;
    }
    case CertKind::ConformalV:
    case CertKind::KillingV: {
        if (!ls.V) throw SpecError("certificate needs a V field");
        FieldReport rep = ls.resolved_type == "kropina"
                              ? check_conformal_kropina(ls.h, ls.W, *ls.V, pts)
                              : check_conformal_riemann(ls.h, *ls.V, pts);
        out.residual = std::max(rep.residual_c1, rep.used_wind_condition ? rep.residual_c2 : 0.0);
        if (c.kind == CertKind::KillingV) {
            out.residual = std::max(out.residual, rep.residual_killing);
            out.passed = out.residual <= c.tolerance;
        } else {
            for (double r : rep.rho_hat)
                out.residual = std::max(out.residual, std::fabs(r - c.expected));
            out.passed = out.residual <= c.tolerance;
        }
        break;
    }
    case CertKind::NonEinstein: {
        for (const Vecd& x : pts) {
            Matd ric = ricci_h(ls.h, x);
            MetricAt m = metric_at(ls.h, x);
            double tr = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) tr += m.hinv(i, j) * ric(i, j);
            double mu = tr / (n * (n - 1.0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out.residual = std::max(out.residual,
                                            std::fabs(ric(i, j) - (n - 1.0) * mu * m.h(i, j)));
        }
        out.passed = out.residual >= c.tolerance;
        break;
    }
    }
    return out;
}

} // namespace

std::vector<std::string> model_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : registry()) names.push_back(k);
    return names;
}

std::vector<CertificateResult> run_certificates(const ModelSpace& ms) {
    LoadedSpec ls = load_spec(ms.spec, ms.name);
    std::vector<CertificateResult> results;
    results.reserve(ms.certificates.size());
    for (const Certificate& c : ms.certificates) results.push_back(run_certificate(ls, c));
    return results;
}

const ModelSpace& model(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw SpecError("unknown model: " + name);

    static std::mutex mutex;
    static std::map<std::string, bool> verified;
    std::lock_guard<std::mutex> lock(mutex);
    auto v = verified.find(name);
    if (v == verified.end()) {
        std::string failure;
        for (const CertificateResult& r : run_certificates(it->second)) {
            if (!r.passed) {
                failure = "model '" + name + "' failed certificate '" + r.property +
                          "' (residual " + format_double(r.residual) + ", bound " +
                          format_double(r.tolerance) + ")";
                break;
            }
        }
        verified[name] = failure.empty();
        if (!failure.empty()) throw CertificateFailureError(failure);
    } else if (!v->second) {
        throw CertificateFailureError("model '" + name + "' previously failed its certificates");
    }
    return it->second;
}

LoadedSpec load_model(const std::string& name) {
    const ModelSpace& ms = model(name);
    return load_spec(ms.spec, ms.name);
}

} // namespace finslernav
