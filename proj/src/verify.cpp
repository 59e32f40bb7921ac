#include "finslernav/verify.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "finslernav/fields.hpp"
#include "finslernav/navigation.hpp"
#include "finslernav/parallel.hpp"

namespace finslernav {

namespace {

using nlohmann::json;

// --- sampling ----------------------------------------------------------------

std::vector<Vecd> box_points(const LoadedSpec& ls, const CheckOptions& opt) {
    CounterRng rng(opt.seed);
    std::vector<Vecd> pts;
    pts.reserve(static_cast<std::size_t>(opt.samples));
    for (int i = 0; pts.size() < static_cast<std::size_t>(opt.samples) && i < 64 * opt.samples; ++i) {
        SampleStream s(rng, static_cast<std::uint64_t>(i));
        Vecd x = s.box_point(ls.box);
        if (ls.h.guard && !(ls.h.guard->eval_d(x, ls.h.params) > 0.0)) continue;
        pts.push_back(std::move(x));
    }
    if (pts.empty()) throw SpecError("no admissible sample points inside the box");
    return pts;
}

CheckResult base_result(const std::string& id, const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r;
    r.check_id = id;
    r.spec_id = ls.id;
    r.samples = opt.samples;
    r.seed = opt.seed;
    r.tol_h = opt.tol_h;
    r.tol_c = opt.tol_c;
    return r;
}

void track_worst(CheckResult& r, const Vecd& x, const Vecd& y, double resid) {
    if (resid > r.worst.residual) {
        r.worst.x = x;
        r.worst.y = y;
        r.worst.residual = resid;
    }
}

void equivalence_verdict(CheckResult& r, double side_a, double side_b, double tol_a, double tol_b) {
    bool a_small = side_a <= tol_a, b_small = side_b <= tol_b;
    bool a_large = side_a >= kJointFailureLevel, b_large = side_b >= kJointFailureLevel;
    if (a_small && b_small) {
        r.verdict = "pass";
    } else if (a_large && b_large) {
        r.verdict = "joint-fail";
        if (r.note.empty()) r.note = "both sides violated together (negative control behaviour)";
    } else {
        r.verdict = "fail";
        if (r.note.empty()) r.note = "one side holds while the other is violated";
    }
}

void implication_verdict(CheckResult& r) {
    if (r.hypothesis_residual > r.tol_h) {
        r.verdict = "vacuous";
        if (r.note.empty()) r.note = "hypothesis residual above tolerance; conclusion not claimed";
    } else {
        r.verdict = r.conclusion_residual <= r.tol_c ? "pass" : "fail";
    }
}

double mean_of(const Vecd& v) {
    double s = 0.0;
    for (double c : v) s += c;
    return s / static_cast<double>(v.size());
}

// --- shared residual computations ---------------------------------------------

// Conformal fit of the wind: estimates c(x) from the trace of the symmetrized
// covariant derivative against -4 c h and returns the max equation residual.
double wind_conformal_residual(const LoadedSpec& ls, const std::vector<Vecd>& pts, Vecd* c_out) {
    const int n = ls.raw.dim;
    double worst = 0.0;
    if (c_out) c_out->assign(pts.size(), 0.0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const Vecd& x = pts[p];
        Matd dw = cov_deriv_lowered<double>(ls.h, ls.W, x);
        Matd hm = metric_matrix<double>(ls.h, x);
        double c = -conformal_factor_estimate(ls.h, ls.W, x);
        if (c_out) (*c_out)[p] = c;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(dw(i, j) + dw(j, i) + 4.0 * c * hm(i, j)));
    }
    return worst;
}

double wind_killing_residual(const LoadedSpec& ls, const std::vector<Vecd>& pts) {
    const int n = ls.raw.dim;
    double worst = 0.0;
    for (const Vecd& x : pts) {
        Matd dw = cov_deriv_lowered<double>(ls.h, ls.W, x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) worst = std::max(worst, std::fabs(dw(i, j) + dw(j, i)));
    }
    return worst;
}

double field_killing_residual(const LoadedSpec& ls, const Field& f, const std::vector<Vecd>& pts) {
    const int n = ls.raw.dim;
    double worst = 0.0;
    for (const Vecd& x : pts) {
        Matd dv = cov_deriv_lowered<double>(ls.h, f, x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) worst = std::max(worst, std::fabs(dv(i, j) + dv(j, i)));
    }
    return worst;
}

// Max deviation of the sea sectional curvature from a scalar, and the fitted
// scalar per point.
double sea_isotropy_residual(const LoadedSpec& ls, const std::vector<Vecd>& pts,
                             const CheckOptions& opt, Vecd* mu_out) {
    CounterRng rng(opt.seed ^ 0x15070ull);
    double worst = 0.0;
    if (mu_out) mu_out->assign(pts.size(), 0.0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        IsotropyResult iso = sectional_isotropy(ls.h, pts[p], rng, 6);
        worst = std::max(worst, iso.max_deviation);
        if (mu_out) (*mu_out)[p] = iso.mean;
    }
    return worst;
}

double einstein_residual_sea(const LoadedSpec& ls, const std::vector<Vecd>& pts, Vecd* mu_out) {
    const int n = ls.raw.dim;
    double worst = 0.0;
    if (mu_out) mu_out->assign(pts.size(), 0.0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const Vecd& x = pts[p];
        Matd ric = ricci_h(ls.h, x);
        MetricAt m = metric_at(ls.h, x);
        double tr = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tr += m.hinv(i, j) * ric(i, j);
        double mu = tr / (n * (n - 1.0));
        if (mu_out) (*mu_out)[p] = mu;
        double scale = 1.0 + max_abs(ric);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(ric(i, j) - (n - 1.0) * mu * m.h(i, j)) / scale);
    }
    return worst;
}

struct WEFit {
    Vecd theta;
    double kappa = 0.0;
    double fit_residual = 0.0;
};

// Least squares of Ric/((n-1)F^2) against the basis {3 y^m / F, 1} over 4n
// admissible directions.
WEFit fit_weak_einstein(const FinslerMetric& m, const Vecd& x, SampleStream& stream) {
    const int n = m.dim;
    const int rows = 4 * n;
    const int cols = n + 1;
    std::vector<Vecd> A(static_cast<std::size_t>(rows), Vecd(static_cast<std::size_t>(cols), 0.0));
    Vecd b(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
        Vecd y = sample_admissible_direction(m, x, stream);
        FinslerCurvature c = finsler_curvature(m, x, y);
        double f = std::sqrt(c.f2);
        for (int i = 0; i < n; ++i) A[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
            3.0 * y[static_cast<std::size_t>(i)] / f;
        A[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)] = 1.0;
        b[static_cast<std::size_t>(r)] = c.ric / ((n - 1.0) * c.f2);
    }
    Matd ata(cols, cols, 0.0);
    Vecd atb(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r)
        for (int i = 0; i < cols; ++i) {
            atb[static_cast<std::size_t>(i)] += A[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(r)];
            for (int j = 0; j < cols; ++j)
                ata(i, j) += A[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                             A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
        }
    Vecd sol = solve(ata, atb, "weak-Einstein fit");
    WEFit out;
    out.theta.assign(sol.begin(), sol.begin() + n);
    out.kappa = sol[static_cast<std::size_t>(n)];
    for (int r = 0; r < rows; ++r) {
        double model = 0.0;
        for (int i = 0; i < cols; ++i)
            model += A[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] * sol[static_cast<std::size_t>(i)];
        out.fit_residual = std::max(out.fit_residual, std::fabs(model - b[static_cast<std::size_t>(r)]));
    }
    return out;
}

// Isotropic-S fit per point: c(x) as the mean of S/((n+1)F) over directions,
// residual of S = (n+1) c F relative to 1 + |S|.
double isotropic_s_fit(const FinslerMetric& m, const Vecd& x, SampleStream& stream, int dirs,
                       double* c_out) {
    const int n = m.dim;
    std::vector<Vecd> ys;
    Vecd svals, fvals;
    for (int d = 0; d < dirs; ++d) {
        Vecd y = sample_admissible_direction(m, x, stream);
        double s = s_curvature(m, x, y);
        double f = finsler_value(m, x, y);
        ys.push_back(std::move(y));
        svals.push_back(s);
        fvals.push_back(f);
    }
    double c = 0.0;
    for (int d = 0; d < dirs; ++d) c += svals[static_cast<std::size_t>(d)] / ((n + 1.0) * fvals[static_cast<std::size_t>(d)]);
    c /= static_cast<double>(dirs);
    if (c_out) *c_out = c;
    double worst = 0.0;
    for (int d = 0; d < dirs; ++d) {
        double resid = std::fabs(svals[static_cast<std::size_t>(d)] - (n + 1.0) * c * fvals[static_cast<std::size_t>(d)]) /
                       (1.0 + std::fabs(svals[static_cast<std::size_t>(d)]));
        worst = std::max(worst, resid);
    }
    return worst;
}

// Admissible pole for F whose displaced image u = y + F V stays inside the
// cone of the produced metric with a healthy margin.
Vecd sample_transfer_pole(const FinslerMetric& F, const FinslerMetric& produced, const Field& V,
                          const Vecd& x, SampleStream& stream, Vecd* u_out) {
    for (int attempt = 0; attempt < 128; ++attempt) {
        Vecd y = sample_admissible_direction(F, x, stream);
        double f = finsler_value(F, x, y);
        Vecd v = field_components<double>(V, x);
        Vecd u(y);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += f * v[i];
        if (produced.kind == MetricKind::Kropina) {
            Vecd w = raised(produced.h, produced.wind, x);
            double margin = inner_h(produced.h, x, u, w);
            double scale = norm_h(produced.h, x, u) * norm_h(produced.h, x, w);
            if (margin <= 0.05 * scale) continue;
        }
        if (u_out) *u_out = std::move(u);
        return y;
    }
    throw OutsideConeError("could not sample a displaced pole inside the produced cone");
}

// Defining-equation residual |sea(x, u/Ft - (W+V)) - 1| of a produced metric.
double defining_equation_residual(const LoadedSpec& ls, const CompositeResult& res, const Vecd& x,
                                  const Vecd& u) {
    FinslerMetric sea = FinslerMetric::riemannian(ls.h, ls.box);
    double ft = finsler_value(res.metric, x, u);
    Vecd w = field_components<double>(res.wind_sum, x);
    Vecd z(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) z[i] = u[i] / ft - w[i];
    return std::fabs(finsler_value(sea, x, z) - 1.0);
}

// --- the checks ----------------------------------------------------------------

CheckResult check_randers_isotropic_s(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("randers-isotropic-s", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    Vecd c_hat;
    r.hypothesis_residual = wind_conformal_residual(ls, pts, &c_hat);
    r.constants["c_mean"] = mean_of(c_hat);

    const int n = ls.raw.dim;
    CounterRng rng(opt.seed ^ 0xD17ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<std::pair<Vecd, double>> worst_dir(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        for (int d = 0; d < 2 * n; ++d) {
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            double s = s_curvature(ls.metric, x, y);
            double f = finsler_value(ls.metric, x, y);
            double resid = std::fabs(s - (n + 1.0) * c_hat[static_cast<std::size_t>(p)] * f) /
                           (1.0 + std::fabs(s));
            if (resid > worst[static_cast<std::size_t>(p)]) {
                worst[static_cast<std::size_t>(p)] = resid;
                worst_dir[static_cast<std::size_t>(p)] = {y, resid};
            }
        }
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        track_worst(r, pts[p], worst_dir[p].first, worst[p]);
    }
    equivalence_verdict(r, r.hypothesis_residual, r.conclusion_residual, opt.tol_h, opt.tol_c);
    return r;
}

CheckResult check_randers_weak_flag(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("randers-weak-flag", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    Vecd c_hat, mu_hat;
    double conf = wind_conformal_residual(ls, pts, &c_hat);
    double iso = sea_isotropy_residual(ls, pts, opt, &mu_hat);
    r.hypothesis_residual = std::max(conf, iso);
    r.constants["c_mean"] = mean_of(c_hat);
    r.constants["mu_mean"] = mean_of(mu_hat);

    const int n = ls.raw.dim;
    CounterRng rng(opt.seed ^ 0xF1A6ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    Vecd sigma_vals(pts.size(), 0.0);
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        // gradient of the fitted c through jets
        std::vector<Jet> xj = seed_coordinates<double>(x, 1);
        Jet cj = -conformal_factor_estimate_t<Jet>(ls.h, ls.W, xj);
        double c = cj.val();
        Vecd wup = raised(ls.h, ls.W, x);
        double cxw = 0.0;
        for (int i = 0; i < n; ++i) cxw += cj.d1(i) * wup[static_cast<std::size_t>(i)];
        double sigma = mu_hat[static_cast<std::size_t>(p)] - c * c - 2.0 * cxw;
        sigma_vals[static_cast<std::size_t>(p)] = sigma;
        for (int d = 0; d < 2; ++d) {
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            FinslerCurvature fc = finsler_curvature(ls.metric, x, y);
            Vecd v = sample_flag_edge(ls.metric, x, y, stream);
            double k = flag_curvature(fc, y, v);
            double cxy = 0.0;
            for (int i = 0; i < n; ++i) cxy += cj.d1(i) * y[static_cast<std::size_t>(i)];
            double model = 3.0 * cxy / std::sqrt(fc.f2) + sigma;
            double resid = std::fabs(k - model) / (1.0 + std::fabs(k));
            if (resid > worst[static_cast<std::size_t>(p)]) {
                worst[static_cast<std::size_t>(p)] = resid;
                worst_y[static_cast<std::size_t>(p)] = y;
            }
        }
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    r.constants["sigma_mean"] = mean_of(sigma_vals);
    implication_verdict(r);
    return r;
}

CheckResult check_randers_weak_einstein(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("randers-weak-einstein", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    Vecd c_hat, mu_hat;
    r.hypothesis_residual = wind_conformal_residual(ls, pts, &c_hat);
    double side_sea = einstein_residual_sea(ls, pts, &mu_hat);
    r.constants["c_mean"] = mean_of(c_hat);
    r.constants["mu_mean"] = mean_of(mu_hat);
    r.constants["einstein_residual_sea"] = side_sea;

    const int n = ls.raw.dim;
    CounterRng rng(opt.seed ^ 0xE1257ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        std::vector<Jet> xj = seed_coordinates<double>(x, 1);
        Jet cj = -conformal_factor_estimate_t<Jet>(ls.h, ls.W, xj);
        double c = cj.val();
        Vecd wup = raised(ls.h, ls.W, x);
        double cxw = 0.0;
        for (int i = 0; i < n; ++i) cxw += cj.d1(i) * wup[static_cast<std::size_t>(i)];
        double sigma = mu_hat[static_cast<std::size_t>(p)] - c * c - 2.0 * cxw;
        for (int d = 0; d < 2; ++d) {
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            FinslerCurvature fc = finsler_curvature(ls.metric, x, y);
            double f = std::sqrt(fc.f2);
            double cxy = 0.0;
            for (int i = 0; i < n; ++i) cxy += cj.d1(i) * y[static_cast<std::size_t>(i)];
            double model = (n - 1.0) * (3.0 * cxy / f + sigma) * fc.f2;
            double resid = std::fabs(fc.ric - model) / (1.0 + std::fabs(fc.ric));
            if (resid > worst[static_cast<std::size_t>(p)]) {
                worst[static_cast<std::size_t>(p)] = resid;
                worst_y[static_cast<std::size_t>(p)] = y;
            }
        }
    });
    double side_metric = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        side_metric = std::max(side_metric, worst[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    r.constants["einstein_residual_metric"] = side_metric;
    r.conclusion_residual = std::max(side_metric, side_sea);
    if (r.hypothesis_residual > opt.tol_h) {
        r.verdict = "vacuous";
        r.note = "isotropic S-curvature hypothesis fails";
    } else {
        equivalence_verdict(r, side_sea, side_metric, opt.tol_c, opt.tol_c);
    }
    return r;
}

CheckResult check_kropina_s_equivalence(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("kropina-s-equivalence", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    const int n = ls.raw.dim;

    double killing = wind_killing_residual(ls, pts);
    auto [alpha, beta] = kropina_alpha_beta(ls.metric);
    double r00 = 0.0;
    for (const Vecd& x : pts)
        r00 = std::max(r00, r_tensor(alpha, beta, x).anisotropy_residual);

    CounterRng rng(opt.seed ^ 0x5E9ull);
    std::vector<double> fitr(pts.size(), 0.0), smax(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        double c = 0.0;
        fitr[static_cast<std::size_t>(p)] = isotropic_s_fit(ls.metric, x, stream, 2 * n, &c);
        for (int d = 0; d < 2; ++d) {
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            double s = std::fabs(s_curvature(ls.metric, x, y));
            if (s > smax[static_cast<std::size_t>(p)]) {
                smax[static_cast<std::size_t>(p)] = s;
                worst_y[static_cast<std::size_t>(p)] = y;
            }
        }
    });
    double iso_fit = 0.0, s_zero = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        iso_fit = std::max(iso_fit, fitr[p]);
        if (smax[p] > s_zero) {
            s_zero = smax[p];
            track_worst(r, pts[p], worst_y[p], smax[p]);
        }
    }
    r.constants["residual_isotropic_s_fit"] = iso_fit;
    r.constants["residual_r00_conformal"] = r00;
    r.constants["residual_s_zero"] = s_zero;
    r.constants["residual_wind_killing"] = killing;
    r.hypothesis_residual = std::max(r00, killing);
    r.conclusion_residual = std::max(iso_fit, s_zero);

    double all_max = std::max(std::max(iso_fit, r00), std::max(s_zero, killing));
    double all_min = std::min(std::min(iso_fit, r00), std::min(s_zero, killing));
    if (all_max <= opt.tol_h) {
        r.verdict = "pass";
    } else if (all_min >= kJointFailureLevel) {
        r.verdict = "joint-fail";
        r.note = "all four characterizations violated together";
    } else {
        r.verdict = "fail";
        r.note = "the four characterizations split";
    }
    return r;
}

CheckResult check_kropina_dictionary_bridge(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("kropina-dictionary-bridge", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    auto [alpha, beta] = kropina_alpha_beta(ls.metric);
    double r00 = 0.0;
    Vecd worst_x;
    for (const Vecd& x : pts) {
        double v = r_tensor(alpha, beta, x).anisotropy_residual;
        if (v > r00) {
            r00 = v;
            worst_x = x;
        }
    }
    double killing = wind_killing_residual(ls, pts);
    r.hypothesis_residual = r00;
    r.conclusion_residual = killing;
    r.constants["residual_r00_conformal"] = r00;
    r.constants["residual_wind_killing"] = killing;
    if (!worst_x.empty()) track_worst(r, worst_x, {}, std::max(r00, killing));
    equivalence_verdict(r, r00, killing, opt.tol_h, opt.tol_h);
    return r;
}

CheckResult check_kropina_killing_vanishing_s(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("kropina-killing-vanishing-s", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    r.hypothesis_residual = wind_killing_residual(ls, pts);

    CounterRng rng(opt.seed ^ 0x33ull);
    std::vector<double> smax(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        for (int d = 0; d < 3; ++d) {
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            double s = std::fabs(s_curvature(ls.metric, x, y));
            if (s > smax[static_cast<std::size_t>(p)]) {
                smax[static_cast<std::size_t>(p)] = s;
                worst_y[static_cast<std::size_t>(p)] = y;
            }
        }
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, smax[p]);
        track_worst(r, pts[p], worst_y[p], smax[p]);
    }
    implication_verdict(r);
    return r;
}

CheckResult check_kropina_flag_isotropy(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("kropina-flag-isotropy", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    Vecd mu_hat;
    double iso = sea_isotropy_residual(ls, pts, opt, &mu_hat);
    double killing = wind_killing_residual(ls, pts);
    double mu_min = *std::min_element(mu_hat.begin(), mu_hat.end());
    r.hypothesis_residual = std::max({iso, killing, std::max(0.0, -mu_min)});
    r.constants["mu_mean"] = mean_of(mu_hat);
    r.constants["kappa"] = mean_of(mu_hat);

    CounterRng rng(opt.seed ^ 0xAB34ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        for (int d = 0; d < 2; ++d) {
            Vecd y = sample_admissible_direction(ls.metric, x, stream);
            FinslerCurvature fc = finsler_curvature(ls.metric, x, y);
            Vecd v = sample_flag_edge(ls.metric, x, y, stream);
            double k = flag_curvature(fc, y, v);
            double resid = std::fabs(k - mu_hat[static_cast<std::size_t>(p)]) / (1.0 + std::fabs(k));
            // scalar structure of the curvature operator
            double sf = scalar_flag_residual(ls.metric, x, y) / (1.0 + max_abs(fc.R));
            // no 1/F term: the flag value is scale-invariant in the pole
            Vecd y2(y);
            for (auto& cy : y2) cy *= 2.0;
            double k2 = flag_curvature(ls.metric, x, y2, v);
            double scale_dev = std::fabs(k2 - k) / (1.0 + std::fabs(k));
            double total = std::max({resid, sf, scale_dev});
            if (total > worst[static_cast<std::size_t>(p)]) {
                worst[static_cast<std::size_t>(p)] = total;
                worst_y[static_cast<std::size_t>(p)] = y;
            }
        }
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    implication_verdict(r);
    return r;
}

CheckResult weak_einstein_ab_impl(const RiemannMetric& alpha, const Field& beta,
                                  const FinslerMetric& metric, const Box& box,
                                  const CheckOptions& opt, const std::string& spec_id,
                                  const std::string& check_id) {
    CheckResult r;
    r.check_id = check_id;
    r.spec_id = spec_id;
    r.samples = opt.samples;
    r.seed = opt.seed;
    r.tol_h = opt.tol_h;
    r.tol_c = opt.tol_c;

    LoadedSpec shim;  // minimal view for the shared helpers
    shim.id = spec_id;
    shim.h = alpha;
    shim.box = box;
    shim.raw.dim = alpha.dim;
    std::vector<Vecd> pts = box_points(shim, opt);
    const int n = alpha.dim;

    // constant-norm hypothesis on the 1-form
    Vecd bvals;
    for (const Vecd& x : pts) {
        Vecd bup = raised(alpha, beta, x);
        Vecd blow = lowered(alpha, beta, x);
        bvals.push_back(std::sqrt(std::max(0.0, dot(bup, blow))));
    }
    double b_mean = mean_of(bvals);
    double b_spread = 0.0;
    for (double b : bvals) b_spread = std::max(b_spread, std::fabs(b - b_mean));
    r.constants["b_mean"] = b_mean;
    r.constants["b_spread"] = b_spread;
    if (b_spread > 1e-9 * (1.0 + b_mean)) {
        r.verdict = "vacuous";
        r.note = "hypothesis violated: the 1-form norm b is not constant";
        r.hypothesis_residual = b_spread;
        return r;
    }

    // alpha Einstein + beta Killing
    LoadedSpec alpha_view = shim;
    Vecd mu_hat;
    double einstein = einstein_residual_sea(alpha_view, pts, &mu_hat);
    double beta_killing = 0.0;
    for (const Vecd& x : pts)
        beta_killing = std::max(beta_killing, r_tensor(alpha, beta, x).killing_residual);
    r.hypothesis_residual = std::max(einstein, beta_killing);
    r.constants["mu_mean"] = mean_of(mu_hat);

    CounterRng rng(opt.seed ^ 0xAB1ull);
    std::vector<double> worst(pts.size(), 0.0);
    Vecd kappa_vals(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        WEFit fit = fit_weak_einstein(metric, x, stream);
        Vecd bup = raised(alpha, beta, x);
        double theta_b = 0.0;
        for (int i = 0; i < n; ++i) theta_b += fit.theta[static_cast<std::size_t>(i)] * bup[static_cast<std::size_t>(i)];
        double kappa_formula = 0.25 * (mu_hat[static_cast<std::size_t>(p)] * b_mean * b_mean - 3.0 * theta_b);
        kappa_vals[static_cast<std::size_t>(p)] = kappa_formula;
        double resid = std::max(fit.fit_residual, std::fabs(fit.kappa - kappa_formula));
        worst[static_cast<std::size_t>(p)] = resid;
        worst_y[static_cast<std::size_t>(p)] = bup;
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    r.constants["kappa_mean"] = mean_of(kappa_vals);
    r.constants["kappa_min"] = *std::min_element(kappa_vals.begin(), kappa_vals.end());
    implication_verdict(r);
    return r;
}

CheckResult check_kropina_weak_einstein_ab(const LoadedSpec& ls, const CheckOptions& opt) {
    auto [alpha, beta] = kropina_alpha_beta(ls.metric);
    return weak_einstein_ab_impl(alpha, beta, ls.metric, ls.box, opt, ls.id,
                                 "kropina-weak-einstein-ab");
}

CheckResult check_kropina_weak_einstein(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("kropina-weak-einstein", ls, opt);
    std::vector<Vecd> pts = box_points(ls, opt);
    const int n = ls.raw.dim;
    Vecd mu_hat;
    double einstein = einstein_residual_sea(ls, pts, &mu_hat);
    double killing = wind_killing_residual(ls, pts);
    r.hypothesis_residual = std::max(einstein, killing);
    r.constants["mu_mean"] = mean_of(mu_hat);

    CounterRng rng(opt.seed ^ 0x3601ull);
    std::vector<double> worst(pts.size(), 0.0);
    Vecd kappa_vals(pts.size(), 0.0);
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        WEFit fit = fit_weak_einstein(ls.metric, x, stream);
        Vecd wup = raised(ls.h, ls.W, x);
        double theta_w = 0.0;
        for (int i = 0; i < n; ++i) theta_w += fit.theta[static_cast<std::size_t>(i)] * wup[static_cast<std::size_t>(i)];
        double kappa_formula = mu_hat[static_cast<std::size_t>(p)] - 1.5 * theta_w;
        kappa_vals[static_cast<std::size_t>(p)] = kappa_formula;
        worst[static_cast<std::size_t>(p)] =
            std::max(fit.fit_residual, std::fabs(fit.kappa - kappa_formula));
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        track_worst(r, pts[p], {}, worst[p]);
    }
    r.constants["kappa_mean"] = mean_of(kappa_vals);
    double kappa_min = *std::min_element(kappa_vals.begin(), kappa_vals.end());
    r.constants["kappa_min"] = kappa_min;
    implication_verdict(r);
    if (r.verdict == "pass" && kappa_min < -opt.tol_c)
        r.note = "fitted kappa is negative at a sample (reported, not enforced)";
    return r;
}

CheckResult check_conformal_navigation_randers(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("conformal-navigation-randers", ls, opt);
    if (!ls.V) {
        r.verdict = "vacuous";
        r.note = "spec provides no V field";
        return r;
    }
    std::vector<Vecd> pts = box_points(ls, opt);
    const int n = ls.raw.dim;

    FieldReport conf = check_conformal_kropina(ls.h, ls.W, *ls.V, pts);
    double killing_w = wind_killing_residual(ls, pts);
    Vecd mu_hat;
    double iso = sea_isotropy_residual(ls, pts, opt, &mu_hat);
    r.hypothesis_residual = std::max({conf.residual_c1, conf.residual_c2, killing_w, iso});
    r.constants["rho_mean"] = conf.rho_mean;
    r.constants["rho_stdev"] = conf.rho_stdev;
    r.constants["kappa"] = mean_of(mu_hat);

    CompositeResult res;
    try {
        res = composite(ls.metric, *ls.V);
    } catch (const Error& e) {
        r.verdict = "vacuous";
        r.note = std::string("navigation preconditions fail: ") + e.what();
        return r;
    }
    if (res.classification != MetricKind::Randers) {
        r.verdict = "vacuous";
        r.note = "navigation lands on the critical branch; this check covers the subcritical one";
        return r;
    }

    CounterRng rng(opt.seed ^ 0x7011ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    Vecd kt_vals(pts.size(), 0.0), rho_grad_max(pts.size(), 0.0);
    double s_of_f_max = 0.0, defining_max = 0.0;
    std::vector<double> sfv(pts.size(), 0.0), defv(pts.size(), 0.0);
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        std::vector<Jet> xj = seed_coordinates<double>(x, 1);
        Jet rhoj = conformal_factor_estimate_t<Jet>(ls.h, *ls.V, xj);
        double rho = rhoj.val();
        Vecd wv = raised(ls.h, ls.W, x);
        Vecd vv = field_components<double>(*ls.V, x);
        double rho_x_wv = 0.0, grad_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            rho_x_wv += rhoj.d1(i) * (wv[static_cast<std::size_t>(i)] + vv[static_cast<std::size_t>(i)]);
            grad_norm = std::max(grad_norm, std::fabs(rhoj.d1(i)));
        }
        rho_grad_max[static_cast<std::size_t>(p)] = grad_norm;

        WEFit fit_f = fit_weak_einstein(ls.metric, x, stream);
        double theta_f_w = 0.0;
        for (int i = 0; i < n; ++i) theta_f_w += fit_f.theta[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(i)];

        double kappa = mu_hat[static_cast<std::size_t>(p)];
        double kappa_tilde = kappa - rho * rho + 2.0 * rho_x_wv;
        double kappa_tilde_ric = fit_f.kappa + 1.5 * theta_f_w - rho * rho + 2.0 * rho_x_wv;
        kt_vals[static_cast<std::size_t>(p)] = kappa_tilde;

        double local_worst = 0.0;
        Vecd local_y;
        for (int d = 0; d < 2; ++d) {
            Vecd u;
            Vecd y = sample_transfer_pole(ls.metric, res.metric, *ls.V, x, stream, &u);
            sfv[static_cast<std::size_t>(p)] =
                std::max(sfv[static_cast<std::size_t>(p)], std::fabs(s_curvature(ls.metric, x, y)));
            defv[static_cast<std::size_t>(p)] =
                std::max(defv[static_cast<std::size_t>(p)], defining_equation_residual(ls, res, x, u));

            double ft = finsler_value(res.metric, x, u);
            double st = s_curvature(res.metric, x, u);
            double part1 = std::fabs(st + (n + 1.0) * rho * ft) / (1.0 + std::fabs(st));

            FinslerCurvature fc = finsler_curvature(res.metric, x, u);
            Vecd v = sample_flag_edge(res.metric, x, u, stream);
            double kt = flag_curvature(fc, u, v);
            double theta_tilde = 0.0;
            for (int i = 0; i < n; ++i) theta_tilde -= rhoj.d1(i) * u[static_cast<std::size_t>(i)];
            double part2 = std::fabs(kt - (3.0 * theta_tilde / ft + kappa_tilde)) / (1.0 + std::fabs(kt));

            double model_ric = (n - 1.0) * (3.0 * theta_tilde / ft + kappa_tilde_ric) * fc.f2;
            double part3 = std::fabs(fc.ric - model_ric) / (1.0 + std::fabs(fc.ric));

            double total = std::max({part1, part2, part3});
            if (total > local_worst) {
                local_worst = total;
                local_y = y;
            }
        }
        worst[static_cast<std::size_t>(p)] = local_worst;
        worst_y[static_cast<std::size_t>(p)] = local_y;
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        s_of_f_max = std::max(s_of_f_max, sfv[p]);
        defining_max = std::max(defining_max, defv[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    // side claims: the starting metric has vanishing S (c = 0), the produced
    // metric satisfies the defining equation, and for constant rho the
    // produced constants are constant with no 1/F term
    r.constants["s_of_start_max"] = s_of_f_max;
    r.constants["defining_residual"] = defining_max;
    r.constants["kappa_tilde_mean"] = mean_of(kt_vals);
    r.conclusion_residual = std::max(r.conclusion_residual, s_of_f_max);
    if (defining_max > 1e-10)
        r.conclusion_residual = std::max(r.conclusion_residual, defining_max);
    if (conf.rho_stdev < kKillingTolerance) {
        double kt_spread = 0.0;
        for (double k : kt_vals) kt_spread = std::max(kt_spread, std::fabs(k - mean_of(kt_vals)));
        double grad = *std::max_element(rho_grad_max.begin(), rho_grad_max.end());
        r.constants["kappa_tilde_spread"] = kt_spread;
        r.conclusion_residual = std::max({r.conclusion_residual, kt_spread, grad});
    }
    implication_verdict(r);
    return r;
}

CheckResult check_killing_navigation_kropina(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("killing-navigation-kropina", ls, opt);
    if (!ls.V) {
        r.verdict = "vacuous";
        r.note = "spec provides no V field";
        return r;
    }
    std::vector<Vecd> pts = box_points(ls, opt);
    const int n = ls.raw.dim;

    double killing_v = field_killing_residual(ls, *ls.V, pts);
    double killing_w = wind_killing_residual(ls, pts);
    Vecd mu_hat;
    double iso = sea_isotropy_residual(ls, pts, opt, &mu_hat);
    double speed_dev = 0.0;
    for (const Vecd& x : pts)
        speed_dev = std::max(speed_dev, std::fabs(speed_of_reversed_wind(ls.metric, *ls.V, x) - 1.0));
    r.hypothesis_residual = std::max({killing_v, killing_w, iso, speed_dev});
    r.constants["kappa"] = mean_of(mu_hat);
    r.constants["speed_deviation"] = speed_dev;

    CompositeResult res;
    try {
        res = composite(ls.metric, *ls.V);
    } catch (const Error& e) {
        r.verdict = "vacuous";
        r.note = std::string("navigation preconditions fail: ") + e.what();
        return r;
    }
    if (res.classification != MetricKind::Kropina) {
        r.verdict = "vacuous";
        r.note = "navigation lands on the subcritical branch; this check covers the critical one";
        return r;
    }

    CounterRng rng(opt.seed ^ 0x7012ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    Vecd kt_vals(pts.size(), 0.0);
    std::vector<double> defv(pts.size(), 0.0);
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));

        WEFit fit_f = fit_weak_einstein(ls.metric, x, stream);
        WEFit fit_t = fit_weak_einstein(res.metric, x, stream);
        Vecd wv = raised(ls.h, ls.W, x);
        Vecd vv = field_components<double>(*ls.V, x);
        double correction = 0.0;
        for (int i = 0; i < n; ++i)
            correction += 1.5 * ((fit_f.theta[static_cast<std::size_t>(i)] - fit_t.theta[static_cast<std::size_t>(i)]) * wv[static_cast<std::size_t>(i)] -
                                 fit_t.theta[static_cast<std::size_t>(i)] * vv[static_cast<std::size_t>(i)]);
        double kappa_tilde_model = fit_f.kappa + correction;
        kt_vals[static_cast<std::size_t>(p)] = fit_t.kappa;
        double part3 = std::max({fit_f.fit_residual, fit_t.fit_residual,
                                 std::fabs(fit_t.kappa - kappa_tilde_model)});

        double local_worst = part3;
        Vecd local_y;
        for (int d = 0; d < 2; ++d) {
            Vecd u;
            Vecd y = sample_transfer_pole(ls.metric, res.metric, *ls.V, x, stream, &u);
            defv[static_cast<std::size_t>(p)] =
                std::max(defv[static_cast<std::size_t>(p)], defining_equation_residual(ls, res, x, u));

            double part1 = std::fabs(s_curvature(res.metric, x, u));

            FinslerCurvature fc = finsler_curvature(res.metric, x, u);
            Vecd v = sample_flag_edge(res.metric, x, u, stream);
            double kt = flag_curvature(fc, u, v);
            double part2 = std::fabs(kt - mu_hat[static_cast<std::size_t>(p)]) / (1.0 + std::fabs(kt));
            // pole-scale independence of the flag value
            Vecd u2(u);
            for (auto& cu : u2) cu *= 2.0;
            double kt2 = flag_curvature(res.metric, x, u2, v);
            double scale_dev = std::fabs(kt2 - kt) / (1.0 + std::fabs(kt));

            double total = std::max({part1, part2, scale_dev});
            if (total > local_worst) {
                local_worst = total;
                local_y = y;
            }
        }
        worst[static_cast<std::size_t>(p)] = local_worst;
        worst_y[static_cast<std::size_t>(p)] = local_y;
    });
    double defining_max = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        defining_max = std::max(defining_max, defv[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    r.constants["kappa_tilde_mean"] = mean_of(kt_vals);
    r.constants["defining_residual"] = defining_max;
    if (defining_max > 1e-10)
        r.conclusion_residual = std::max(r.conclusion_residual, defining_max);
    implication_verdict(r);
    return r;
}

CheckResult check_navigation_displacement_identity(const LoadedSpec& ls, const CheckOptions& opt) {
    CheckResult r = base_result("navigation-displacement-identity", ls, opt);
    if (!ls.V) {
        r.verdict = "vacuous";
        r.note = "spec provides no V field";
        return r;
    }
    CompositeResult res;
    try {
        res = composite(ls.metric, *ls.V);
    } catch (const Error& e) {
        r.verdict = "vacuous";
        r.note = std::string("navigation preconditions fail: ") + e.what();
        return r;
    }
    r.constants["branch_critical"] = res.classification == MetricKind::Kropina ? 1.0 : 0.0;

    std::vector<Vecd> pts = box_points(ls, opt);
    CounterRng rng(opt.seed ^ 0x41ull);
    std::vector<double> worst(pts.size(), 0.0);
    std::vector<Vecd> worst_y(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int p) {
        const Vecd& x = pts[static_cast<std::size_t>(p)];
        SampleStream stream(rng, static_cast<std::uint64_t>(p));
        for (int d = 0; d < 5; ++d) {
            Vecd u;
            Vecd y = sample_transfer_pole(ls.metric, res.metric, *ls.V, x, stream, &u);
            double f = finsler_value(ls.metric, x, y);
            double ft = finsler_value(res.metric, x, u);
            double resid = std::fabs(ft - f) / (1.0 + f);
            if (resid > worst[static_cast<std::size_t>(p)]) {
                worst[static_cast<std::size_t>(p)] = resid;
                worst_y[static_cast<std::size_t>(p)] = y;
            }
        }
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        r.conclusion_residual = std::max(r.conclusion_residual, worst[p]);
        track_worst(r, pts[p], worst_y[p], worst[p]);
    }
    // identity bound stated by the construction itself, independent of tol_c
    r.verdict = r.conclusion_residual <= 1e-10 ? "pass" : "fail";
    return r;
}

// --- catalog -------------------------------------------------------------------

struct CheckEntry {
    CheckInfo info;
    CheckResult (*fn)(const LoadedSpec&, const CheckOptions&);
};

const std::vector<CheckEntry>& entries() {
    static const std::vector<CheckEntry> list = {
        {{"randers-isotropic-s",
          "isotropic S-curvature of a subcritical metric is equivalent to a conformal wind",
          false,
          {"randers"}},
         check_randers_isotropic_s},
        {{"randers-weak-flag",
          "weakly isotropic flag curvature from isotropic S-curvature over an isotropic sea",
          false,
          {"randers"}},
         check_randers_weak_flag},
        {{"randers-weak-einstein",
          "the weak Einstein property transfers between the metric and its sea",
          false,
          {"randers"}},
         check_randers_weak_einstein},
        {{"kropina-s-equivalence",
          "the four vanishing-S characterizations hold or fail together",
          false,
          {"kropina"}},
         check_kropina_s_equivalence},
        {{"kropina-dictionary-bridge",
          "1-form conformality in the alpha-beta picture matches the wind Killing equation",
          false,
          {"kropina"}},
         check_kropina_dictionary_bridge},
        {{"kropina-killing-vanishing-s",
          "a Killing unit wind forces vanishing S-curvature",
          false,
          {"kropina"}},
         check_kropina_killing_vanishing_s},
        {{"kropina-flag-isotropy",
          "flag curvature equals the isotropic sea curvature under a Killing unit wind",
          false,
          {"kropina"}},
         check_kropina_flag_isotropy},
        {{"kropina-weak-einstein-ab",
          "weak Einstein characterization in the alpha-beta picture (constant-norm 1-form)",
          false,
          {"kropina"}},
         check_kropina_weak_einstein_ab},
        {{"kropina-weak-einstein",
          "weak Einstein characterization through the navigation data",
          false,
          {"kropina"}},
         check_kropina_weak_einstein},
        {{"conformal-navigation-randers",
          "curvature transfer under navigation with a conformal wind (subcritical outcome)",
          true,
          {"kropina"}},
         check_conformal_navigation_randers},
        {{"killing-navigation-kropina",
          "curvature transfer under navigation with a Killing wind (critical outcome)",
          true,
          {"kropina"}},
         check_killing_navigation_kropina},
        {{"navigation-displacement-identity",
          "the navigation displacement preserves metric values",
          true,
          {"kropina"}},
         check_navigation_displacement_identity},
    };
    return list;
}

} // namespace

const std::vector<CheckInfo>& check_catalog() {
    static const std::vector<CheckInfo> infos = [] {
        std::vector<CheckInfo> v;
        for (const CheckEntry& e : entries()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

bool check_applicable(const CheckInfo& info, const LoadedSpec& ls) {
    if (info.needs_v && !ls.V) return false;
    for (const std::string& t : info.metric_types)
        if (t == ls.resolved_type) return true;
    return false;
}

CheckResult run_check(const std::string& id, const LoadedSpec& ls, const CheckOptions& opt) {
    for (const CheckEntry& e : entries()) {
        if (e.info.id != id) continue;
        if (!check_applicable(e.info, ls)) {
            CheckResult r = base_result(id, ls, opt);
            r.verdict = "vacuous";
            r.note = "check does not apply to this spec (type " + ls.resolved_type +
                     (ls.V ? ", V present)" : ", no V)");
            return r;
        }
        return e.fn(ls, opt);
    }
    throw SpecError("unknown check id: " + id);
}

std::vector<CheckResult> run_all_checks(const LoadedSpec& ls, const CheckOptions& opt) {
    std::vector<CheckResult> out;
    for (const CheckEntry& e : entries())
        if (check_applicable(e.info, ls)) out.push_back(e.fn(ls, opt));
    return out;
}

CheckResult check_weak_einstein_ab(const RiemannMetric& alpha, const Field& beta, const Box& box,
                                   const CheckOptions& opt, const std::string& spec_id) {
    NavigationData data = kropina_to_data(alpha, beta, box);
    FinslerMetric metric = kropina_from_data(data);
    return weak_einstein_ab_impl(alpha, beta, metric, box, opt, spec_id, "kropina-weak-einstein-ab");
}

std::string check_results_to_json(std::span<const CheckResult> results) {
    json arr = json::array();
    for (const CheckResult& r : results) {
        json o;
        o["check"] = r.check_id;
        o["spec"] = r.spec_id;
        o["samples"] = r.samples;
        o["seed"] = r.seed;
        o["tol_h"] = r.tol_h;
        o["tol_c"] = r.tol_c;
        o["hypothesis_residual"] = r.hypothesis_residual;
        o["conclusion_residual"] = r.conclusion_residual;
        json consts;
        for (const auto& [k, v] : r.constants) consts[k] = v;
        o["constants"] = consts;
        o["verdict"] = r.verdict;
        o["note"] = r.note;
        json w;
        w["x"] = r.worst.x;
        w["y"] = r.worst.y;
        w["residual"] = r.worst.residual;
        o["worst"] = w;
        arr.push_back(o);
    }
    return arr.dump(2) + "\n";
}

bool all_passed(std::span<const CheckResult> results) {
    for (const CheckResult& r : results)
        if (r.verdict == "fail") return false;
    return true;
}

} // namespace finslernav
