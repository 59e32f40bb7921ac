#include "finslernav/finsler.hpp"

#include <algorithm>
#include <cmath>

namespace finslernav {

FinslerMetric FinslerMetric::riemannian(RiemannMetric metric, Box box) {
    FinslerMetric m;
    m.kind = MetricKind::Riemannian;
    m.dim = metric.dim;
    m.h = std::move(metric);
    m.box = std::move(box);
    return m;
}

FinslerMetric FinslerMetric::randers_raw(RiemannMetric metric, Field wind, Box box) {
    FinslerMetric m;
    m.kind = MetricKind::Randers;
    m.dim = metric.dim;
    m.h = std::move(metric);
    m.wind = std::move(wind);
    m.box = std::move(box);
    return m;
}

FinslerMetric FinslerMetric::kropina_raw(RiemannMetric metric, Field wind, Box box) {
    FinslerMetric m;
    m.kind = MetricKind::Kropina;
    m.dim = metric.dim;
    m.h = std::move(metric);
    m.wind = std::move(wind);
    m.box = std::move(box);
    return m;
}

FinslerMetric FinslerMetric::implicit_navigation(FinslerMetric base, Field wind) {
    FinslerMetric m;
    m.kind = MetricKind::ImplicitNavigation;
    m.dim = base.dim;
    m.box = base.box;
    m.wind = std::move(wind);
    m.base = std::make_shared<const FinslerMetric>(std::move(base));
    return m;
}

// ---------------------------------------------------------------------------
// Scalar navigation solve
// ---------------------------------------------------------------------------

namespace {

// Residual of the defining equation at trial speed t; +inf encodes "outside
// the base cone", which sits on the positive side of the root.
double navigation_residual(const FinslerMetric& base, std::span<const double> x,
                           std::span<const double> y, const Vecd& w, double t) {
    Vecd z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] / t - w[i];
    try {
        return finsler_f<double>(base, x, z) - 1.0;
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

} // namespace

double solve_navigation_scalar(const FinslerMetric& base, const Field& wind,
                               std::span<const double> x, std::span<const double> y,
                               double* residual_out) {
    const int n = static_cast<int>(x.size());
    Vecd w = field_components<double>(wind, x);

    double norm_y = 0.0;
    for (double c : y) norm_y = std::max(norm_y, std::fabs(c));
    if (norm_y == 0.0) throw ZeroVectorError("navigation solve on the zero vector");

    auto psi = [&](double t) { return navigation_residual(base, x, y, w, t); };

    // Bracket the root: psi decreases through zero along the admissible ray.
    double t_lo = 1.0, t_hi = 1.0;
    double p_lo = psi(1.0);
    double p_hi = p_lo;
    if (p_lo > 0.0) {
        while (p_hi > 0.0) {
            t_hi *= 2.0;
            if (t_hi > 1e8) throw NoBracketError("no sign change up to t = 1e8 (inadmissible direction)");
            p_hi = psi(t_hi);
        }
    } else if (p_lo < 0.0) {
        while (p_lo < 0.0) {
            t_lo *= 0.5;
            if (t_lo < 1e-8) throw NoBracketError("no sign change down to t = 1e-8");
            p_lo = psi(t_lo);
        }
        t_hi = t_lo * 2.0;
    } else {
        if (residual_out) *residual_out = 0.0;
        return 1.0;
    }

    const MonomialTable& tab = monomial_table(n, 1);
    double t = 0.5 * (t_lo + t_hi);
    double resid = psi(t);
    for (int iter = 0; iter < 200; ++iter) {
        if (std::isfinite(resid) && std::fabs(resid) < 1e-14) break;
        double t_next = 0.0;
        bool newton_ok = false;
        if (std::isfinite(resid)) {
            // derivative through y-jets of the base at z = y/t - W
            try {
                std::vector<Jet> xj, zj;
                xj.reserve(x.size());
                zj.reserve(x.size());
                for (int i = 0; i < n; ++i) {
                    xj.push_back(Jet::constant(tab, x[static_cast<std::size_t>(i)]));
                    zj.push_back(Jet::variable(tab, i,
                                               y[static_cast<std::size_t>(i)] / t - w[static_cast<std::size_t>(i)]));
                }
                Jet phi = finsler_f<Jet>(base, xj, zj);
                double dpsi = 0.0;
                for (int i = 0; i < n; ++i) dpsi -= phi.d1(i) * y[static_cast<std::size_t>(i)] / (t * t);
                if (dpsi != 0.0 && std::isfinite(dpsi)) {
                    t_next = t - resid / dpsi;
                    newton_ok = t_next > t_lo && t_next < t_hi;
                }
            } catch (const Error&) {
                newton_ok = false;
            }
        }
        if (!newton_ok) t_next = 0.5 * (t_lo + t_hi);
        // keep the bracket valid
        if (std::isfinite(resid)) {
            if (resid > 0.0) t_lo = t; else t_hi = t;
        } else {
            t_lo = t;
        }
        t = t_next;
        resid = psi(t);
        if (t_hi - t_lo < 1e-17 * t) break;
    }
    if (!(std::isfinite(resid) && std::fabs(resid) < 1e-12))
        throw NonConvergenceError("navigation solve did not reach the residual target");
    if (residual_out) *residual_out = std::fabs(resid);
    return t;
}

// ---------------------------------------------------------------------------
// Pointwise tensors
// ---------------------------------------------------------------------------

double finsler_value(const FinslerMetric& m, std::span<const double> x, std::span<const double> y) {
    return finsler_f<double>(m, x, y);
}

namespace {

Jet f2_y_jet(const FinslerMetric& m, std::span<const double> x, std::span<const double> y, int order) {
    const int n = m.dim;
    const MonomialTable& tab = monomial_table(n, order);
    std::vector<Jet> xj, yj;
    xj.reserve(x.size());
    yj.reserve(y.size());
    for (int i = 0; i < n; ++i) {
        xj.push_back(Jet::constant(tab, x[static_cast<std::size_t>(i)]));
        yj.push_back(Jet::variable(tab, i, y[static_cast<std::size_t>(i)]));
    }
    return finsler_f2<Jet>(m, xj, yj);
}

} // namespace

Matd fundamental_tensor(const FinslerMetric& m, std::span<const double> x,
                        std::span<const double> y) {
    const int n = m.dim;
    Jet f2 = f2_y_jet(m, x, y, 2);
    Matd g(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = 0.5 * f2.d2(i, j);
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

Matd angular_metric(const FinslerMetric& m, std::span<const double> x, std::span<const double> y) {
    const int n = m.dim;
    Jet f2 = f2_y_jet(m, x, y, 2);
    double f = std::sqrt(f2.val());
    Matd h(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        double fyi = f2.d1(i) / (2.0 * f);
        for (int j = 0; j < n; ++j) {
            double fyj = f2.d1(j) / (2.0 * f);
            h(i, j) = 0.5 * f2.d2(i, j) - fyi * fyj;
        }
    }
    return h;
}

CartanData cartan_torsion(const FinslerMetric& m, std::span<const double> x,
                          std::span<const double> y) {
    const int n = m.dim;
    Jet f2 = f2_y_jet(m, x, y, 3);
    CartanData out;
    out.C = Tensor3<double>(n, 0.0);
    out.g = Matd(n, n, 0.0);
    out.f = std::sqrt(f2.val());
    out.f_y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.f_y[static_cast<std::size_t>(i)] = f2.d1(i) / (2.0 * out.f);
        for (int j = 0; j < n; ++j) out.g(i, j) = 0.5 * f2.d2(i, j);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) out.C(i, j, k) = 0.25 * f2.d3(i, j, k);
    }
    Matd ginv = inverse(out.g, "fundamental tensor");
    out.mean.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) s += ginv(j, k) * out.C(i, j, k);
        out.mean[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

double c_reducibility_residual(const FinslerMetric& m, std::span<const double> x,
                               std::span<const double> y) {
    const int n = m.dim;
    if (n < 3) throw DimensionTooSmallError("the Cartan structure residual needs dimension >= 3");
    CartanData c = cartan_torsion(m, x, y);
    Matd hang(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            hang(i, j) = c.g(i, j) - c.f_y[static_cast<std::size_t>(i)] * c.f_y[static_cast<std::size_t>(j)];
    double worst = 0.0;
    const double inv = 1.0 / (n + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double model = inv * (c.mean[static_cast<std::size_t>(i)] * hang(j, k) +
                                      c.mean[static_cast<std::size_t>(j)] * hang(i, k) +
                                      c.mean[static_cast<std::size_t>(k)] * hang(i, j));
                worst = std::max(worst, std::fabs(c.C(i, j, k) - model));
            }
    return worst;
}

Vecd spray(const FinslerMetric& m, std::span<const double> x, std::span<const double> y) {
    return spray_data<double>(m, x, y).G;
}

FinslerCurvature finsler_curvature(const FinslerMetric& m, std::span<const double> x,
                                   std::span<const double> y) {
    const int n = m.dim;
    const MonomialTable& tab = monomial_table(2 * n, 2);
    std::vector<Jet> xo, yo;
    xo.reserve(x.size());
    yo.reserve(y.size());
    for (int i = 0; i < n; ++i) xo.push_back(Jet::variable(tab, i, x[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i) yo.push_back(Jet::variable(tab, n + i, y[static_cast<std::size_t>(i)]));
    SprayData<Jet> sd = spray_data<Jet>(m, xo, yo);

    FinslerCurvature out;
    out.G.resize(static_cast<std::size_t>(n));
    out.g = Matd(n, n, 0.0);
    out.R = Matd(n, n, 0.0);
    out.f2 = scalar_value(sd.f2);
    for (int i = 0; i < n; ++i) {
        out.G[static_cast<std::size_t>(i)] = scalar_value(sd.G[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n; ++j) out.g(i, j) = scalar_value(sd.g(i, j));
    }
    for (int i = 0; i < n; ++i) {
        const Jet& Gi = sd.G[static_cast<std::size_t>(i)];
        for (int k = 0; k < n; ++k) {
            double v = 2.0 * Gi.d1(k); // dG^i/dx^k
            for (int mm = 0; mm < n; ++mm) {
                v -= y[static_cast<std::size_t>(mm)] * Gi.d2(mm, n + k);
                v += 2.0 * out.G[static_cast<std::size_t>(mm)] * Gi.d2(n + mm, n + k);
                v -= Gi.d1(n + mm) * sd.G[static_cast<std::size_t>(mm)].d1(n + k);
            }
            out.R(i, k) = v;
        }
    }
    out.ric = 0.0;
    for (int i = 0; i < n; ++i) out.ric += out.R(i, i);
    return out;
}

double ricci(const FinslerMetric& m, std::span<const double> x, std::span<const double> y) {
    return finsler_curvature(m, x, y).ric;
}

double flag_curvature(const FinslerCurvature& c, std::span<const double> y, const Vecd& v) {
    const int n = c.g.rows();
    double gvv = 0.0, gyv = 0.0;
    Vecd vl(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            gvv += c.g(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            gyv += c.g(i, j) * y[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            vl[static_cast<std::size_t>(i)] += c.g(i, j) * v[static_cast<std::size_t>(j)];
        }
    double den = c.f2 * gvv - gyv * gyv;
    if (den < 1e-12) throw DegenerateFlagError("flag edge is parallel to the pole");
    double num = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            num += vl[static_cast<std::size_t>(i)] * c.R(i, k) * v[static_cast<std::size_t>(k)];
    return num / den;
}

double flag_curvature(const FinslerMetric& m, std::span<const double> x, std::span<const double> y,
                      const Vecd& v) {
    return flag_curvature(finsler_curvature(m, x, y), y, v);
}

double scalar_flag_residual(const FinslerMetric& m, std::span<const double> x,
                            std::span<const double> y) {
    const int n = m.dim;
    FinslerCurvature c = finsler_curvature(m, x, y);
    double khat = c.ric / ((n - 1) * c.f2);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            double ffyk = 0.0; // F F_{y^k} = g_{kj} y^j
            for (int j = 0; j < n; ++j) ffyk += c.g(k, j) * y[static_cast<std::size_t>(j)];
            double model = khat * ((i == k ? c.f2 : 0.0) - ffyk * y[static_cast<std::size_t>(i)]);
            worst = std::max(worst, std::fabs(c.R(i, k) - model));
        }
    }
    return worst;
}

double s_curvature(const FinslerMetric& m, std::span<const double> x, std::span<const double> y) {
    const int n = m.dim;
    const MonomialTable& tab = monomial_table(n, 1);
    std::vector<Jet> xc, yo;
    xc.reserve(x.size());
    yo.reserve(y.size());
    for (int i = 0; i < n; ++i) {
        xc.push_back(Jet::constant(tab, x[static_cast<std::size_t>(i)]));
        yo.push_back(Jet::variable(tab, i, y[static_cast<std::size_t>(i)]));
    }
    SprayData<Jet> sd = spray_data<Jet>(m, xc, yo);
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += sd.G[static_cast<std::size_t>(i)].d1(i);

    std::vector<Jet> xj = seed_coordinates<double>(x, 1);
    Jet sigma = bh_density<Jet>(m, xj);
    double drift = 0.0;
    for (int i = 0; i < n; ++i) drift += y[static_cast<std::size_t>(i)] * sigma.d1(i) / sigma.val();
    return trace - drift;
}

double unit_ball_volume(int n) {
    // omega_n = pi^{n/2} / Gamma(n/2 + 1)
    return std::pow(3.14159265358979323846, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double bh_density_monte_carlo(const FinslerMetric& m, std::span<const double> x,
                              const CounterRng& rng, std::size_t samples) {
    const int n = m.dim;
    // The unit set {F < 1} is the interior of the h-unit ball shifted by W;
    // coordinate extents of that ellipsoid bound the sampling box.
    MetricAt ma = metric_at(m.h, x);
    Vecd w(static_cast<std::size_t>(n), 0.0);
    if (!m.wind.comp.empty()) w = field_components<double>(m.wind, x);
    Box bound(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double r = std::sqrt(ma.hinv(i, i)) * 1.0000001;
        bound[static_cast<std::size_t>(i)] = {w[static_cast<std::size_t>(i)] - r,
                                              w[static_cast<std::size_t>(i)] + r};
    }
    double box_vol = 1.0;
    for (const auto& [lo, hi] : bound) box_vol *= hi - lo;

    std::size_t inside = 0;
    Vecd y(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i)
            y[static_cast<std::size_t>(i)] = rng.uniform(s * static_cast<std::size_t>(n) + static_cast<std::size_t>(i),
                                                         bound[static_cast<std::size_t>(i)].first,
                                                         bound[static_cast<std::size_t>(i)].second);
        try {
            if (finsler_value(m, x, y) < 1.0) ++inside;
        } catch (const Error&) {
            // outside the cone: not in the unit set
        }
    }
    double vol = box_vol * static_cast<double>(inside) / static_cast<double>(samples);
    return unit_ball_volume(n) / vol;
}

Vecd sample_admissible_direction(const FinslerMetric& m, std::span<const double> x,
                                 SampleStream& stream, double margin) {
    const int n = m.dim;
    for (int attempt = 0; attempt < 256; ++attempt) {
        Vecd y = stream.sphere_point(n);
        if (m.kind == MetricKind::Kropina) {
            Vecd w = field_components<double>(m.wind, x);
            double wnorm = norm_h(m.h, x, w);
            Vecd hy = mat_vec(metric_matrix<double>(m.h, x), y);
            double w0 = dot(hy, w);
            if (w0 <= margin * euclid_norm(y) * wnorm) continue;
            return y;
        }
        if (m.kind == MetricKind::ImplicitNavigation) {
            try {
                finsler_value(m, x, y);
            } catch (const Error&) {
                continue;
            }
            return y;
        }
        return y;
    }
    throw OutsideConeError("could not sample an admissible direction (cone too thin)");
}

Vecd sample_flag_edge(const FinslerMetric& m, std::span<const double> x,
                      std::span<const double> y, SampleStream& stream) {
    const int n = m.dim;
    Matd g = fundamental_tensor(m, x, y);
    double gyy = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gyy += g(i, j) * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    for (int attempt = 0; attempt < 256; ++attempt) {
        Vecd v = stream.sphere_point(n);
        double gvv = 0.0, gyv = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                gvv += g(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
                gyv += g(i, j) * y[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            }
        if (gyv * gyv > 0.9 * gyy * gvv) continue;
        return v;
    }
    throw DegenerateFlagError("could not sample a transverse flag edge");
}

CurvatureReport curvature_report(const FinslerMetric& m, std::span<const double> x,
                                 std::span<const double> y, SampleStream& flag_stream,
                                 int flag_count) {
    const int n = m.dim;
    CurvatureReport rep;
    rep.x.assign(x.begin(), x.end());
    rep.y.assign(y.begin(), y.end());
    rep.F = finsler_value(m, x, y);

    FinslerCurvature c = finsler_curvature(m, x, y);
    rep.Ric = c.ric;
    rep.g = c.g;
    rep.G = c.G;
    rep.R = c.R;

    for (int f = 0; f < flag_count; ++f) {
        Vecd v = sample_flag_edge(m, x, y, flag_stream);
        rep.flag_values.push_back(flag_curvature(c, y, v));
    }

    for (double lam : {0.5, 2.0, 7.0}) {
        Vecd ys(y.begin(), y.end());
        for (auto& c2 : ys) c2 *= lam;
        double fl = finsler_value(m, x, ys);
        rep.res_homogeneity = std::max(rep.res_homogeneity,
                                       std::fabs(fl - lam * rep.F) / (lam * rep.F));
    }

    double rscale = 1.0 + max_abs(c.R);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += c.R(i, k) * y[static_cast<std::size_t>(k)];
        rep.res_ry = std::max(rep.res_ry, std::fabs(s) / rscale);
    }

    rep.res_scalar_flag = scalar_flag_residual(m, x, y);

    if (m.kind != MetricKind::ImplicitNavigation) {
        rep.S = s_curvature(m, x, y);
    } else {
        rep.S = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

void validate_metric(const FinslerMetric& m, int samples) {
    if (m.kind == MetricKind::Riemannian || m.kind == MetricKind::ImplicitNavigation) return;
    if (m.box.empty()) throw SpecError("metric validation needs a sample box");
    QuasiRandomSequence seq(m.dim);
    for (int s = 0; s < samples; ++s) {
        Vecd x = seq.box_point(static_cast<std::uint64_t>(s), m.box);
        if (m.h.guard && !(m.h.guard->eval_d(x, m.h.params) > 0.0)) continue;
        double wn = norm_h(m.h, m.wind, x);
        if (m.kind == MetricKind::Randers && !(wn < 1.0 - kRegimeTolerance))
            throw RegimeMismatchError("wind norm reaches 1 on a subcritical metric (|W|_h = " +
                                      format_double(wn) + ")");
        if (m.kind == MetricKind::Kropina && !(std::fabs(wn - 1.0) < kRegimeTolerance))
            throw RegimeMismatchError("wind norm is not 1 on a critical metric (|W|_h = " +
                                      format_double(wn) + ")");
    }
}

} // namespace finslernav
