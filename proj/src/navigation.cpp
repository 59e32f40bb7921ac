#include "finslernav/navigation.hpp"

#include <cmath>

namespace finslernav {

namespace {

std::vector<Vecd> admissible_box_points(const RiemannMetric& h, const Box& box, int samples) {
    QuasiRandomSequence seq(static_cast<int>(box.size()));
    std::vector<Vecd> pts;
    for (int s = 0; pts.size() < static_cast<std::size_t>(samples) && s < 16 * samples; ++s) {
        Vecd x = seq.box_point(static_cast<std::uint64_t>(s), box);
        if (h.guard && !(h.guard->eval_d(x, h.params) > 0.0)) continue;
        pts.push_back(std::move(x));
    }
    if (pts.empty()) throw SpecError("no admissible sample points inside the box");
    return pts;
}

// det of an expression matrix by cofactor expansion along the first row.
Expr expr_det(const std::vector<std::vector<Expr>>& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    Expr acc;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Expr>> minor;
        minor.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Expr> row;
            row.reserve(n - 1);
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(a[r][c]);
            minor.push_back(std::move(row));
        }
        Expr term = Expr::mul(a[0][j], expr_det(minor));
        if (!acc.valid()) {
            acc = term;
        } else {
            acc = (j % 2 == 0) ? Expr::add(acc, term) : Expr::sub(acc, term);
        }
    }
    return acc;
}

// cofactor expansion fixing sign bookkeeping: entry (i,j) of the adjugate.
Expr expr_adjugate_entry(const std::vector<std::vector<Expr>>& a, std::size_t i, std::size_t j) {
    const std::size_t n = a.size();
    std::vector<std::vector<Expr>> minor;
    minor.reserve(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;  // adj = transposed cofactors
        std::vector<Expr> row;
        row.reserve(n - 1);
        for (std::size_t c = 0; c < n; ++c)
            if (c != i) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
    }
    Expr m = n == 1 ? Expr::number(1.0) : expr_det(minor);
    return ((i + j) % 2 == 0) ? m : Expr::neg(m);
}

} // namespace

NavigationData make_navigation_data(RiemannMetric h, Field W, Box box, int samples) {
    NavigationData data;
    double max_dev_one = 0.0, max_norm = 0.0;
    for (const Vecd& x : admissible_box_points(h, box, samples)) {
        double wn = norm_h(h, W, x);
        max_dev_one = std::max(max_dev_one, std::fabs(wn - 1.0));
        max_norm = std::max(max_norm, wn);
    }
    if (max_dev_one < kRegimeTolerance) {
        data.regime = Regime::Critical;
    } else if (max_norm < 1.0 - kRegimeTolerance) {
        data.regime = Regime::Subcritical;
    } else {
        throw RegimeMismatchError("wind norm is neither uniformly 1 nor uniformly below 1");
    }
    data.h = std::move(h);
    data.W = std::move(W);
    data.box = std::move(box);
    return data;
}

double solve_implicit(const FinslerMetric& base, const Field& wind, std::span<const double> x,
                      std::span<const double> y, double* residual_out) {
    return solve_navigation_scalar(base, wind, x, y, residual_out);
}

FinslerMetric randers_from_data(const NavigationData& data) {
    if (data.regime != Regime::Subcritical)
        throw RegimeMismatchError("subcritical navigation data required");
    FinslerMetric m = FinslerMetric::randers_raw(data.h, data.W, data.box);
    validate_metric(m);
    return m;
}

FinslerMetric kropina_from_data(const NavigationData& data) {
    if (data.regime != Regime::Critical)
        throw RegimeMismatchError("critical navigation data required");
    FinslerMetric m = FinslerMetric::kropina_raw(data.h, data.W, data.box);
    validate_metric(m);
    return m;
}

NavigationData kropina_to_data(const RiemannMetric& alpha, const Field& beta, Box box) {
    const int n = alpha.dim;
    if (beta.variance != Variance::Lower)
        throw SpecError("beta must be a covector field (lower variance)");

    std::vector<std::vector<Expr>> a(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = alpha.at(i, j);

    Expr det = expr_det(a);
    // b^i = adj(a)_{ij} b_j / det, b^2 = b^i b_i
    std::vector<Expr> b_up(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Expr acc;
        for (int j = 0; j < n; ++j) {
            Expr term = Expr::mul(expr_adjugate_entry(a, static_cast<std::size_t>(i), static_cast<std::size_t>(j)),
                                  beta.comp[static_cast<std::size_t>(j)]);
            acc = acc.valid() ? Expr::add(acc, term) : term;
        }
        b_up[static_cast<std::size_t>(i)] = Expr::div(acc, det);
    }
    Expr b2;
    for (int i = 0; i < n; ++i) {
        Expr term = Expr::mul(b_up[static_cast<std::size_t>(i)], beta.comp[static_cast<std::size_t>(i)]);
        b2 = b2.valid() ? Expr::add(b2, term) : term;
    }

    // sanity: b must stay away from zero over the box
    {
        QuasiRandomSequence seq(n);
        for (int s = 0; s < 64; ++s) {
            Vecd x = seq.box_point(static_cast<std::uint64_t>(s), box);
            if (alpha.guard && !(alpha.guard->eval_d(x, alpha.params) > 0.0)) continue;
            double b2v = b2.eval_d(x, beta.params);
            if (!(b2v > 1e-18)) throw DegenerateBetaError("the 1-form norm vanishes inside the box");
        }
    }

    RiemannMetric h;
    h.dim = n;
    h.guard = alpha.guard;
    h.params = alpha.params;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            h.upper.push_back(Expr::div(Expr::mul(Expr::number(4.0), alpha.at(i, j)), b2));

    Field W;
    W.dim = n;
    W.variance = Variance::Upper;
    W.params = beta.params;
    for (int i = 0; i < n; ++i)
        W.comp.push_back(Expr::div(b_up[static_cast<std::size_t>(i)], Expr::number(2.0)));

    return make_navigation_data(std::move(h), std::move(W), std::move(box));
}

std::pair<RiemannMetric, Field> kropina_alpha_beta(const FinslerMetric& F) {
    if (F.kind != MetricKind::Kropina)
        throw SpecError("alpha/beta presentation requires a critical metric");
    RiemannMetric alpha = F.h;  // gauge b = 2: a_ij = h_ij
    Field beta;
    beta.dim = F.dim;
    beta.variance = Variance::Lower;
    beta.params = F.wind.params;
    for (int i = 0; i < F.dim; ++i) {
        Expr acc;
        for (int j = 0; j < F.dim; ++j) {
            Expr term = Expr::mul(F.h.at(i, j), F.wind.comp[static_cast<std::size_t>(j)]);
            acc = acc.valid() ? Expr::add(acc, term) : term;
        }
        beta.comp.push_back(Expr::mul(Expr::number(2.0), acc));
    }
    // merge metric parameters so beta expressions evaluate standalone
    for (const auto& [k, v] : F.h.params) beta.params.emplace(k, v);
    return {alpha, beta};
}

double speed_of_reversed_wind(const FinslerMetric& F, const Field& V, std::span<const double> x) {
    if (F.kind != MetricKind::Kropina)
        throw SpecError("reversed-wind speed requires a critical metric");
    Vecd v = field_components<double>(V, x);
    Vecd w = raised(F.h, F.wind, x);
    double vv = inner_h(F.h, x, v, v);
    double wv = inner_h(F.h, x, w, v);
    if (!(wv < 0.0))
        throw ConeViolationError("-V is outside the cone (h(W, V) >= 0)");
    return vv / (-2.0 * wv);
}

CompositeResult composite(const FinslerMetric& F, const Field& V, int samples) {
    if (F.kind != MetricKind::Kropina)
        throw SpecError("composite navigation starts from a critical metric");
    const int n = F.dim;

    CompositeResult out;
    out.min_s = std::numeric_limits<double>::infinity();
    out.max_s = -std::numeric_limits<double>::infinity();

    bool any_randers = false, any_critical = false;
    for (const Vecd& x : admissible_box_points(F.h, F.box, samples)) {
        Vecd v = field_components<double>(V, x);
        Vecd w = raised(F.h, F.wind, x);
        double vv = inner_h(F.h, x, v, v);
        double wv = inner_h(F.h, x, w, v);
        if (wv >= 0.0)
            throw ConeViolationError("-V leaves the cone at a sample point (h(W, V) = " +
                                     format_double(wv) + ")");
        double s = vv + 2.0 * wv;
        double speed = vv / (-2.0 * wv);
        if (speed > 1.0 + kRegimeTolerance)
            throw SpeedLimitError("F(x, -V_x) exceeds 1 at a sample point (value " +
                                  format_double(speed) + ")");
        out.min_s = std::min(out.min_s, s);
        out.max_s = std::max(out.max_s, s);
        out.max_speed = std::max(out.max_speed, speed);
        if (s < -kRegimeTolerance) any_randers = true;
        else any_critical = true;
        ++out.samples_checked;
    }
    if (any_randers && any_critical)
        throw MixedRegimeError("classification varies across the box (s in [" +
                               format_double(out.min_s) + ", " + format_double(out.max_s) + "])");
    out.classification = any_randers ? MetricKind::Randers : MetricKind::Kropina;

    Field sum;
    sum.dim = n;
    sum.variance = Variance::Upper;
    sum.params = F.wind.params;
    for (const auto& [k, val] : V.params) sum.params.emplace(k, val);
    for (int i = 0; i < n; ++i)
        sum.comp.push_back(Expr::add(F.wind.comp[static_cast<std::size_t>(i)],
                                     V.comp[static_cast<std::size_t>(i)]));
    out.wind_sum = sum;

    out.metric = out.classification == MetricKind::Randers
                     ? FinslerMetric::randers_raw(F.h, sum, F.box)
                     : FinslerMetric::kropina_raw(F.h, sum, F.box);
    validate_metric(out.metric);

    // lambda = -( h_ij V^i V^j + 2 h_ij W^i V^j ) as an expression
    Expr quad_vv, quad_wv;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr hij = F.h.at(i, j);
            Expr tv = Expr::mul(hij, Expr::mul(V.comp[static_cast<std::size_t>(i)],
                                               V.comp[static_cast<std::size_t>(j)]));
            Expr tw = Expr::mul(hij, Expr::mul(F.wind.comp[static_cast<std::size_t>(i)],
                                               V.comp[static_cast<std::size_t>(j)]));
            quad_vv = quad_vv.valid() ? Expr::add(quad_vv, tv) : tv;
            quad_wv = quad_wv.valid() ? Expr::add(quad_wv, tw) : tw;
        }
    out.lambda_tilde = Expr::neg(Expr::add(quad_vv, Expr::mul(Expr::number(2.0), quad_wv)));
    return out;
}

Vecd u_map(const FinslerMetric& F, const Field& V, std::span<const double> x,
           std::span<const double> y) {
    double f = finsler_value(F, x, y);
    Vecd v = field_components<double>(V, x);
    Vecd u(y.begin(), y.end());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += f * v[i];
    return u;
}

} // namespace finslernav
