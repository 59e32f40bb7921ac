#pragma once

#include <memory>
#include <span>
#include <vector>

#include "finslernav/linalg.hpp"
#include "finslernav/riemann.hpp"
#include "finslernav/rng.hpp"

namespace finslernav {

// Conic boundary guard: directions with 2 W_0 < eps_cone * |y|_h are rejected
// before any Kropina quantity is formed, so blow-ups at the cone boundary
// surface as explicit errors.
inline constexpr double kConeEpsilon = 1e-6;

// Regime tolerances for the navigation data: |W|_h < 1 - eps everywhere for
// the subcritical branch, | |W|_h - 1 | < eps for the critical branch.
inline constexpr double kRegimeTolerance = 1e-9;

using Box = std::vector<std::pair<double, double>>;

enum class MetricKind { Riemannian, Randers, Kropina, ImplicitNavigation };

// Tagged metric variant. The three closed forms carry their navigation data
// (h, W); the implicit variant wraps a base metric and a wind and evaluates
// through the defining equation of the navigation problem.
struct FinslerMetric {
    MetricKind kind = MetricKind::Riemannian;
    int dim = 0;
    RiemannMetric h;
    Field wind;                                   // upper components
    std::shared_ptr<const FinslerMetric> base;    // ImplicitNavigation only
    Box box;                                      // chart sampling region

    static FinslerMetric riemannian(RiemannMetric metric, Box box);
    // Unvalidated constructors; the navigation module wraps them with regime
    // checks sampled over the box.
    static FinslerMetric randers_raw(RiemannMetric metric, Field wind, Box box);
    static FinslerMetric kropina_raw(RiemannMetric metric, Field wind, Box box);
    static FinslerMetric implicit_navigation(FinslerMetric base, Field wind);
};

template <class T>
struct JetDepth {
    static constexpr int value = 0;
};
template <class S>
struct JetDepth<JetT<S>> {
    static constexpr int value = 1 + JetDepth<S>::value;
};

// --- scalar solver for the defining equation ---------------------------------

// Smallest positive t with base(x, y/t - W(x)) = 1, by bracketed Newton.
// Throws NoBracketError when no admissible bracket exists (y outside the
// cone) and NonConvergenceError after the iteration cap.
double solve_navigation_scalar(const FinslerMetric& base, const Field& wind,
                               std::span<const double> x, std::span<const double> y,
                               double* residual_out = nullptr);

template <class S>
S finsler_f(const FinslerMetric& m, std::span<const S> x, std::span<const S> y);

// Newton refinement of the navigation solution in the jet ring: the constant
// term comes from the scalar solve, then each iteration doubles the correct
// nilpotent order.
template <class S>
S solve_navigation(const FinslerMetric& base, const Field& wind, std::span<const S> x,
                   std::span<const S> y) {
    if constexpr (std::is_same_v<S, double>) {
        return solve_navigation_scalar(base, wind, x, y);
    } else if constexpr (JetDepth<S>::value >= 4) {
        throw EvaluationError("navigation solve: jet nesting too deep");
    } else {
        const int n = static_cast<int>(x.size());
        std::vector<double> xv(static_cast<std::size_t>(n)), yv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            xv[static_cast<std::size_t>(i)] = scalar_value(x[static_cast<std::size_t>(i)]);
            yv[static_cast<std::size_t>(i)] = scalar_value(y[static_cast<std::size_t>(i)]);
        }
        double t0 = solve_navigation_scalar(base, wind, xv, yv);
        std::vector<S> w = field_components<S>(wind, x);
        S t = make_like(x[0], t0);
        const MonomialTable& tab = monomial_table(n, 1);
        for (int iter = 0; iter < 3; ++iter) {
            S invt = jrecip(t);
            // gradient of the base metric in y at z = y/t - W, plus its value
            std::vector<JetT<S>> xj, zj;
            xj.reserve(x.size());
            zj.reserve(x.size());
            for (int i = 0; i < n; ++i) {
                xj.push_back(JetT<S>::constant(tab, x[static_cast<std::size_t>(i)]));
                zj.push_back(JetT<S>::variable(
                    tab, i, y[static_cast<std::size_t>(i)] * invt - w[static_cast<std::size_t>(i)]));
            }
            JetT<S> phi = finsler_f<JetT<S>>(base, xj, zj);
            S resid = phi.val() - make_like(t, 1.0);
            S dpsi = make_like(t, 0.0);
            S invt2 = invt * invt;
            for (int i = 0; i < n; ++i) dpsi -= phi.d1(i) * y[static_cast<std::size_t>(i)] * invt2;
            t -= resid / dpsi;
        }
        return t;
    }
}

// --- metric evaluation --------------------------------------------------------

template <class S>
struct NavigationTerms {
    S h2;   // h(y, y)
    S w0;   // h(W, y)
    S wn2;  // h(W, W)
};

template <class S>
NavigationTerms<S> navigation_terms(const FinslerMetric& m, std::span<const S> x,
                                    std::span<const S> y) {
    const int n = m.dim;
    Matrix<S> hm = metric_matrix<S>(m.h, x);
    std::vector<S> w = field_components<S>(m.wind, x);
    S zero = make_like(x[0], 0.0);
    NavigationTerms<S> t{zero, zero, zero};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            S hij = hm(i, j);
            t.h2 += hij * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
            t.w0 += hij * w[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
            t.wn2 += hij * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
        }
    return t;
}

// F(x, y). Enforces the conic domain of each variant on the scalar part.
template <class S>
S finsler_f(const FinslerMetric& m, std::span<const S> x, std::span<const S> y) {
    switch (m.kind) {
    case MetricKind::Riemannian: {
        check_guard(m.h, x);
        Matrix<S> hm = metric_matrix<S>(m.h, x);
        S h2 = make_like(x[0], 0.0);
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j)
                h2 += hm(i, j) * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        if (scalar_value(h2) == 0.0) throw ZeroVectorError("metric evaluated on the zero vector");
        return jsqrt(h2);
    }
    case MetricKind::Randers: {
        NavigationTerms<S> t = navigation_terms<S>(m, x, y);
        if (scalar_value(t.h2) == 0.0) throw ZeroVectorError("metric evaluated on the zero vector");
        S lambda = make_like(x[0], 1.0) - t.wn2;
        if (!(scalar_value(lambda) > 0.0))
            throw RegimeMismatchError("wind reaches unit norm inside a subcritical metric");
        return (jsqrt(lambda * t.h2 + t.w0 * t.w0) - t.w0) / lambda;
    }
    case MetricKind::Kropina: {
        NavigationTerms<S> t = navigation_terms<S>(m, x, y);
        double h2v = scalar_value(t.h2);
        if (h2v == 0.0) throw ZeroVectorError("metric evaluated on the zero vector");
        double w0v = scalar_value(t.w0);
        if (2.0 * w0v < kConeEpsilon * std::sqrt(h2v))
            throw OutsideConeError("direction outside the conic domain (h(y, W) too small)");
        return t.h2 / (t.w0 * 2.0);
    }
    case MetricKind::ImplicitNavigation: {
        try {
            return solve_navigation<S>(*m.base, m.wind, x, y);
        } catch (const NoBracketError& e) {
            throw OutsideConeError(std::string("direction not admissible for the navigation solve: ") +
                                   e.what());
        }
    }
    }
    throw EvaluationError("unreachable metric kind");
}

template <class S>
S finsler_f2(const FinslerMetric& m, std::span<const S> x, std::span<const S> y) {
    if (m.kind == MetricKind::Riemannian) {
        check_guard(m.h, x);
        Matrix<S> hm = metric_matrix<S>(m.h, x);
        S h2 = make_like(x[0], 0.0);
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j)
                h2 += hm(i, j) * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        if (scalar_value(h2) == 0.0) throw ZeroVectorError("metric evaluated on the zero vector");
        return h2;
    }
    S f = finsler_f<S>(m, x, y);
    return f * f;
}

// --- pointwise tensors --------------------------------------------------------

template <class S>
struct SprayData {
    std::vector<S> G;  // spray coefficients G^i
    Matrix<S> g;       // fundamental tensor g_ij
    S f2;
};

// Spray coefficients G^i = (1/4) g^{il} ( [F^2]_{x^m y^l} y^m - [F^2]_{x^l} ),
// with every derivative taken by seeding (x, y) as jet variables over S.
template <class S>
SprayData<S> spray_data(const FinslerMetric& m, std::span<const S> x, std::span<const S> y) {
    const int n = m.dim;
    const MonomialTable& tab = monomial_table(2 * n, 2);
    std::vector<JetT<S>> xj, yj;
    xj.reserve(x.size());
    yj.reserve(y.size());
    for (int i = 0; i < n; ++i) xj.push_back(JetT<S>::variable(tab, i, x[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i)
        yj.push_back(JetT<S>::variable(tab, n + i, y[static_cast<std::size_t>(i)]));
    JetT<S> f2 = finsler_f2<JetT<S>>(m, xj, yj);

    const S zero = make_like(x[0], 0.0);
    Matrix<S> g(n, n, zero);
    for (int i = 0; i < n; ++i)
        for (int l = i; l < n; ++l) {
            S v = f2.d2(n + i, n + l) * 0.5;
            g(i, l) = v;
            if (i != l) g(l, i) = v;
        }
    std::vector<S> q;
    q.reserve(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        S v = -f2.d1(l);
        for (int mm = 0; mm < n; ++mm) v += f2.d2(mm, n + l) * y[static_cast<std::size_t>(mm)];
        q.push_back(std::move(v));
    }
    SprayData<S> out;
    out.G = solve(g, q, "fundamental tensor");
    for (auto& gi : out.G) gi = gi * 0.25;
    out.g = std::move(g);
    out.f2 = f2.val();
    return out;
}

// Fundamental tensor alone: derivatives are needed only in y, so the jet
// space stays n-dimensional.
Matd fundamental_tensor(const FinslerMetric& m, std::span<const double> x,
                        std::span<const double> y);
Matd angular_metric(const FinslerMetric& m, std::span<const double> x, std::span<const double> y);

double finsler_value(const FinslerMetric& m, std::span<const double> x, std::span<const double> y);

struct CartanData {
    Tensor3<double> C;      // Cartan torsion C_ijk
    Vecd mean;              // mean Cartan torsion I_i
    Matd g;                 // fundamental tensor
    double f;               // F(x, y)
    Vecd f_y;               // F_{y^i}
};
CartanData cartan_torsion(const FinslerMetric& m, std::span<const double> x,
                          std::span<const double> y);

// Max-norm residual of the rank-one Cartan structure
// C_ijk - (I_i h_jk + I_j h_ik + I_k h_ij) / (n+1); requires dim >= 3.
double c_reducibility_residual(const FinslerMetric& m, std::span<const double> x,
                               std::span<const double> y);

Vecd spray(const FinslerMetric& m, std::span<const double> x, std::span<const double> y);

struct FinslerCurvature {
    Matd R;        // Riemann curvature R^i_k
    double ric;    // trace
    Vecd G;        // spray values
    Matd g;        // fundamental tensor values
    double f2;
};
FinslerCurvature finsler_curvature(const FinslerMetric& m, std::span<const double> x,
                                   std::span<const double> y);

double ricci(const FinslerMetric& m, std::span<const double> x, std::span<const double> y);

// Flag curvature for flag pole y and transverse edge v, indices lowered by
// the fundamental tensor at (x, y).
double flag_curvature(const FinslerCurvature& c, std::span<const double> y, const Vecd& v);
double flag_curvature(const FinslerMetric& m, std::span<const double> x, std::span<const double> y,
                      const Vecd& v);

// Max-norm residual of R^i_k - (Ric/((n-1)F^2)) (F^2 d^i_k - F F_{y^k} y^i).
double scalar_flag_residual(const FinslerMetric& m, std::span<const double> x,
                            std::span<const double> y);

// Busemann-Hausdorff volume density. Closed forms per variant:
// Riemannian and critical-wind metrics reduce to sqrt(det h); the subcritical
// closed form (1 - |b|_a^2)^{(n+1)/2} sqrt(det a) is evaluated through the
// navigation dictionary and agrees with sqrt(det h) identically.
template <class S>
S bh_density(const FinslerMetric& m, std::span<const S> x) {
    switch (m.kind) {
    case MetricKind::Riemannian:
    case MetricKind::Kropina:
        return jsqrt(determinant(metric_matrix<S>(m.h, x)));
    case MetricKind::Randers: {
        const int n = m.dim;
        Matrix<S> hm = metric_matrix<S>(m.h, x);
        std::vector<S> w = field_components<S>(m.wind, x);
        S zero = make_like(x[0], 0.0);
        std::vector<S> wl(static_cast<std::size_t>(n), zero);
        S wn2 = zero;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) wl[static_cast<std::size_t>(i)] += hm(i, j) * w[static_cast<std::size_t>(j)];
            wn2 += wl[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        }
        S lambda = make_like(x[0], 1.0) - wn2;
        if (!(scalar_value(lambda) > 0.0))
            throw RegimeMismatchError("wind reaches unit norm inside a subcritical metric");
        S inv_l2 = jrecip(lambda * lambda);
        Matrix<S> a(n, n, zero);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = (hm(i, j) * lambda + wl[static_cast<std::size_t>(i)] * wl[static_cast<std::size_t>(j)]) * inv_l2;
        // |b|_a^2 equals |W|_h^2, so 1 - |b|^2 = lambda
        return jpowr(lambda, 0.5 * (m.dim + 1)) * jsqrt(determinant(a));
    }
    case MetricKind::ImplicitNavigation:
        throw EvaluationError("volume density has no closed form for the implicit variant");
    }
    throw EvaluationError("unreachable metric kind");
}

// S(x, y) = dG^m/dy^m - y^m d(ln sigma_F)/dx^m.
double s_curvature(const FinslerMetric& m, std::span<const double> x, std::span<const double> y);

// Monte-Carlo coordinate volume of the unit set {F < 1} in T_x M, counting
// uniform samples in a bounding box derived from the shifted h-ball. Used as
// the independent oracle for the closed-form density.
double bh_density_monte_carlo(const FinslerMetric& m, std::span<const double> x,
                              const CounterRng& rng, std::size_t samples = 1000000);

double unit_ball_volume(int n);

// --- sampling helpers ---------------------------------------------------------

// Direction sampler: uniform on the Euclidean sphere, rejecting directions
// too close to the cone boundary (h(y, W) <= margin * |y| * |W|_h) for
// critical metrics; for other variants every nonzero direction passes.
Vecd sample_admissible_direction(const FinslerMetric& m, std::span<const double> x,
                                 SampleStream& stream, double margin = 0.05);

// A g-transverse flag edge for pole y: sampled on the sphere and rejected
// while |g(y,v)| is close to |y|_g |v|_g.
Vecd sample_flag_edge(const FinslerMetric& m, std::span<const double> x,
                      std::span<const double> y, SampleStream& stream);

struct CurvatureReport {
    Vecd x, y;
    double F = 0.0;
    double S = 0.0;
    double Ric = 0.0;
    Matd g;
    Vecd G;
    Matd R;
    Vecd flag_values;
    double res_homogeneity = 0.0;
    double res_ry = 0.0;
    double res_scalar_flag = 0.0;
};

CurvatureReport curvature_report(const FinslerMetric& m, std::span<const double> x,
                                 std::span<const double> y, SampleStream& flag_stream,
                                 int flag_count = 3);

// Regime validation over the chart box (quasi-random scan): Randers needs
// sup |W|_h < 1 - eps, Kropina needs | |W|_h - 1 | <= eps everywhere.
void validate_metric(const FinslerMetric& m, int samples = 200);

} // namespace finslernav
