#include "doctest.h"

#include <cmath>
#include <vector>

#include "finslernav/riemann.hpp"
#include "finslernav/rng.hpp"
#include "oracles.hpp"

using namespace finslernav;

namespace {

RiemannMetric stereographic_sphere(int n) {
    RiemannMetric h;
    h.dim = n;
    std::string r2 = "x1^2";
    for (int i = 2; i <= n; ++i) r2 += "+x" + std::to_string(i) + "^2";
    std::string conf = "4/(1+" + r2 + ")^2";
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) h.upper.push_back(i == j ? parse(conf, n) : Expr::number(0.0));
    return h;
}

RiemannMetric warped_metric() {
    // diag(1, 1, 1 + 0.3 x1^2), curvature concentrated in the (1,3) planes
    RiemannMetric h;
    h.dim = 3;
    h.upper = {Expr::number(1.0), Expr::number(0.0), Expr::number(0.0),
               Expr::number(1.0), Expr::number(0.0), parse("1+0.3*x1^2", 3)};
    return h;
}

} // namespace

TEST_SUITE("riemann") {

TEST_CASE("metric_at on the euclidean metric") {
    RiemannMetric h = RiemannMetric::euclidean(3);
    std::vector<double> x{0.3, -0.7, 1.1};
    MetricAt m = metric_at(h, x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(m.h(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
            CHECK(m.hinv(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
        }
    CHECK(m.sqrt_det == doctest::Approx(1.0));
}

TEST_CASE("metric_at on the stereographic sphere at the origin") {
    for (int n : {2, 3}) {
        RiemannMetric h = stereographic_sphere(n);
        std::vector<double> x(static_cast<std::size_t>(n), 0.0);
        MetricAt m = metric_at(h, x);
        for (int i = 0; i < n; ++i) {
            CHECK(m.h(i, i) == doctest::Approx(4.0));
            CHECK(m.hinv(i, i) == doctest::Approx(0.25));
        }
        CHECK(m.sqrt_det == doctest::Approx(std::pow(2.0, n)));
    }
}

TEST_CASE("random SPD expression matrices invert to 1e-12 residual") {
    CounterRng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        SampleStream s(rng, static_cast<std::uint64_t>(trial));
        const int n = 3;
        // A^T A + 2 I with random constant A
        Matd A(n, n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = s.uniform(-1.0, 1.0);
        RiemannMetric h;
        h.dim = n;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = (i == j) ? 2.0 : 0.0;
                for (int k = 0; k < n; ++k) v += A(k, i) * A(k, j);
                h.upper.push_back(Expr::number(v));
            }
        std::vector<double> x{0.0, 0.0, 0.0};
        MetricAt m = metric_at(h, x);
        double resid = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s2 = 0.0;
                for (int k = 0; k < n; ++k) s2 += m.h(i, k) * m.hinv(k, j);
                resid = std::max(resid, std::fabs(s2 - (i == j ? 1.0 : 0.0)));
            }
        CHECK(resid < 1e-12);
    }
}

TEST_CASE("christoffel symbols vanish on flat space") {
    RiemannMetric h = RiemannMetric::euclidean(2);
    std::vector<double> x{1.5, -0.3};
    auto ch = christoffel_at<double>(h, x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) CHECK(std::fabs(ch.gamma(i, j, k)) < 1e-15);
}

TEST_CASE("christoffel symbols of the stereographic sphere at (1,0)") {
    RiemannMetric h = stereographic_sphere(2);
    std::vector<double> x{1.0, 0.0};
    auto ch = christoffel_at<double>(h, x);
    // Hand differentiation of the conformal factor gives
    // Gamma^1_11 = -1, Gamma^1_22 = +1, Gamma^2_12 = -1 at this point.
    CHECK(ch.gamma(0, 0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ch.gamma(0, 1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ch.gamma(1, 0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ch.gamma(0, 0, 0) == doctest::Approx(-ch.gamma(0, 1, 1)).epsilon(1e-12));

    // cross-check every entry against the finite-difference pipeline
    Tensor3<double> fd = testing::fd_christoffel(h, x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(std::fabs(ch.gamma(i, j, k) - fd(i, j, k)) < 1e-8);
}

TEST_CASE("constant rescaling of the metric keeps the connection") {
    RiemannMetric h = stereographic_sphere(2);
    RiemannMetric hc = h;
    for (auto& e : hc.upper) e = Expr::mul(Expr::number(2.5), e);
    std::vector<double> x{0.4, -0.2};
    auto a = christoffel_at<double>(h, x);
    auto b = christoffel_at<double>(hc, x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(a.gamma(i, j, k) == doctest::Approx(b.gamma(i, j, k)).epsilon(1e-13));
}

TEST_CASE("covariant derivative of constant and radial covectors on flat space") {
    RiemannMetric h = RiemannMetric::euclidean(2);
    std::vector<double> x{0.7, -0.4};

    Field w;
    w.dim = 2;
    w.comp = {Expr::number(1.0), Expr::number(0.0)};
    w.variance = Variance::Upper;
    Matd dw = cov_deriv_lowered<double>(h, w, x);
    CHECK(max_abs(dw) < 1e-15);

    Field v;
    v.dim = 2;
    v.comp = {Expr::var(0), Expr::var(1)};
    v.variance = Variance::Upper;
    Matd dv = cov_deriv_lowered<double>(h, v, x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(dv(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("flat space has zero sectional curvature") {
    RiemannMetric h = RiemannMetric::euclidean(3);
    std::vector<double> x{0.2, 0.5, -0.1};
    CHECK(std::fabs(sectional_h(h, x, {1, 0, 0}, {0, 1, 0})) < 1e-14);
    CHECK(std::fabs(sectional_h(h, x, {1, 2, 0.5}, {0.3, 1, -1})) < 1e-14);
}

TEST_CASE("stereographic sphere has sectional curvature one") {
    CounterRng rng(5150);
    for (int n : {2, 3}) {
        RiemannMetric h = stereographic_sphere(n);
        for (int trial = 0; trial < 5; ++trial) {
            SampleStream s(rng, static_cast<std::uint64_t>(10 * n + trial));
            std::vector<double> x(static_cast<std::size_t>(n));
            for (auto& c : x) c = s.uniform(-0.6, 0.6);
            Vecd u = s.sphere_point(n);
            Vecd v = s.sphere_point(n);
            double uv = dot(u, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= uv * u[i];
            if (euclid_norm(v) < 0.1) continue;
            double k = sectional_h(h, x, u, v);
            CHECK(std::fabs(k - 1.0) < 1e-6);
            // independent finite-difference pipeline agrees
            double kfd = testing::fd_sectional(h, x, u, v);
            CHECK(std::fabs(kfd - k) < 1e-5);
        }
    }
}

TEST_CASE("ricci of the stereographic 3-sphere equals 2 h") {
    RiemannMetric h = stereographic_sphere(3);
    CounterRng rng(77);
    SampleStream s(rng, 0);
    std::vector<double> x{s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5)};
    Matd ric = ricci_h(h, x);
    Matd m = metric_matrix<double>(h, x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::fabs(ric(i, j) - 2.0 * m(i, j)) < 1e-6);
}

TEST_CASE("norms and inner products") {
    RiemannMetric h = RiemannMetric::euclidean(2);
    std::vector<double> x{0.0, 0.0};
    CHECK(norm_h(h, x, {3.0, 4.0}) == doctest::Approx(5.0));
    // -(|V|^2 + 2<W,V>) for W=(1,0), V=(-1/2,0)
    Vecd W{1.0, 0.0}, V{-0.5, 0.0};
    double lambda_tilde = -(inner_h(h, x, V, V) + 2.0 * inner_h(h, x, W, V));
    CHECK(lambda_tilde == doctest::Approx(0.75));
}

TEST_CASE("first Bianchi identity holds at sampled points") {
    CounterRng rng(31);
    for (const RiemannMetric& h : {stereographic_sphere(3), warped_metric()}) {
        for (int trial = 0; trial < 3; ++trial) {
            SampleStream s(rng, static_cast<std::uint64_t>(trial));
            std::vector<double> x{s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5)};
            Tensor4<double> R = riemann_tensor<double>(h, x);
            double worst = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            worst = std::max(worst,
                                             std::fabs(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k)));
            CHECK(worst < 1e-9);
        }
    }
}

TEST_CASE("metric compatibility: covariant derivative of h vanishes") {
    RiemannMetric h = stereographic_sphere(3);
    std::vector<double> x{0.3, -0.2, 0.4};
    auto xj = seed_coordinates<double>(x, 1);
    Matrix<Jet> hj = metric_matrix<Jet>(h, xj);
    auto ch = christoffel_from_jets<double>(hj);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                double v = hj(i, j).d1(k);
                for (int l = 0; l < 3; ++l)
                    v -= ch.gamma(l, k, i) * ch.h(l, j) + ch.gamma(l, k, j) * ch.h(i, l);
                worst = std::max(worst, std::fabs(v));
            }
    CHECK(worst < 1e-9);
}

TEST_CASE("sectional curvature is invariant under plane basis changes") {
    RiemannMetric h = stereographic_sphere(3);
    std::vector<double> x{0.1, 0.2, -0.3};
    Vecd u{1.0, 0.2, 0.0}, v{0.0, 1.0, -0.5};
    double k1 = sectional_h(h, x, u, v);
    // (a u + b v, c v), determinant ac != 0
    double a = 2.0, b = -0.7, c = 0.5;
    Vecd u2(3), v2(3);
    for (int i = 0; i < 3; ++i) {
        u2[static_cast<std::size_t>(i)] = a * u[static_cast<std::size_t>(i)] + b * v[static_cast<std::size_t>(i)];
        v2[static_cast<std::size_t>(i)] = c * v[static_cast<std::size_t>(i)];
    }
    double k2 = sectional_h(h, x, u2, v2);
    CHECK(std::fabs(k1 - k2) < 1e-9);
}

TEST_CASE("error paths: positive definiteness, guards, degenerate planes") {
    RiemannMetric bad;
    bad.dim = 2;
    bad.upper = {Expr::var(0), Expr::number(0.0), Expr::number(1.0)};
    std::vector<double> xneg{-1.0, 0.0};
    CHECK_THROWS_AS(metric_at(bad, xneg), NotPositiveDefiniteError);

    RiemannMetric guarded = RiemannMetric::euclidean(2);
    guarded.guard = parse("1-x1^2-x2^2", 2);
    std::vector<double> outside{2.0, 0.0};
    CHECK_THROWS_AS(metric_at(guarded, outside), GuardViolatedError);

    RiemannMetric flat = RiemannMetric::euclidean(2);
    std::vector<double> x{0.0, 0.0};
    CHECK_THROWS_AS(sectional_h(flat, x, {1.0, 1.0}, {2.0, 2.0}), DegeneratePlaneError);
}

TEST_CASE("isotropy scan reports mean and deviation") {
    RiemannMetric h = stereographic_sphere(3);
    std::vector<double> x{0.25, -0.15, 0.05};
    CounterRng rng(42);
    IsotropyResult iso = sectional_isotropy(h, x, rng);
    CHECK(iso.mean == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(iso.max_deviation < 1e-6);
}

} // TEST_SUITE
