#include "doctest.h"

#include <cmath>
#include <vector>

#include "finslernav/finsler.hpp"
#include "finslernav/modelspaces.hpp"
#include "oracles.hpp"

using namespace finslernav;

namespace {

FinslerMetric flat_kropina(int n = 2) { return load_model(n == 2 ? "flat-kropina" : "flat-kropina-3d").metric; }
FinslerMetric flat_randers(int n = 2) { return load_model(n == 2 ? "flat-randers" : "flat-randers-3d").metric; }

double quad(const Matd& g, const Vecd& a, const Vecd& b) {
    double s = 0.0;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            s += g(i, j) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return s;
}

} // namespace

TEST_SUITE("finsler") {

TEST_CASE("closed-form values on the flat critical model") {
    FinslerMetric m = flat_kropina();
    std::vector<double> x{0.2, -0.4};
    CHECK(finsler_value(m, x, std::vector<double>{2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(finsler_value(m, x, std::vector<double>{1.0, 0.0}) == doctest::Approx(0.5));
    CHECK(finsler_value(m, x, std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(finsler_value(m, x, std::vector<double>{-1.0, 0.0}), OutsideConeError);
    CHECK_THROWS_AS(finsler_value(m, x, std::vector<double>{0.0, 0.0}), ZeroVectorError);
}

TEST_CASE("closed-form values on the flat subcritical model") {
    FinslerMetric m = flat_randers();
    std::vector<double> x{0.0, 0.0};
    CHECK(finsler_value(m, x, std::vector<double>{1.0, 0.0}) == doctest::Approx(2.0 / 3.0));
    CHECK(finsler_value(m, x, std::vector<double>{0.0, 1.0}) ==
          doctest::Approx(2.0 / std::sqrt(3.0)));
    // zero wind degenerates to the sea norm
    LoadedSpec riem = load_model("flat-kropina"); // reuse the chart, metric below
    FinslerMetric r = FinslerMetric::riemannian(riem.h, riem.box);
    CHECK(finsler_value(r, x, std::vector<double>{3.0, 4.0}) == doctest::Approx(5.0));
}

TEST_CASE("fundamental tensor of a Riemannian variant is the sea metric") {
    LoadedSpec hopf = load_model("s3-hopf");
    FinslerMetric m = FinslerMetric::riemannian(hopf.h, hopf.box);
    CounterRng rng(3);
    for (int t = 0; t < 5; ++t) {
        SampleStream s(rng, static_cast<std::uint64_t>(t));
        Vecd x = s.box_point(m.box);
        Vecd y = s.sphere_point(3);
        Matd g = fundamental_tensor(m, x, y);
        Matd h = metric_matrix<double>(m.h, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::fabs(g(i, j) - h(i, j)) < 1e-12);
    }
}

TEST_CASE("g(y, y) = F^2 and indicatrix normalization") {
    CounterRng rng(17);
    int idx = 0;
    for (const char* name : {"flat-kropina", "flat-randers", "s3-hopf", "s3-hopf-randers"}) {
        FinslerMetric m = load_model(name).metric;
        for (int t = 0; t < 5; ++t) {
            SampleStream s(rng, static_cast<std::uint64_t>(idx++));
            Vecd x = s.box_point(m.box);
            if (m.h.guard && !(m.h.guard->eval_d(x, m.h.params) > 0.0)) continue;
            Vecd y = sample_admissible_direction(m, x, s);
            double f = finsler_value(m, x, y);
            Matd g = fundamental_tensor(m, x, y);
            CHECK(std::fabs(quad(g, y, y) - f * f) < 1e-10 * (1.0 + f * f));

            // rescale onto the indicatrix: g_y(y/F, y/F) = 1
            Vecd yu(y);
            for (auto& c : yu) c /= f;
            Matd gu = fundamental_tensor(m, x, yu);
            CHECK(std::fabs(quad(gu, yu, yu) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("fundamental tensor of the flat subcritical model is positive definite") {
    FinslerMetric m = flat_randers();
    CounterRng rng(23);
    for (int t = 0; t < 100; ++t) {
        SampleStream s(rng, static_cast<std::uint64_t>(t));
        Vecd x = s.box_point(m.box);
        Vecd y = s.sphere_point(2);
        Matd g = fundamental_tensor(m, x, y);
        for (double ev : sym_eigenvalues(g)) CHECK(ev > 0.0);
    }
}

TEST_CASE("Cartan torsion vanishes exactly for Riemannian variants") {
    LoadedSpec hopf = load_model("s3-hopf");
    FinslerMetric m = FinslerMetric::riemannian(hopf.h, hopf.box);
    std::vector<double> x{0.1, 0.2, -0.1}, y{0.4, -0.3, 0.8};
    CartanData c = cartan_torsion(m, x, y);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(std::fabs(c.C(i, j, k)) < 1e-12);
}

TEST_CASE("Cartan torsion contracts to zero against the pole") {
    CounterRng rng(29);
    int idx = 0;
    for (const char* name : {"flat-kropina-3d", "flat-randers-3d", "s3-hopf"}) {
        FinslerMetric m = load_model(name).metric;
        SampleStream s(rng, static_cast<std::uint64_t>(idx++));
        Vecd x = s.box_point(m.box);
        Vecd y = sample_admissible_direction(m, x, s);
        CartanData c = cartan_torsion(m, x, y);
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j) {
                double contraction = 0.0;
                for (int k = 0; k < m.dim; ++k) contraction += c.C(i, j, k) * y[static_cast<std::size_t>(k)];
                CHECK(std::fabs(contraction) < 1e-10);
            }
    }
}

TEST_CASE("rank-one Cartan structure holds for both flat families in dimension 3") {
    CounterRng rng(31);
    int idx = 0;
    for (const char* name : {"flat-kropina-3d", "flat-randers-3d"}) {
        FinslerMetric m = load_model(name).metric;
        for (int t = 0; t < 10; ++t) {
            SampleStream s(rng, static_cast<std::uint64_t>(idx++));
            Vecd x = s.box_point(m.box);
            Vecd y = sample_admissible_direction(m, x, s);
            CHECK(c_reducibility_residual(m, x, y) < 1e-8);
        }
    }
    CHECK_THROWS_AS(c_reducibility_residual(flat_kropina(2), std::vector<double>{0.0, 0.0},
                                            std::vector<double>{1.0, 0.0}),
                    DimensionTooSmallError);
}

TEST_CASE("spray vanishes for constant navigation data") {
    FinslerMetric m = flat_kropina();
    std::vector<double> x{0.3, 0.1}, y{1.0, 0.4};
    for (double gi : spray(m, x, y)) CHECK(std::fabs(gi) < 1e-12);
}

TEST_CASE("Riemannian spray matches the Levi-Civita geodesic coefficients") {
    LoadedSpec hopf = load_model("s3-hopf");
    FinslerMetric m = FinslerMetric::riemannian(hopf.h, hopf.box);
    std::vector<double> x{0.2, -0.1, 0.3}, y{0.7, 0.1, -0.4};
    Vecd G = spray(m, x, y);
    auto ch = christoffel_at<double>(m.h, x);
    for (int i = 0; i < 3; ++i) {
        double expect = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                expect += 0.5 * ch.gamma(i, j, k) * y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(k)];
        CHECK(std::fabs(G[static_cast<std::size_t>(i)] - expect) < 1e-10);
    }
}

TEST_CASE("spray is positively homogeneous of degree two") {
    FinslerMetric m = load_model("s3-hopf").metric;
    std::vector<double> x{0.1, 0.25, -0.2};
    CounterRng rng(37);
    SampleStream s(rng, 0);
    Vecd y = sample_admissible_direction(m, x, s);
    Vecd G1 = spray(m, x, y);
    Vecd y2(y);
    for (auto& c : y2) c *= 2.0;
    Vecd G2 = spray(m, x, y2);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(G2[static_cast<std::size_t>(i)] - 4.0 * G1[static_cast<std::size_t>(i)]) <
              1e-10 * (1.0 + std::fabs(G1[static_cast<std::size_t>(i)])));
}

TEST_CASE("spray agrees with the finite-difference channel") {
    FinslerMetric m = load_model("s3-hopf").metric;
    std::vector<double> x{0.15, -0.2, 0.1};
    CounterRng rng(41);
    SampleStream s(rng, 0);
    Vecd y = sample_admissible_direction(m, x, s);
    Vecd G = spray(m, x, y);
    Vecd Gfd = testing::fd_spray(m, x, y);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(G[static_cast<std::size_t>(i)] - Gfd[static_cast<std::size_t>(i)]) < 1e-6);
}

TEST_CASE("flat critical model is curvature-free") {
    FinslerMetric m = flat_kropina();
    std::vector<double> x{-0.2, 0.6}, y{1.0, 0.3};
    FinslerCurvature c = finsler_curvature(m, x, y);
    CHECK(max_abs(c.R) < 1e-12);
    CHECK(std::fabs(c.ric) < 1e-12);
    CHECK(std::fabs(flag_curvature(c, y, Vecd{0.0, 1.0})) < 1e-12);
}

TEST_CASE("hopf critical model: Ricci, flags, and the trace identity") {
    FinslerMetric m = load_model("s3-hopf").metric;
    CounterRng rng(43);
    for (int t = 0; t < 4; ++t) {
        SampleStream s(rng, static_cast<std::uint64_t>(t));
        Vecd x = s.box_point(m.box);
        Vecd y = sample_admissible_direction(m, x, s);
        FinslerCurvature c = finsler_curvature(m, x, y);
        // weakly isotropic flag curvature with constant 1: Ric = (n-1) F^2
        CHECK(std::fabs(c.ric - 2.0 * c.f2) < 1e-5 * (1.0 + c.f2));
        // R^i_k y^k = 0
        for (int i = 0; i < 3; ++i) {
            double ry = 0.0;
            for (int k = 0; k < 3; ++k) ry += c.R(i, k) * y[static_cast<std::size_t>(k)];
            CHECK(std::fabs(ry) < 1e-8 * (1.0 + max_abs(c.R)));
        }
        Vecd v = sample_flag_edge(m, x, y, s);
        CHECK(flag_curvature(c, y, v) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(scalar_flag_residual(m, x, y) < 1e-6 * (1.0 + max_abs(c.R)));
    }
}

TEST_CASE("hopf curvature confirmed by the finite-difference channel") {
    FinslerMetric m = load_model("s3-hopf").metric;
    std::vector<double> x{0.2, 0.05, -0.15};
    CounterRng rng(47);
    SampleStream s(rng, 0);
    Vecd y = sample_admissible_direction(m, x, s);
    FinslerCurvature c = finsler_curvature(m, x, y);
    Matd Rfd = testing::fd_finsler_curvature(m, x, y);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(std::fabs(c.R(i, k) - Rfd(i, k)) < 5e-3 * (1.0 + max_abs(c.R)));
}

TEST_CASE("Riemannian variant reproduces the sea Ricci contraction") {
    // the 2d stereographic sphere
    RiemannMetric h;
    h.dim = 2;
    h.upper = {parse("4/(1+x1^2+x2^2)^2", 2), Expr::number(0.0), parse("4/(1+x1^2+x2^2)^2", 2)};
    Box box{{-0.8, 0.8}, {-0.8, 0.8}};
    FinslerMetric m = FinslerMetric::riemannian(h, box);
    std::vector<double> x{0.3, -0.5}, y{0.8, 0.4};
    FinslerCurvature c = finsler_curvature(m, x, y);
    Matd ric = ricci_h(h, x);
    double expect = quad(ric, y, y);
    CHECK(std::fabs(c.ric - expect) < 1e-6 * (1.0 + std::fabs(expect)));
    CHECK(flag_curvature(c, y, Vecd{-0.4, 0.9}) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(scalar_flag_residual(m, x, y) < 1e-8);
}

TEST_CASE("degenerate flags are rejected") {
    FinslerMetric m = flat_kropina();
    std::vector<double> x{0.0, 0.0}, y{1.0, 0.2};
    FinslerCurvature c = finsler_curvature(m, x, y);
    CHECK_THROWS_AS(flag_curvature(c, y, Vecd{2.0, 0.4}), DegenerateFlagError);
}

TEST_CASE("homogeneity and the Euler identity") {
    CounterRng rng(53);
    int idx = 0;
    for (const char* name : {"flat-kropina", "flat-randers", "s3-hopf"}) {
        FinslerMetric m = load_model(name).metric;
        SampleStream s(rng, static_cast<std::uint64_t>(idx++));
        Vecd x = s.box_point(m.box);
        Vecd y = sample_admissible_direction(m, x, s);
        double f = finsler_value(m, x, y);
        for (double lam : {0.5, 2.0, 7.0}) {
            Vecd ys(y);
            for (auto& c : ys) c *= lam;
            CHECK(std::fabs(finsler_value(m, x, ys) - lam * f) <= 1e-10 * lam * f);
        }
        // y^i dF/dy^i = F
        const MonomialTable& tab = monomial_table(m.dim, 1);
        std::vector<Jet> xc, yj;
        for (int i = 0; i < m.dim; ++i) {
            xc.push_back(Jet::constant(tab, x[static_cast<std::size_t>(i)]));
            yj.push_back(Jet::variable(tab, i, y[static_cast<std::size_t>(i)]));
        }
        Jet fj = finsler_f<Jet>(m, xc, yj);
        double euler = 0.0;
        for (int i = 0; i < m.dim; ++i) euler += y[static_cast<std::size_t>(i)] * fj.d1(i);
        CHECK(std::fabs(euler - f) < 1e-10 * (1.0 + f));
    }
}

TEST_CASE("s-curvature closed cases") {
    // constant critical wind: S identically zero
    FinslerMetric mk = flat_kropina();
    std::vector<double> x{0.4, -0.2};
    CHECK(std::fabs(s_curvature(mk, x, std::vector<double>{1.0, 0.5})) < 1e-12);

    // hopf wind is Killing: S vanishes up to pipeline noise
    FinslerMetric mh = load_model("s3-hopf").metric;
    CounterRng rng(59);
    SampleStream s(rng, 0);
    Vecd xh = s.box_point(mh.box);
    Vecd yh = sample_admissible_direction(mh, xh, s);
    CHECK(std::fabs(s_curvature(mh, xh, yh)) < 1e-7);

    // conformal wind W = -(c/2) x with c = 0.3: S = (n+1) (c/4) F
    FinslerMetric mc = load_model("flat-randers-conformal").metric;
    for (int t = 0; t < 5; ++t) {
        SampleStream st(rng, static_cast<std::uint64_t>(100 + t));
        Vecd xc = st.box_point(mc.box);
        Vecd yc = st.sphere_point(2);
        double f = finsler_value(mc, xc, yc);
        double expect = 3.0 * 0.075 * f;
        CHECK(std::fabs(s_curvature(mc, xc, yc) - expect) < 1e-6 * (1.0 + std::fabs(expect)));
    }
}

TEST_CASE("s-curvature and the Killing residual vanish or fail together") {
    // Killing wind: both residuals at noise level
    FinslerMetric good = flat_kropina();
    CounterRng rng(61);
    double s_resid_good = 0.0, killing_good = 0.0;
    for (int t = 0; t < 5; ++t) {
        SampleStream s(rng, static_cast<std::uint64_t>(t));
        Vecd x = s.box_point(good.box);
        Vecd y = sample_admissible_direction(good, x, s);
        s_resid_good = std::max(s_resid_good, std::fabs(s_curvature(good, x, y)));
        Matd dw = cov_deriv_lowered<double>(good.h, good.wind, x);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) killing_good = std::max(killing_good, std::fabs(dw(i, j) + dw(j, i)));
    }
    CHECK(s_resid_good < 1e-7);
    CHECK(killing_good < 1e-7);

    // unit wind that is not Killing: both residuals large
    FinslerMetric bad = load_model("flat-kropina-nonkilling").metric;
    double s_resid_bad = 0.0, killing_bad = 0.0;
    for (int t = 0; t < 5; ++t) {
        SampleStream s(rng, static_cast<std::uint64_t>(1000 + t));
        Vecd x = s.box_point(bad.box);
        Vecd y = sample_admissible_direction(bad, x, s);
        s_resid_bad = std::max(s_resid_bad, std::fabs(s_curvature(bad, x, y)));
        Matd dw = cov_deriv_lowered<double>(bad.h, bad.wind, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) killing_bad = std::max(killing_bad, std::fabs(dw(i, j) + dw(j, i)));
    }
    CHECK(s_resid_bad > 1e-4);
    CHECK(killing_bad > 1e-4);
}

TEST_CASE("volume density closed forms against the sampling oracle") {
    CounterRng rng(67);
    int idx = 0;
    for (const char* name : {"flat-kropina", "flat-randers", "s3-hopf"}) {
        FinslerMetric m = load_model(name).metric;
        SampleStream s(rng, static_cast<std::uint64_t>(idx++));
        Vecd x = s.box_point(m.box);
        if (m.h.guard && !(m.h.guard->eval_d(x, m.h.params) > 0.0)) continue;
        std::vector<Jet> xj = seed_coordinates<double>(x, 1);
        double closed = scalar_value(bh_density<Jet>(m, xj));
        double mc = bh_density_monte_carlo(m, x, CounterRng(rng.raw(900 + static_cast<std::uint64_t>(idx))),
                                           200000);
        CHECK(std::fabs(mc - closed) / closed < 0.02);
    }
}

TEST_CASE("subcritical density closed form equals the sea volume density") {
    // (1 - |b|^2)^{(n+1)/2} sqrt(det a) collapses to sqrt(det h) through the
    // navigation dictionary; check the two code paths agree on a curved case.
    FinslerMetric m = load_model("warped-randers").metric;
    CounterRng rng(71);
    SampleStream s(rng, 0);
    for (int t = 0; t < 5; ++t) {
        Vecd x = s.box_point(m.box);
        std::vector<Jet> xj = seed_coordinates<double>(x, 1);
        double randers_form = scalar_value(bh_density<Jet>(m, xj));
        double sea_form = metric_at(m.h, x).sqrt_det;
        CHECK(std::fabs(randers_form - sea_form) < 1e-12 * (1.0 + sea_form));
    }
}

TEST_CASE("implicit variant reproduces the closed forms") {
    LoadedSpec fk = load_model("flat-kropina");
    LoadedSpec fr = load_model("flat-randers");
    FinslerMetric sea = FinslerMetric::riemannian(fk.h, fk.box);

    FinslerMetric implicit_kropina = FinslerMetric::implicit_navigation(sea, fk.W);
    FinslerMetric implicit_randers = FinslerMetric::implicit_navigation(sea, fr.W);

    CounterRng rng(73);
    for (int t = 0; t < 10; ++t) {
        SampleStream s(rng, static_cast<std::uint64_t>(t));
        Vecd x = s.box_point(fk.box);
        Vecd yk = sample_admissible_direction(fk.metric, x, s);
        CHECK(std::fabs(finsler_value(implicit_kropina, x, yk) - finsler_value(fk.metric, x, yk)) <
              1e-10);
        Vecd yr = s.sphere_point(2);
        CHECK(std::fabs(finsler_value(implicit_randers, x, yr) - finsler_value(fr.metric, x, yr)) <
              1e-10);
    }

    // derivative pipelines agree through the implicit solve
    std::vector<double> x{0.1, -0.3};
    std::vector<double> y{1.0, 0.4};
    Matd gc = fundamental_tensor(fk.metric, x, y);
    Matd gi = fundamental_tensor(implicit_kropina, x, y);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::fabs(gc(i, j) - gi(i, j)) < 1e-8);

    Vecd Gc = spray(fr.metric, x, y);
    Vecd Gi = spray(implicit_randers, x, y);
    for (int i = 0; i < 2; ++i)
        CHECK(std::fabs(Gc[static_cast<std::size_t>(i)] - Gi[static_cast<std::size_t>(i)]) < 1e-8);
}

TEST_CASE("curvature report fields are finite and consistent") {
    FinslerMetric m = load_model("s3-hopf").metric;
    CounterRng rng(79);
    SampleStream s(rng, 0);
    Vecd x = s.box_point(m.box);
    Vecd y = sample_admissible_direction(m, x, s);
    SampleStream flags(rng, 1);
    CurvatureReport rep = curvature_report(m, x, y, flags, 4);
    CHECK(std::isfinite(rep.F));
    CHECK(std::isfinite(rep.S));
    CHECK(std::isfinite(rep.Ric));
    CHECK(rep.flag_values.size() == 4);
    for (double k : rep.flag_values) CHECK(k == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(rep.res_homogeneity < 1e-10);
    CHECK(rep.res_ry < 1e-8);
}

TEST_CASE("flag curvature is edge-independent on scalar-flag models") {
    CounterRng rng(83);
    int idx = 0;
    for (const char* name : {"flat-kropina", "s3-hopf"}) {
        FinslerMetric m = load_model(name).metric;
        SampleStream s(rng, static_cast<std::uint64_t>(idx++));
        Vecd x = s.box_point(m.box);
        if (m.h.guard && !(m.h.guard->eval_d(x, m.h.params) > 0.0)) continue;
        Vecd y = sample_admissible_direction(m, x, s);
        FinslerCurvature c = finsler_curvature(m, x, y);
        double k0 = flag_curvature(c, y, sample_flag_edge(m, x, y, s));
        for (int f = 0; f < 20; ++f) {
            Vecd v = sample_flag_edge(m, x, y, s);
            CHECK(std::fabs(flag_curvature(c, y, v) - k0) < 1e-6);
        }
    }
}

TEST_CASE("regime validation rejects mislabeled winds") {
    LoadedSpec fk = load_model("flat-kropina");
    FinslerMetric wrong = FinslerMetric::randers_raw(fk.h, fk.W, fk.box);
    CHECK_THROWS_AS(validate_metric(wrong), RegimeMismatchError);
    LoadedSpec fr = load_model("flat-randers");
    FinslerMetric wrong2 = FinslerMetric::kropina_raw(fr.h, fr.W, fr.box);
    CHECK_THROWS_AS(validate_metric(wrong2), RegimeMismatchError);
}

} // TEST_SUITE
