#include "doctest.h"

#include <cmath>
#include <vector>

#include "finslernav/fields.hpp"
#include "finslernav/modelspaces.hpp"
#include "finslernav/navigation.hpp"

using namespace finslernav;

namespace {

Field make_field(int dim, std::vector<std::string> comps, Variance var = Variance::Upper) {
    Field f;
    f.dim = dim;
    f.variance = var;
    for (const auto& c : comps) f.comp.push_back(parse(c, dim));
    return f;
}

std::vector<Vecd> grid_samples(const Box& box, int count) {
    QuasiRandomSequence seq(static_cast<int>(box.size()));
    std::vector<Vecd> pts;
    for (int s = 0; s < count; ++s) pts.push_back(seq.box_point(static_cast<std::uint64_t>(s), box));
    return pts;
}

} // namespace

TEST_SUITE("fields") {

TEST_CASE("conformal factor estimates on flat space") {
    RiemannMetric h = RiemannMetric::euclidean(2);
    std::vector<double> x{0.3, -0.8};
    CHECK(conformal_factor_estimate(h, make_field(2, {"x1", "x2"}), x) == doctest::Approx(0.5));
    CHECK(conformal_factor_estimate(h, make_field(2, {"3", "-2"}), x) == doctest::Approx(0.0));
}

TEST_CASE("hopf wind has vanishing conformal factor") {
    LoadedSpec hopf = load_model("s3-hopf");
    CounterRng rng(211);
    SampleStream s(rng, 0);
    for (int t = 0; t < 5; ++t) {
        Vecd x = s.box_point(hopf.box);
        CHECK(std::fabs(conformal_factor_estimate(hopf.h, hopf.W, x)) < 1e-9);
    }
}

TEST_CASE("radial field on the flat critical model is homothetic with factor 1/2") {
    LoadedSpec fk = load_model("flat-kropina");
    Field V = make_field(2, {"x1", "x2"});
    auto samples = grid_samples(fk.box, 12);
    FieldReport rep = check_conformal_kropina(fk.h, fk.W, V, samples);
    CHECK(rep.residual_c1 < 1e-12);
    CHECK(rep.residual_c2 < 1e-12);
    CHECK(rep.rho_mean == doctest::Approx(0.5));
    CHECK(rep.rho_stdev < 1e-14);
    CHECK(rep.verdict == FieldVerdict::Homothetic);
}

TEST_CASE("constant field on the flat critical model is Killing") {
    LoadedSpec fk = load_model("flat-kropina");
    Field V = make_field(2, {"-1/2", "0"});
    auto samples = grid_samples(fk.box, 8);
    FieldReport rep = check_conformal_kropina(fk.h, fk.W, V, samples);
    CHECK(rep.verdict == FieldVerdict::Killing);
    CHECK(rep.residual_killing < 1e-14);
}

TEST_CASE("field conformal for the sea but not for the wind condition is rejected") {
    LoadedSpec fk = load_model("flat-kropina");
    // holomorphic-type field: conformal for the flat metric with rho = x1,
    // but the mixed wind condition fails in the second component
    Field V = make_field(2, {"x1^2-x2^2", "2*x1*x2"});
    auto samples = grid_samples(fk.box, 12);
    FieldReport rep = check_conformal_kropina(fk.h, fk.W, V, samples);
    CHECK(rep.residual_c1 < 1e-12);
    CHECK(rep.residual_c2 > 1e-3);
    CHECK(rep.verdict == FieldVerdict::None);

    // same field passes the sea-only conformal test with rho = x1
    FieldReport riem = check_conformal_riemann(fk.h, V, samples);
    CHECK(riem.verdict == FieldVerdict::Conformal);
    CHECK(riem.rho_stdev > 1e-3);
}

TEST_CASE("field violating the symmetric condition is rejected outright") {
    LoadedSpec fk = load_model("flat-kropina");
    Field V = make_field(2, {"x1^2", "0"});
    auto samples = grid_samples(fk.box, 12);
    FieldReport rep = check_conformal_kropina(fk.h, fk.W, V, samples);
    CHECK(rep.residual_c1 > 1e-3);
    CHECK(rep.verdict == FieldVerdict::None);
}

TEST_CASE("wind-condition check requires a unit wind") {
    LoadedSpec fr = load_model("flat-randers");
    Field V = make_field(2, {"x1", "x2"});
    auto samples = grid_samples(fr.box, 4);
    CHECK_THROWS_AS(check_conformal_kropina(fr.h, fr.W, V, samples), RegimeMismatchError);
}

TEST_CASE("supplied conformal factor overrides the estimate") {
    LoadedSpec fk = load_model("flat-kropina");
    Field V = make_field(2, {"x1", "x2"});
    auto samples = grid_samples(fk.box, 6);
    FieldReport rep = check_conformal_kropina(fk.h, fk.W, V, samples, 0.25);
    // wrong factor: residuals become macroscopic
    CHECK(rep.residual_c1 > 1e-3);
    CHECK(rep.verdict == FieldVerdict::None);
}

TEST_CASE("symmetrized derivative of simple 1-forms") {
    RiemannMetric delta = RiemannMetric::euclidean(2);
    std::vector<double> x{0.4, 0.7};

    Field constant = make_field(2, {"1", "0"}, Variance::Lower);
    RTensorData kill = r_tensor(delta, constant, x);
    CHECK(kill.killing_residual < 1e-15);
    CHECK(std::fabs(kill.sigma_hat) < 1e-15);

    Field radial = make_field(2, {"x1", "x2"}, Variance::Lower);
    RTensorData rad = r_tensor(delta, radial, x);
    CHECK(rad.sigma_hat == doctest::Approx(1.0));
    CHECK(rad.anisotropy_residual < 1e-14);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(rad.r(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("dictionary: 1-form conformality tracks the wind Killing residual") {
    // on critical models the alpha-beta presentation in the constant gauge
    // must agree with the wind test: both residuals tiny or both large
    for (const char* name : {"flat-kropina", "flat-kropina-3d", "s3-hopf", "s3-hopf-reversed",
                             "flat-kropina-nonkilling"}) {
        LoadedSpec ls = load_model(name);
        auto [alpha, beta] = kropina_alpha_beta(ls.metric);
        double r_resid = 0.0, killing_resid = 0.0;
        for (const Vecd& x : grid_samples(ls.box, 10)) {
            if (ls.h.guard && !(ls.h.guard->eval_d(x, ls.h.params) > 0.0)) continue;
            RTensorData rt = r_tensor(alpha, beta, x);
            r_resid = std::max(r_resid, rt.anisotropy_residual);
            Matd dw = cov_deriv_lowered<double>(ls.h, ls.W, x);
            for (int i = 0; i < ls.raw.dim; ++i)
                for (int j = 0; j < ls.raw.dim; ++j)
                    killing_resid = std::max(killing_resid, std::fabs(dw(i, j) + dw(j, i)));
        }
        bool both_small = r_resid < 1e-8 && killing_resid < 1e-8;
        bool both_large = r_resid > 1e-4 && killing_resid > 1e-4;
        bool joint = both_small || both_large;
        CHECK_MESSAGE(joint, name, ": r=", r_resid, " killing=", killing_resid);
    }
}

TEST_CASE("sums of Killing fields stay Killing") {
    LoadedSpec hopf = load_model("s3-hopf");
    // second rotation field through the same chart
    Field other = make_field(3, {"-x2+x1*x3", "x1+x2*x3", "(1-x1^2-x2^2-x3^2)/2+x3^2"});
    Field sum;
    sum.dim = 3;
    sum.variance = Variance::Upper;
    for (int i = 0; i < 3; ++i) sum.comp.push_back(Expr::add(hopf.W.comp[static_cast<std::size_t>(i)], other.comp[static_cast<std::size_t>(i)]));

    auto samples = grid_samples(hopf.box, 8);
    CHECK(check_conformal_riemann(hopf.h, hopf.W, samples).verdict == FieldVerdict::Killing);
    CHECK(check_conformal_riemann(hopf.h, other, samples).verdict == FieldVerdict::Killing);
    FieldReport rep = check_conformal_riemann(hopf.h, sum, samples);
    CHECK(rep.residual_killing < 2e-8);
    CHECK(rep.verdict == FieldVerdict::Killing);
}

} // TEST_SUITE
