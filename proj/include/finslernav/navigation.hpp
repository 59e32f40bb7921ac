#pragma once

#include <span>
#include <utility>

#include "finslernav/finsler.hpp"

namespace finslernav {

enum class Regime { Subcritical, Critical };

struct NavigationData {
    RiemannMetric h;
    Field W;  // upper components
    Regime regime = Regime::Subcritical;
    Box box;
};

// Classify the wind regime by sampling the box: |W|_h uniformly 1 within the
// regime tolerance is critical, uniformly below 1 is subcritical, anything
// else is rejected.
NavigationData make_navigation_data(RiemannMetric h, Field W, Box box, int samples = 200);

// Solve base(x, y/t - W(x)) = 1 for the unique positive t on the admissible
// ray. Returns t and optionally the achieved residual.
double solve_implicit(const FinslerMetric& base, const Field& wind, std::span<const double> x,
                      std::span<const double> y, double* residual_out = nullptr);

// Closed forms of the navigation solution for each regime.
FinslerMetric randers_from_data(const NavigationData& data);
FinslerMetric kropina_from_data(const NavigationData& data);

// Recover navigation data from a critical metric given as (alpha, beta):
// h_ij = 4 a_ij / b^2 and W^i = b^i / 2, with every derived component
// synthesized as an expression so the result is re-ingestible.
NavigationData kropina_to_data(const RiemannMetric& alpha, const Field& beta, Box box);

// The (alpha, beta) presentation of a critical metric in the constant gauge
// b = 2: alpha^2 = h^2 and beta = 2 W_0.
std::pair<RiemannMetric, Field> kropina_alpha_beta(const FinslerMetric& F);

struct CompositeResult {
    MetricKind classification = MetricKind::Randers;  // Randers or Kropina
    FinslerMetric metric;                             // closed form on (h, W + V)
    Field wind_sum;                                   // W + V as expressions
    Expr lambda_tilde;                                // -(|V|^2_h + 2 <W,V>_h)
    double min_s = 0.0;                               // extremes of |V|^2 + 2<W,V>
    double max_s = 0.0;
    double max_speed = 0.0;                           // sup F(x, -V_x)
    int samples_checked = 0;
};

// Navigation with a second wind V on a critical metric F: checks the
// admissibility preconditions by sampling, classifies the outcome by the
// sign of |V|^2 + 2<W,V>, and builds the resulting metric on (h, W + V).
CompositeResult composite(const FinslerMetric& F, const Field& V, int samples = 200);

// Displacement map u = y + F(x, y) V_x.
Vecd u_map(const FinslerMetric& F, const Field& V, std::span<const double> x,
           std::span<const double> y);

// F(x, -V_x) = |V|^2_h / (-2 <W,V>_h) for a critical metric.
double speed_of_reversed_wind(const FinslerMetric& F, const Field& V, std::span<const double> x);

} // namespace finslernav
