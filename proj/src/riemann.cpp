#include "finslernav/riemann.hpp"

#include <cmath>

namespace finslernav {

MetricAt metric_at(const RiemannMetric& h, std::span<const double> x) {
    Matd m = metric_matrix<double>(h, x);
    auto L = cholesky(m);
    if (!L) throw NotPositiveDefiniteError("metric matrix is not positive definite at the point");
    double sqrt_det = 1.0;
    for (int i = 0; i < m.rows(); ++i) sqrt_det *= (*L)(i, i);
    MetricAt out;
    out.hinv = inverse(m, "metric inverse");
    out.h = std::move(m);
    out.sqrt_det = sqrt_det;
    return out;
}

Matd ricci_h(const RiemannMetric& h, std::span<const double> x) {
    Tensor4<double> R = riemann_tensor<double>(h, x);
    const int n = h.dim;
    Matd ric(n, n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += R(i, j, i, l);
            ric(j, l) = s;
        }
    return ric;
}

double sectional_h(const RiemannMetric& h, std::span<const double> x, const Vecd& u, const Vecd& v) {
    const int n = h.dim;
    Matd m = metric_matrix<double>(h, x);
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            uu += m(i, j) * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
            vv += m(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            uv += m(i, j) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
        }
    double gram = uu * vv - uv * uv;
    if (gram < 1e-12) throw DegeneratePlaneError("plane vectors are numerically parallel");

    Tensor4<double> R = riemann_tensor<double>(h, x);
    // numerator: h_{ia} R^a_{jkl} u^i v^j u^k v^l
    double num = 0.0;
    for (int a = 0; a < n; ++a) {
        double ru = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    ru += R(a, j, k, l) * v[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(k)] *
                          v[static_cast<std::size_t>(l)];
        for (int i = 0; i < n; ++i) num += m(i, a) * ru * u[static_cast<std::size_t>(i)];
    }
    return num / gram;
}

IsotropyResult sectional_isotropy(const RiemannMetric& h, std::span<const double> x,
                                  const CounterRng& rng, int extra_planes) {
    const int n = h.dim;
    std::vector<std::pair<Vecd, Vecd>> planes;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vecd u(static_cast<std::size_t>(n), 0.0), v(static_cast<std::size_t>(n), 0.0);
            u[static_cast<std::size_t>(i)] = 1.0;
            v[static_cast<std::size_t>(j)] = 1.0;
            planes.emplace_back(u, v);
        }
    for (int p = 0; p < extra_planes; ++p) {
        SampleStream s(rng, static_cast<std::uint64_t>(p));
        Vecd u = s.sphere_point(n);
        Vecd v = s.sphere_point(n);
        double uv = dot(u, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= uv * u[i];
        if (euclid_norm(v) < 1e-6) continue;
        planes.emplace_back(u, v);
    }
    double sum = 0.0;
    std::vector<double> ks;
    ks.reserve(planes.size());
    for (const auto& [u, v] : planes) {
        double k = sectional_h(h, x, u, v);
        ks.push_back(k);
        sum += k;
    }
    IsotropyResult r;
    r.mean = sum / static_cast<double>(ks.size());
    for (double k : ks) r.max_deviation = std::max(r.max_deviation, std::fabs(k - r.mean));
    return r;
}

double inner_h(const RiemannMetric& h, std::span<const double> x, const Vecd& u, const Vecd& v) {
    Matd m = metric_matrix<double>(h, x);
    double s = 0.0;
    for (int i = 0; i < h.dim; ++i)
        for (int j = 0; j < h.dim; ++j)
            s += m(i, j) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return s;
}

double norm_h(const RiemannMetric& h, std::span<const double> x, const Vecd& v) {
    return std::sqrt(std::max(0.0, inner_h(h, x, v, v)));
}

double norm_h(const RiemannMetric& h, const Field& f, std::span<const double> x) {
    return norm_h(h, x, raised(h, f, x));
}

Vecd lowered(const RiemannMetric& h, const Field& f, std::span<const double> x) {
    Vecd c = field_components<double>(f, x);
    if (f.variance == Variance::Lower) return c;
    Matd m = metric_matrix<double>(h, x);
    Vecd out(c.size(), 0.0);
    for (int i = 0; i < h.dim; ++i)
        for (int j = 0; j < h.dim; ++j) out[static_cast<std::size_t>(i)] += m(i, j) * c[static_cast<std::size_t>(j)];
    return out;
}

Vecd raised(const RiemannMetric& h, const Field& f, std::span<const double> x) {
    Vecd c = field_components<double>(f, x);
    if (f.variance == Variance::Upper) return c;
    MetricAt m = metric_at(h, x);
    Vecd out(c.size(), 0.0);
    for (int i = 0; i < h.dim; ++i)
        for (int j = 0; j < h.dim; ++j)
            out[static_cast<std::size_t>(i)] += m.hinv(i, j) * c[static_cast<std::size_t>(j)];
    return out;
}

} // namespace finslernav
