#pragma once

#include <optional>
#include <span>
#include <vector>

#include "finslernav/expr.hpp"
#include "finslernav/jet.hpp"
#include "finslernav/linalg.hpp"
#include "finslernav/rng.hpp"

namespace finslernav {

// ---------------------------------------------------------------------------
// Chart data: a symmetric matrix of expressions for the sea metric, plus
// vector/covector fields. All evaluation is templated on the scalar type;
// derivatives come from calling the same code with jet-valued coordinates.
// ---------------------------------------------------------------------------

struct RiemannMetric {
    int dim = 0;
    std::vector<Expr> upper;          // packed upper triangle, (i,j) with i <= j
    std::optional<Expr> guard;        // admissible where guard > 0
    Params params;

    const Expr& at(int i, int j) const {
        if (i > j) std::swap(i, j);
        return upper[static_cast<std::size_t>(i * dim - i * (i - 1) / 2 + (j - i))];
    }

    static RiemannMetric euclidean(int n) {
        RiemannMetric m;
        m.dim = n;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) m.upper.push_back(Expr::number(i == j ? 1.0 : 0.0));
        return m;
    }
};

enum class Variance { Upper, Lower };

struct Field {
    int dim = 0;
    std::vector<Expr> comp;
    Variance variance = Variance::Upper;
    Params params;
};

template <class S>
class Tensor3 {
public:
    Tensor3() : n_(0) {}
    Tensor3(int n, const S& fill) : n_(n), a_(static_cast<std::size_t>(n) * n * n, fill) {}
    S& operator()(int i, int j, int k) { return a_[static_cast<std::size_t>((i * n_ + j) * n_ + k)]; }
    const S& operator()(int i, int j, int k) const {
        return a_[static_cast<std::size_t>((i * n_ + j) * n_ + k)];
    }
    int dim() const { return n_; }

private:
    int n_;
    std::vector<S> a_;
};

template <class S>
class Tensor4 {
public:
    Tensor4() : n_(0) {}
    Tensor4(int n, const S& fill) : n_(n), a_(static_cast<std::size_t>(n) * n * n * n, fill) {}
    S& operator()(int i, int j, int k, int l) {
        return a_[static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l)];
    }
    const S& operator()(int i, int j, int k, int l) const {
        return a_[static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l)];
    }
    int dim() const { return n_; }

private:
    int n_;
    std::vector<S> a_;
};

// --- evaluation -------------------------------------------------------------

template <class S>
void check_guard(const RiemannMetric& h, std::span<const S> x) {
    if (!h.guard) return;
    if (!(scalar_value(h.guard->eval(x, h.params)) > 0.0))
        throw GuardViolatedError("point lies outside the chart guard region");
}

template <class S>
Matrix<S> metric_matrix(const RiemannMetric& h, std::span<const S> x) {
    check_guard(h, x);
    const int n = h.dim;
    Matrix<S> m(n, n, make_like(x[0], 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            S v = h.at(i, j).eval(x, h.params);
            m(i, j) = v;
            if (i != j) m(j, i) = v;
        }
    return m;
}

template <class S>
std::vector<S> field_components(const Field& f, std::span<const S> x) {
    std::vector<S> v;
    v.reserve(f.comp.size());
    for (const Expr& e : f.comp) v.push_back(e.eval(x, f.params));
    return v;
}

// Seed chart coordinates as jet variables over scalar type S.
template <class S>
std::vector<JetT<S>> seed_coordinates(std::span<const S> x, int order) {
    const int n = static_cast<int>(x.size());
    const MonomialTable& tab = monomial_table(n, order);
    std::vector<JetT<S>> xj;
    xj.reserve(x.size());
    for (int i = 0; i < n; ++i) xj.push_back(JetT<S>::variable(tab, i, x[static_cast<std::size_t>(i)]));
    return xj;
}

template <class S>
struct ChristoffelData {
    Matrix<S> h;      // metric values
    Matrix<S> hinv;   // inverse metric
    Tensor3<S> gamma; // gamma(i,j,k) = Gamma^i_{jk}
};

// Assemble Christoffel symbols from a metric already evaluated on order-1
// coordinate jets.
template <class S>
ChristoffelData<S> christoffel_from_jets(const Matrix<JetT<S>>& hj) {
    const int n = hj.rows();
    const S zero = make_like(hj(0, 0).val(), 0.0);
    Matrix<S> hval(n, n, zero);
    Tensor3<S> dh(n, zero); // dh(k,i,j) = d_k h_ij
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            hval(i, j) = hj(i, j).val();
            for (int k = 0; k < n; ++k) dh(k, i, j) = hj(i, j).d1(k);
        }
    Matrix<S> hinv = inverse(hval, "metric inverse");
    Tensor3<S> gamma(n, zero);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                S sum = zero;
                for (int l = 0; l < n; ++l)
                    sum += hinv(i, l) * (dh(j, l, k) + dh(k, j, l) - dh(l, j, k));
                sum = sum * 0.5;
                gamma(i, j, k) = sum;
                if (j != k) gamma(i, k, j) = sum;
            }
    ChristoffelData<S> out;
    out.h = std::move(hval);
    out.hinv = std::move(hinv);
    out.gamma = std::move(gamma);
    return out;
}

template <class S>
ChristoffelData<S> christoffel_at(const RiemannMetric& h, std::span<const S> x) {
    std::vector<JetT<S>> xj = seed_coordinates(x, 1);
    Matrix<JetT<S>> hj = metric_matrix<JetT<S>>(h, xj);
    return christoffel_from_jets<S>(hj);
}

// Covariant derivative of the lowered field: result(i, j) = w_{i|j} where
// w_i are the covector components of f (lowered through h when f is given
// with upper indices).
template <class S>
Matrix<S> cov_deriv_lowered(const RiemannMetric& h, const Field& f, std::span<const S> x) {
    const int n = h.dim;
    std::vector<JetT<S>> xj = seed_coordinates(x, 1);
    Matrix<JetT<S>> hj = metric_matrix<JetT<S>>(h, xj);
    std::vector<JetT<S>> fj = field_components<JetT<S>>(f, xj);
    std::vector<JetT<S>> w;
    if (f.variance == Variance::Lower) {
        w = std::move(fj);
    } else {
        w.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            JetT<S> acc = hj(i, 0) * fj[0];
            for (int k = 1; k < n; ++k) acc += hj(i, k) * fj[static_cast<std::size_t>(k)];
            w.push_back(std::move(acc));
        }
    }
    ChristoffelData<S> ch = christoffel_from_jets<S>(hj);
    const S zero = make_like(ch.h(0, 0), 0.0);
    Matrix<S> out(n, n, zero);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            S v = w[static_cast<std::size_t>(i)].d1(j);
            for (int k = 0; k < n; ++k) v -= ch.gamma(k, i, j) * w[static_cast<std::size_t>(k)].val();
            out(i, j) = v;
        }
    return out;
}

// Curvature tensor R^i_{jkl} of the Levi-Civita connection,
//   R^i_{jkl} = d_k Gamma^i_{jl} - d_l Gamma^i_{jk}
//             + Gamma^i_{km} Gamma^m_{jl} - Gamma^i_{lm} Gamma^m_{jk},
// sign fixed so the round sphere has sectional curvature +1.
template <class S>
Tensor4<S> riemann_tensor(const RiemannMetric& h, std::span<const S> x) {
    const int n = h.dim;
    std::vector<JetT<S>> xj = seed_coordinates(x, 1);
    ChristoffelData<JetT<S>> ch = christoffel_at<JetT<S>>(h, xj);
    const S zero = make_like(ch.gamma(0, 0, 0).val(), 0.0);
    Tensor4<S> R(n, zero);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    S v = ch.gamma(i, j, l).d1(k) - ch.gamma(i, j, k).d1(l);
                    for (int m = 0; m < n; ++m) {
                        v += ch.gamma(i, k, m).val() * ch.gamma(m, j, l).val();
                        v -= ch.gamma(i, l, m).val() * ch.gamma(m, j, k).val();
                    }
                    R(i, j, k, l) = v;
                }
    return R;
}

// --- double-facing operations ----------------------------------------------

struct MetricAt {
    Matd h;
    Matd hinv;
    double sqrt_det = 0.0;
};

// Metric matrix, inverse, and volume density at a point. Rejects points where
// the matrix fails to be positive definite.
MetricAt metric_at(const RiemannMetric& h, std::span<const double> x);

Matd ricci_h(const RiemannMetric& h, std::span<const double> x);

double sectional_h(const RiemannMetric& h, std::span<const double> x, const Vecd& u, const Vecd& v);

// Max deviation of sectional curvature from its mean over all coordinate
// planes plus `extra_planes` seeded random ones; also reports the mean.
struct IsotropyResult {
    double mean = 0.0;
    double max_deviation = 0.0;
};
IsotropyResult sectional_isotropy(const RiemannMetric& h, std::span<const double> x,
                                  const CounterRng& rng, int extra_planes = 10);

double inner_h(const RiemannMetric& h, std::span<const double> x, const Vecd& u, const Vecd& v);
double norm_h(const RiemannMetric& h, std::span<const double> x, const Vecd& v);
double norm_h(const RiemannMetric& h, const Field& f, std::span<const double> x);

// Lowered field components at a point.
Vecd lowered(const RiemannMetric& h, const Field& f, std::span<const double> x);
// Upper components at a point (raises lower-variance fields through h^{-1}).
Vecd raised(const RiemannMetric& h, const Field& f, std::span<const double> x);

} // namespace finslernav
