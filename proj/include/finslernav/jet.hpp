#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "finslernav/errors.hpp"

namespace finslernav {

// ---------------------------------------------------------------------------
// Monomial bookkeeping for dense truncated Taylor arithmetic.
//
// Multi-indices of total degree <= order over `nvars` variables, stored in
// graded-lexicographic order. The pairwise product table maps (i, j) to the
// index of the summed multi-index, or -1 when the product degree exceeds the
// truncation order.
// ---------------------------------------------------------------------------

class MonomialTable {
public:
    static constexpr int kMaxVars = 14;
    static constexpr int kMaxOrder = 3;

    MonomialTable(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    int count() const { return count_; }

    const std::array<std::uint8_t, kMaxVars>& exponents(int idx) const { return exps_[idx]; }
    int degree(int idx) const { return degree_[idx]; }
    double factorial(int idx) const { return fact_[idx]; }

    // Index of the product monomial, or -1 if truncated away.
    int product(int i, int j) const { return prod_[static_cast<std::size_t>(i) * count_ + j]; }

    // Index of x_v (degree one); requires order >= 1.
    int var_index(int v) const { return var_idx_[v]; }

    // Index of x_v * x_w; requires order >= 2.
    int pair_index(int v, int w) const;
    // Index of x_u * x_v * x_w; requires order >= 3.
    int triple_index(int u, int v, int w) const;

private:
    int index_of(const std::array<std::uint8_t, kMaxVars>& e) const;

    int nvars_;
    int order_;
    int count_;
    std::vector<std::array<std::uint8_t, kMaxVars>> exps_;
    std::vector<int> degree_;
    std::vector<double> fact_;
    std::vector<std::int32_t> prod_;
    std::vector<int> var_idx_;
    std::map<std::uint64_t, int> lookup_;
};

// Shared, process-wide table cache. Tables are immutable once built.
const MonomialTable& monomial_table(int nvars, int order);

// ---------------------------------------------------------------------------
// Scalar helpers. JetT is templated on its coefficient type so that jets of
// jets provide higher-order derivative information without raising the
// per-level truncation order. `scalar_value` drills down to the underlying
// constant term; `make_like` builds a constant with the same shape as a
// prototype scalar.
// ---------------------------------------------------------------------------

inline double scalar_value(double x) { return x; }
inline double make_like(double /*proto*/, double v) { return v; }
inline bool is_exact_zero(double x) { return x == 0.0; }

inline double jsqrt(double x) {
    if (!(x > 0.0)) throw DomainError("sqrt of non-positive value");
    return std::sqrt(x);
}
inline double jexp(double x) { return std::exp(x); }
inline double jlog(double x) {
    if (!(x > 0.0)) throw DomainError("log of non-positive value");
    return std::log(x);
}
inline double jsin(double x) { return std::sin(x); }
inline double jcos(double x) { return std::cos(x); }
inline double jabs(double x) { return std::fabs(x); }
inline double jrecip(double x) {
    if (x == 0.0) throw DomainError("division by zero");
    return 1.0 / x;
}
inline double jpowr(double x, double r) {
    if (!(x > 0.0)) throw DomainError("real power of non-positive base");
    return std::pow(x, r);
}
inline double jpow(double x, int k) {
    if (k < 0) return jrecip(jpow(x, -k));
    double r = 1.0, b = x;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

// ---------------------------------------------------------------------------
// JetT<S>: truncated multivariate Taylor expansion with coefficients of type
// S (double, or another JetT). Coefficients follow the Taylor convention
// coeff(alpha) = d^alpha f / alpha!, so derivative accessors multiply by the
// factorial of the multi-index.
// ---------------------------------------------------------------------------

template <class S>
class JetT {
public:
    JetT() : tab_(nullptr) {}

    JetT(const MonomialTable& tab, const S& zero)
        : tab_(&tab), c_(static_cast<std::size_t>(tab.count()), zero) {}

    static JetT constant(const MonomialTable& tab, const S& v) {
        JetT j(tab, make_like(v, 0.0));
        j.c_[0] = v;
        return j;
    }

    static JetT variable(const MonomialTable& tab, int var, const S& value) {
        JetT j(tab, make_like(value, 0.0));
        j.c_[0] = value;
        if (tab.order() >= 1) j.c_[static_cast<std::size_t>(tab.var_index(var))] = make_like(value, 1.0);
        return j;
    }

    const MonomialTable& table() const { return *tab_; }
    int nvars() const { return tab_->nvars(); }
    int order() const { return tab_->order(); }
    int size() const { return tab_->count(); }

    const S& coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }
    S& coeff(int i) { return c_[static_cast<std::size_t>(i)]; }

    const S& val() const { return c_[0]; }

    // First partial with respect to variable v.
    S d1(int v) const { return c_[static_cast<std::size_t>(tab_->var_index(v))]; }
    // Second partial d^2/dv dw (factorial multiplicity already applied).
    S d2(int v, int w) const {
        S c = c_[static_cast<std::size_t>(tab_->pair_index(v, w))];
        return v == w ? c * 2.0 : c;
    }
    // Third partial d^3/du dv dw.
    S d3(int u, int v, int w) const {
        int mult = 1;
        if (u == v && v == w) mult = 6;
        else if (u == v || v == w || u == w) mult = 2;
        S c = c_[static_cast<std::size_t>(tab_->triple_index(u, v, w))];
        return c * static_cast<double>(mult);
    }

    JetT operator-() const {
        JetT r = *this;
        for (auto& c : r.c_) c = -c;
        return r;
    }

    JetT& operator+=(const JetT& o) {
        assert(tab_ == o.tab_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    JetT& operator-=(const JetT& o) {
        assert(tab_ == o.tab_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    JetT& operator*=(double s) {
        for (auto& c : c_) c = c * s;
        return *this;
    }
    JetT& operator+=(double s) {
        c_[0] += make_like(c_[0], s);
        return *this;
    }

    friend JetT operator+(JetT a, const JetT& b) { return a += b; }
    friend JetT operator-(JetT a, const JetT& b) { return a -= b; }

    friend JetT operator+(JetT a, double s) { return a += s; }
    friend JetT operator+(double s, JetT a) { return a += s; }
    friend JetT operator-(JetT a, double s) { return a += -s; }
    friend JetT operator-(double s, const JetT& a) { return (-a) + s; }
    friend JetT operator*(JetT a, double s) { return a *= s; }
    friend JetT operator*(double s, JetT a) { return a *= s; }
    friend JetT operator/(JetT a, double s) {
        if (s == 0.0) throw DomainError("division by zero");
        return a *= (1.0 / s);
    }
    friend JetT operator/(double s, const JetT& a) { return jrecip(a) * s; }

    friend JetT operator*(const JetT& a, const JetT& b) {
        assert(a.tab_ == b.tab_);
        const MonomialTable& t = *a.tab_;
        const int n = t.count();
        JetT out(t, make_like(a.c_[0], 0.0));
        for (int i = 0; i < n; ++i) {
            const S& ai = a.c_[static_cast<std::size_t>(i)];
            if (is_exact_zero(ai)) continue;
            for (int j = 0; j < n; ++j) {
                int k = t.product(i, j);
                if (k < 0) continue;
                const S& bj = b.c_[static_cast<std::size_t>(j)];
                if (is_exact_zero(bj)) continue;
                out.c_[static_cast<std::size_t>(k)] += ai * bj;
            }
        }
        return out;
    }

    friend JetT operator/(const JetT& a, const JetT& b) { return a * jrecip(b); }

    // Composition with an analytic function given the Taylor coefficients
    // d[k] = f^(k)(c) / k! at the constant term c. Horner evaluation in the
    // nilpotent part.
    friend JetT compose(const JetT& u, std::span<const S> d) {
        const MonomialTable& t = *u.tab_;
        JetT w = u;
        w.c_[0] = make_like(u.c_[0], 0.0);
        int p = t.order();
        int terms = static_cast<int>(d.size());
        JetT r = JetT::constant(t, d[static_cast<std::size_t>(terms - 1)]);
        for (int k = terms - 2; k >= 0; --k) {
            r = r * w;
            r.c_[0] += d[static_cast<std::size_t>(k)];
        }
        (void)p;
        return r;
    }

private:
    const MonomialTable* tab_;
    std::vector<S> c_;
};

using Jet = JetT<double>;
using Jet2 = JetT<Jet>;

template <class S>
double scalar_value(const JetT<S>& j) {
    return scalar_value(j.val());
}

template <class S>
JetT<S> make_like(const JetT<S>& proto, double v) {
    return JetT<S>::constant(proto.table(), make_like(proto.val(), v));
}

template <class S>
bool is_exact_zero(const JetT<S>& j) {
    for (int i = 0; i < j.size(); ++i)
        if (!is_exact_zero(j.coeff(i))) return false;
    return true;
}

// --- analytic functions on jets -------------------------------------------

template <class S>
JetT<S> jrecip(const JetT<S>& u) {
    const S& c = u.val();
    if (scalar_value(c) == 0.0) throw DomainError("division by jet with zero constant term");
    S inv = jrecip(c);
    int p = u.order();
    std::vector<S> d(static_cast<std::size_t>(p) + 1, inv);
    for (int k = 1; k <= p; ++k) d[static_cast<std::size_t>(k)] = -(d[static_cast<std::size_t>(k - 1)] * inv);
    return compose(u, std::span<const S>(d));
}

template <class S>
JetT<S> jsqrt(const JetT<S>& u) {
    const S& c = u.val();
    if (!(scalar_value(c) > 0.0)) throw DomainError("sqrt of jet with non-positive constant term");
    S s0 = jsqrt(c);
    S invc = jrecip(c);
    int p = u.order();
    std::vector<S> d;
    d.reserve(static_cast<std::size_t>(p) + 1);
    d.push_back(s0);
    if (p >= 1) d.push_back(jrecip(s0) * 0.5);           // 1/(2 sqrt c)
    if (p >= 2) d.push_back(-(d[1] * invc) * 0.25);      // -1/(8 c^{3/2})
    if (p >= 3) d.push_back((d[2] * invc) * -0.5);       // 1/(16 c^{5/2})
    return compose(u, std::span<const S>(d));
}

template <class S>
JetT<S> jexp(const JetT<S>& u) {
    S e = jexp(u.val());
    int p = u.order();
    std::vector<S> d(static_cast<std::size_t>(p) + 1, e);
    double f = 1.0;
    for (int k = 1; k <= p; ++k) {
        f /= static_cast<double>(k);
        d[static_cast<std::size_t>(k)] = e * f;
    }
    return compose(u, std::span<const S>(d));
}

template <class S>
JetT<S> jlog(const JetT<S>& u) {
    const S& c = u.val();
    if (!(scalar_value(c) > 0.0)) throw DomainError("log of jet with non-positive constant term");
    S inv = jrecip(c);
    int p = u.order();
    std::vector<S> d;
    d.reserve(static_cast<std::size_t>(p) + 1);
    d.push_back(jlog(c));
    if (p >= 1) d.push_back(inv);
    if (p >= 2) d.push_back(-(inv * inv) * 0.5);
    if (p >= 3) d.push_back(inv * inv * inv * (1.0 / 3.0));
    return compose(u, std::span<const S>(d));
}

template <class S>
JetT<S> jsin(const JetT<S>& u) {
    S s = jsin(u.val());
    S c = jcos(u.val());
    int p = u.order();
    std::vector<S> d;
    d.reserve(static_cast<std::size_t>(p) + 1);
    d.push_back(s);
    if (p >= 1) d.push_back(c);
    if (p >= 2) d.push_back(s * -0.5);
    if (p >= 3) d.push_back(c * (-1.0 / 6.0));
    return compose(u, std::span<const S>(d));
}

template <class S>
JetT<S> jcos(const JetT<S>& u) {
    S s = jsin(u.val());
    S c = jcos(u.val());
    int p = u.order();
    std::vector<S> d;
    d.reserve(static_cast<std::size_t>(p) + 1);
    d.push_back(c);
    if (p >= 1) d.push_back(-s);
    if (p >= 2) d.push_back(c * -0.5);
    if (p >= 3) d.push_back(s * (1.0 / 6.0));
    return compose(u, std::span<const S>(d));
}

template <class S>
JetT<S> jabs(const JetT<S>& u) {
    double v = scalar_value(u);
    if (v > 0.0) return u;
    if (v < 0.0) return -u;
    throw DomainError("abs of jet with zero constant term is not differentiable");
}

template <class S>
JetT<S> jpow(const JetT<S>& u, int k) {
    if (k < 0) return jrecip(jpow(u, -k));
    JetT<S> r = make_like(u, 1.0);
    JetT<S> b = u;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) r = r * b;
        if (e > 1) b = b * b;
    }
    return r;
}

template <class S>
JetT<S> jpowr(const JetT<S>& u, double r) {
    const S& c = u.val();
    if (!(scalar_value(c) > 0.0)) throw DomainError("real power of jet with non-positive constant term");
    S p0 = jpowr(c, r);
    S inv = jrecip(c);
    int p = u.order();
    std::vector<S> d;
    d.reserve(static_cast<std::size_t>(p) + 1);
    d.push_back(p0);
    if (p >= 1) d.push_back(p0 * inv * r);
    if (p >= 2) d.push_back(d[1] * inv * ((r - 1.0) * 0.5));
    if (p >= 3) d.push_back(d[2] * inv * ((r - 2.0) / 3.0));
    return compose(u, std::span<const S>(d));
}

} // namespace finslernav
