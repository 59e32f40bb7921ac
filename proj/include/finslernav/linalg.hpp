#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "finslernav/errors.hpp"
#include "finslernav/jet.hpp"

namespace finslernav {

// Small dense matrix over an arbitrary scalar ring (double or jets).
// Dimensions in this toolkit stay tiny, so everything is direct elimination.
template <class S>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, const S& fill)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const S& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

private:
    int rows_, cols_;
    std::vector<S> a_;
};

using Matd = Matrix<double>;
using Vecd = std::vector<double>;

template <class S>
std::vector<S> mat_vec(const Matrix<S>& A, const std::vector<S>& x) {
    std::vector<S> y(static_cast<std::size_t>(A.rows()), make_like(x[0], 0.0));
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) y[static_cast<std::size_t>(i)] += A(i, j) * x[static_cast<std::size_t>(j)];
    return y;
}

// Gaussian elimination with partial pivoting on the magnitude of the scalar
// part. Works over jets because any element with nonzero constant term is
// invertible.
template <class S>
Matrix<S> solve_multi(Matrix<S> A, Matrix<S> B, const char* context = "linear solve") {
    const int n = A.rows();
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(scalar_value(A(col, col)));
        for (int r = col + 1; r < n; ++r) {
            double mag = std::fabs(scalar_value(A(r, col)));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (!(best > 1e-300)) throw SingularFundamentalTensorError(std::string(context) + ": singular matrix");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(A(col, j), A(pivot, j));
            for (int j = 0; j < B.cols(); ++j) std::swap(B(col, j), B(pivot, j));
        }
        S inv = jrecip(A(col, col));
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            if (is_exact_zero(A(r, col))) continue;
            S factor = A(r, col) * inv;
            for (int j = col; j < n; ++j) A(r, j) -= factor * A(col, j);
            for (int j = 0; j < B.cols(); ++j) B(r, j) -= factor * B(col, j);
        }
    }
    for (int i = 0; i < n; ++i) {
        S inv = jrecip(A(i, i));
        for (int j = 0; j < B.cols(); ++j) B(i, j) = B(i, j) * inv;
    }
    return B;
}

template <class S>
std::vector<S> solve(const Matrix<S>& A, const std::vector<S>& b, const char* context = "linear solve") {
    Matrix<S> B(A.rows(), 1, make_like(b[0], 0.0));
    for (int i = 0; i < A.rows(); ++i) B(i, 0) = b[static_cast<std::size_t>(i)];
    Matrix<S> X = solve_multi(A, std::move(B), context);
    std::vector<S> x;
    x.reserve(static_cast<std::size_t>(A.rows()));
    for (int i = 0; i < A.rows(); ++i) x.push_back(X(i, 0));
    return x;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& A, const char* context = "matrix inverse") {
    const int n = A.rows();
    Matrix<S> I(n, n, make_like(A(0, 0), 0.0));
    for (int i = 0; i < n; ++i) I(i, i) = make_like(A(0, 0), 1.0);
    return solve_multi(A, std::move(I), context);
}

template <class S>
S determinant(Matrix<S> A) {
    const int n = A.rows();
    S det = make_like(A(0, 0), 1.0);
    double sign = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(scalar_value(A(col, col)));
        for (int r = col + 1; r < n; ++r) {
            double mag = std::fabs(scalar_value(A(r, col)));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (!(best > 0.0)) return make_like(A(0, 0), 0.0);
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(A(col, j), A(pivot, j));
            sign = -sign;
        }
        det = det * A(col, col);
        S inv = jrecip(A(col, col));
        for (int r = col + 1; r < n; ++r) {
            if (is_exact_zero(A(r, col))) continue;
            S factor = A(r, col) * inv;
            for (int j = col; j < n; ++j) A(r, j) -= factor * A(col, j);
        }
    }
    return det * sign;
}

// Cholesky factor of a symmetric matrix; empty when not positive definite.
inline std::optional<Matd> cholesky(const Matd& A) {
    const int n = A.rows();
    Matd L(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (!(s > 0.0)) return std::nullopt;
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline Vecd sym_eigenvalues(Matd A) {
    const int n = A.rows();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(A(p, q)) < 1e-300) continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vecd ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = A(i, i);
    return ev;
}

inline double max_abs(const Matd& A) {
    double m = 0.0;
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) m = std::max(m, std::fabs(A(i, j)));
    return m;
}

inline double dot(const Vecd& a, const Vecd& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double euclid_norm(const Vecd& a) { return std::sqrt(dot(a, a)); }

} // namespace finslernav
