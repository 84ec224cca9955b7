#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bezierflow/errors.hpp"

namespace bezierflow {

using Vector = std::vector<double>;

// Dense row-major matrix of 64-bit floats.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    Vector row_vector(std::size_t i) const {
        return Vector(row(i), row(i) + cols);
    }
    void set_row(std::size_t i, const Vector& v) {
        if (v.size() != cols) throw ShapeError("set_row: length " + std::to_string(v.size()) +
                                               " != cols " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j) (*this)(i, j) = v[j];
    }
};

inline bool all_finite(const double* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

inline bool all_finite(const Vector& v) { return all_finite(v.data(), v.size()); }
inline bool all_finite(const Matrix& m) { return all_finite(m.data.data(), m.data.size()); }

// c = a * b^T, a: n x k, b: m x k. Row-dot-row keeps both operands contiguous.
inline Matrix matmul_abt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols)
        throw ShapeError("matmul_abt: inner dimensions " + std::to_string(a.cols) +
                         " vs " + std::to_string(b.cols));
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
    return c;
}

// c = a * b, a: n x k, b: k x m.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols) +
                         " vs " + std::to_string(b.rows));
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

// c = a^T * b, a: k x n, b: k x m.
inline Matrix matmul_atb(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows)
        throw ShapeError("matmul_atb: inner dimensions " + std::to_string(a.rows) +
                         " vs " + std::to_string(b.rows));
    Matrix c(a.cols, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        const double* bi = b.row(i);
        for (std::size_t p = 0; p < a.cols; ++p) {
            const double aip = ai[p];
            double* cp = c.row(p);
            for (std::size_t j = 0; j < b.cols; ++j) cp[j] += aip * bi[j];
        }
    }
    return c;
}

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ShapeError("dot: sizes " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double squared_distance(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ShapeError("squared_distance: sizes " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// v += alpha * w
inline void axpy(double alpha, const Vector& w, Vector& v) {
    if (v.size() != w.size())
        throw ShapeError("axpy: sizes " + std::to_string(v.size()) + " vs " + std::to_string(w.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += alpha * w[i];
}

inline Vector operator+(const Vector& a, const Vector& b) {
    Vector r = a;
    axpy(1.0, b, r);
    return r;
}

inline Vector operator-(const Vector& a, const Vector& b) {
    Vector r = a;
    axpy(-1.0, b, r);
    return r;
}

inline Vector operator*(double s, const Vector& v) {
    Vector r = v;
    for (double& x : r) x *= s;
    return r;
}

} // namespace bezierflow
