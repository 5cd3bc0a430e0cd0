// SPDX-License-Identifier: Apache-2.0
//
// depcap: Markov additive capacity models with copula-based dependence control
// Copyright (C) 2026 The depcap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef DEPCAP_LINALG_HPP
#define DEPCAP_LINALG_HPP

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace depcap {

using Vector = std::vector<double>;

// Small dense row-major matrix. Sizes in this library stay below ~100x100, so
// nothing here tries to be clever about cache blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> init)
    {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto &row : init) {
            require(row.size() == cols_, Errc::dimension_mismatch, "ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(const std::vector<Vector> &rows)
    {
        Matrix m;
        m.rows_ = rows.size();
        m.cols_ = m.rows_ ? rows.front().size() : 0;
        m.data_.reserve(m.rows_ * m.cols_);
        for (const auto &r : rows) {
            require(r.size() == m.cols_, Errc::dimension_mismatch, "ragged matrix rows");
            m.data_.insert(m.data_.end(), r.begin(), r.end());
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double &operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }

    std::vector<Vector> to_rows() const
    {
        std::vector<Vector> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            out[i].assign(row(i).begin(), row(i).end());
        return out;
    }

    Matrix transposed() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const Matrix &, const Matrix &) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix &a, const Matrix &b)
{
    require(a.cols() == b.rows(), Errc::dimension_mismatch, "matrix product");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

// y = A x
inline Vector mat_vec(const Matrix &a, std::span<const double> x)
{
    require(a.cols() == x.size(), Errc::dimension_mismatch, "matrix-vector product");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// y = x A
inline Vector vec_mat(std::span<const double> x, const Matrix &a)
{
    require(a.rows() == x.size(), Errc::dimension_mismatch, "vector-matrix product");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j)
            y[j] += xi * a(i, j);
    }
    return y;
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    require(a.size() == b.size(), Errc::dimension_mismatch, "dot product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    require(a.size() == b.size(), Errc::dimension_mismatch, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const Matrix &a, const Matrix &b)
{
    require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::dimension_mismatch, "max_abs_diff");
    return max_abs_diff(a.data(), b.data());
}

// Kronecker product, first factor is the most significant index.
inline Matrix kron(const Matrix &a, const Matrix &b)
{
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    return k;
}

// Strong connectivity of the directed graph {i -> j : m(i,j) > 0}.
inline bool is_irreducible(const Matrix &m)
{
    require(m.square(), Errc::dimension_mismatch, "irreducibility needs a square matrix");
    const std::size_t n = m.rows();
    if (n <= 1)
        return true;
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                const double w = transpose ? m(j, i) : m(i, j);
                if (w > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

// Cholesky factor (lower) of a symmetric PSD matrix. Semi-definite pivots are
// accepted down to -tol; returns false if the matrix is indefinite.
inline bool cholesky_psd(const Matrix &a, Matrix &l, double tol = 1e-12)
{
    require(a.square(), Errc::dimension_mismatch, "cholesky needs a square matrix");
    const std::size_t n = a.rows();
    l = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k)
            d -= l(j, k) * l(j, k);
        if (d < -tol)
            return false;
        const double ljj = d > 0.0 ? std::sqrt(d) : 0.0;
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * l(j, k);
            if (ljj > 0.0)
                l(i, j) = s / ljj;
            else if (std::abs(s) > 1e-9)
                return false;
        }
    }
    return true;
}

} // namespace depcap

#endif
