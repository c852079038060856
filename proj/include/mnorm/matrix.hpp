// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major real matrices and vectors in 64-bit precision, plus the
// small kernel family the rest of the library is written against.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mnorm {

class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t len, double fill = 0.0) : values_(len, fill) {}
    /// Throws DomainError if any entry is non-finite.
    explicit Vector(std::vector<double> values);
    Vector(std::initializer_list<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& raw() const noexcept { return values_; }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> values_;
};

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Row-major values; throws DimensionError on a length mismatch and
    /// DomainError on non-finite entries.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const Vector& d);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] std::string shape() const;

    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] bool all_finite() const noexcept;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double alpha) noexcept;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

// ---- kernels ---------------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a * b^T without materializing the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
/// a^T * b without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double alpha, DenseMatrix a);

double frobenius_norm(const DenseMatrix& a);
/// Sum of entrywise products (the Euclidean inner product on R^{m x n}).
double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);
/// ||a - b||_F / ||b||_F, or ||a - b||_F when b is zero.
double relative_error(const DenseMatrix& a, const DenseMatrix& b);

Vector row_norms(const DenseMatrix& a);
Vector col_norms(const DenseMatrix& a);

DenseMatrix hadamard_square(const DenseMatrix& a);
/// Diag(left) * a * Diag(right).
DenseMatrix diag_scale(const Vector& left, const DenseMatrix& a, const Vector& right);

// ---- vector helpers ---------------------------------------------------------

double dot(const Vector& a, const Vector& b);
/// l_p norm for p in [1, inf]; pass infinity() for the max norm.
double lp_norm(std::span<const double> x, double p);
double lp_norm(const Vector& x, double p);

/// Views a vector-shaped matrix (one row or one column) as a Vector.
Vector as_vector(const DenseMatrix& a);
/// Single-row matrix holding the entries of v.
DenseMatrix as_row(const Vector& v);

// ---- text format ----------------------------------------------------------
//
// First line "m n", then m lines of n space-separated decimals. Values are
// written in shortest round-trip form so that a write/read cycle is exact.

DenseMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const DenseMatrix& a);
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const DenseMatrix& a);

/// Shortest text that parses back to exactly x.
std::string format_double(double x);

}  // namespace mnorm
