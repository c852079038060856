// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError(fmt::format("{}: non-finite entry {}", what, v));
        }
    }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(fmt::format("{}: shape mismatch {} vs {}", op, a.shape(), b.shape()));
    }
}

}  // namespace

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_, "Vector");
}

Vector::Vector(std::initializer_list<double> values) : values_(values) {
    require_finite(values_, "Vector");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw DimensionError(
            fmt::format("DenseMatrix: {} values do not fill a {}x{} matrix", values_.size(), rows, cols));
    }
    require_finite(values_, "DenseMatrix");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(m * n);
    for (const auto& r : rows) {
        if (r.size() != n) {
            throw DimensionError("DenseMatrix::from_rows: ragged rows");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return {m, n, std::move(values)};
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix eye(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        eye(i, i) = 1.0;
    }
    return eye;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
    DenseMatrix out(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        out(i, i) = d[i];
    }
    return out;
}

std::string DenseMatrix::shape() const {
    return fmt::format("{}x{}", rows_, cols_);
}

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    require_same_shape(*this, other, "add");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += other.values_[k];
    }
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
    require_same_shape(*this, other, "subtract");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] -= other.values_[k];
    }
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double alpha) noexcept {
    for (double& v : values_) {
        v *= alpha;
    }
    return *this;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError(fmt::format("matmul: shape mismatch {} vs {}", a.shape(), b.shape()));
    }
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out[j] += aik * brow[j];
            }
        }
    }
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError(fmt::format("matmul_nt: shape mismatch {} vs {}^T", a.shape(), b.shape()));
    }
    DenseMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto brow = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                s += arow[k] * brow[k];
            }
            c(i, j) = s;
        }
    }
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError(fmt::format("matmul_tn: shape mismatch {}^T vs {}", a.shape(), b.shape()));
    }
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) {
                continue;
            }
            auto out = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out[j] += aki * brow[j];
            }
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    a += b;
    return a;
}

DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    a -= b;
    return a;
}

DenseMatrix operator*(double alpha, DenseMatrix a) {
    a *= alpha;
    return a;
}

double frobenius_norm(const DenseMatrix& a) {
    return lp_norm(a.values(), 2.0);
}

double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "frobenius_inner");
    double s = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t k = 0; k < av.size(); ++k) {
        s += av[k] * bv[k];
    }
    return s;
}

double max_abs(const DenseMatrix& a) {
    return lp_norm(a.values(), std::numeric_limits<double>::infinity());
}

double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
    const double diff = frobenius_norm(a - b);
    const double ref = frobenius_norm(b);
    return ref > 0.0 ? diff / ref : diff;
}

Vector row_norms(const DenseMatrix& a) {
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out[i] = lp_norm(a.row(i), 2.0);
    }
    return out;
}

Vector col_norms(const DenseMatrix& a) {
    std::vector<double> sq(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            sq[j] += r[j] * r[j];
        }
    }
    Vector out(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        out[j] = std::sqrt(sq[j]);
    }
    return out;
}

DenseMatrix hadamard_square(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& v : out.values()) {
        v *= v;
    }
    return out;
}

DenseMatrix diag_scale(const Vector& left, const DenseMatrix& a, const Vector& right) {
    if (left.size() != a.rows() || right.size() != a.cols()) {
        throw DimensionError(fmt::format("diag_scale: diag({}) * {} * diag({})", left.size(), a.shape(),
                                         right.size()));
    }
    DenseMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            r[j] = left[i] * r[j] * right[j];
        }
    }
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw DimensionError(fmt::format("dot: length mismatch {} vs {}", a.size(), b.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double lp_norm(std::span<const double> x, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : x) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (double v : x) {
            s += std::abs(v);
        }
        return s;
    }
    // Rescale by the max entry so large/small magnitudes neither overflow nor
    // underflow.
    double m = 0.0;
    for (double v : x) {
        m = std::max(m, std::abs(v));
    }
    if (m == 0.0) {
        return 0.0;
    }
    double s = 0.0;
    if (p == 2.0) {
        for (double v : x) {
            const double r = v / m;
            s += r * r;
        }
        return m * std::sqrt(s);
    }
    for (double v : x) {
        s += std::pow(std::abs(v) / m, p);
    }
    return m * std::pow(s, 1.0 / p);
}

double lp_norm(const Vector& x, double p) {
    return lp_norm(x.values(), p);
}

Vector as_vector(const DenseMatrix& a) {
    if (a.rows() != 1 && a.cols() != 1) {
        throw TypeError(fmt::format("as_vector: {} matrix is not vector-shaped", a.shape()));
    }
    return Vector(std::vector<double>(a.values().begin(), a.values().end()));
}

DenseMatrix as_row(const Vector& v) {
    return {1, v.size(), v.raw()};
}

std::string format_double(double x) {
    return fmt::format("{}", x);
}

DenseMatrix read_matrix(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw ParseError("matrix: missing 'm n' header", 1);
    }
    std::istringstream hs(header);
    long m = 0;
    long n = 0;
    std::string extra;
    if (!(hs >> m >> n) || (hs >> extra) || m <= 0 || n <= 0) {
        throw ParseError("matrix: header must be two positive integers 'm n'", 1);
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m * n));
    std::string line;
    for (long i = 0; i < m; ++i) {
        if (!std::getline(in, line)) {
            throw ParseError(fmt::format("matrix: expected {} rows, found {}", m, i), static_cast<int>(i + 2));
        }
        std::istringstream ls(line);
        std::string tok;
        long count = 0;
        while (ls >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
                throw ParseError(fmt::format("matrix: bad value '{}'", tok), static_cast<int>(i + 2));
            }
            values.push_back(v);
            ++count;
        }
        if (count != n) {
            throw ParseError(fmt::format("matrix: row has {} values, expected {}", count, n),
                             static_cast<int>(i + 2));
        }
    }
    return {static_cast<std::size_t>(m), static_cast<std::size_t>(n), std::move(values)};
}

void write_matrix(std::ostream& out, const DenseMatrix& a) {
    out << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j > 0) {
                out << ' ';
            }
            out << format_double(r[j]);
        }
        out << '\n';
    }
}

DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open matrix file '{}'", path));
    }
    return read_matrix(in);
}

void write_matrix_file(const std::string& path, const DenseMatrix& a) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(fmt::format("cannot write matrix file '{}'", path));
    }
    write_matrix(out, a);
}

}  // namespace mnorm
