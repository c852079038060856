// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/whiten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

namespace {

void require_wide(const DenseMatrix& w, const char* op) {
    if (w.rows() == 0 || w.rows() > w.cols()) {
        throw DimensionError(fmt::format("{}: expected rows <= cols, got {}", op, w.shape()));
    }
}

double off_diagonal_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += a(i, j) * a(i, j);
            }
        }
    }
    return std::sqrt(s);
}

// Smallest pivot of an unpivoted Cholesky factorization. Every pivot bounds
// the smallest eigenvalue from above, so a tiny pivot certifies near-rank
// deficiency.
double min_cholesky_pivot(const DenseMatrix& s) {
    const std::size_t n = s.rows();
    DenseMatrix l(n, n);
    double min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        min_pivot = std::min(min_pivot, d);
        if (d <= 0.0) {
            return d;
        }
        const double root = std::sqrt(d);
        l(j, j) = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                v -= l(i, k) * l(j, k);
            }
            l(i, j) = v / root;
        }
    }
    return min_pivot;
}

DenseMatrix inverse_sqrt_whiten(const DenseMatrix& w, bool pseudo) {
    const DenseMatrix s = matmul_nt(w, w);
    const double scale = frobenius_norm(s);
    const double floor = kRankTolerance * scale;
    if (scale == 0.0 && !pseudo) {
        throw SingularInputError("whitening: W W^T is zero");
    }
    const SymmetricEigen eig = symmetric_eigen(s);
    const std::size_t m = s.rows();
    Vector inv_root(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double lambda = eig.values[k];
        if (!(lambda > floor) || scale == 0.0) {
            if (!pseudo) {
                throw SingularInputError(fmt::format(
                    "whitening: eigenvalue {} of W W^T below rank tolerance {}", lambda, floor));
            }
            inv_root[k] = 0.0;
        } else {
            inv_root[k] = 1.0 / std::sqrt(lambda);
        }
    }
    // V diag(inv_root) V^T W
    const DenseMatrix vt_w = matmul_tn(eig.vectors, w);
    DenseMatrix scaled = vt_w;
    for (std::size_t k = 0; k < m; ++k) {
        for (double& v : scaled.row(k)) {
            v *= inv_root[k];
        }
    }
    return matmul(eig.vectors, scaled);
}

}  // namespace

SymmetricEigen symmetric_eigen(const DenseMatrix& s, double tol, int max_sweeps) {
    if (s.rows() != s.cols()) {
        throw DimensionError(fmt::format("symmetric_eigen: {} is not square", s.shape()));
    }
    const std::size_t n = s.rows();
    DenseMatrix a = s;
    DenseMatrix v = DenseMatrix::identity(n);
    const double norm = frobenius_norm(a);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol * norm) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{Vector(n), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

DenseMatrix eig_whiten_oracle(const DenseMatrix& w) {
    require_wide(w, "eig_whiten_oracle");
    return inverse_sqrt_whiten(w, false);
}

DenseMatrix eig_whiten_pseudo(const DenseMatrix& w) {
    require_wide(w, "eig_whiten_pseudo");
    return inverse_sqrt_whiten(w, true);
}

NewtonSchulzResult newton_schulz_whiten_traced(const DenseMatrix& w, int iters, double tol) {
    require_wide(w, "newton_schulz_whiten");
    if (iters < 1) {
        throw ConfigError("newton_schulz_whiten: iteration count must be positive");
    }
    const DenseMatrix s = matmul_nt(w, w);
    const double scale = frobenius_norm(s);
    if (!(scale > 0.0)) {
        throw SingularInputError("newton_schulz_whiten: W W^T is zero");
    }
    const std::size_t m = s.rows();
    DenseMatrix y = (1.0 / scale) * s;
    if (min_cholesky_pivot(y) < kRankTolerance) {
        throw SingularInputError("newton_schulz_whiten: W W^T is rank deficient");
    }

    const DenseMatrix eye = DenseMatrix::identity(m);
    DenseMatrix z = eye;
    DenseMatrix zy = y;
    NewtonSchulzResult out;
    double previous = frobenius_norm(eye - zy);
    for (int k = 0; k < iters; ++k) {
        DenseMatrix t = 3.0 * eye - zy;
        t *= 0.5;
        y = matmul(y, t);
        z = matmul(t, z);
        zy = matmul(z, y);
        const double residual = frobenius_norm(eye - zy);
        out.residuals.push_back(residual);
        out.iterations = k + 1;
        if (!std::isfinite(residual) || residual > 1e6) {
            throw SingularInputError(
                fmt::format("newton_schulz_whiten: iteration diverged at step {}", k + 1));
        }
        if (tol > 0.0 && (residual <= tol || (residual < 1e-10 && residual >= previous))) {
            break;
        }
        previous = residual;
    }
    if (tol > 0.0 && out.residuals.back() > std::max(tol, 1e-8)) {
        throw SingularInputError(fmt::format("newton_schulz_whiten: no convergence after {} iterations "
                                             "(residual {})",
                                             out.iterations, out.residuals.back()));
    }
    z *= 1.0 / std::sqrt(scale);
    out.whitened = matmul(z, w);
    return out;
}

DenseMatrix newton_schulz_whiten(const DenseMatrix& w, int iters) {
    return newton_schulz_whiten_traced(w, iters).whitened;
}

}  // namespace mnorm
