// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mnorm/error.hpp"
#include "mnorm/rng.hpp"

namespace mnorm {

namespace {

DenseMatrix gaussian(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
    DenseMatrix out(rows, cols);
    for (double& v : out.values()) {
        v = scale * rng.normal();
    }
    return out;
}

ParamGroup group(std::string name, std::size_t rows, std::size_t cols) {
    const GroupRole role = rows >= 2 && cols >= 2 ? GroupRole::kLinear2d : GroupRole::kOther;
    return ParamGroup{std::move(name), rows, cols, role, 1.0};
}

void require_positive(std::size_t v, const char* what) {
    if (v == 0) {
        throw ConfigError(fmt::format("gen_problem: {} must be positive", what));
    }
}

void check_params(const Problem& problem, const std::vector<DenseMatrix>& params) {
    if (params.size() != problem.groups.size()) {
        throw DimensionError(
            fmt::format("loss_and_grad: expected {} parameter groups, got {}", problem.groups.size(), params.size()));
    }
    for (std::size_t g = 0; g < params.size(); ++g) {
        const ParamGroup& pg = problem.groups[g];
        if (params[g].rows() != pg.rows || params[g].cols() != pg.cols) {
            throw DimensionError(fmt::format("loss_and_grad: group {} expects {}x{}, got {}", pg.name, pg.rows,
                                             pg.cols, params[g].shape()));
        }
    }
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

LossGrad factorization(const Problem& p, const std::vector<DenseMatrix>& params) {
    const DenseMatrix& u = params[0];
    const DenseMatrix& v = params[1];
    const DenseMatrix r = matmul(u, v) - p.targets;
    const double f = frobenius_norm(r);
    return LossGrad{0.5 * f * f, {matmul_nt(r, v), matmul_tn(u, r)}};
}

LossGrad logistic(const Problem& p, const std::vector<DenseMatrix>& params, std::span<const std::size_t> subset) {
    auto w = params[0].row(0);
    const double b = params[1](0, 0);
    const std::size_t d = p.dims.features;
    LossGrad out{0.0, {DenseMatrix(1, d), DenseMatrix(1, 1)}};
    auto gw = out.grads[0].row(0);
    const double inv = 1.0 / static_cast<double>(subset.size());
    for (std::size_t idx : subset) {
        auto x = p.inputs.row(idx);
        const double y = p.targets(idx, 0);
        double z = b;
        for (std::size_t j = 0; j < d; ++j) {
            z += w[j] * x[j];
        }
        out.loss += softplus(-y * z) * inv;
        // d/dz softplus(-y z) = -y sigmoid(-y z)
        const double s = -y * sigmoid(-y * z) * inv;
        for (std::size_t j = 0; j < d; ++j) {
            gw[j] += s * x[j];
        }
        out.grads[1](0, 0) += s;
    }
    return out;
}

LossGrad mlp(const Problem& p, const std::vector<DenseMatrix>& params, std::span<const std::size_t> subset) {
    const DenseMatrix& w1 = params[0];
    const DenseMatrix& b1 = params[1];
    const DenseMatrix& w2 = params[2];
    const DenseMatrix& b2 = params[3];
    const std::size_t h = p.dims.hidden;
    const std::size_t o = p.dims.outputs;
    const std::size_t d = p.dims.features;
    LossGrad out{0.0, {DenseMatrix(h, d), DenseMatrix(1, h), DenseMatrix(o, h), DenseMatrix(1, o)}};
    const double inv = 1.0 / static_cast<double>(subset.size());

    std::vector<double> hid(h);
    std::vector<double> res(o);
    std::vector<double> dz(h);
    for (std::size_t idx : subset) {
        auto x = p.inputs.row(idx);
        for (std::size_t k = 0; k < h; ++k) {
            double z = b1(0, k);
            for (std::size_t j = 0; j < d; ++j) {
                z += w1(k, j) * x[j];
            }
            hid[k] = std::tanh(z);
        }
        for (std::size_t c = 0; c < o; ++c) {
            double y = b2(0, c);
            for (std::size_t k = 0; k < h; ++k) {
                y += w2(c, k) * hid[k];
            }
            res[c] = y - p.targets(idx, c);
            out.loss += 0.5 * res[c] * res[c] * inv;
        }
        for (std::size_t k = 0; k < h; ++k) {
            double back = 0.0;
            for (std::size_t c = 0; c < o; ++c) {
                back += res[c] * w2(c, k);
            }
            dz[k] = back * (1.0 - hid[k] * hid[k]) * inv;
        }
        for (std::size_t c = 0; c < o; ++c) {
            const double r = res[c] * inv;
            for (std::size_t k = 0; k < h; ++k) {
                out.grads[2](c, k) += r * hid[k];
            }
            out.grads[3](0, c) += r;
        }
        for (std::size_t k = 0; k < h; ++k) {
            for (std::size_t j = 0; j < d; ++j) {
                out.grads[0](k, j) += dz[k] * x[j];
            }
            out.grads[1](0, k) += dz[k];
        }
    }
    return out;
}

std::vector<std::size_t> all_samples(const Problem& p) {
    std::vector<std::size_t> idx(p.sample_count());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

}  // namespace

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::kMatrixFactorization:
            return "matrix_factorization";
        case ProblemKind::kLogisticRegression:
            return "logistic_regression";
        case ProblemKind::kMlp2:
            return "mlp2";
    }
    return "?";
}

ProblemKind parse_problem_kind(std::string_view text) {
    for (auto k : {ProblemKind::kMatrixFactorization, ProblemKind::kLogisticRegression, ProblemKind::kMlp2}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ConfigError(fmt::format("unknown problem kind '{}'", text));
}

std::size_t Problem::sample_count() const noexcept {
    return kind == ProblemKind::kMatrixFactorization ? 0 : inputs.rows();
}

std::string Problem::id() const {
    switch (kind) {
        case ProblemKind::kMatrixFactorization:
            return fmt::format("{}:{}x{}:rank={}:seed={}", to_string(kind), dims.rows, dims.cols, dims.rank, seed);
        case ProblemKind::kLogisticRegression:
            return fmt::format("{}:d={}:N={}:margin={}:seed={}", to_string(kind), dims.features, dims.samples,
                               format_double(dims.margin), seed);
        case ProblemKind::kMlp2:
            return fmt::format("{}:d={}:N={}:h={}:o={}:seed={}", to_string(kind), dims.features, dims.samples,
                               dims.hidden, dims.outputs, seed);
    }
    return "?";
}

Problem gen_problem(ProblemKind kind, const ProblemDims& dims, std::uint64_t seed) {
    Problem p;
    p.kind = kind;
    p.dims = dims;
    p.seed = seed;
    Rng rng(seed);
    switch (kind) {
        case ProblemKind::kMatrixFactorization: {
            require_positive(dims.rows, "rows");
            require_positive(dims.cols, "cols");
            if (dims.rank < 1 || dims.rank > std::min(dims.rows, dims.cols)) {
                throw ConfigError(fmt::format("gen_problem: rank {} outside [1, {}]", dims.rank,
                                              std::min(dims.rows, dims.cols)));
            }
            const DenseMatrix u = gaussian(rng, dims.rows, dims.rank, 1.0);
            const DenseMatrix v = gaussian(rng, dims.rank, dims.cols, 1.0);
            p.targets = matmul(u, v);
            p.planted = {u, v};
            p.groups = {group("U", dims.rows, dims.rank), group("V", dims.rank, dims.cols)};
            const double su = 1.0 / std::sqrt(static_cast<double>(dims.rank));
            const double sv = 1.0 / std::sqrt(static_cast<double>(dims.cols));
            p.init = {gaussian(rng, dims.rows, dims.rank, su), gaussian(rng, dims.rank, dims.cols, sv)};
            break;
        }
        case ProblemKind::kLogisticRegression: {
            require_positive(dims.features, "features");
            require_positive(dims.samples, "samples");
            if (!(dims.margin >= 0.0 && dims.margin <= 1.0)) {
                throw ConfigError(fmt::format("gen_problem: margin must lie in [0, 1], got {}", dims.margin));
            }
            const std::size_t d = dims.features;
            std::vector<double> dir(d);
            double norm = 0.0;
            while (norm == 0.0) {
                for (double& v : dir) {
                    v = rng.normal();
                }
                norm = lp_norm(std::span<const double>(dir), 2.0);
            }
            for (double& v : dir) {
                v /= norm;
            }
            p.inputs = DenseMatrix(dims.samples, d);
            p.targets = DenseMatrix(dims.samples, 1);
            for (std::size_t i = 0; i < dims.samples; ++i) {
                auto x = p.inputs.row(i);
                double s = 0.0;
                // Rejection sampling keeps every point at least `margin` from
                // the separating hyperplane.
                do {
                    s = 0.0;
                    for (std::size_t j = 0; j < d; ++j) {
                        x[j] = rng.normal();
                        s += dir[j] * x[j];
                    }
                } while (std::abs(s) < dims.margin || s == 0.0);
                p.targets(i, 0) = s > 0.0 ? 1.0 : -1.0;
            }
            p.planted = {DenseMatrix(1, d, dir)};
            p.groups = {group("w", 1, d), group("b", 1, 1)};
            p.init = {gaussian(rng, 1, d, 1.0 / std::sqrt(static_cast<double>(d))), DenseMatrix(1, 1)};
            break;
        }
        case ProblemKind::kMlp2: {
            require_positive(dims.features, "features");
            require_positive(dims.samples, "samples");
            require_positive(dims.hidden, "hidden");
            require_positive(dims.outputs, "outputs");
            const std::size_t d = dims.features;
            const std::size_t h = dims.hidden;
            const std::size_t o = dims.outputs;
            p.planted = {gaussian(rng, h, d, 2.0 / std::sqrt(static_cast<double>(d))), gaussian(rng, 1, h, 0.1),
                         gaussian(rng, o, h, 1.0 / std::sqrt(static_cast<double>(h))), gaussian(rng, 1, o, 0.1)};
            p.inputs = gaussian(rng, dims.samples, d, 1.0);
            p.targets = DenseMatrix(dims.samples, o);
            p.groups = {group("W1", h, d), group("b1", 1, h), group("W2", o, h), group("b2", 1, o)};
            p.init = {gaussian(rng, h, d, 1.0 / std::sqrt(static_cast<double>(d))), DenseMatrix(1, h),
                      gaussian(rng, o, h, 1.0 / std::sqrt(static_cast<double>(h))), DenseMatrix(1, o)};
            // Targets are the teacher network's outputs.
            for (std::size_t i = 0; i < dims.samples; ++i) {
                auto x = p.inputs.row(i);
                for (std::size_t c = 0; c < o; ++c) {
                    double y = p.planted[3](0, c);
                    for (std::size_t k = 0; k < h; ++k) {
                        double z = p.planted[1](0, k);
                        for (std::size_t j = 0; j < d; ++j) {
                            z += p.planted[0](k, j) * x[j];
                        }
                        y += p.planted[2](c, k) * std::tanh(z);
                    }
                    p.targets(i, c) = y;
                }
            }
            break;
        }
    }
    return p;
}

LossGrad loss_and_grad(const Problem& problem, const std::vector<DenseMatrix>& params) {
    check_params(problem, params);
    if (problem.kind == ProblemKind::kMatrixFactorization) {
        return factorization(problem, params);
    }
    const std::vector<std::size_t> idx = all_samples(problem);
    return loss_and_grad(problem, params, idx);
}

LossGrad loss_and_grad(const Problem& problem, const std::vector<DenseMatrix>& params,
                       std::span<const std::size_t> subset) {
    check_params(problem, params);
    if (problem.kind == ProblemKind::kMatrixFactorization) {
        throw ConfigError("loss_and_grad: matrix_factorization has no samples to subset");
    }
    if (subset.empty()) {
        throw ConfigError("loss_and_grad: empty sample subset");
    }
    for (std::size_t i : subset) {
        if (i >= problem.sample_count()) {
            throw RangeError(fmt::format("loss_and_grad: sample {} out of range", i));
        }
    }
    return problem.kind == ProblemKind::kLogisticRegression ? logistic(problem, params, subset)
                                                            : mlp(problem, params, subset);
}

double loss_value(const Problem& problem, const std::vector<DenseMatrix>& params) {
    return loss_and_grad(problem, params).loss;
}

std::vector<DenseMatrix> random_params(const Problem& problem, std::uint64_t seed, double scale) {
    Rng rng(seed);
    std::vector<DenseMatrix> out;
    for (const ParamGroup& g : problem.groups) {
        out.push_back(gaussian(rng, g.rows, g.cols, scale));
    }
    return out;
}

}  // namespace mnorm
