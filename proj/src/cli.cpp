// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "mnorm/dualproj.hpp"
#include "mnorm/error.hpp"
#include "mnorm/multinorm.hpp"
#include "mnorm/sinkhorn.hpp"
#include "mnorm/training.hpp"
#include "mnorm/verify.hpp"

namespace mnorm {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw ConfigError(fmt::format("cannot open {} for writing", path.string()));
    }
    return file;
}

void write_text(const fs::path& path, const std::string& text) {
    open_output(path) << text;
}

fs::path prepare_out(const std::string& dir) {
    fs::path out(dir.empty() ? "." : dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw ConfigError(fmt::format("cannot create output directory {}: {}", out.string(), ec.message()));
    }
    return out;
}

std::string csv_number(double x) {
    return std::isnan(x) ? std::string() : format_double(x);
}

int run_normalize(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const NormalizeBlock& b = cfg.normalize;
    const DenseMatrix input = read_matrix_file(b.input);
    MultiNormOptions opts;
    opts.mode = b.mode;
    const MultiNormResult result = multi_normalize(input, b.norms, b.iterations, opts);
    write_matrix_file((dir / "normalized.txt").string(), result.x);

    // One row per iterate x_j; inner_next is <x_j, x_{j+1}>, defined for
    // consecutive projections only.
    std::ofstream report = open_output(dir / "normalize_report.csv");
    report << "j,l2_norm,inner_next\n";
    const MultiNormReport& r = result.report;
    for (std::size_t j = 0; j < r.l2_norms.size(); ++j) {
        const double inner = j >= 1 && j - 1 < r.inner_products.size() ? r.inner_products[j - 1] : std::nan("");
        report << j << ',' << format_double(r.l2_norms[j]) << ',' << csv_number(inner) << '\n';
    }
    if (cfg.verbosity > 0) {
        out << fmt::format("normalized {}x{} with {} norms, L = {}; fixed-point residual {:.3e}\n", input.rows(),
                           input.cols(), b.norms.size(), b.iterations, r.final_residual);
    }
    return kExitOk;
}

int run_sinkhorn(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const SinkhornBlock& b = cfg.sinkhorn;
    const DenseMatrix input = read_matrix_file(b.input);
    const SinkhornTrace trace = sinkhorn_trace(input, b.iterations, b.mode);
    write_matrix_file((dir / "sinkhorn.txt").string(), trace.x);
    std::ofstream csv = open_output(dir / "sinkhorn_trace.csv");
    csv << "k,row_residual,col_residual,hilbert_error\n";
    for (const SinkhornTraceRow& row : trace.rows) {
        csv << row.k << ',' << format_double(row.row_residual) << ',' << format_double(row.col_residual) << ','
            << csv_number(row.hilbert_error) << '\n';
    }
    if (cfg.verbosity > 0 && !trace.rows.empty()) {
        const SinkhornTraceRow& last = trace.rows.back();
        out << fmt::format("sinkhorn {}x{}, L = {}: row residual {:.3e}, col residual {:.3e}\n", input.rows(),
                           input.cols(), b.iterations, last.row_residual, last.col_residual);
    }
    return kExitOk;
}

int run_convexproj(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const ConvexBlock& b = cfg.convexproj;
    const DualSolution sol = convex_multiproj_solve(Vector(b.grad), b.balls, b.solver);
    nlohmann::ordered_json j;
    j["primal"] = std::vector<double>(sol.primal.begin(), sol.primal.end());
    j["primal_value"] = sol.primal_value;
    j["dual_objective"] = sol.objective;
    j["gap"] = sol.gap;
    j["sweeps"] = sol.sweeps;
    j["constraint_ratio"] = max_constraint_ratio(sol.primal, b.balls);
    nlohmann::json lambdas = nlohmann::json::array();
    for (const Vector& l : sol.lambdas) {
        lambdas.push_back(std::vector<double>(l.begin(), l.end()));
    }
    j["lambdas"] = lambdas;
    j["history"] = sol.history;
    const std::string text = j.dump(2) + "\n";
    write_text(dir / "convexproj.json", text);
    if (cfg.verbosity > 0) {
        out << text;
    }
    return kExitOk;
}

RunRecord train_one(const RunConfig& cfg) {
    const Problem problem = gen_problem(cfg.problem, cfg.dims, cfg.seed);
    Optimizer opt(make_optimizer_config(cfg.optimizer), make_groups(cfg.optimizer, problem));
    RunRecord record = run_training(problem, opt, make_train_options(cfg, *cfg.optimizer.base_lr));
    record.label = to_string(cfg.optimizer.kind);
    record.config_echo = echo_config(cfg);
    return record;
}

std::string summarize(const RunRecord& r) {
    return fmt::format(
        "label = {}\nproblem = {}\nsteps = {}\ninitial_loss = {}\nfinal_loss = {}\nstate_bytes = {}\n"
        "wall_seconds = {:.3f}\n",
        r.label, r.problem_id, r.steps.size(), format_double(r.initial_loss), format_double(r.final_loss()),
        r.state_bytes, r.wall_seconds);
}

int run_train(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const RunRecord record = train_one(cfg);
    write_text(dir / "run.csv", to_csv(record));
    write_text(dir / "summary.txt", summarize(record));
    if (cfg.verbosity > 0) {
        out << summarize(record);
    }
    return kExitOk;
}

int run_bench(const RunConfig& cfg, const fs::path& dir, std::ostream& out, std::ostream& err) {
    std::vector<RunRecord> records;
    std::vector<std::string> diverged;
    for (OptimizerKind kind : cfg.bench.kinds) {
        RunConfig cell = cfg;
        cell.command = "train";
        cell.optimizer.kind = kind;
        cell.optimizer.base_lr = default_base_lr(kind);
        const fs::path cell_dir = prepare_out((dir / to_string(kind)).string());
        write_text(cell_dir / "config.echo.ini", echo_config(cell));
        try {
            RunRecord record = train_one(cell);
            write_text(cell_dir / "run.csv", to_csv(record));
            write_text(cell_dir / "summary.txt", summarize(record));
            records.push_back(std::move(record));
        } catch (const DivergenceError& e) {
            err << fmt::format("{}: {}\n", to_string(kind), e.what());
            diverged.push_back(to_string(kind));
        }
    }
    const std::string table = format_comparison(compare_runs(records, cfg.bench.threshold));
    std::string text = table;
    for (const std::string& name : diverged) {
        text += fmt::format("{:<16} diverged\n", name);
    }
    write_text(dir / "comparison.txt", text);
    if (cfg.verbosity > 0) {
        out << text;
    }
    return diverged.empty() ? kExitOk : kExitDivergence;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
    std::vector<CheckResult> results = run_acceptance(cfg.seed == 0 ? kVerifySeed : cfg.seed);
    for (CheckResult& r : run_invariants(cfg.seed == 0 ? kVerifySeed : cfg.seed)) {
        results.push_back(std::move(r));
    }
    std::size_t passed = 0;
    std::string failed;
    for (const CheckResult& r : results) {
        out << format_check(r) << '\n';
        if (r.passed) {
            ++passed;
        } else {
            failed += fmt::format("{}{}", failed.empty() ? "" : ", ", r.name);
        }
    }
    out << fmt::format("{}/{} checks passed\n", passed, results.size());
    if (!failed.empty()) {
        out << "failed: " << failed << '\n';
        return kExitVerify;
    }
    return kExitOk;
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command.empty()) {
            throw ConfigError("no command given");
        }
        const fs::path dir = prepare_out(config.out);
        if (config.command != "verify") {
            write_text(dir / "config.echo.ini", echo_config(config));
        }
        if (config.command == "normalize") {
            return run_normalize(config, dir, out);
        }
        if (config.command == "sinkhorn") {
            return run_sinkhorn(config, dir, out);
        }
        if (config.command == "convexproj") {
            return run_convexproj(config, dir, out);
        }
        if (config.command == "train") {
            return run_train(config, dir, out);
        }
        if (config.command == "bench") {
            return run_bench(config, dir, out, err);
        }
        if (config.command == "verify") {
            return run_verify(config, out);
        }
        throw ConfigError(fmt::format("unknown command '{}'", config.command));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace mnorm
