// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

namespace {

// Raised by the setters for keys they do not know; parse_config attaches the
// line number.
class UnknownKey : public ConfigError {
public:
    using ConfigError::ConfigError;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) {
        return out;
    }
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) {
            break;
        }
        s = s.substr(pos + 1);
    }
    return out;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
    }
    return out;
}

double parse_real(std::string_view key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    const double out = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
        throw ConfigError(fmt::format("{}: expected a finite number, got '{}'", key, v));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

Mode parse_mode(std::string_view key, std::string_view v) {
    if (v == "strict") {
        return Mode::kStrict;
    }
    if (v == "guarded") {
        return Mode::kGuarded;
    }
    throw ConfigError(fmt::format("{}: expected strict or guarded, got '{}'", key, v));
}

std::string mode_name(Mode m) {
    return m == Mode::kStrict ? "strict" : "guarded";
}

std::vector<NormSpec> parse_norm_list(std::string_view key, std::string_view v) {
    std::vector<NormSpec> out;
    for (std::string_view item : split(v, ';')) {
        out.push_back(NormSpec::parse(item));
    }
    if (out.empty()) {
        throw ConfigError(fmt::format("{}: empty norm list", key));
    }
    return out;
}

std::string norm_list(const std::vector<NormSpec>& norms) {
    std::string out;
    for (const NormSpec& n : norms) {
        out += (out.empty() ? "" : "; ") + n.to_string();
    }
    return out;
}

std::vector<BallSpec> parse_ball_list(std::string_view key, std::string_view v) {
    std::vector<BallSpec> out;
    for (std::string_view item : split(v, ';')) {
        const auto at = item.rfind('@');
        if (at == std::string_view::npos) {
            throw ConfigError(fmt::format("{}: ball '{}' must be <norm>@<radius>", key, item));
        }
        BallSpec ball{NormSpec::parse(trim(item.substr(0, at))), parse_real(key, trim(item.substr(at + 1)))};
        validate_ball(ball);
        out.push_back(ball);
    }
    return out;
}

std::string ball_list(const std::vector<BallSpec>& balls) {
    std::string out;
    for (const BallSpec& b : balls) {
        out += (out.empty() ? "" : "; ") + b.norm.to_string() + "@" + format_double(b.radius);
    }
    return out;
}

std::vector<double> parse_numbers(std::string_view key, std::string_view v) {
    std::vector<double> out;
    for (std::string_view item : split(v, ',')) {
        out.push_back(parse_real(key, item));
    }
    return out;
}

std::string numbers(const std::vector<double>& xs) {
    std::string out;
    for (double x : xs) {
        out += (out.empty() ? "" : ", ") + format_double(x);
    }
    return out;
}

std::vector<OptimizerKind> parse_kinds(std::string_view v) {
    std::vector<OptimizerKind> out;
    for (std::string_view item : split(v, ',')) {
        out.push_back(parse_optimizer_kind(item));
    }
    return out;
}

std::string kinds(const std::vector<OptimizerKind>& ks) {
    std::string out;
    for (OptimizerKind k : ks) {
        out += (out.empty() ? "" : ", ") + to_string(k);
    }
    return out;
}

int positive_int(std::string_view key, std::string_view v) {
    const int out = parse_integer<int>(key, v);
    if (out < 1) {
        throw ConfigError(fmt::format("{}: must be >= 1, got {}", key, out));
    }
    return out;
}

std::size_t positive_size(std::string_view key, std::string_view v) {
    const auto out = parse_integer<std::size_t>(key, v);
    if (out == 0) {
        throw ConfigError(fmt::format("{}: must be >= 1", key));
    }
    return out;
}

double positive_real(std::string_view key, std::string_view v) {
    const double out = parse_real(key, v);
    if (!(out > 0.0)) {
        throw ConfigError(fmt::format("{}: must be positive, got {}", key, v));
    }
    return out;
}

void set_top(RunConfig& c, std::string_view key, std::string_view v) {
    if (key == "command") {
        c.command = std::string(v);
    } else if (key == "seed") {
        c.seed = parse_integer<std::uint64_t>(key, v);
    } else if (key == "verbosity") {
        c.verbosity = parse_integer<int>(key, v);
    } else if (key == "out") {
        c.out = std::string(v);
    } else {
        throw UnknownKey(fmt::format("unknown top-level key '{}'", key));
    }
}

void set_problem(RunConfig& c, std::string_view key, std::string_view v) {
    ProblemDims& d = c.dims;
    if (key == "kind") {
        c.problem = parse_problem_kind(v);
    } else if (key == "rows") {
        d.rows = positive_size(key, v);
    } else if (key == "cols") {
        d.cols = positive_size(key, v);
    } else if (key == "rank") {
        d.rank = positive_size(key, v);
    } else if (key == "features") {
        d.features = positive_size(key, v);
    } else if (key == "samples") {
        d.samples = positive_size(key, v);
    } else if (key == "margin") {
        d.margin = parse_real(key, v);
    } else if (key == "hidden") {
        d.hidden = positive_size(key, v);
    } else if (key == "outputs") {
        d.outputs = positive_size(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [problem]", key));
    }
}

void set_optimizer(RunConfig& c, std::string_view key, std::string_view v) {
    OptimizerBlock& o = c.optimizer;
    if (key == "kind") {
        o.kind = parse_optimizer_kind(v);
    } else if (key == "L") {
        o.iterations = positive_int(key, v);
    } else if (key == "alpha") {
        o.alpha = positive_real(key, v);
    } else if (key == "base_lr") {
        o.base_lr = positive_real(key, v);
    } else if (key == "beta1") {
        o.adam.beta1 = parse_real(key, v);
    } else if (key == "beta2") {
        o.adam.beta2 = parse_real(key, v);
    } else if (key == "eps") {
        o.adam.eps = parse_real(key, v);
    } else if (key == "norms") {
        o.norms = parse_norm_list(key, v);
    } else if (key == "steepest_norm") {
        o.steepest_norm = NormSpec::parse(v);
    } else if (key == "fallback") {
        o.fallback = parse_fallback_kind(v);
    } else if (key == "mode") {
        o.mode = parse_mode(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [optimizer]", key));
    }
}

void set_schedule(RunConfig& c, std::string_view key, std::string_view v) {
    if (key == "total_steps") {
        c.total_steps = positive_int(key, v);
    } else if (key == "warmup_frac") {
        c.warmup_frac = parse_real(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [schedule]", key));
    }
}

void set_train(RunConfig& c, std::string_view key, std::string_view v) {
    TrainBlock& t = c.train;
    if (key == "steps") {
        t.steps = parse_integer<int>(key, v);
    } else if (key == "minibatch") {
        t.minibatch = parse_bool(key, v);
    } else if (key == "batch_size") {
        t.batch_size = positive_size(key, v);
    } else if (key == "divergence_factor") {
        t.divergence_factor = positive_real(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [train]", key));
    }
}

void set_normalize(RunConfig& c, std::string_view key, std::string_view v) {
    NormalizeBlock& n = c.normalize;
    if (key == "input") {
        n.input = std::string(v);
    } else if (key == "norms") {
        n.norms = parse_norm_list(key, v);
    } else if (key == "L") {
        n.iterations = positive_int(key, v);
    } else if (key == "mode") {
        n.mode = parse_mode(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [normalize]", key));
    }
}

void set_sinkhorn(RunConfig& c, std::string_view key, std::string_view v) {
    SinkhornBlock& s = c.sinkhorn;
    if (key == "input") {
        s.input = std::string(v);
    } else if (key == "L") {
        s.iterations = positive_int(key, v);
    } else if (key == "mode") {
        s.mode = parse_mode(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [sinkhorn]", key));
    }
}

void set_convex(RunConfig& c, std::string_view key, std::string_view v) {
    ConvexBlock& b = c.convexproj;
    if (key == "grad") {
        b.grad = parse_numbers(key, v);
    } else if (key == "balls") {
        b.balls = parse_ball_list(key, v);
    } else if (key == "sweeps") {
        b.solver.sweeps = positive_int(key, v);
    } else if (key == "inner") {
        b.solver.inner.iterations = positive_int(key, v);
    } else if (key == "eta1") {
        b.solver.inner.eta1 = positive_real(key, v);
    } else if (key == "eta2") {
        b.solver.inner.eta2 = positive_real(key, v);
    } else if (key == "tolerance") {
        b.solver.tolerance = parse_real(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [convexproj]", key));
    }
}

void set_bench(RunConfig& c, std::string_view key, std::string_view v) {
    if (key == "kinds") {
        c.bench.kinds = parse_kinds(v);
    } else if (key == "threshold") {
        c.bench.threshold = positive_real(key, v);
    } else {
        throw UnknownKey(fmt::format("unknown key '{}' in [bench]", key));
    }
}

using Setter = void (*)(RunConfig&, std::string_view, std::string_view);

Setter setter_for(std::string_view section) {
    if (section.empty()) {
        return set_top;
    }
    if (section == "problem") {
        return set_problem;
    }
    if (section == "optimizer") {
        return set_optimizer;
    }
    if (section == "schedule") {
        return set_schedule;
    }
    if (section == "train") {
        return set_train;
    }
    if (section == "normalize") {
        return set_normalize;
    }
    if (section == "sinkhorn") {
        return set_sinkhorn;
    }
    if (section == "convexproj") {
        return set_convex;
    }
    if (section == "bench") {
        return set_bench;
    }
    return nullptr;
}

}  // namespace

double default_base_lr(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::kSgd:
        case OptimizerKind::kSteepestDescent:
            return 0.5;
        case OptimizerKind::kAdam:
        case OptimizerKind::kSignGd:
        case OptimizerKind::kSwan:
        case OptimizerKind::kMngd:
        case OptimizerKind::kSinkGd:
            return 0.02;
    }
    return 0.02;
}

namespace {

RunConfig parse_unresolved(std::string_view text) {
    RunConfig config;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(fmt::format("malformed section header '{}'", line), line_no);
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty() || setter_for(section) == nullptr) {
                throw ParseError(fmt::format("unknown section [{}]", section), line_no);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(fmt::format("expected 'key = value', got '{}'", line), line_no);
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("missing key before '='", line_no);
        }
        try {
            setter_for(section)(config, key, value);
        } catch (const ParseError&) {
            throw;
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return config;
}

void resolve_or_parse_error(RunConfig& config) {
    try {
        resolve_defaults(config);
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ParseError(e.what(), 0);
    }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig config = parse_unresolved(text);
    resolve_or_parse_error(config);
    return config;
}

RunConfig load_config(std::string_view text, const std::vector<std::string>& overrides) {
    RunConfig config = parse_unresolved(text);
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", item));
        }
        apply_setting(config, trim(std::string_view(item).substr(0, eq)), std::string_view(item).substr(eq + 1));
    }
    resolve_or_parse_error(config);
    return config;
}

void apply_setting(RunConfig& config, std::string_view dotted_key, std::string_view value) {
    const auto dot = dotted_key.find('.');
    const std::string_view section = dot == std::string_view::npos ? std::string_view{} : dotted_key.substr(0, dot);
    const std::string_view key = dot == std::string_view::npos ? dotted_key : dotted_key.substr(dot + 1);
    Setter set = setter_for(section);
    if (set == nullptr) {
        throw ConfigError(fmt::format("unknown section [{}]", section));
    }
    // A changed optimizer kind must not inherit the previous kind's default.
    if (section == "optimizer" && key == "kind") {
        const OptimizerKind before = config.optimizer.kind;
        set(config, key, trim(value));
        if (config.optimizer.base_lr && *config.optimizer.base_lr == default_base_lr(before)) {
            config.optimizer.base_lr.reset();
        }
        return;
    }
    set(config, key, trim(value));
}

void resolve_defaults(RunConfig& config) {
    if (!config.optimizer.base_lr) {
        config.optimizer.base_lr = default_base_lr(config.optimizer.kind);
    }
    if (!(config.warmup_frac >= 0.0 && config.warmup_frac < 1.0)) {
        throw ConfigError(fmt::format("schedule.warmup_frac must lie in [0, 1), got {}", config.warmup_frac));
    }
    if (!config.train.steps) {
        config.train.steps = config.total_steps;
    }
    if (*config.train.steps < 0 || *config.train.steps > config.total_steps) {
        throw ConfigError(
            fmt::format("train.steps = {} outside [0, schedule.total_steps = {}]", *config.train.steps, config.total_steps));
    }
    if (config.verbosity < 0) {
        throw ConfigError("verbosity must be >= 0");
    }
    static const char* const kCommands[] = {"", "normalize", "sinkhorn", "convexproj", "train", "bench", "verify"};
    if (std::find(std::begin(kCommands), std::end(kCommands), config.command) == std::end(kCommands)) {
        throw ConfigError(fmt::format("unknown command '{}'", config.command));
    }
    if (config.command == "normalize" && config.normalize.input.empty()) {
        throw ConfigError("missing required field normalize.input");
    }
    if (config.command == "sinkhorn" && config.sinkhorn.input.empty()) {
        throw ConfigError("missing required field sinkhorn.input");
    }
    if (config.command == "convexproj") {
        if (config.convexproj.grad.empty()) {
            throw ConfigError("missing required field convexproj.grad");
        }
        if (config.convexproj.balls.empty()) {
            throw ConfigError("missing required field convexproj.balls");
        }
    }
}

std::string echo_config(const RunConfig& c) {
    const auto f = [](double x) { return format_double(x); };
    std::string out;
    out += fmt::format("command = {}\nseed = {}\nverbosity = {}\nout = {}\n", c.command, c.seed, c.verbosity, c.out);
    out += fmt::format(
        "\n[problem]\nkind = {}\nrows = {}\ncols = {}\nrank = {}\nfeatures = {}\nsamples = {}\nmargin = {}\n"
        "hidden = {}\noutputs = {}\n",
        to_string(c.problem), c.dims.rows, c.dims.cols, c.dims.rank, c.dims.features, c.dims.samples,
        f(c.dims.margin), c.dims.hidden, c.dims.outputs);
    const OptimizerBlock& o = c.optimizer;
    out += fmt::format(
        "\n[optimizer]\nkind = {}\nL = {}\nalpha = {}\nbase_lr = {}\nbeta1 = {}\nbeta2 = {}\neps = {}\nnorms = {}\n"
        "steepest_norm = {}\nfallback = {}\nmode = {}\n",
        to_string(o.kind), o.iterations, f(o.alpha), f(o.base_lr.value_or(default_base_lr(o.kind))),
        f(o.adam.beta1), f(o.adam.beta2), f(o.adam.eps), norm_list(o.norms), o.steepest_norm.to_string(),
        to_string(o.fallback), mode_name(o.mode));
    out += fmt::format("\n[schedule]\ntotal_steps = {}\nwarmup_frac = {}\n", c.total_steps, f(c.warmup_frac));
    out += fmt::format("\n[train]\nsteps = {}\nminibatch = {}\nbatch_size = {}\ndivergence_factor = {}\n",
                       c.train.steps.value_or(c.total_steps), c.train.minibatch ? "true" : "false",
                       c.train.batch_size, f(c.train.divergence_factor));
    out += fmt::format("\n[normalize]\ninput = {}\nnorms = {}\nL = {}\nmode = {}\n", c.normalize.input,
                       norm_list(c.normalize.norms), c.normalize.iterations, mode_name(c.normalize.mode));
    out += fmt::format("\n[sinkhorn]\ninput = {}\nL = {}\nmode = {}\n", c.sinkhorn.input, c.sinkhorn.iterations,
                       mode_name(c.sinkhorn.mode));
    const DualSolverOptions& s = c.convexproj.solver;
    out += fmt::format(
        "\n[convexproj]\ngrad = {}\nballs = {}\nsweeps = {}\ninner = {}\neta1 = {}\neta2 = {}\ntolerance = {}\n",
        numbers(c.convexproj.grad), ball_list(c.convexproj.balls), s.sweeps, s.inner.iterations, f(s.inner.eta1),
        f(s.inner.eta2), f(s.tolerance));
    out += fmt::format("\n[bench]\nkinds = {}\nthreshold = {}\n", kinds(c.bench.kinds), f(c.bench.threshold));
    return out;
}

Schedule make_schedule(const RunConfig& config, double base_lr) {
    return Schedule{base_lr, config.total_steps, config.warmup_frac};
}

OptimizerConfig make_optimizer_config(const OptimizerBlock& block) {
    OptimizerConfig out;
    out.kind = block.kind;
    out.iterations = block.iterations;
    out.norms = block.norms;
    out.steepest_norm = block.steepest_norm;
    out.adam = block.adam;
    out.fallback = block.fallback;
    out.mode = block.mode;
    return out;
}

std::vector<ParamGroup> make_groups(const OptimizerBlock& block, const Problem& problem) {
    std::vector<ParamGroup> groups = problem.groups;
    if (is_matrix_only(block.kind)) {
        for (ParamGroup& g : groups) {
            if (g.role == GroupRole::kLinear2d) {
                g.group_scale = block.alpha;
            }
        }
    }
    return groups;
}

TrainOptions make_train_options(const RunConfig& config, double base_lr) {
    TrainOptions out;
    out.steps = config.train.steps.value_or(config.total_steps);
    out.schedule = make_schedule(config, base_lr);
    out.minibatch = config.train.minibatch;
    out.batch_size = config.train.batch_size;
    out.batch_seed = config.seed;
    out.divergence_factor = config.train.divergence_factor;
    return out;
}

}  // namespace mnorm
