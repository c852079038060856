// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mnorm/matrix.hpp"

namespace mnorm {
namespace {

namespace fs = std::filesystem;

class DispatchTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mnorm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& text, std::vector<std::string> overrides = {}) {
        overrides.push_back("out=" + dir_.string());
        out_.str("");
        err_.str("");
        return dispatch(load_config(text, overrides), out_, err_);
    }

    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

TEST_F(DispatchTest, NormalizeLeavesDoublyNormalizedInputUnchanged) {
    const fs::path input = dir_ / "ones.txt";
    write_matrix_file(input.string(), DenseMatrix(2, 3, 1.0));
    EXPECT_EQ(run("command = normalize\n[normalize]\ninput = " + input.string() + "\n"), kExitOk);
    EXPECT_EQ(read_matrix_file((dir_ / "normalized.txt").string()), DenseMatrix(2, 3, 1.0));
    EXPECT_EQ(read("normalize_report.csv").rfind("j,l2_norm,inner_next\n", 0), 0u);
    EXPECT_TRUE(fs::exists(dir_ / "config.echo.ini"));
}

TEST_F(DispatchTest, SinkhornWritesTrace) {
    const fs::path input = dir_ / "g.txt";
    write_matrix_file(input.string(), DenseMatrix::from_rows({{1, -2, 3}, {0.5, 1, -1}}));
    EXPECT_EQ(run("command = sinkhorn\n[sinkhorn]\ninput = " + input.string() + "\nL = 4\n"), kExitOk);
    const std::string trace = read("sinkhorn_trace.csv");
    EXPECT_EQ(trace.rfind("k,row_residual,col_residual,hilbert_error\n", 0), 0u);
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 5);
}

TEST_F(DispatchTest, ZeroRowIsANumericError) {
    const fs::path input = dir_ / "z.txt";
    write_matrix_file(input.string(), DenseMatrix::from_rows({{1, 2}, {0, 0}}));
    EXPECT_EQ(run("command = sinkhorn\n[sinkhorn]\ninput = " + input.string() + "\n"), kExitNumeric);
    EXPECT_NE(err_.str().find("zero"), std::string::npos);
}

TEST_F(DispatchTest, ConvexprojWritesJson) {
    EXPECT_EQ(run("command = convexproj\n[convexproj]\ngrad = 1, 1\n"
                  "balls = vector_lp:p=inf@1; vector_lp:p=2@2\n"),
              kExitOk);
    const nlohmann::json j = nlohmann::json::parse(read("convexproj.json"));
    EXPECT_NEAR(j["primal"][0].get<double>(), 1.0, 1e-6);
    EXPECT_NEAR(j["primal"][1].get<double>(), 1.0, 1e-6);
    EXPECT_NEAR(j["primal_value"].get<double>(), 2.0, 1e-6);
}

TEST_F(DispatchTest, TrainWritesReproducibleCsv) {
    const std::string cfg = "command = train\n[problem]\nrows = 12\ncols = 10\nrank = 2\n[schedule]\ntotal_steps = 30\n";
    EXPECT_EQ(run(cfg), kExitOk);
    const std::string first = read("run.csv");
    EXPECT_EQ(run(cfg), kExitOk);
    EXPECT_EQ(read("run.csv"), first);
    EXPECT_EQ(first.rfind("step,lr,loss,update_fro_U,update_fro_V\n", 0), 0u);
    const RunConfig echoed = parse_config(read("config.echo.ini"));
    EXPECT_EQ(echo_config(echoed), read("config.echo.ini"));
}

TEST_F(DispatchTest, DivergentTrainingExitsWithStep) {
    EXPECT_EQ(run("command = train\n[problem]\nkind = mlp2\n[optimizer]\nkind = sgd\nbase_lr = 1000\n"
                  "[schedule]\ntotal_steps = 20\n"),
              kExitDivergence);
    EXPECT_NE(err_.str().find("step"), std::string::npos);
}

TEST_F(DispatchTest, BenchWritesPerKindDirectoriesAndComparison) {
    EXPECT_EQ(run("command = bench\n[problem]\nkind = logistic_regression\nsamples = 50\n"
                  "[schedule]\ntotal_steps = 20\n[bench]\nkinds = adam, sinkgd\n"),
              kExitOk);
    EXPECT_TRUE(fs::exists(dir_ / "adam" / "run.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "sinkgd" / "config.echo.ini"));
    const std::string table = read("comparison.txt");
    EXPECT_NE(table.find("adam"), std::string::npos);
    EXPECT_NE(table.find("sinkgd"), std::string::npos);
}

TEST_F(DispatchTest, MissingInputFileIsAConfigError) {
    EXPECT_EQ(run("command = normalize\n[normalize]\ninput = /nonexistent/m.txt\n"), kExitConfig);
}

TEST_F(DispatchTest, EmptyCommandRejected) {
    EXPECT_EQ(run(""), kExitConfig);
}

}  // namespace
}  // namespace mnorm
