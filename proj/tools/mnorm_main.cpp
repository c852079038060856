// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// mnorm <command> [-c config.ini] [--out dir] [--set section.key=value ...]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mnorm/cli.hpp"
#include "mnorm/config.hpp"
#include "mnorm/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multi-normalized gradient descent toolkit"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("command", command, "normalize | sinkhorn | convexproj | train | bench | verify")
        ->required()
        ->check(CLI::IsMember({"normalize", "sinkhorn", "convexproj", "train", "bench", "verify"}));
    app.add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides the config's out)");
    app.add_option("--set", overrides, "override a field, e.g. optimizer.kind=adam")->take_all();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? mnorm::kExitOk : mnorm::kExitConfig;
    }

    std::string text;
    if (!config_path.empty()) {
        std::ifstream file(config_path, std::ios::binary);
        std::ostringstream buffer;
        buffer << file.rdbuf();
        text = buffer.str();
    }
    overrides.insert(overrides.begin(), "command=" + command);
    if (!out_dir.empty()) {
        overrides.push_back("out=" + out_dir);
    }
    mnorm::RunConfig config;
    try {
        config = mnorm::load_config(text, overrides);
    } catch (const mnorm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    }
    return mnorm::dispatch(config, std::cout, std::cerr);
}
