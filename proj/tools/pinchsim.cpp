// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Command-line driver: `pinchsim run <scene.json> -o <dir>`.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pinch/scene.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Pinching-antenna radiation and beamforming simulator", "pinchsim"};
    app.set_version_flag("--version", pinch::tool_version);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Execute the tasks of a scene file");
    std::string scene;
    std::string out_dir;
    pinch::RunOptions opts;
    run->add_option("scene", scene, "Scene JSON (or a previous manifest.json)")->required();
    run->add_option("-o,--output", out_dir, "Output directory")->required();
    run->add_flag("--force", opts.force, "Overwrite existing outputs");
    run->add_option("--threads", opts.threads, "Worker threads for pattern evaluation")
        ->check(CLI::Range(1u, 1024u));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const pinch::RunResult res = pinch::run_scene(scene, out_dir, opts);
    if (res.exit_code != 0)
    {
        std::cerr << "pinchsim: " << res.message << '\n';
        return res.exit_code;
    }
    for (const auto& f : res.outputs)
        std::cout << out_dir << '/' << f << '\n';
    return 0;
}
