// Command-line front end: one subcommand per pipeline stage, plus `run` for a
// stage prefix and `dump-grid` for inspecting a single loudness channel.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "sonoshape/errors.hpp"
#include "sonoshape/loudness.hpp"
#include "sonoshape/npy.hpp"
#include "sonoshape/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sonoshape;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartial = 2;

struct CommonOptions {
    std::string config;
    std::string out;
    int workers = 1;
    long long seed = -1;
    bool resume = false;
    std::string profile = "desk";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "Run configuration (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Run output directory")->required();
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Shape seed; overrides the config")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--resume", o.resume, "Skip simulation tasks whose outputs are current");
    cmd->add_option("--profile", o.profile, "Scene defaults")->check(CLI::IsMember({"desk", "paper"}));
}

RunPlan make_plan(const CommonOptions& o, std::vector<Stage> stages) {
    RunPlan plan;
    plan.config_path = o.config;
    plan.profile = o.profile;
    plan.stages = std::move(stages);
    if (o.seed >= 0) plan.seed = static_cast<std::uint64_t>(o.seed);
    plan.out_root = o.out;
    plan.workers = o.workers;
    plan.resume = o.resume;
    plan.progress = &std::cerr;
    return plan;
}

int report(const std::vector<StageResult>& results) {
    int code = kExitOk;
    for (const auto& r : results) {
        if (r.failures.empty()) continue;
        std::cerr << to_string(r.stage) << ": " << r.failures.size() << " of " << r.tasks << " tasks failed\n";
        for (const auto& f : r.failures) std::cerr << "  " << f << '\n';
        code = kExitPartial;
    }
    return code;
}

/// Binary greyscale image scaled between the finite extremes; unknown cells are black.
void write_pgm(const std::string& path, const LoudnessGrid& g) {
    float lo = std::numeric_limits<float>::max(), hi = std::numeric_limits<float>::lowest();
    for (Eigen::Index k = 0; k < g.values.size(); ++k) {
        if (g.mask.data()[k]) continue;
        lo = std::min(lo, g.values.data()[k]);
        hi = std::max(hi, g.values.data()[k]);
    }
    std::ofstream out(path, std::ios::binary);
    out << "P5\n" << g.values.cols() << ' ' << g.values.rows() << "\n255\n";
    // image rows run top to bottom, grid rows run along +y
    for (Eigen::Index r = g.values.rows() - 1; r >= 0; --r)
        for (Eigen::Index c = 0; c < g.values.cols(); ++c) {
            const double t = g.mask(r, c) || hi <= lo ? 0.0 : 1.0 + 254.0 * (g.values(r, c) - lo) / (hi - lo);
            out.put(static_cast<char>(static_cast<unsigned char>(t)));
        }
}

int dump_grid(const CommonOptions& o, const std::string& object, int source, int band) {
    const RunPlan plan = make_plan(o, {Stage::GenShapes});
    plan.validate();
    const RunConfig cfg = plan.run_config();
    const RunLayout layout{plan.out_root};
    for (const auto split : {Split::Training, Split::Test}) {
        for (const auto& s : load_split_shapes(layout, split)) {
            if (s.id != object) continue;
            const LoudnessGrid g = compute_grid(s.polygon, source, band, cfg.scene, s.id);
            const fs::path dir = fs::path(plan.out_root) / "debug";
            fs::create_directories(dir);
            const std::string stem = (dir / (s.id + "_s" + std::to_string(source) + "_b" + std::to_string(band))).string();
            write_npy(stem + ".npy",
                      make_npy(std::span<const float>(g.values.data(), static_cast<std::size_t>(g.values.size())),
                               {static_cast<std::size_t>(g.values.rows()), static_cast<std::size_t>(g.values.cols())}));
            write_pgm(stem + ".pgm", g);
            std::cout << stem << ".npy\n" << stem << ".pgm\n";
            return kExitOk;
        }
    }
    throw ValidationError("no shape with id '" + object + "' in " + plan.out_root);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generates loudness-image / occupancy datasets and scores shape predictions."};
    app.require_subcommand(1);

    CommonOptions opts;
    std::vector<std::pair<CLI::App*, Stage>> stage_commands;
    const std::pair<Stage, const char*> stage_help[] = {
        {Stage::GenShapes, "Generate training and test shape populations"},
        {Stage::Simulate, "Compute one loudness grid per (object, source, band)"},
        {Stage::Rasterize, "Rasterize occupancy targets"},
        {Stage::Pack, "Assemble full datasets from grids and targets"},
        {Stage::Expand, "Derive the 24 degraded datasets"},
        {Stage::Evaluate, "Score predictions and write report.json / report.txt"},
    };
    std::string predictions;
    for (const auto& [stage, help] : stage_help) {
        auto* cmd = app.add_subcommand(to_string(stage), help);
        add_common(cmd, opts);
        if (stage == Stage::Evaluate) cmd->add_option("--predictions", predictions, "Predictions root (default <out>/predictions)");
        stage_commands.emplace_back(cmd, stage);
    }

    auto* run = app.add_subcommand("run", "Run stages from gen-shapes up to --until");
    add_common(run, opts);
    std::string until = "expand";
    run->add_option("--until", until, "Last stage to run");
    run->add_option("--predictions", predictions, "Predictions root for evaluate");

    auto* dump = app.add_subcommand("dump-grid", "Write one loudness grid as .npy and .pgm under <out>/debug");
    add_common(dump, opts);
    std::string object;
    int source = 0, band = 0;
    dump->add_option("--object", object, "Shape id")->required();
    dump->add_option("--source", source, "Source index j");
    dump->add_option("--band", band, "Band index i");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (dump->parsed()) return dump_grid(opts, object, source, band);
        std::vector<Stage> stages;
        if (run->parsed()) {
            const Stage last = stage_from_string(until);
            for (const auto s : all_stages()) {
                stages.push_back(s);
                if (s == last) break;
            }
        } else {
            for (const auto& [cmd, stage] : stage_commands)
                if (cmd->parsed()) stages = {stage};
        }
        RunPlan plan = make_plan(opts, stages);
        plan.predictions_dir = predictions;
        return report(run_plan(plan));
    } catch (const std::exception& e) {
        // validation, missing inputs and I/O failures all stop the run before a report exists
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
