#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sonoshape/dataset.hpp"
#include "sonoshape/report.hpp"
#include "sonoshape/scene_config.hpp"
#include "sonoshape/shape_forge.hpp"

namespace sonoshape {

enum class Stage { GenShapes, Simulate, Rasterize, Pack, Expand, Evaluate };

/// Stages in execution order.
const std::vector<Stage>& all_stages();
const char* to_string(Stage stage);
Stage stage_from_string(const std::string& name);

/// Scene plus population settings read from a run configuration file.
struct RunConfig {
    SceneConfig scene = SceneConfig::desk();
    int train_per_category = 40;
    int test_per_category = 10;
    std::vector<int> categories{3, 4, 5, 6, 7};
    std::uint64_t seed = 1;

    ShapeSetSpec training_spec() const;
    ShapeSetSpec test_spec() const;
    void validate() const;
};

/// Recognized keys: every scene key plus train_per_category, test_per_category,
/// categories (comma list) and seed. Unknown keys are a ValidationError.
RunConfig parse_run_config(const std::string& text, const SceneConfig& profile = SceneConfig::desk());
RunConfig load_run_config(const std::string& path, const SceneConfig& profile = SceneConfig::desk());
std::string to_text(const RunConfig& cfg);

/// Profile by name: "desk" or "paper".
SceneConfig profile_by_name(const std::string& name);

struct RunPlan {
    std::string config_path;  // empty: profile defaults
    std::string profile = "desk";
    std::vector<Stage> stages = all_stages();
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::string out_root;
    int workers = 1;
    bool resume = false;
    std::string predictions_dir;  // evaluate input; defaults to <out>/predictions
    std::ostream* progress = nullptr;

    /// Stages must be a prefix of all_stages(); workers >= 1; out_root set.
    void validate() const;
    RunConfig run_config() const;
};

/// Outcome of one stage. Exit code 0 = success, 2 = some tasks failed.
struct StageResult {
    Stage stage = Stage::GenShapes;
    std::size_t tasks = 0;
    std::size_t skipped = 0;
    std::vector<std::string> failures;
    int exit_code() const { return failures.empty() ? 0 : 2; }
};

/// Paths of a run directory.
struct RunLayout {
    std::string root;
    std::string config_file() const;
    std::string shapes_file(Split split) const;
    std::string grid_dir(Split split, const std::string& id) const;
    std::string grid_file(Split split, const std::string& id, int j, int i) const;
    std::string target_file(Split split, const std::string& id) const;
    std::string full_dataset(Split split) const;
    std::string matrix_root(Split split) const;
    std::string log_file(Stage stage) const;
};

/// Content digest of one simulation task; gates resumption.
std::string task_digest(const RunConfig& cfg, const Shape& shape, int j, int i);

/// Runs fn(0..n-1) on `workers` threads pulling indices from a shared counter.
void run_parallel(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

StageResult cmd_gen_shapes(const RunPlan& plan);
StageResult cmd_simulate(const RunPlan& plan);
StageResult cmd_rasterize(const RunPlan& plan);
StageResult cmd_pack(const RunPlan& plan);
StageResult cmd_expand(const RunPlan& plan);
/// Reads <predictions>/<spec>/predictions/<id>.pred.npy for every spec directory
/// present and writes report.json and report.txt into the predictions directory.
StageResult cmd_evaluate(const RunPlan& plan);

/// Runs plan.stages in order, stopping at the first stage with a validation error.
std::vector<StageResult> run_plan(const RunPlan& plan);

/// Reads the shapes written by gen-shapes; actionable error when absent.
std::vector<Shape> load_split_shapes(const RunLayout& layout, Split split);

}  // namespace sonoshape
