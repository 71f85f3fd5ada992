#include "sonoshape/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "sonoshape/digest.hpp"
#include "sonoshape/errors.hpp"
#include "sonoshape/loudness.hpp"
#include "sonoshape/npy.hpp"
#include "sonoshape/rasterizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sonoshape {

namespace {

/// Bumped whenever a change to the solver or loudness code alters grid bytes,
/// so that resumption never mixes grids from different code.
constexpr const char* kSimulationRevision = "sonoshape-grid/1";

constexpr Split kSplits[] = {Split::Training, Split::Test};

std::string split_dir(Split s) { return s == Split::Training ? "training" : "test"; }

std::string read_text(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return {bytes.begin(), bytes.end()};
}

/// Write-then-rename so readers never observe a half-written file.
void write_atomically(const std::string& path, std::span<const unsigned char> bytes) {
    const std::string tmp = path + ".tmp";
    write_file_bytes(tmp, bytes);
    fs::rename(tmp, path);
}

void write_text_atomically(const std::string& path, const std::string& text) {
    write_atomically(path, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) throw ValidationError(key + ": '" + item + "' is not an integer");
        out.push_back(value);
    }
    if (out.empty()) throw ValidationError(key + " must list at least one value");
    return out;
}

/// Serialized progress and jsonl logging shared by worker threads.
class StageLog {
public:
    StageLog(const RunPlan& plan, const RunLayout& layout, Stage stage, std::size_t total)
        : progress_(plan.progress), stage_(stage), total_(total) {
        fs::create_directories(fs::path(layout.log_file(stage)).parent_path());
        log_.open(layout.log_file(stage), plan.resume ? std::ios::app : std::ios::trunc);
        if (!log_) throw DatasetError("cannot open log " + layout.log_file(stage));
    }

    void record(const json& line) {
        std::lock_guard lock(mutex_);
        log_ << line.dump() << '\n';
        log_.flush();
        ++done_;
        if (progress_ && (done_ == total_ || done_ % std::max<std::size_t>(1, total_ / 20) == 0)) {
            *progress_ << "[" << to_string(stage_) << "] " << done_ << "/" << total_ << " tasks" << std::endl;
        }
    }

private:
    std::mutex mutex_;
    std::ofstream log_;
    std::ostream* progress_;
    Stage stage_;
    std::size_t total_;
    std::size_t done_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct SimulationTask {
    Split split;
    const Shape* shape;
    int j;
    int i;
};

std::string sidecar_path(const std::string& grid_file) { return grid_file + ".sha256"; }

/// True when the grid on disk was produced by exactly this task and is intact.
bool grid_is_current(const std::string& grid_file, const std::string& digest) {
    if (!fs::exists(grid_file) || !fs::exists(sidecar_path(grid_file))) return false;
    return read_text(sidecar_path(grid_file)) == digest + " " + sha256_file(grid_file) + "\n";
}

LoudnessGrid load_grid(const RunLayout& layout, const RunConfig& cfg, Split split, const Shape& shape, int j, int i) {
    const std::string file = layout.grid_file(split, shape.id, j, i);
    if (!fs::exists(file))
        throw DatasetError("missing grid " + file + " for " + shape.id + " (j=" + std::to_string(j) +
                           ", i=" + std::to_string(i) + "); run the simulate stage first");
    if (!grid_is_current(file, task_digest(cfg, shape, j, i)))
        throw DatasetError("grid " + file + " is stale or corrupt; rerun the simulate stage");
    const NpyArray a = read_npy(file);
    if (a.shape.size() != 2) throw DatasetError(file + ": grid must be two-dimensional");
    const auto values = a.as_float32();
    LoudnessGrid g;
    g.band_index = i;
    g.source_index = j;
    g.config_digest = config_digest(cfg.scene);
    const auto rows = static_cast<Eigen::Index>(a.shape[0]);
    const auto cols = static_cast<Eigen::Index>(a.shape[1]);
    g.values = Eigen::Map<const RowMajorArray<float>>(values.data(), rows, cols);
    g.mask = (g.values == kUnknownSentinel).cast<std::uint8_t>();
    return g;
}

OccupancyGrid load_target(const RunLayout& layout, Split split, const std::string& id) {
    const std::string file = layout.target_file(split, id);
    if (!fs::exists(file)) throw DatasetError("missing target " + file + "; run the rasterize stage first");
    const NpyArray a = read_npy(file);
    if (a.shape.size() != 2) throw DatasetError(file + ": target must be two-dimensional");
    const auto bits = a.as_uint8();
    OccupancyGrid g;
    g.object_id = id;
    g.bits = Eigen::Map<const RowMajorArray<std::uint8_t>>(bits.data(), static_cast<Eigen::Index>(a.shape[0]),
                                                           static_cast<Eigen::Index>(a.shape[1]));
    return g;
}

NpyArray to_npy(const RowMajorArray<std::uint8_t>& a) {
    return make_npy(std::span<const std::uint8_t>(a.data(), static_cast<std::size_t>(a.size())),
                    {static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols())});
}

}  // namespace

// ---------------------------------------------------------------- stages

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::GenShapes, Stage::Simulate, Stage::Rasterize,
                                           Stage::Pack,      Stage::Expand,   Stage::Evaluate};
    return stages;
}

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::GenShapes: return "gen-shapes";
        case Stage::Simulate: return "simulate";
        case Stage::Rasterize: return "rasterize";
        case Stage::Pack: return "pack";
        case Stage::Expand: return "expand";
        case Stage::Evaluate: return "evaluate";
    }
    return "?";
}

Stage stage_from_string(const std::string& name) {
    for (const auto s : all_stages())
        if (name == to_string(s)) return s;
    throw ValidationError("unknown stage '" + name + "'");
}

// ---------------------------------------------------------------- run config

ShapeSetSpec RunConfig::training_spec() const {
    auto spec = ShapeSetSpec::training(train_per_category, seed, scene.inaccessible_side);
    spec.categories = categories;
    return spec;
}

ShapeSetSpec RunConfig::test_spec() const {
    auto spec = ShapeSetSpec::test(test_per_category, seed + 1);
    spec.categories = categories;
    spec.inaccessible_side = scene.inaccessible_side;
    return spec;
}

void RunConfig::validate() const {
    scene.validate();
    if (train_per_category < 0 || test_per_category < 0)
        throw ValidationError("instance counts per category must be >= 0");
    training_spec().validate();
    test_spec().validate();
}

RunConfig parse_run_config(const std::string& text, const SceneConfig& profile) {
    const auto file = KeyValueFile::parse(text);
    RunConfig cfg;
    cfg.scene = apply_scene_keys(file, profile);
    if (auto v = file.take_int("train_per_category")) cfg.train_per_category = static_cast<int>(*v);
    if (auto v = file.take_int("test_per_category")) cfg.test_per_category = static_cast<int>(*v);
    if (auto v = file.take_int("seed")) {
        if (*v < 0) throw ValidationError("seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = file.take("categories")) cfg.categories = parse_int_list("categories", *v);
    file.reject_unconsumed();
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path, const SceneConfig& profile) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config " + path);
    std::stringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), profile);
}

std::string to_text(const RunConfig& cfg) {
    std::string categories;
    for (const int c : cfg.categories) categories += (categories.empty() ? "" : ",") + std::to_string(c);
    return to_text(cfg.scene) + "train_per_category = " + std::to_string(cfg.train_per_category) +
           "\ntest_per_category = " + std::to_string(cfg.test_per_category) + "\ncategories = " + categories +
           "\nseed = " + std::to_string(cfg.seed) + "\n";
}

SceneConfig profile_by_name(const std::string& name) {
    if (name == "desk") return SceneConfig::desk();
    if (name == "paper") return SceneConfig::paper();
    throw ValidationError("unknown profile '" + name + "' (expected desk or paper)");
}

void RunPlan::validate() const {
    if (workers < 1) throw ValidationError("worker count must be >= 1");
    if (out_root.empty()) throw ValidationError("an output directory is required");
    if (stages.empty()) throw ValidationError("no stages selected");
    const auto& order = all_stages();
    const auto first = std::find(order.begin(), order.end(), stages.front());
    if (first == order.end() || static_cast<std::size_t>(order.end() - first) < stages.size() ||
        !std::equal(stages.begin(), stages.end(), first))
        throw ValidationError("stages must be a contiguous run of gen-shapes, simulate, rasterize, pack, expand, evaluate");
    profile_by_name(profile);
}

RunConfig RunPlan::run_config() const {
    const SceneConfig base = profile_by_name(profile);
    RunConfig cfg = config_path.empty() ? parse_run_config("", base) : load_run_config(config_path, base);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------- layout

std::string RunLayout::config_file() const { return (fs::path(root) / "run_config.txt").string(); }
std::string RunLayout::shapes_file(Split s) const { return (fs::path(root) / "shapes" / (split_dir(s) + ".txt")).string(); }
std::string RunLayout::grid_dir(Split s, const std::string& id) const {
    return (fs::path(root) / "grids" / split_dir(s) / id).string();
}
std::string RunLayout::grid_file(Split s, const std::string& id, int j, int i) const {
    return (fs::path(grid_dir(s, id)) / ("s" + std::to_string(j) + "_b" + std::to_string(i) + ".npy")).string();
}
std::string RunLayout::target_file(Split s, const std::string& id) const {
    return (fs::path(root) / "targets" / split_dir(s) / (id + ".target.npy")).string();
}
std::string RunLayout::full_dataset(Split s) const { return (fs::path(root) / "datasets" / split_dir(s) / "full").string(); }
std::string RunLayout::matrix_root(Split s) const { return (fs::path(root) / "datasets" / split_dir(s) / "matrix").string(); }
std::string RunLayout::log_file(Stage stage) const {
    return (fs::path(root) / "logs" / (std::string(to_string(stage)) + ".jsonl")).string();
}

std::string task_digest(const RunConfig& cfg, const Shape& shape, int j, int i) {
    return sha256_hex(std::string(kSimulationRevision) + "\n" + to_text(cfg.scene) + format_shapes({shape}) +
                      "source " + std::to_string(j) + " band " + std::to_string(i) + "\n");
}

void run_parallel(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers < 1) throw ContractError("run_parallel: workers must be >= 1");
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;  // drain the queue
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(workers) < n ? static_cast<std::size_t>(workers) : n;
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

std::vector<Shape> load_split_shapes(const RunLayout& layout, Split split) {
    const std::string file = layout.shapes_file(split);
    if (!fs::exists(file)) throw DatasetError("missing " + file + "; run the gen-shapes stage first");
    return read_shapes(file);
}

StageResult cmd_gen_shapes(const RunPlan& plan) {
    plan.validate();
    const RunConfig cfg = plan.run_config();
    const RunLayout layout{plan.out_root};
    const auto training = generate_split(cfg.training_spec());
    const auto test = generate_split(cfg.test_spec(), &training);

    fs::create_directories(fs::path(layout.shapes_file(Split::Training)).parent_path());
    write_text_atomically(layout.config_file(), to_text(cfg));
    write_text_atomically(layout.shapes_file(Split::Training), format_shapes(training));
    write_text_atomically(layout.shapes_file(Split::Test), format_shapes(test));
    if (plan.progress)
        *plan.progress << "[gen-shapes] " << training.size() << " training + " << test.size() << " test shapes"
                       << std::endl;
    return {Stage::GenShapes, training.size() + test.size(), 0, {}};
}

StageResult cmd_simulate(const RunPlan& plan) {
    plan.validate();
    const RunConfig cfg = plan.run_config();
    const RunLayout layout{plan.out_root};

    std::vector<Shape> shapes[2];
    std::vector<SimulationTask> tasks;
    for (const auto split : kSplits) {
        auto& list = shapes[split == Split::Training ? 0 : 1];
        list = load_split_shapes(layout, split);
        for (const auto& s : list) {
            fs::create_directories(layout.grid_dir(split, s.id));
            for (int j = 0; j < cfg.scene.n_sources; ++j)
                for (int i = 0; i < cfg.scene.n_bands; ++i) tasks.push_back({split, &s, j, i});
        }
    }

    StageResult result{Stage::Simulate, tasks.size(), 0, {}};
    std::vector<std::string> failure_of(tasks.size());
    std::atomic<std::size_t> skipped{0};
    StageLog log(plan, layout, Stage::Simulate, tasks.size());

    run_parallel(tasks.size(), plan.workers, [&](std::size_t k) {
        const auto& t = tasks[k];
        const std::string file = layout.grid_file(t.split, t.shape->id, t.j, t.i);
        const std::string digest = task_digest(cfg, *t.shape, t.j, t.i);
        json line = {{"object", t.shape->id}, {"split", split_dir(t.split)}, {"j", t.j}, {"i", t.i}, {"task", digest}};
        if (plan.resume && grid_is_current(file, digest)) {
            ++skipped;
            line["status"] = "skipped";
            log.record(line);
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            const LoudnessGrid g = compute_grid(t.shape->polygon, t.j, t.i, cfg.scene, t.shape->id);
            const auto bytes = encode_npy(make_npy(
                std::span<const float>(g.values.data(), static_cast<std::size_t>(g.values.size())),
                {static_cast<std::size_t>(g.values.rows()), static_cast<std::size_t>(g.values.cols())}));
            write_atomically(file, bytes);
            write_text_atomically(sidecar_path(file), digest + " " + sha256_hex(std::span(bytes)) + "\n");
            line["status"] = "ok";
            line["rcond_min"] = g.min_rcond;
        } catch (const std::exception& e) {
            failure_of[k] = e.what();
            line["status"] = "failed";
            line["error"] = e.what();
        }
        line["wall_s"] = seconds_since(start);
        log.record(line);
    });

    result.skipped = skipped;
    for (const auto& f : failure_of)
        if (!f.empty()) result.failures.push_back(f);
    if (!result.failures.empty()) {
        json summary = result.failures;
        write_text_atomically((fs::path(plan.out_root) / "logs" / "simulate_failures.json").string(), summary.dump(2) + "\n");
    }
    return result;
}

StageResult cmd_rasterize(const RunPlan& plan) {
    plan.validate();
    const RunConfig cfg = plan.run_config();
    const RunLayout layout{plan.out_root};
    StageResult result{Stage::Rasterize, 0, 0, {}};
    for (const auto split : kSplits) {
        const auto shapes = load_split_shapes(layout, split);
        if (!shapes.empty()) fs::create_directories(fs::path(layout.target_file(split, shapes.front().id)).parent_path());
        run_parallel(shapes.size(), plan.workers, [&](std::size_t k) {
            const auto g = rasterize(shapes[k].polygon, cfg.scene, shapes[k].id);
            write_atomically(layout.target_file(split, shapes[k].id), encode_npy(to_npy(g.bits)));
        });
        result.tasks += shapes.size();
    }
    if (plan.progress) *plan.progress << "[rasterize] " << result.tasks << " targets" << std::endl;
    return result;
}

StageResult cmd_pack(const RunPlan& plan) {
    plan.validate();
    const RunConfig cfg = plan.run_config();
    const RunLayout layout{plan.out_root};
    StageResult result{Stage::Pack, 0, 0, {}};
    for (const auto split : kSplits) {
        const auto shapes = load_split_shapes(layout, split);
        std::vector<DatasetRecord> records(shapes.size());
        run_parallel(shapes.size(), plan.workers, [&](std::size_t k) {
            const auto& s = shapes[k];
            std::vector<LoudnessGrid> grids;
            for (int j = 0; j < cfg.scene.n_sources; ++j)
                for (int i = 0; i < cfg.scene.n_bands; ++i) grids.push_back(load_grid(layout, cfg, split, s, j, i));
            records[k] = {assemble(grids, cfg.scene, s.id), load_target(layout, split, s.id)};
        });
        DatasetHeader h;
        h.scene_config = to_text(cfg.scene);
        h.split = to_string(split);
        h.shape_seed = split == Split::Training ? cfg.training_spec().rng_seed : cfg.test_spec().rng_seed;
        h.shapes = shapes;
        fs::create_directories(fs::path(layout.full_dataset(split)).parent_path());
        write_dataset(records, h, layout.full_dataset(split));
        result.tasks += records.size();
    }
    if (plan.progress) *plan.progress << "[pack] " << result.tasks << " records" << std::endl;
    return result;
}

StageResult cmd_expand(const RunPlan& plan) {
    plan.validate();
    const RunLayout layout{plan.out_root};
    StageResult result{Stage::Expand, 0, 0, {}};
    for (const auto split : kSplits) {
        if (!fs::exists(layout.full_dataset(split)))
            throw DatasetError("missing " + layout.full_dataset(split) + "; run the pack stage first");
        result.tasks += expand_matrix(layout.full_dataset(split), layout.matrix_root(split)).size();
    }
    if (plan.progress) *plan.progress << "[expand] " << result.tasks << " derived datasets" << std::endl;
    return result;
}

StageResult cmd_evaluate(const RunPlan& plan) {
    plan.validate();
    const RunLayout layout{plan.out_root};
    const fs::path predictions =
        plan.predictions_dir.empty() ? fs::path(plan.out_root) / "predictions" : fs::path(plan.predictions_dir);
    if (!fs::exists(layout.matrix_root(Split::Test)))
        throw DatasetError("missing " + layout.matrix_root(Split::Test) + "; run the expand stage first");
    if (!fs::is_directory(predictions)) throw DatasetError("predictions directory " + predictions.string() + " not found");

    StageResult result{Stage::Evaluate, 0, 0, {}};
    std::vector<SpecPredictions> inputs;
    for (const auto& spec : all_degradation_specs()) {
        const fs::path dir = predictions / spec.name() / "predictions";
        if (!fs::is_directory(dir)) continue;
        ++result.tasks;
        try {
            const Dataset ds = read_dataset((fs::path(layout.matrix_root(Split::Test)) / spec.name()).string());
            SpecPredictions in{spec, {}, {}, ds.manifest.payload_digest, ds.manifest.scene_config_digest};
            for (const auto& r : ds.records) {
                in.targets.push_back(r.target);
                const std::string file = (dir / (r.target.object_id + ".pred.npy")).string();
                if (!fs::exists(file)) throw DatasetError("missing prediction " + file);
                OccupancyGrid pred;
                pred.object_id = r.target.object_id;
                const NpyArray a = read_npy(file);
                if (a.shape.size() != 2) throw DatasetError(file + ": prediction must be two-dimensional");
                const auto bits = a.as_uint8();
                if (std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b > 1; }))
                    throw DatasetError(file + ": prediction is not binary");
                pred.bits = Eigen::Map<const RowMajorArray<std::uint8_t>>(
                    bits.data(), static_cast<Eigen::Index>(a.shape[0]), static_cast<Eigen::Index>(a.shape[1]));
                in.predictions.push_back(std::move(pred));
            }
            score_spec(in);  // surface per-spec errors here so one bad spec does not sink the report
            inputs.push_back(std::move(in));
        } catch (const std::exception& e) {
            result.failures.push_back(spec.name() + ": " + e.what());
        }
    }
    const EvaluationReport report = build_report(inputs);
    write_text_atomically((predictions / "report.json").string(), report_to_json(report));
    write_text_atomically((predictions / "report.txt").string(), report_to_text(report));
    if (plan.progress) *plan.progress << report_to_text(report);
    return result;
}

std::vector<StageResult> run_plan(const RunPlan& plan) {
    plan.validate();
    plan.run_config();  // reject bad configuration before any stage runs
    std::vector<StageResult> results;
    for (const auto stage : plan.stages) {
        switch (stage) {
            case Stage::GenShapes: results.push_back(cmd_gen_shapes(plan)); break;
            case Stage::Simulate: results.push_back(cmd_simulate(plan)); break;
            case Stage::Rasterize: results.push_back(cmd_rasterize(plan)); break;
            case Stage::Pack: results.push_back(cmd_pack(plan)); break;
            case Stage::Expand: results.push_back(cmd_expand(plan)); break;
            case Stage::Evaluate: results.push_back(cmd_evaluate(plan)); break;
        }
        if (results.back().exit_code() != 0) break;
    }
    return results;
}

}  // namespace sonoshape
