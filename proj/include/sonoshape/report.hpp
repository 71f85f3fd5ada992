#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sonoshape/channel_image.hpp"
#include "sonoshape/imed.hpp"
#include "sonoshape/rasterizer.hpp"

namespace sonoshape {

/// Predictions and ground truth for one degradation spec, paired by object id.
struct SpecPredictions {
    DegradationSpec spec;
    std::vector<OccupancyGrid> predictions;
    std::vector<OccupancyGrid> targets;
    std::string dataset_digest;
    std::string scene_config_digest;
};

struct RecordScore {
    std::string id;
    double score = 0.0;
};

struct SpecResult {
    DegradationSpec spec;
    std::vector<RecordScore> records;
    double mean = 0.0;
    std::string dataset_digest;
    std::string scene_config_digest;
};

/// Per-spec mean normalized IMED arranged as ssf rows by (source count, band group) columns.
struct EvaluationReport {
    IMEDConfig imed;
    std::vector<SpecResult> results;  // table order, evaluated specs only

    std::size_t record_count() const;
    /// The cell for a spec, or nullopt when it was not evaluated.
    std::optional<double> cell(const DegradationSpec& spec) const;
};

/// Scores every target against the prediction with the same id.
/// Throws ContractError when a target has no prediction or dimensions differ.
SpecResult score_spec(const SpecPredictions& input, const IMEDConfig& cfg = {});

EvaluationReport build_report(const std::vector<SpecPredictions>& inputs, const IMEDConfig& cfg = {});

std::string report_to_json(const EvaluationReport& report);
/// Aligned table: rows ssf 8, 4, 2, 1; columns {4, 8} sources x {Low, High, Full}; "-" marks absent cells.
std::string report_to_text(const EvaluationReport& report);

}  // namespace sonoshape
