#include "sonoshape/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>

#include "json.hpp"

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

constexpr int kTableSsfRows[] = {8, 4, 2, 1};
constexpr int kTableSourceGroups[] = {4, 8};
constexpr BandGroup kTableBandColumns[] = {BandGroup::Low, BandGroup::High, BandGroup::Full};

std::size_t table_position(const DegradationSpec& s) {
    const auto specs = all_degradation_specs();
    return static_cast<std::size_t>(std::find(specs.begin(), specs.end(), s) - specs.begin());
}

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::size_t EvaluationReport::record_count() const {
    std::size_t n = 0;
    for (const auto& r : results) n += r.records.size();
    return n;
}

std::optional<double> EvaluationReport::cell(const DegradationSpec& spec) const {
    for (const auto& r : results)
        if (r.spec == spec) return r.mean;
    return std::nullopt;
}

SpecResult score_spec(const SpecPredictions& input, const IMEDConfig& cfg) {
    std::map<std::string, const OccupancyGrid*> predictions;
    for (const auto& p : input.predictions) predictions[p.object_id] = &p;

    SpecResult result;
    result.spec = input.spec;
    result.dataset_digest = input.dataset_digest;
    result.scene_config_digest = input.scene_config_digest;
    double total = 0.0;
    for (const auto& t : input.targets) {
        const auto it = predictions.find(t.object_id);
        if (it == predictions.end())
            throw ContractError("spec " + input.spec.name() + ": no prediction for record " + t.object_id);
        if (it->second->bits.rows() != t.bits.rows() || it->second->bits.cols() != t.bits.cols())
            throw ContractError("spec " + input.spec.name() + ": prediction " + t.object_id + " has the wrong size");
        const double score = normalized_imed(*it->second, t, cfg);
        result.records.push_back({t.object_id, score});
        total += score;
    }
    result.mean = result.records.empty() ? 0.0 : total / static_cast<double>(result.records.size());
    return result;
}

EvaluationReport build_report(const std::vector<SpecPredictions>& inputs, const IMEDConfig& cfg) {
    cfg.validate();
    EvaluationReport report;
    report.imed = cfg;
    for (const auto& in : inputs) {
        in.spec.validate();
        if (report.cell(in.spec)) throw ContractError("build_report: spec " + in.spec.name() + " given twice");
        report.results.push_back(score_spec(in, cfg));
    }
    std::sort(report.results.begin(), report.results.end(),
              [](const SpecResult& a, const SpecResult& b) { return table_position(a.spec) < table_position(b.spec); });
    return report;
}

std::string report_to_json(const EvaluationReport& report) {
    using nlohmann::json;
    json j;
    j["metric"] = "normalized IMED";
    j["sigma_pixels"] = report.imed.sigma;
    j["normalization"] = report.imed.normalization == ImedNormalization::OnesVsZeros
                             ? "imed(all-ones, all-zeros) at the image size"
                             : "none";
    j["record_count"] = report.record_count();
    j["cells"] = json::array();
    for (const auto& r : report.results) {
        json cell = {{"spec", r.spec.name()},
                     {"band_group", to_string(r.spec.band_group)},
                     {"source_count", r.spec.source_count},
                     {"ssf", r.spec.ssf},
                     {"record_count", r.records.size()},
                     {"mean", r.mean},
                     {"dataset_digest", r.dataset_digest},
                     {"scene_config_digest", r.scene_config_digest}};
        cell["records"] = json::array();
        for (const auto& s : r.records) cell["records"].push_back({{"id", s.id}, {"score", s.score}});
        j["cells"].push_back(std::move(cell));
    }
    json table = json::array();
    for (const int ssf : kTableSsfRows) {
        json row = {{"ssf", ssf}};
        for (const int sources : kTableSourceGroups)
            for (const auto band : kTableBandColumns) {
                const auto v = report.cell({band, sources, ssf});
                row[std::to_string(sources) + "_sources_" + to_string(band)] = v ? json(*v) : json(nullptr);
            }
        table.push_back(std::move(row));
    }
    j["table"] = std::move(table);
    return j.dump(2) + "\n";
}

std::string report_to_text(const EvaluationReport& report) {
    char buf[64];
    std::string out = "Normalized IMED (sigma = ";
    std::snprintf(buf, sizeof buf, "%g", report.imed.sigma);
    out += buf;
    out += " px), " + std::to_string(report.record_count()) + " records\n\n";
    const std::string group_width(3 * 9, '-');
    out += "       |";
    for (const int sources : kTableSourceGroups) {
        std::snprintf(buf, sizeof buf, "%9s%d Sources%9s", "", sources, "");
        out += buf;
        out += sources == kTableSourceGroups[0] ? " |" : "\n";
    }
    out += "  SSF  |";
    for (const int sources : kTableSourceGroups) {
        for (const auto band : kTableBandColumns) {
            std::string label = to_string(band);
            std::transform(label.begin() + 1, label.end(), label.begin() + 1, [](unsigned char c) { return std::tolower(c); });
            std::snprintf(buf, sizeof buf, " %7s ", label.c_str());
            out += buf;
        }
        out += sources == kTableSourceGroups[0] ? " |" : "\n";
    }
    out += "-------+" + group_width + "-+" + group_width + "\n";
    for (const int ssf : kTableSsfRows) {
        std::snprintf(buf, sizeof buf, "  %3d  |", ssf);
        out += buf;
        for (const int sources : kTableSourceGroups) {
            for (const auto band : kTableBandColumns) {
                const auto v = report.cell({band, sources, ssf});
                std::snprintf(buf, sizeof buf, " %7s ", v ? format_score(*v).c_str() : "-");
                out += buf;
            }
            out += sources == kTableSourceGroups[0] ? " |" : "\n";
        }
    }
    return out;
}

}  // namespace sonoshape
