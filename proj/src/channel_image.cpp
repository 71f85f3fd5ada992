#include "sonoshape/channel_image.hpp"

#include <algorithm>
#include <cctype>

#include "sonoshape/errors.hpp"

namespace sonoshape {

namespace {

constexpr int kSourceCounts[] = {4, 8};
constexpr int kSamplingFactors[] = {1, 2, 4, 8};
constexpr BandGroup kBandGroups[] = {BandGroup::Low, BandGroup::High, BandGroup::Full};

std::string channel_name(int j, int i) { return "(j=" + std::to_string(j) + ", i=" + std::to_string(i) + ")"; }

/// Infers (n_sources, n_bands) of a full canonical image, or throws.
std::pair<int, int> full_configuration(const ChannelImage& img) {
    if (img.planes.size() != img.channel_order.size())
        throw ContractError("channel image: planes and channel order disagree");
    if (img.planes.empty()) throw ContractError("channel image has no channels");
    int n_sources = 0, n_bands = 0;
    for (const auto& ch : img.channel_order) {
        n_sources = std::max(n_sources, ch.source + 1);
        n_bands = std::max(n_bands, ch.band + 1);
    }
    if (img.channel_order != canonical_channel_order(n_sources, n_bands))
        throw ContractError("degrade: input is not a full image in canonical channel order");
    return {n_sources, n_bands};
}

}  // namespace

std::vector<Channel> canonical_channel_order(int n_sources, int n_bands) {
    std::vector<Channel> order;
    order.reserve(static_cast<std::size_t>(n_sources * n_bands));
    for (int j = 0; j < n_sources; ++j)
        for (int i = 0; i < n_bands; ++i) order.push_back({j, i});
    return order;
}

ChannelImage assemble(std::span<const LoudnessGrid> grids, const SceneConfig& cfg, std::string object_id) {
    ChannelImage img;
    img.object_id = std::move(object_id);
    img.channel_order = canonical_channel_order(cfg.n_sources, cfg.n_bands);
    for (const auto& ch : img.channel_order) {
        const auto it = std::find_if(grids.begin(), grids.end(), [&](const LoudnessGrid& g) {
            return g.source_index == ch.source && g.band_index == ch.band;
        });
        if (it == grids.end()) throw AssemblyError("assemble: missing grid for " + channel_name(ch.source, ch.band));
        if (img.planes.empty()) {
            img.mask = it->mask;
        } else if (it->values.rows() != img.mask.rows() || it->values.cols() != img.mask.cols()) {
            throw AssemblyError("assemble: grid " + channel_name(ch.source, ch.band) + " has mismatched dimensions");
        }
        img.planes.push_back(it->values);
    }
    return img;
}

const char* to_string(BandGroup group) {
    switch (group) {
        case BandGroup::Low: return "LOW";
        case BandGroup::High: return "HIGH";
        case BandGroup::Full: return "FULL";
    }
    return "?";
}

BandGroup band_group_from_string(const std::string& name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (const auto g : kBandGroups)
        if (upper == to_string(g)) return g;
    throw ContractError("unknown band group '" + name + "'");
}

void DegradationSpec::validate() const {
    if (std::find(std::begin(kSourceCounts), std::end(kSourceCounts), source_count) == std::end(kSourceCounts))
        throw ContractError("degradation spec: source_count must be 4 or 8, got " + std::to_string(source_count));
    if (std::find(std::begin(kSamplingFactors), std::end(kSamplingFactors), ssf) == std::end(kSamplingFactors))
        throw ContractError("degradation spec: ssf must be 1, 2, 4 or 8, got " + std::to_string(ssf));
}

std::string DegradationSpec::name() const {
    std::string group = to_string(band_group);
    std::transform(group.begin(), group.end(), group.begin(), [](unsigned char c) { return std::tolower(c); });
    return group + "-s" + std::to_string(source_count) + "-ssf" + std::to_string(ssf);
}

DegradationSpec DegradationSpec::parse(const std::string& name) {
    for (const auto& spec : all_degradation_specs())
        if (spec.name() == name) return spec;
    throw ContractError("unknown degradation spec '" + name + "'");
}

std::vector<int> DegradationSpec::bands(int n_bands) const {
    if (band_group != BandGroup::Full && n_bands % 2 != 0)
        throw ContractError("degradation spec: band groups need an even band count");
    const int first = band_group == BandGroup::High ? n_bands / 2 : 0;
    const int last = band_group == BandGroup::Low ? n_bands / 2 : n_bands;
    std::vector<int> out;
    for (int i = first; i < last; ++i) out.push_back(i);
    return out;
}

std::vector<int> DegradationSpec::sources(int n_sources) const {
    if (source_count > n_sources || n_sources % source_count != 0)
        throw ContractError("degradation spec: " + std::to_string(source_count) + " sources do not evenly subsample " +
                            std::to_string(n_sources));
    std::vector<int> out;
    for (int j = 0; j < n_sources; j += n_sources / source_count) out.push_back(j);
    return out;
}

std::vector<DegradationSpec> all_degradation_specs() {
    std::vector<DegradationSpec> specs;
    for (const auto g : kBandGroups)
        for (const int s : kSourceCounts)
            for (const int f : kSamplingFactors) specs.push_back({g, s, f});
    return specs;
}

ChannelImage degrade(const ChannelImage& img, const DegradationSpec& spec) {
    spec.validate();
    const auto [n_sources, n_bands] = full_configuration(img);
    const auto keep_bands = spec.bands(n_bands);
    const auto keep_sources = spec.sources(n_sources);

    ChannelImage out;
    out.object_id = img.object_id;
    out.mask = img.mask;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            if (r % spec.ssf != 0 || c % spec.ssf != 0) out.mask(r, c) = 1;

    for (const int j : keep_sources) {
        for (const int i : keep_bands) {
            const auto& plane = img.planes[static_cast<std::size_t>(j * n_bands + i)];
            out.planes.push_back((out.mask != 0).select(kUnknownSentinel, plane));
            out.channel_order.push_back({j, i});
        }
    }
    return out;
}

ChannelImage compact(const ChannelImage& img, int ssf) {
    if (ssf < 1) throw ContractError("compact: ssf must be positive");
    const Eigen::Index rows = (img.rows() + ssf - 1) / ssf;
    const Eigen::Index cols = (img.cols() + ssf - 1) / ssf;
    auto stride = [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        A out(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = a(r * ssf, c * ssf);
        return out;
    };
    ChannelImage out;
    out.object_id = img.object_id;
    out.channel_order = img.channel_order;
    out.mask = stride(img.mask);
    for (const auto& p : img.planes) out.planes.push_back(stride(p));
    return out;
}

ChannelImage expand_compact(const ChannelImage& img, int ssf, Eigen::Index rows, Eigen::Index cols) {
    if (ssf < 1) throw ContractError("expand_compact: ssf must be positive");
    if (img.rows() != (rows + ssf - 1) / ssf || img.cols() != (cols + ssf - 1) / ssf)
        throw ContractError("expand_compact: compact size does not match the requested frame");
    auto scatter = [&](const auto& a, auto fill) {
        using A = std::decay_t<decltype(a)>;
        A out = A::Constant(rows, cols, fill);
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c) out(r * ssf, c * ssf) = a(r, c);
        return out;
    };
    ChannelImage out;
    out.object_id = img.object_id;
    out.channel_order = img.channel_order;
    out.mask = scatter(img.mask, std::uint8_t{1});
    for (const auto& p : img.planes) out.planes.push_back(scatter(p, kUnknownSentinel));
    return out;
}

}  // namespace sonoshape
