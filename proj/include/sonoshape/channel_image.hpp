#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sonoshape/loudness.hpp"

namespace sonoshape {

/// One input channel: loudness from source j in band i.
struct Channel {
    int source = 0;
    int band = 0;
    friend bool operator==(const Channel&, const Channel&) = default;
};

/// Stacked loudness planes of one object. Every plane shares the mask.
struct ChannelImage {
    std::vector<RowMajorArray<float>> planes;
    std::vector<Channel> channel_order;
    RowMajorArray<std::uint8_t> mask;  // 1 where unknown
    std::string object_id;

    std::size_t channels() const { return planes.size(); }
    Eigen::Index rows() const { return mask.rows(); }
    Eigen::Index cols() const { return mask.cols(); }
};

/// Canonical order for a full configuration: c = j * n_bands + i.
std::vector<Channel> canonical_channel_order(int n_sources, int n_bands);

/// Stacks one grid per (j, i) of the configuration in canonical order.
/// Throws AssemblyError naming the first missing (j, i).
ChannelImage assemble(std::span<const LoudnessGrid> grids, const SceneConfig& cfg, std::string object_id = {});

enum class BandGroup { Low, High, Full };

const char* to_string(BandGroup group);
BandGroup band_group_from_string(const std::string& name);

/// One cell of the degradation matrix: which bands, how many sources, which pixel stride.
struct DegradationSpec {
    BandGroup band_group = BandGroup::Full;
    int source_count = 8;
    int ssf = 1;

    /// Throws ContractError unless source_count in {4, 8} and ssf in {1, 2, 4, 8}.
    void validate() const;
    /// Directory-friendly label, e.g. "low-s8-ssf2".
    std::string name() const;
    static DegradationSpec parse(const std::string& name);

    /// Bands kept out of n_bands: first half, second half, or all.
    std::vector<int> bands(int n_bands) const;
    /// Sources kept out of n_sources: every (n_sources / source_count)-th starting at 0.
    std::vector<int> sources(int n_sources) const;

    friend bool operator==(const DegradationSpec&, const DegradationSpec&) = default;
};

/// The 24 specs in table order: band group, then source count, then ssf.
std::vector<DegradationSpec> all_degradation_specs();

/// Keeps the spec's channels and the pixels whose row and column are
/// multiples of ssf; all other pixels become kUnknownSentinel and are masked.
/// Frame size is preserved. `img` must be a full canonical image.
ChannelImage degrade(const ChannelImage& img, const DegradationSpec& spec);

/// Drops non-retained rows and columns of a degraded full-frame image.
ChannelImage compact(const ChannelImage& img, int ssf);
/// Inverse of compact: re-inserts masked sentinel pixels to a rows x cols frame.
ChannelImage expand_compact(const ChannelImage& img, int ssf, Eigen::Index rows, Eigen::Index cols);

}  // namespace sonoshape
