#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sonoshape/channel_image.hpp"
#include "sonoshape/polygon.hpp"
#include "sonoshape/rasterizer.hpp"

namespace sonoshape {

/// Version string gating reader compatibility.
inline constexpr const char* kDatasetFormat = "sonoshape-dataset/1";

enum class Storage { FullFrame, Compact };

const char* to_string(Storage storage);

struct DatasetRecord {
    ChannelImage input;
    OccupancyGrid target;
};

/// Per-record file references inside a dataset directory.
struct RecordEntry {
    std::string id;
    std::string input_file;
    std::uint64_t input_bytes = 0;
    std::string input_sha256;
    std::string target_file;
    std::uint64_t target_bytes = 0;
    std::string target_sha256;
};

/// Contents of manifest.json. Carries no timestamps, so identical inputs
/// produce identical bytes.
struct DatasetManifest {
    std::string format_version = kDatasetFormat;
    std::string scene_config;  // verbatim key = value text
    std::string scene_config_digest;
    std::string split;
    std::uint64_t shape_seed = 0;
    DegradationSpec spec;
    Storage storage = Storage::FullFrame;
    std::vector<Channel> channel_order;
    std::vector<std::size_t> input_shape;   // channels, rows, cols as stored
    std::vector<std::size_t> target_shape;  // rows, cols
    std::string shapes_sha256;
    std::vector<RecordEntry> records;
    std::string payload_digest;
    std::string parent_digest;  // empty for a root dataset
    std::string provenance;

    std::size_t record_count() const { return records.size(); }
};

/// Everything about a dataset that is not record payload.
struct DatasetHeader {
    std::string scene_config;
    std::string split;
    std::uint64_t shape_seed = 0;
    DegradationSpec spec;
    Storage storage = Storage::FullFrame;
    std::vector<Shape> shapes;
    std::string parent_digest;
    std::string provenance = "sonoshape";
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<Shape> shapes;
    std::vector<DatasetRecord> records;
};

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);

/// Digest over shapes and every record digest, in record order.
std::string payload_digest(const DatasetManifest& m);

/// Writes records, shapes.txt and manifest.json. The directory is built as
/// `<path>.partial` and renamed into place only when complete; on failure the
/// partial directory is left for inspection and `path` is untouched.
/// Records must be in the header's storage form and share one channel order.
DatasetManifest write_dataset(const std::vector<DatasetRecord>& records, const DatasetHeader& header,
                              const std::string& path);

/// Reads and verifies every digest; throws DatasetError on any mismatch.
Dataset read_dataset(const std::string& path);
DatasetManifest read_manifest(const std::string& path);

/// Writes one derived dataset per degradation spec under `out_root/<spec name>`.
/// The parent must be a full-frame (FULL, 8, 1) dataset.
std::vector<DatasetManifest> expand_matrix(const std::string& parent_path, const std::string& out_root,
                                           Storage storage = Storage::FullFrame);

}  // namespace sonoshape
