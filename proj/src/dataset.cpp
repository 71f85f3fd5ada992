#include "sonoshape/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "sonoshape/digest.hpp"
#include "sonoshape/errors.hpp"
#include "sonoshape/npy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sonoshape {

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kShapesFile = "shapes.txt";
constexpr const char* kRecordsDir = "records";

Storage storage_from_string(const std::string& s) {
    if (s == "full_frame") return Storage::FullFrame;
    if (s == "compact") return Storage::Compact;
    throw DatasetError("manifest: unknown storage '" + s + "'");
}

NpyArray encode_input(const ChannelImage& img) {
    const auto rows = static_cast<std::size_t>(img.rows());
    const auto cols = static_cast<std::size_t>(img.cols());
    std::vector<float> flat;
    flat.reserve(img.channels() * rows * cols);
    for (const auto& p : img.planes) flat.insert(flat.end(), p.data(), p.data() + p.size());
    return make_npy(std::span<const float>(flat), {img.channels(), rows, cols});
}

NpyArray encode_target(const OccupancyGrid& g) {
    return make_npy(std::span<const std::uint8_t>(g.bits.data(), static_cast<std::size_t>(g.bits.size())),
                    {static_cast<std::size_t>(g.bits.rows()), static_cast<std::size_t>(g.bits.cols())});
}

/// Rebuilds planes and mask; a cell is unknown iff every channel holds the sentinel.
ChannelImage decode_input(const NpyArray& a, const std::vector<Channel>& order, const std::string& id) {
    if (a.shape.size() != 3 || a.shape[0] != order.size())
        throw DatasetError("record " + id + ": input shape does not match the channel order");
    const auto rows = static_cast<Eigen::Index>(a.shape[1]);
    const auto cols = static_cast<Eigen::Index>(a.shape[2]);
    const auto flat = a.as_float32();
    ChannelImage img;
    img.object_id = id;
    img.channel_order = order;
    img.mask = RowMajorArray<std::uint8_t>::Ones(rows, cols);
    for (std::size_t c = 0; c < order.size(); ++c) {
        img.planes.push_back(Eigen::Map<const RowMajorArray<float>>(flat.data() + c * rows * cols, rows, cols));
        img.mask = (img.planes.back() == kUnknownSentinel).select(img.mask, std::uint8_t{0});
    }
    return img;
}

OccupancyGrid decode_target(const NpyArray& a, const std::string& id) {
    if (a.shape.size() != 2) throw DatasetError("record " + id + ": target must be two-dimensional");
    const auto flat = a.as_uint8();
    OccupancyGrid g;
    g.object_id = id;
    g.bits = Eigen::Map<const RowMajorArray<std::uint8_t>>(flat.data(), static_cast<Eigen::Index>(a.shape[0]),
                                                           static_cast<Eigen::Index>(a.shape[1]));
    return g;
}

std::string file_sha(const std::vector<unsigned char>& bytes) { return sha256_hex(std::span(bytes)); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError("cannot create " + path.string());
    out << text;
    if (!out) throw DatasetError("write failed: " + path.string());
}

std::vector<Shape> shapes_for(const std::vector<DatasetRecord>& records, const std::vector<Shape>& shapes) {
    std::map<std::string, const Shape*> by_id;
    for (const auto& s : shapes) by_id[s.id] = &s;
    std::vector<Shape> out;
    for (const auto& r : records) {
        const auto it = by_id.find(r.input.object_id);
        if (it != by_id.end()) out.push_back(*it->second);
    }
    return out;
}

}  // namespace

const char* to_string(Storage storage) { return storage == Storage::FullFrame ? "full_frame" : "compact"; }

std::string manifest_to_json(const DatasetManifest& m) {
    json j;
    j["format_version"] = m.format_version;
    j["scene_config"] = m.scene_config;
    j["scene_config_digest"] = m.scene_config_digest;
    j["split"] = m.split;
    j["shape_seed"] = m.shape_seed;
    j["degradation"] = {{"name", m.spec.name()},
                        {"band_group", to_string(m.spec.band_group)},
                        {"source_count", m.spec.source_count},
                        {"ssf", m.spec.ssf}};
    j["storage"] = to_string(m.storage);
    j["channel_order"] = json::array();
    for (const auto& ch : m.channel_order) j["channel_order"].push_back({ch.source, ch.band});
    j["input_shape"] = m.input_shape;
    j["target_shape"] = m.target_shape;
    j["input_dtype"] = "<f4";
    j["target_dtype"] = "|u1";
    j["unknown_value"] = "float32 lowest; a cell is unknown iff every channel holds it";
    j["shapes_sha256"] = m.shapes_sha256;
    j["record_count"] = m.records.size();
    j["records"] = json::array();
    for (const auto& r : m.records)
        j["records"].push_back({{"id", r.id},
                                {"input", r.input_file},
                                {"input_bytes", r.input_bytes},
                                {"input_sha256", r.input_sha256},
                                {"target", r.target_file},
                                {"target_bytes", r.target_bytes},
                                {"target_sha256", r.target_sha256}});
    j["payload_digest"] = m.payload_digest;
    j["parent_digest"] = m.parent_digest.empty() ? json(nullptr) : json(m.parent_digest);
    j["provenance"] = m.provenance;
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        DatasetManifest m;
        m.format_version = j.at("format_version").get<std::string>();
        if (m.format_version != kDatasetFormat)
            throw DatasetError("unsupported dataset format '" + m.format_version + "'");
        m.scene_config = j.at("scene_config").get<std::string>();
        m.scene_config_digest = j.at("scene_config_digest").get<std::string>();
        m.split = j.at("split").get<std::string>();
        m.shape_seed = j.at("shape_seed").get<std::uint64_t>();
        const auto& d = j.at("degradation");
        m.spec = {band_group_from_string(d.at("band_group").get<std::string>()), d.at("source_count").get<int>(),
                  d.at("ssf").get<int>()};
        m.storage = storage_from_string(j.at("storage").get<std::string>());
        for (const auto& ch : j.at("channel_order")) m.channel_order.push_back({ch.at(0).get<int>(), ch.at(1).get<int>()});
        m.input_shape = j.at("input_shape").get<std::vector<std::size_t>>();
        m.target_shape = j.at("target_shape").get<std::vector<std::size_t>>();
        m.shapes_sha256 = j.at("shapes_sha256").get<std::string>();
        for (const auto& r : j.at("records"))
            m.records.push_back({r.at("id").get<std::string>(), r.at("input").get<std::string>(),
                                 r.at("input_bytes").get<std::uint64_t>(), r.at("input_sha256").get<std::string>(),
                                 r.at("target").get<std::string>(), r.at("target_bytes").get<std::uint64_t>(),
                                 r.at("target_sha256").get<std::string>()});
        if (j.at("record_count").get<std::size_t>() != m.records.size())
            throw DatasetError("manifest: record_count disagrees with the record list");
        m.payload_digest = j.at("payload_digest").get<std::string>();
        const auto& parent = j.at("parent_digest");
        m.parent_digest = parent.is_null() ? std::string() : parent.get<std::string>();
        m.provenance = j.at("provenance").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw DatasetError(std::string("manifest: ") + e.what());
    } catch (const ContractError& e) {
        throw DatasetError(std::string("manifest: ") + e.what());
    }
}

std::string payload_digest(const DatasetManifest& m) {
    std::string text = "shapes " + m.shapes_sha256 + "\n";
    for (const auto& r : m.records) text += r.id + " " + r.input_sha256 + " " + r.target_sha256 + "\n";
    return sha256_hex(text);
}

DatasetManifest write_dataset(const std::vector<DatasetRecord>& records, const DatasetHeader& header,
                              const std::string& path) {
    header.spec.validate();
    DatasetManifest m;
    m.scene_config = header.scene_config;
    m.scene_config_digest = sha256_hex(header.scene_config);
    m.split = header.split;
    m.shape_seed = header.shape_seed;
    m.spec = header.spec;
    m.storage = header.storage;
    m.parent_digest = header.parent_digest;
    m.provenance = header.provenance;
    if (!records.empty()) {
        const auto& first = records.front();
        m.channel_order = first.input.channel_order;
        m.input_shape = {first.input.channels(), static_cast<std::size_t>(first.input.rows()),
                         static_cast<std::size_t>(first.input.cols())};
        m.target_shape = {static_cast<std::size_t>(first.target.bits.rows()),
                          static_cast<std::size_t>(first.target.bits.cols())};
    }

    const fs::path final_dir(path);
    const fs::path staging(path + ".partial");
    fs::remove_all(staging);
    fs::create_directories(staging / kRecordsDir);

    for (const auto& r : records) {
        const auto& id = r.input.object_id;
        if (id.empty() || id.find('/') != std::string::npos) throw ContractError("write_dataset: bad record id '" + id + "'");
        if (r.target.object_id != id) throw ContractError("write_dataset: input/target id mismatch for " + id);
        if (r.input.channel_order != m.channel_order || r.input.planes.size() != r.input.channel_order.size())
            throw ContractError("write_dataset: record " + id + " has a different channel layout");
        const std::vector<std::size_t> shape{r.input.channels(), static_cast<std::size_t>(r.input.rows()),
                                             static_cast<std::size_t>(r.input.cols())};
        if (shape != m.input_shape) throw ContractError("write_dataset: record " + id + " has a different input shape");

        RecordEntry e;
        e.id = id;
        e.input_file = std::string(kRecordsDir) + "/" + id + ".input.npy";
        e.target_file = std::string(kRecordsDir) + "/" + id + ".target.npy";
        const auto input = encode_npy(encode_input(r.input));
        const auto target = encode_npy(encode_target(r.target));
        write_file_bytes((staging / e.input_file).string(), input);
        write_file_bytes((staging / e.target_file).string(), target);
        e.input_bytes = input.size();
        e.target_bytes = target.size();
        e.input_sha256 = file_sha(input);
        e.target_sha256 = file_sha(target);
        m.records.push_back(std::move(e));
    }

    const std::string shapes_text = format_shapes(shapes_for(records, header.shapes));
    write_text(staging / kShapesFile, shapes_text);
    m.shapes_sha256 = sha256_hex(shapes_text);
    m.payload_digest = payload_digest(m);
    write_text(staging / kManifestFile, manifest_to_json(m));

    fs::remove_all(final_dir);
    fs::rename(staging, final_dir);
    return m;
}

DatasetManifest read_manifest(const std::string& path) {
    const fs::path file = fs::path(path) / kManifestFile;
    if (!fs::exists(file)) throw DatasetError("no dataset at " + path + " (missing " + kManifestFile + ")");
    const auto bytes = read_file_bytes(file.string());
    return manifest_from_json(std::string(bytes.begin(), bytes.end()));
}

Dataset read_dataset(const std::string& path) {
    Dataset ds;
    ds.manifest = read_manifest(path);
    const auto& m = ds.manifest;
    const fs::path root(path);

    const auto shapes_bytes = read_file_bytes((root / kShapesFile).string());
    if (file_sha(shapes_bytes) != m.shapes_sha256) throw DatasetError(path + ": shapes.txt digest mismatch");
    ds.shapes = parse_shapes(std::string(shapes_bytes.begin(), shapes_bytes.end()));
    if (payload_digest(m) != m.payload_digest) throw DatasetError(path + ": payload digest mismatch");

    for (const auto& e : m.records) {
        const auto input = read_file_bytes((root / e.input_file).string());
        const auto target = read_file_bytes((root / e.target_file).string());
        if (input.size() != e.input_bytes || file_sha(input) != e.input_sha256)
            throw DatasetError(path + ": digest mismatch for " + e.input_file);
        if (target.size() != e.target_bytes || file_sha(target) != e.target_sha256)
            throw DatasetError(path + ": digest mismatch for " + e.target_file);
        DatasetRecord r{decode_input(decode_npy(input), m.channel_order, e.id), decode_target(decode_npy(target), e.id)};
        const std::vector<std::size_t> shape{r.input.channels(), static_cast<std::size_t>(r.input.rows()),
                                             static_cast<std::size_t>(r.input.cols())};
        if (shape != m.input_shape) throw DatasetError(path + ": record " + e.id + " input shape disagrees with manifest");
        ds.records.push_back(std::move(r));
    }
    return ds;
}

std::vector<DatasetManifest> expand_matrix(const std::string& parent_path, const std::string& out_root,
                                           Storage storage) {
    const Dataset parent = read_dataset(parent_path);
    const auto& pm = parent.manifest;
    if (pm.spec != DegradationSpec{} || pm.storage != Storage::FullFrame)
        throw DatasetError(parent_path + ": expansion needs a full-frame (FULL, 8, 1) parent, found " + pm.spec.name());

    std::vector<DatasetManifest> out;
    for (const auto& spec : all_degradation_specs()) {
        std::vector<DatasetRecord> records;
        records.reserve(parent.records.size());
        for (const auto& r : parent.records) {
            ChannelImage img = degrade(r.input, spec);
            if (storage == Storage::Compact) img = compact(img, spec.ssf);
            records.push_back({std::move(img), r.target});
        }
        DatasetHeader h;
        h.scene_config = pm.scene_config;
        h.split = pm.split;
        h.shape_seed = pm.shape_seed;
        h.spec = spec;
        h.storage = storage;
        h.shapes = parent.shapes;
        h.parent_digest = pm.payload_digest;
        h.provenance = pm.provenance;
        out.push_back(write_dataset(records, h, (fs::path(out_root) / spec.name()).string()));
    }
    return out;
}

}  // namespace sonoshape
