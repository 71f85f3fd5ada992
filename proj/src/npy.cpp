#include "sonoshape/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <regex>

#include "sonoshape/errors.hpp"

namespace sonoshape {

static_assert(std::endian::native == std::endian::little, "payloads are written in native byte order");

namespace {

constexpr unsigned char kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPreambleSize = 10;  // magic, version, header length
constexpr std::size_t kAlignment = 64;

const char* descr(NpyType type) { return type == NpyType::Float32 ? "<f4" : "|u1"; }
std::size_t element_size(NpyType type) { return type == NpyType::Float32 ? 4 : 1; }

std::string header_dict(const NpyArray& a) {
    std::string shape = "(";
    for (std::size_t k = 0; k < a.shape.size(); ++k) {
        shape += std::to_string(a.shape[k]);
        shape += (a.shape.size() == 1 || k + 1 < a.shape.size()) ? "," : "";
        if (k + 1 < a.shape.size()) shape += " ";
    }
    shape += ")";
    return std::string("{'descr': '") + descr(a.type) + "', 'fortran_order': False, 'shape': " + shape + ", }";
}

template <typename T>
NpyArray make(std::span<const T> values, std::vector<std::size_t> shape, NpyType type) {
    NpyArray a;
    a.type = type;
    a.shape = std::move(shape);
    if (a.element_count() != values.size()) throw ContractError("make_npy: shape does not match element count");
    a.payload.resize(values.size_bytes());
    if (!values.empty()) std::memcpy(a.payload.data(), values.data(), values.size_bytes());
    return a;
}

}  // namespace

std::size_t NpyArray::element_count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<float> NpyArray::as_float32() const {
    if (type != NpyType::Float32) throw DatasetError("npy: expected float32 payload");
    std::vector<float> out(element_count());
    if (!out.empty()) std::memcpy(out.data(), payload.data(), payload.size());
    return out;
}

std::vector<std::uint8_t> NpyArray::as_uint8() const {
    if (type != NpyType::UInt8) throw DatasetError("npy: expected uint8 payload");
    return {payload.begin(), payload.end()};
}

NpyArray make_npy(std::span<const float> values, std::vector<std::size_t> shape) {
    return make(values, std::move(shape), NpyType::Float32);
}

NpyArray make_npy(std::span<const std::uint8_t> values, std::vector<std::size_t> shape) {
    return make(values, std::move(shape), NpyType::UInt8);
}

std::vector<unsigned char> encode_npy(const NpyArray& a) {
    if (a.payload.size() != a.element_count() * element_size(a.type))
        throw ContractError("encode_npy: payload size does not match shape");
    std::string header = header_dict(a);
    const std::size_t unpadded = kPreambleSize + header.size() + 1;
    header.append((kAlignment - unpadded % kAlignment) % kAlignment, ' ');
    header.push_back('\n');
    if (header.size() > 0xffff) throw ContractError("encode_npy: header too long for version 1.0");

    std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(1);
    out.push_back(0);
    out.push_back(static_cast<unsigned char>(header.size() & 0xff));
    out.push_back(static_cast<unsigned char>(header.size() >> 8));
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), a.payload.begin(), a.payload.end());
    return out;
}

NpyArray decode_npy(std::span<const unsigned char> bytes) {
    if (bytes.size() < kPreambleSize || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
        throw DatasetError("npy: bad magic");
    if (bytes[6] != 1) throw DatasetError("npy: unsupported version " + std::to_string(bytes[6]));
    const std::size_t header_len = bytes[8] | (std::size_t{bytes[9]} << 8);
    if (bytes.size() < kPreambleSize + header_len) throw DatasetError("npy: truncated header");
    const std::string header(reinterpret_cast<const char*>(bytes.data() + kPreambleSize), header_len);

    static const std::regex descr_re(R"('descr':\s*'([^']*)')");
    static const std::regex order_re(R"('fortran_order':\s*(True|False))");
    static const std::regex shape_re(R"('shape':\s*\(([^)]*)\))");
    std::smatch m;
    NpyArray a;
    if (!std::regex_search(header, m, descr_re)) throw DatasetError("npy: missing descr");
    if (m[1] == "<f4") a.type = NpyType::Float32;
    else if (m[1] == "|u1" || m[1] == "<u1") a.type = NpyType::UInt8;
    else throw DatasetError("npy: unsupported dtype " + m[1].str());
    if (!std::regex_search(header, m, order_re) || m[1] != "False") throw DatasetError("npy: fortran order unsupported");
    if (!std::regex_search(header, m, shape_re)) throw DatasetError("npy: missing shape");
    static const std::regex dim_re(R"(\d+)");
    const std::string dims = m[1];
    for (auto it = std::sregex_iterator(dims.begin(), dims.end(), dim_re); it != std::sregex_iterator(); ++it)
        a.shape.push_back(std::stoull(it->str()));

    const std::size_t expected = a.element_count() * element_size(a.type);
    const auto payload = bytes.subspan(kPreambleSize + header_len);
    if (payload.size() != expected)
        throw DatasetError("npy: payload is " + std::to_string(payload.size()) + " bytes, expected " +
                           std::to_string(expected));
    a.payload.assign(payload.begin(), payload.end());
    return a;
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const unsigned char> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError("cannot create " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DatasetError("write failed: " + path);
}

void write_npy(const std::string& path, const NpyArray& array) { write_file_bytes(path, encode_npy(array)); }

NpyArray read_npy(const std::string& path) {
    try {
        return decode_npy(read_file_bytes(path));
    } catch (const DatasetError& e) {
        throw DatasetError(path + ": " + e.what());
    }
}

}  // namespace sonoshape
