#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sonoshape {

/// Element types stored in NPY containers.
enum class NpyType { Float32, UInt8 };

/// NPY version 1.0 array: C order, little-endian payload.
struct NpyArray {
    NpyType type = NpyType::Float32;
    std::vector<std::size_t> shape;
    std::vector<unsigned char> payload;

    std::size_t element_count() const;
    std::vector<float> as_float32() const;
    std::vector<std::uint8_t> as_uint8() const;
};

NpyArray make_npy(std::span<const float> values, std::vector<std::size_t> shape);
NpyArray make_npy(std::span<const std::uint8_t> values, std::vector<std::size_t> shape);

/// Complete file image: magic, header dictionary padded to 64 bytes, payload.
std::vector<unsigned char> encode_npy(const NpyArray& array);
/// Throws DatasetError on a malformed container or an unsupported dtype.
NpyArray decode_npy(std::span<const unsigned char> bytes);

void write_npy(const std::string& path, const NpyArray& array);
NpyArray read_npy(const std::string& path);

std::vector<unsigned char> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const unsigned char> bytes);

}  // namespace sonoshape
