#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>

#include "sonoshape/errors.hpp"
#include "sonoshape/npy.hpp"

using namespace sonoshape;

namespace {

std::string as_text(const std::vector<unsigned char>& bytes, std::size_t from, std::size_t count) {
    return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(from),
                       bytes.begin() + static_cast<std::ptrdiff_t>(from + count));
}

}  // namespace

TEST_CASE("float32 container layout matches the NPY 1.0 format byte for byte") {
    // header bytes as numpy 1.x writes them for the same array
    const std::vector<float> values{0.0f, 1.0f, 2.0f, 3.0f, 4.0f, 5.0f};
    const auto bytes = encode_npy(make_npy(std::span<const float>(values), {2, 3}));
    const std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }";
    REQUIRE(bytes.size() == 128 + values.size() * 4);
    CHECK(as_text(bytes, 0, 6) == "\x93NUMPY");
    CHECK(bytes[6] == 1);
    CHECK(bytes[7] == 0);
    CHECK(bytes[8] == 118);  // header length, little-endian u16
    CHECK(bytes[9] == 0);
    CHECK(as_text(bytes, 10, dict.size()) == dict);
    for (std::size_t k = 10 + dict.size(); k < 127; ++k) CHECK(bytes[k] == ' ');
    CHECK(bytes[127] == '\n');
    float third;
    std::memcpy(&third, bytes.data() + 128 + 2 * 4, 4);
    CHECK(third == 2.0f);
    CHECK(bytes[128 + 4 + 3] == 0x3f);  // 1.0f = 0x3f800000 little-endian
}

TEST_CASE("uint8 and one-dimensional shapes use numpy's tuple spelling") {
    const std::vector<std::uint8_t> values{1, 0, 1};
    const auto bytes = encode_npy(make_npy(std::span<const std::uint8_t>(values), {3}));
    CHECK(as_text(bytes, 10, 58).find("{'descr': '|u1', 'fortran_order': False, 'shape': (3,), }") == 0);
    CHECK(bytes.size() == 128 + 3);
    const auto empty = encode_npy(make_npy(std::span<const std::uint8_t>(), {0, 4}));
    CHECK(decode_npy(empty).shape == std::vector<std::size_t>{0, 4});
}

TEST_CASE("encode/decode round-trips values bit-exactly") {
    const std::vector<float> values{std::numeric_limits<float>::lowest(), -0.0f, 1e-38f,
                                    std::numeric_limits<float>::max(), 3.25f, -120.0f};
    const auto a = make_npy(std::span<const float>(values), {1, 2, 3});
    const auto b = decode_npy(encode_npy(a));
    CHECK(b.type == NpyType::Float32);
    CHECK(b.shape == a.shape);
    CHECK(b.payload == a.payload);
    const auto back = b.as_float32();
    CHECK(std::memcmp(back.data(), values.data(), values.size() * sizeof(float)) == 0);
    CHECK_THROWS_AS(b.as_uint8(), DatasetError);
}

TEST_CASE("files round-trip through disk") {
    const auto path = (std::filesystem::temp_directory_path() / "sonoshape_npy_roundtrip.npy").string();
    const std::vector<std::uint8_t> values{0, 1, 1, 0, 1, 0};
    const auto a = make_npy(std::span<const std::uint8_t>(values), {2, 3});
    write_npy(path, a);
    const auto b = read_npy(path);
    CHECK(b.type == NpyType::UInt8);
    CHECK(b.as_uint8() == values);
    std::filesystem::remove(path);
    CHECK_THROWS(read_npy(path));
}

TEST_CASE("malformed containers are rejected") {
    const std::vector<float> values{1.0f, 2.0f};
    const auto good = encode_npy(make_npy(std::span<const float>(values), {2}));
    auto bad_magic = good;
    bad_magic[1] = 'X';
    CHECK_THROWS_AS(decode_npy(bad_magic), DatasetError);
    auto truncated = good;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_npy(truncated), DatasetError);
    auto fortran = good;
    const std::string key = "False";
    auto pos = std::search(fortran.begin(), fortran.end(), key.begin(), key.end());
    std::memcpy(&*pos, "True ", 5);
    CHECK_THROWS_AS(decode_npy(fortran), DatasetError);
    auto big_endian = good;
    const std::string descr = "<f4";
    pos = std::search(big_endian.begin(), big_endian.end(), descr.begin(), descr.end());
    *pos = '>';
    CHECK_THROWS_AS(decode_npy(big_endian), DatasetError);
    CHECK_THROWS_AS(decode_npy(std::vector<unsigned char>(5, 0)), DatasetError);
    CHECK_THROWS_AS(make_npy(std::span<const float>(values), {3}), ContractError);
}
