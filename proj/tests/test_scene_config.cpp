#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "sonoshape/config_file.hpp"
#include "sonoshape/errors.hpp"
#include "sonoshape/scene_config.hpp"

using namespace sonoshape;
using std::numbers::pi;

TEST_CASE("source positions lie on the source circle at equal angular steps") {
    const auto cfg = SceneConfig::desk();
    CHECK(source_position(cfg, 0).x() == doctest::Approx(5.0));
    CHECK(source_position(cfg, 0).y() == doctest::Approx(0.0));
    CHECK(source_position(cfg, 2).x() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(source_position(cfg, 2).y() == doctest::Approx(5.0));
    CHECK(source_position(cfg, 4).x() == doctest::Approx(-5.0));
    CHECK(std::abs(source_position(cfg, 4).y()) < 1e-14);
    for (int j = 0; j < cfg.n_sources; ++j) {
        const auto a = source_position(cfg, j);
        const auto b = source_position(cfg, (j + 1) % cfg.n_sources);
        CHECK(a.norm() == doctest::Approx(cfg.source_radius));
        CHECK(std::acos(a.dot(b) / (a.norm() * b.norm())) == doctest::Approx(2 * pi / cfg.n_sources));
    }
    CHECK_THROWS_AS(source_position(cfg, -1), ContractError);
    CHECK_THROWS_AS(source_position(cfg, 8), ContractError);
}

TEST_CASE("band edges are octaves anchored at the base frequency") {
    const auto cfg = SceneConfig::desk();
    CHECK(band_edges(cfg, 0).first == doctest::Approx(2 * pi * 250));
    CHECK(band_edges(cfg, 0).second == doctest::Approx(2 * pi * 500));
    CHECK(band_edges(cfg, 3).first == doctest::Approx(2 * pi * 2000));
    CHECK(band_edges(cfg, 3).second == doctest::Approx(2 * pi * 4000));
    for (int i = 0; i < cfg.n_bands; ++i) {
        const auto [lo, hi] = band_edges(cfg, i);
        CHECK(hi == 2.0 * lo);
        if (i + 1 < cfg.n_bands) CHECK(band_edges(cfg, i + 1).first == hi);
    }
    CHECK_THROWS_AS(band_edges(cfg, 4), ContractError);
    CHECK_THROWS_AS(band_edges(cfg, -1), ContractError);
}

TEST_CASE("grid dimensions of the profiles") {
    const auto desk = SceneConfig::desk();
    CHECK(desk.grid_dim() == 129);
    CHECK(desk.inaccessible_dim() == 25);
    CHECK(desk.inaccessible_offset() == 52);
    const auto paper = SceneConfig::paper();
    CHECK(paper.grid_dim() == 512);
    CHECK(paper.inaccessible_dim() == 100);
    CHECK_NOTHROW(desk.validate());
    CHECK_NOTHROW(paper.validate());
}

TEST_CASE("grid points: counts, ordering and the central inaccessible block") {
    SceneConfig tiny;
    tiny.region_side = 0.04;
    tiny.cell_size = 0.01;
    tiny.inaccessible_side = 0.02;
    tiny.validate();
    const auto pts = grid_points(tiny);
    REQUIRE(pts.size() == 16);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const bool center = r >= 1 && r <= 2 && c >= 1 && c <= 2;
            CHECK((pts[static_cast<std::size_t>(r * 4 + c)].access == Access::Inaccessible) == center);
        }
    CHECK(pts[0].position.x() == doctest::Approx(-0.015));
    CHECK(pts[0].position.y() == doctest::Approx(-0.015));
    CHECK(pts[1].position.x() > pts[0].position.x());  // columns along +x
    CHECK(pts[4].position.y() > pts[0].position.y());  // rows along +y

    for (const auto& cfg : {SceneConfig::desk(), SceneConfig::paper()}) {
        const auto all = grid_points(cfg);
        const auto n = static_cast<std::size_t>(cfg.grid_dim());
        const auto m = static_cast<std::size_t>(cfg.inaccessible_dim());
        CHECK(all.size() == n * n);
        CHECK(std::count_if(all.begin(), all.end(), [](const GridPoint& g) { return g.access == Access::Inaccessible; }) ==
              static_cast<long>(m * m));
    }
}

TEST_CASE("inaccessible cells are exactly those whose centers lie in the central square") {
    const auto cfg = SceneConfig::desk();
    const double h = cfg.half_inaccessible();
    for (const auto& g : grid_points(cfg)) {
        const bool inside = std::abs(g.position.x()) <= h && std::abs(g.position.y()) <= h;
        CHECK((g.access == Access::Inaccessible) == inside);
    }
}

TEST_CASE("grid points are invariant under a quarter turn about the center") {
    const auto cfg = SceneConfig::desk();
    const int n = cfg.grid_dim();
    for (int r = 0; r < n; r += 7)
        for (int c = 0; c < n; c += 5) {
            const Point2 p = cfg.cell_center(r, c);
            // (x, y) -> (-y, x) maps cell (r, c) to (c, n - 1 - r), bit for bit
            const Point2 q = cfg.cell_center(c, n - 1 - r);
            CHECK(q.x() == -p.y());
            CHECK(q.y() == p.x());
            CHECK(cfg.is_inaccessible(r, c) == cfg.is_inaccessible(c, n - 1 - r));
        }
}

TEST_CASE("target cell centers tile the inaccessible square") {
    const auto cfg = SceneConfig::desk();
    const int m = cfg.inaccessible_dim();
    CHECK(cfg.target_cell_center(0, 0).x() == doctest::Approx(-0.48));
    CHECK(cfg.target_cell_center(m - 1, m - 1).y() == doctest::Approx(0.48));
    // the target grid is the region grid's central block
    const int off = cfg.inaccessible_offset();
    CHECK(cfg.target_cell_center(3, 7).x() == doctest::Approx(cfg.cell_center(off + 3, off + 7).x()).epsilon(1e-12));
    CHECK(cfg.target_cell_center(3, 7).y() == doctest::Approx(cfg.cell_center(off + 3, off + 7).y()).epsilon(1e-12));
}

TEST_CASE("scene validation rejects each violated invariant") {
    auto expect_invalid = [](auto mutate) {
        SceneConfig cfg = SceneConfig::desk();
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    };
    expect_invalid([](SceneConfig& c) { c.cell_size = 0.0; });
    expect_invalid([](SceneConfig& c) { c.region_side = 5.15; });
    expect_invalid([](SceneConfig& c) { c.inaccessible_side = 1.01; });
    expect_invalid([](SceneConfig& c) { c.inaccessible_side = 6.0; });
    expect_invalid([](SceneConfig& c) { c.region_side = 5.12; });  // 128 - 25 is odd: square not centered
    expect_invalid([](SceneConfig& c) { c.n_sources = 0; });
    expect_invalid([](SceneConfig& c) { c.n_bands = 0; });
    expect_invalid([](SceneConfig& c) { c.freq_samples_per_band = 1; });
    expect_invalid([](SceneConfig& c) { c.elements_per_wavelength = 3; });
    expect_invalid([](SceneConfig& c) { c.sound_speed = -343.0; });
    expect_invalid([](SceneConfig& c) { c.source_radius = 0.0; });
    expect_invalid([](SceneConfig& c) { c.base_frequency = 0.0; });
}

TEST_CASE("config text round-trips and overrides apply on top of a profile") {
    const auto paper = SceneConfig::paper();
    const auto back = parse_scene_config(to_text(paper));
    CHECK(to_text(back) == to_text(paper));
    CHECK(back.cell_size == paper.cell_size);

    const auto cfg = parse_scene_config("# comment\n  n_bands = 2 \nsound_speed=340 # trailing\n");
    CHECK(cfg.n_bands == 2);
    CHECK(cfg.sound_speed == 340.0);
    CHECK(cfg.region_side == SceneConfig::desk().region_side);
    CHECK(parse_scene_config("cell_size = 0.01", SceneConfig::paper()).grid_dim() == 512);
}

TEST_CASE("config parsing errors are validation errors") {
    CHECK_THROWS_AS(parse_scene_config("n_bands 4"), ValidationError);
    CHECK_THROWS_AS(parse_scene_config("n_bands = 4\nn_bands = 4"), ValidationError);
    CHECK_THROWS_AS(parse_scene_config("n_bands = four"), ValidationError);
    CHECK_THROWS_AS(parse_scene_config("n_bands = 2.5"), ValidationError);
    CHECK_THROWS_AS(parse_scene_config("colour = blue"), ValidationError);
    CHECK_THROWS_AS(parse_scene_config("= 3"), ValidationError);
    CHECK_THROWS_AS(parse_scene_config("cell_size = 0.03"), ValidationError);
    CHECK_THROWS_AS(KeyValueFile::load("/nonexistent/config.txt"), ValidationError);
}

TEST_CASE("key-value files report every unconsumed key") {
    const auto file = KeyValueFile::parse("a = 1\nb = 2\nc = 3\n");
    CHECK(file.take_int("a") == 1);
    try {
        file.reject_unconsumed();
        FAIL("expected rejection");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find('b') != std::string::npos);
        CHECK(msg.find('c') != std::string::npos);
    }
}
