#include <doctest.h>

#include <filesystem>

#include "zpsync/error.hpp"
#include "zpsync/settings.hpp"

using namespace zpsync;

TEST_CASE("later assignments override earlier ones") {
    Settings s;
    s.merge_text("n_x = 256\n# comment\n  trials = 10   # trailing\n", "a.cfg");
    s.merge_text("trials = 20\n", "b.cfg");
    CHECK(s.get_size("n_x", 0) == 256);
    CHECK(s.get_size("trials", 0) == 20);
    CHECK(s.entries().at("trials").origin == "b.cfg:1");
    CHECK(s.get_size("n_z", 7) == 7);
}

TEST_CASE("malformed text names the line") {
    Settings s;
    CHECK_THROWS_WITH_AS(s.merge_text("n_x = 4\nbogus line\n", "x.cfg"), doctest::Contains("x.cfg:2"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(s.merge_text("colour = red\n", "y.cfg"), doctest::Contains("unknown key 'colour'"),
                         ConfigError);
}

TEST_CASE("typed getters report the field and origin") {
    Settings s;
    s.set("snr_db", "loud", "--snr");
    CHECK_THROWS_WITH_AS((void)s.get_double("snr_db", 0.0), doctest::Contains("--snr: field 'snr_db'"),
                         ConfigError);
    s.set("trials", "-3", "cfg:4");
    CHECK_THROWS_AS((void)s.get_size("trials", 1), ConfigError);
    s.set("seed", "18446744073709551615", "--seed");
    CHECK(s.get_seed("seed", 0) == 18446744073709551615ULL);
    s.set("gaussian_source", "maybe", "cfg:1");
    CHECK_THROWS_AS((void)s.get_bool("gaussian_source", false), ConfigError);
    s.set("sweep_values", "1, 2.5,-3", "cfg:2");
    CHECK(s.get_doubles("sweep_values", {}) == std::vector<double>{1.0, 2.5, -3.0});
}

TEST_CASE("dump round-trips") {
    Settings s;
    s.merge_text("n_x = 128\nestimators = aml, ed\nsnr_db = -2.5\n", "c.cfg");
    Settings t;
    t.merge_text(s.dump(), "dump");
    CHECK(t.dump() == s.dump());
}

TEST_CASE("missing files are reported by path") {
    Settings s;
    CHECK_THROWS_WITH_AS(s.merge_file("/nonexistent/run.cfg"), doctest::Contains("/nonexistent/run.cfg"),
                         ConfigError);
    CHECK_THROWS_AS(load_preset(s, "no_such_preset"), ConfigError);
}

TEST_CASE("antenna pairs and delay ranges") {
    const auto p = parse_antenna_pair("2x4");
    CHECK(p.m_t == 2);
    CHECK(p.m_r == 4);
    CHECK_THROWS_AS(parse_antenna_pair("2by2"), ConfigError);
    CHECK_THROWS_AS(parse_antenna_pair("0x1"), ConfigError);
    const auto d = parse_delay_range("-30:30");
    CHECK(d.d_min == -30);
    CHECK(d.d_max == 30);
    CHECK(parse_delay_range("0,12").d_max == 12);
    CHECK_THROWS_AS(parse_delay_range("5:1"), ConfigError);
    CHECK_THROWS_AS(parse_delay_range("abc"), ConfigError);
}

TEST_CASE("every bundled preset builds a valid spec") {
    for (const auto& entry : std::filesystem::directory_iterator(preset_directory())) {
        if (entry.path().extension() != ".cfg") continue;
        const auto name = entry.path().stem().string();
        CAPTURE(name);
        Settings s;
        load_preset(s, name);
        if (name.rfind("table1", 0) == 0) {
            CHECK_NOTHROW(moment_from_settings(s));
        } else if (name == "profile") {
            CHECK_NOTHROW(scaling_from_settings(s));
        } else {
            CHECK_NOTHROW(experiment_from_settings(s));
        }
    }
}

TEST_CASE("base preset mirrors the simulation setup") {
    Settings s;
    load_preset(s, "fig2");
    const auto spec = experiment_from_settings(s);
    CHECK(spec.base.n_x == 512);
    CHECK(spec.base.n_z == 20);
    CHECK(spec.base.n_h == 10);
    CHECK(spec.base.n_blocks == 10);
    CHECK(spec.base.mod_order == 128);
    CHECK(spec.delays.d_min == -30);
    CHECK(spec.delays.d_max == 30);
    CHECK(spec.noise.components()[0].weight == doctest::Approx(0.99));
    CHECK(spec.noise.components()[1].variance / spec.noise.components()[0].variance == doctest::Approx(100.0));
    CHECK(spec.pdp[0] == doctest::Approx(1.0));
    CHECK(spec.pdp[1] == doctest::Approx(std::exp(-0.05)));
}

TEST_CASE("moment indices beyond one block are rejected") {
    Settings s;
    load_preset(s, "table1");
    s.set("moment_indices", "1, 532", "--k");
    CHECK_THROWS_AS(moment_from_settings(s), ConfigError);
}
