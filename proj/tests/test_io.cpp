#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "fou2/io.hpp"
#include "fou2/langevin.hpp"
#include "fou2/version.hpp"

namespace io = fou2::io;
namespace fs = std::filesystem;
using fou2::Mat;

namespace {

fs::path tmp_file(const std::string& name) {
    return fs::temp_directory_path() / ("fou2_io_test_" + name);
}

void corrupt_byte(const fs::path& path, std::streamoff offset, char value) {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    REQUIRE(f.good());
    f.seekp(offset);
    f.write(&value, 1);
}

}  // namespace

TEST_CASE("ensemble container roundtrips bitwise") {
    const fou2::ProcessParams p(0.8, 0.9, 0.7);
    const auto ens = fou2::langevin::simulate(p, 1e-2, 16, 4, 12345);
    const std::string config = "{\"schema_version\":1,\"seed\":12345}";
    const auto path = tmp_file("roundtrip.bin");

    io::write_ensemble(path.string(), ens.paths, ens.dt, ens.seed, config);
    const auto back = io::read_ensemble(path.string());

    CHECK(back.dt == ens.dt);
    CHECK(back.seed == ens.seed);
    CHECK(back.config_json == config);
    REQUIRE(back.paths.rows() == ens.paths.rows());
    REQUIRE(back.paths.cols() == ens.paths.cols());
    CHECK((back.paths.array() == ens.paths.array()).all());

    SUBCASE("the header layout is the documented fixed one") {
        const std::uint64_t expect =
            8 + 4 + 8 * 5 + config.size() +
            static_cast<std::uint64_t>(ens.paths.size()) * sizeof(double);
        CHECK(fs::file_size(path) == expect);
        std::ifstream f(path, std::ios::binary);
        char magic[9] = {};
        f.read(magic, 8);
        CHECK(std::string(magic) == fou2::kEnsembleMagic);
    }
    fs::remove(path);
}

TEST_CASE("ensemble reader rejects malformed containers") {
    Mat m(2, 3);
    m << 0.0, 1.0, 2.0, 0.0, -1.0, -2.0;
    const std::string config = "{}";

    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::read_ensemble(tmp_file("nope.bin").string()),
                        std::runtime_error);
    }

    SUBCASE("bad magic") {
        const auto path = tmp_file("magic.bin");
        io::write_ensemble(path.string(), m, 0.5, 7, config);
        corrupt_byte(path, 0, 'X');
        CHECK_THROWS_WITH_AS(io::read_ensemble(path.string()),
                             doctest::Contains("bad magic"), std::runtime_error);
        fs::remove(path);
    }

    SUBCASE("unsupported layout version") {
        const auto path = tmp_file("version.bin");
        io::write_ensemble(path.string(), m, 0.5, 7, config);
        corrupt_byte(path, 8, 99);
        CHECK_THROWS_WITH_AS(io::read_ensemble(path.string()),
                             doctest::Contains("layout version"), std::runtime_error);
        fs::remove(path);
    }

    SUBCASE("truncated payload") {
        const auto path = tmp_file("trunc.bin");
        io::write_ensemble(path.string(), m, 0.5, 7, config);
        fs::resize_file(path, fs::file_size(path) - 9);
        CHECK_THROWS_AS(io::read_ensemble(path.string()), std::runtime_error);
        fs::remove(path);
    }

    SUBCASE("truncated header") {
        const auto path = tmp_file("header.bin");
        io::write_ensemble(path.string(), m, 0.5, 7, config);
        fs::resize_file(path, 20);
        CHECK_THROWS_AS(io::read_ensemble(path.string()), std::runtime_error);
        fs::remove(path);
    }

    SUBCASE("config length pointing past the end") {
        const auto path = tmp_file("cfglen.bin");
        io::write_ensemble(path.string(), m, 0.5, 7, config);
        corrupt_byte(path, 8 + 4 + 8 * 4, '\x7f');  // low byte of config_len
        CHECK_THROWS_AS(io::read_ensemble(path.string()), std::runtime_error);
        fs::remove(path);
    }

    SUBCASE("writer shape and dt validation") {
        Mat one_col(2, 1);
        one_col << 0.0, 0.0;
        CHECK_THROWS_AS(
            io::write_ensemble(tmp_file("bad.bin").string(), one_col, 0.5, 7, config),
            std::invalid_argument);
        CHECK_THROWS_AS(io::write_ensemble(tmp_file("bad.bin").string(), m, 0.0, 7, config),
                        std::invalid_argument);
    }
}

TEST_CASE("doubles print with 17 significant digits and parse back exactly") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.0,
                     0.49999999999999994}) {
        const std::string s = io::format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
    CHECK(io::format_double(2.0) == "2");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV writer emits comment, header, and LF-only rows") {
    Mat rows(2, 2);
    rows << 0.5, 1.0, 0.1, -2.25;
    const auto path = tmp_file("table.csv");
    io::write_csv(path.string(), "fou2 1.0.0 config {}", {"t", "value"}, rows);

    const std::string text = io::read_text(path.string());
    CHECK(text ==
          "# fou2 1.0.0 config {}\n"
          "t,value\n"
          "0.5,1\n"
          "0.10000000000000001,-2.25\n");
    CHECK(text.find('\r') == std::string::npos);

    SUBCASE("comment line is optional") {
        io::write_csv(path.string(), "", {"t", "value"}, rows);
        CHECK(io::read_text(path.string()).rfind("t,value\n", 0) == 0);
    }

    SUBCASE("header arity must match the column count") {
        CHECK_THROWS_AS(io::write_csv(path.string(), "", {"t"}, rows),
                        std::invalid_argument);
    }
    fs::remove(path);
}
