#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fou2/io.hpp"
#include "fou2/version.hpp"

namespace fs = std::filesystem;
namespace io = fou2::io;
using nlohmann::json;

namespace {

// The toolkit binary under test: FOU2_CLI_PATH when set (the ctest harness
// sets it), otherwise the sibling "fou2" of this test executable.
std::string cli_path() {
    const char* env = std::getenv("FOU2_CLI_PATH");
    if (env != nullptr && *env != '\0') {
        return env;
    }
    std::error_code ec;
    const fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        const fs::path sibling = self.parent_path() / "fou2";
        if (fs::exists(sibling)) {
            return sibling.string();
        }
    }
    return "fou2";
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd =
        env_prefix + (env_prefix.empty() ? "" : " ") + "'" + cli_path() + "' " + args +
        " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

// Scratch directory per test run.
struct Scratch {
    fs::path dir;
    Scratch() : dir(fs::temp_directory_path() /
                    ("fou2_cli_test_" + std::to_string(::getpid()))) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = dir / name;
        io::write_text(p.string(), content);
        return p.string();
    }
    std::string sub(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::vector<double>> parse_csv_rows(const std::string& path,
                                                std::string* header = nullptr) {
    const std::string text = io::read_text(path);
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        const std::string line = text.substr(pos, end - pos);
        pos = end == std::string::npos ? text.size() : end + 1;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (header != nullptr) {
                *header = line;
            }
            continue;
        }
        std::vector<double> row;
        std::size_t c = 0;
        while (c <= line.size()) {
            const std::size_t comma = line.find(',', c);
            row.push_back(std::strtod(line.substr(c, comma - c).c_str(), nullptr));
            if (comma == std::string::npos) {
                break;
            }
            c = comma + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

const char* kOUParams = "\"params\":{\"alpha\":1.0,\"gamma\":1.0,\"lambda\":1.0}";

}  // namespace

TEST_CASE("eval emits the documented columns with closed-form values") {
    Scratch s;
    const std::string cfg = s.file(
        "eval.json", std::string("{\"schema_version\":1,") + kOUParams +
                         ",\"eval\":{\"kind\":\"variance\",\"t\":[0.5,1.0,2.0]}}");
    REQUIRE(run_cli("eval --config '" + cfg + "' --out '" + s.sub("ev") + "'") == 0);

    std::string header;
    const auto rows = parse_csv_rows(s.sub("ev") + "/eval.csv", &header);
    CHECK(header == "t,sigma2_series,sigma2_quadrature,U_t,D_t");
    const std::string text = io::read_text(s.sub("ev") + "/eval.csv");
    CHECK(text.rfind(std::string("# fou2 ") + fou2::kVersion + " config {", 0) == 0);

    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        const double t = r[0];
        const double closed = (1.0 - std::exp(-2.0 * t)) / 2.0;
        CHECK(r[1] == doctest::Approx(closed).epsilon(1e-12));
        CHECK(r[2] == doctest::Approx(r[1]).epsilon(1e-6));
        CHECK(r[3] == doctest::Approx(r[1]).epsilon(1e-14));
        CHECK(r[4] == doctest::Approx(std::exp(-2.0 * t) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("eval covariance mode pairs the two routes") {
    Scratch s;
    const std::string cfg = s.file(
        "eval.json",
        std::string("{\"schema_version\":1,") + kOUParams +
            ",\"eval\":{\"kind\":\"covariance\",\"t\":[1.5],\"s\":[0.5]}}");
    REQUIRE(run_cli("eval --config '" + cfg + "' --out '" + s.sub("ev") + "'") == 0);

    std::string header;
    const auto rows = parse_csv_rows(s.sub("ev") + "/eval.csv", &header);
    CHECK(header == "t,s,C_series,C_quadrature");
    REQUIRE(rows.size() == 1);
    const double closed = (std::exp(-1.0) - std::exp(-2.0)) / 2.0;
    CHECK(rows[0][2] == doctest::Approx(closed).epsilon(1e-10));
    CHECK(rows[0][3] == doctest::Approx(rows[0][2]).epsilon(1e-6));
}

TEST_CASE("config and usage errors exit with status 2") {
    Scratch s;
    const auto eval_cfg = [&](const std::string& body) {
        return s.file("bad.json", std::string("{\"schema_version\":1,") + kOUParams +
                                      ",\"eval\":" + body + "}");
    };

    CHECK(run_cli("eval --config '" +
                  eval_cfg("{\"kind\":\"variance\",\"t\":[]}") + "'") == 2);
    CHECK(run_cli("eval --config '" +
                  eval_cfg("{\"kind\":\"variance\",\"t\":[1.0],\"oops\":1}") + "'") == 2);
    CHECK(run_cli("eval --config '" +
                  s.file("bad.json", std::string("{\"schema_version\":1,\"zzz\":0,") +
                                         kOUParams +
                                         ",\"eval\":{\"kind\":\"variance\",\"t\":[1]}}") +
                  "'") == 2);
    CHECK(run_cli("eval --config '" +
                  s.file("bad.json", std::string("{\"schema_version\":7,") + kOUParams +
                                         ",\"eval\":{\"kind\":\"variance\",\"t\":[1]}}") +
                  "'") == 2);
    CHECK(run_cli("eval --config '" + s.sub("missing.json") + "'") == 2);
    CHECK(run_cli("eval --config '" + s.file("bad.json", "{ not json") + "'") == 2);
    CHECK(run_cli("eval") == 2);  // no config at all
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("verify --tier sometimes") == 2);

    const std::string fpe_cfg = s.file(
        "fpe.json", std::string("{\"schema_version\":1,") + kOUParams +
                        ",\"fpe\":{\"drift\":\"quadratic\",\"x_min\":-6,\"x_max\":6,"
                        "\"n_x\":101,\"t0\":0.1,\"t1\":1.0,\"n_t\":16}}");
    CHECK(run_cli("fpe --config '" + fpe_cfg + "'") == 2);

    const std::string sim_cfg = s.file(
        "sim.json", std::string("{\"schema_version\":1,") + kOUParams +
                        ",\"simulate\":{\"dt\":0.01,\"n_steps\":100,\"n_paths\":100,"
                        "\"seed\":1}}");
    CHECK(run_cli("simulate --config '" + sim_cfg + "' --out '" + s.sub("x") + "'",
                  "FOU2_MAX_CELLS=100") == 2);

    const std::string no_seed = s.file(
        "sim2.json", std::string("{\"schema_version\":1,") + kOUParams +
                         ",\"simulate\":{\"dt\":0.01,\"n_steps\":4,\"n_paths\":2}}");
    CHECK(run_cli("simulate --config '" + no_seed + "'") == 2);
}

TEST_CASE("numeric failures exit with status 3") {
    Scratch s;
    const std::string cfg = s.file(
        "stiff.json",
        "{\"schema_version\":1,\"params\":{\"alpha\":1.0,\"gamma\":1.0,\"lambda\":2.0},"
        "\"series\":{\"rel_tol\":1e-14},"
        "\"eval\":{\"kind\":\"covariance\",\"t\":[5.0],\"s\":[4.75]}}");
    CHECK(run_cli("eval --config '" + cfg + "' --out '" + s.sub("x") + "'") == 3);
}

TEST_CASE("simulate is deterministic, honors the seed flag, and summarizes variance") {
    Scratch s;
    const std::string cfg = s.file(
        "sim.json",
        "{\"schema_version\":1,\"params\":{\"alpha\":0.8,\"gamma\":0.9,\"lambda\":0.7},"
        "\"simulate\":{\"dt\":0.0625,\"n_steps\":16,\"n_paths\":8,\"seed\":7,"
        "\"csv\":true}}");

    REQUIRE(run_cli("simulate --config '" + cfg + "' --out '" + s.sub("a") + "'") == 0);
    REQUIRE(run_cli("simulate --config '" + cfg + "' --out '" + s.sub("b") + "'") == 0);
    CHECK(io::read_text(s.sub("a") + "/ensemble.bin") ==
          io::read_text(s.sub("b") + "/ensemble.bin"));
    CHECK(io::read_text(s.sub("a") + "/summary.json") ==
          io::read_text(s.sub("b") + "/summary.json"));

    REQUIRE(run_cli("simulate --config '" + cfg + "' --out '" + s.sub("c") +
                    "' --seed 8") == 0);
    CHECK(io::read_text(s.sub("a") + "/ensemble.bin") !=
          io::read_text(s.sub("c") + "/ensemble.bin"));

    const auto ens = io::read_ensemble(s.sub("a") + "/ensemble.bin");
    CHECK(ens.paths.rows() == 8);
    CHECK(ens.paths.cols() == 17);
    CHECK(ens.paths.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ens.dt == 0.0625);
    CHECK(ens.seed == 7);
    CHECK(json::parse(ens.config_json)["simulate"]["seed"] == 7);
    CHECK(json::parse(io::read_ensemble(s.sub("c") + "/ensemble.bin").config_json)
              ["simulate"]["seed"] == 8);

    const json summary = json::parse(io::read_text(s.sub("a") + "/summary.json"));
    CHECK(summary["version"] == fou2::kVersion);
    CHECK(summary["se_applicable"] == true);
    REQUIRE(summary["variance"].is_array());
    REQUIRE(summary["variance"].size() == 16);
    for (const auto& entry : summary["variance"]) {
        CHECK(entry["se"].is_number());
        CHECK(entry["within_3se"].is_boolean());
        CHECK(entry["analytic"].get<double>() > 0.0);
    }

    const auto csv = parse_csv_rows(s.sub("a") + "/ensemble.csv");
    CHECK(csv.size() == 8 * 17);
}

TEST_CASE("single-path summaries mark the standard error not applicable") {
    Scratch s;
    const std::string cfg = s.file(
        "sim.json",
        "{\"schema_version\":1,\"params\":{\"alpha\":0.8,\"gamma\":0.9,\"lambda\":0.7},"
        "\"simulate\":{\"dt\":0.125,\"n_steps\":8,\"n_paths\":1,\"seed\":3}}");
    REQUIRE(run_cli("simulate --config '" + cfg + "' --out '" + s.sub("one") + "'") == 0);
    const json summary = json::parse(io::read_text(s.sub("one") + "/summary.json"));
    CHECK(summary["se_applicable"] == false);
    CHECK(summary["all_within_3se"].is_null());
    for (const auto& entry : summary["variance"]) {
        CHECK(entry["se"].is_null());
        CHECK(entry["within_3se"].is_null());
    }
}

TEST_CASE("fpe emits snapshots and an error report") {
    Scratch s;
    const std::string cfg = s.file(
        "fpe.json", std::string("{\"schema_version\":1,") + kOUParams +
                        ",\"fpe\":{\"drift\":\"free\",\"x_min\":-6,\"x_max\":6,"
                        "\"n_x\":201,\"t0\":0.1,\"t1\":0.5,\"n_t\":32}}");
    REQUIRE(run_cli("fpe --config '" + cfg + "' --out '" + s.sub("fp") + "'") == 0);

    std::string header;
    const auto rows = parse_csv_rows(s.sub("fp") + "/snapshot_0.csv", &header);
    CHECK(header == "x,P");
    CHECK(rows.size() == 201);

    const json report = json::parse(io::read_text(s.sub("fp") + "/report.json"));
    CHECK(report["version"] == fou2::kVersion);
    CHECK(report["drift"] == "free");
    REQUIRE(report["snapshots"].size() == 1);
    const auto& snap = report["snapshots"][0];
    CHECK(snap["t"].get<double>() == 0.5);
    CHECK(snap["mass"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(snap["l1_vs_analytic"].get<double>() < 5e-3);
    CHECK(snap["analytic_variance"].get<double>() ==
          doctest::Approx((1.0 - std::exp(-1.0)) / 2.0).epsilon(1e-12));
    CHECK(report["max_mass_drift"].get<double>() < 1e-12);
}

TEST_CASE("verify quick tier passes and writes its report") {
    Scratch s;
    REQUIRE(run_cli("verify --tier quick --out '" + s.sub("v") + "'") == 0);
    const json report = json::parse(io::read_text(s.sub("v") + "/verify_report.json"));
    CHECK(report["tier"] == "quick");
    CHECK(report["all_pass"] == true);
    REQUIRE(report["checks"].size() == 7);
    for (const auto& c : report["checks"]) {
        CHECK(c["pass"] == true);
        CHECK(c["id"].is_string());
        CHECK(c["measured"].is_number());
        CHECK(c["bound"].is_number());
    }
}
