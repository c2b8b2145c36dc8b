// fou2: command-line front end of the two-index fractional relaxation toolkit.
//
// Subcommands: eval | simulate | fpe | verify.  One JSON config per run
// (schema_version 1, unknown keys rejected); CSV for tables, JSON for
// summaries, a fixed binary container for ensembles.  Every emitted file
// embeds the toolkit version and the full run configuration.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fou2/fpe.hpp"
#include "fou2/io.hpp"
#include "fou2/kernel.hpp"
#include "fou2/langevin.hpp"
#include "fou2/process.hpp"
#include "fou2/verify.hpp"
#include "fou2/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// Config-shape violations; distinct from numeric failures so main can map
// them to the documented exit codes.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
    std::optional<std::uint64_t> seed_override;
    std::string tier = "quick";
};

json load_config(const std::string& path) {
    if (path.empty()) {
        throw ConfigError("--config <path> is required for this subcommand");
    }
    std::string text;
    try {
        text = fou2::io::read_text(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    if (!cfg.is_object()) {
        throw ConfigError("config " + path + ": top level must be a JSON object");
    }
    return cfg;
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

void require_schema_version(const json& cfg) {
    if (!cfg.contains("schema_version") || !cfg["schema_version"].is_number_integer()) {
        throw ConfigError("config: integer 'schema_version' is required");
    }
    if (cfg["schema_version"].get<int>() != 1) {
        throw ConfigError("config: unsupported schema_version " +
                          cfg["schema_version"].dump() + " (this build reads 1)");
    }
}

double get_num(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw ConfigError(where + ": numeric '" + key + "' is required");
    }
    return obj[key].get<double>();
}

std::int64_t get_int(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        throw ConfigError(where + ": integer '" + key + "' is required");
    }
    return obj[key].get<std::int64_t>();
}

fou2::ProcessParams parse_params(const json& cfg) {
    if (!cfg.contains("params") || !cfg["params"].is_object()) {
        throw ConfigError("config: object 'params' is required");
    }
    const json& p = cfg["params"];
    reject_unknown_keys(p, "params", {"alpha", "gamma", "lambda"});
    try {
        return fou2::ProcessParams(get_num(p, "params", "alpha"),
                                   get_num(p, "params", "gamma"),
                                   get_num(p, "params", "lambda"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
}

fou2::SeriesControl parse_series_control(const json& cfg) {
    fou2::SeriesControl ctl;
    if (!cfg.contains("series")) {
        return ctl;
    }
    const json& s = cfg["series"];
    reject_unknown_keys(s, "series", {"rel_tol", "max_terms"});
    if (s.contains("rel_tol")) {
        ctl.rel_tol = get_num(s, "series", "rel_tol");
    }
    if (s.contains("max_terms")) {
        ctl.max_terms = static_cast<int>(get_int(s, "series", "max_terms"));
    }
    if (!(ctl.rel_tol > 0.0) || ctl.max_terms < 1) {
        throw ConfigError("series: rel_tol must be > 0 and max_terms >= 1");
    }
    return ctl;
}

std::string file_comment(const json& cfg) {
    return std::string("fou2 ") + fou2::kVersion + " config " + cfg.dump();
}

fs::path prepare_out_dir(const std::string& out_dir) {
    fs::path dir(out_dir);
    fs::create_directories(dir);
    return dir;
}

std::uint64_t max_cells_from_env() {
    const char* env = std::getenv("FOU2_MAX_CELLS");
    if (env == nullptr || *env == '\0') {
        return fou2::langevin::kDefaultMaxCells;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
        throw ConfigError(std::string("FOU2_MAX_CELLS: not a positive integer: '") +
                          env + "'");
    }
    return v;
}

// JSON writer for summaries/reports: manual rendering keeps every float at
// 17 significant digits, matching the CSV convention.
class JsonWriter {
  public:
    void key(const std::string& k) { pre(); out_ << '"' << k << "\":"; last_was_key_ = true; }
    void open_obj() { pre(); out_ << '{'; fresh_ = true; }
    void close_obj() { out_ << '}'; fresh_ = false; }
    void open_arr() { pre(); out_ << '['; fresh_ = true; }
    void close_arr() { out_ << ']'; fresh_ = false; }
    void num(double v) { pre(); out_ << fou2::io::format_double(v); }
    void num(std::uint64_t v) { pre(); out_ << v; }
    void num(std::int64_t v) { pre(); out_ << v; }
    void boolean(bool v) { pre(); out_ << (v ? "true" : "false"); }
    void null() { pre(); out_ << "null"; }
    void str(const std::string& s) { pre(); out_ << json(s).dump(); }
    void raw(const std::string& s) { pre(); out_ << s; }
    std::string take() { return out_.str() + "\n"; }

  private:
    void pre() {
        if (last_was_key_) {
            last_was_key_ = false;
            return;
        }
        if (!fresh_) {
            out_ << ',';
        }
        fresh_ = false;
    }
    std::ostringstream out_;
    bool fresh_ = true;
    bool last_was_key_ = false;
};

// --- eval ----------------------------------------------------------------

int cmd_eval(const CommonOpts& opts) {
    const json cfg = load_config(opts.config_path);
    reject_unknown_keys(cfg, "config", {"schema_version", "params", "series", "eval"});
    require_schema_version(cfg);
    const fou2::ProcessParams p = parse_params(cfg);
    const fou2::SeriesControl ctl = parse_series_control(cfg);

    if (!cfg.contains("eval") || !cfg["eval"].is_object()) {
        throw ConfigError("config: object 'eval' is required for the eval subcommand");
    }
    const json& ev = cfg["eval"];
    reject_unknown_keys(ev, "eval", {"kind", "t", "s", "n_nodes"});
    const std::string kind =
        ev.contains("kind") && ev["kind"].is_string() ? ev["kind"].get<std::string>() : "";
    if (kind != "variance" && kind != "covariance") {
        throw ConfigError("eval: 'kind' must be \"variance\" or \"covariance\"");
    }
    if (!ev.contains("t") || !ev["t"].is_array() || ev["t"].empty()) {
        throw ConfigError("eval: non-empty array 't' is required");
    }
    const std::vector<double> ts = ev["t"].get<std::vector<double>>();
    int n_nodes = 576;
    if (ev.contains("n_nodes")) {
        n_nodes = static_cast<int>(get_int(ev, "eval", "n_nodes"));
    }

    const fs::path dir = prepare_out_dir(opts.out_dir);
    fou2::Mat rows;
    std::vector<std::string> header;

    if (kind == "variance") {
        if (ev.contains("s")) {
            throw ConfigError("eval: 's' is only valid for kind \"covariance\"");
        }
        header = {"t", "sigma2_series", "sigma2_quadrature", "U_t", "D_t"};
        rows.resize(static_cast<Eigen::Index>(ts.size()), 5);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double t = ts[i];
            try {
                rows(static_cast<Eigen::Index>(i), 0) = t;
                rows(static_cast<Eigen::Index>(i), 1) = fou2::kernel::variance_series(p, t, ctl);
                rows(static_cast<Eigen::Index>(i), 2) =
                    fou2::kernel::variance_quadrature(p, t, n_nodes, ctl);
                rows(static_cast<Eigen::Index>(i), 3) = fou2::kernel::u_of_beta(p, t, ctl);
                rows(static_cast<Eigen::Index>(i), 4) = fou2::kernel::diffusion_coeff(p, t, ctl);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "eval: failure at t=%s: %s\n",
                             fou2::io::format_double(t).c_str(), e.what());
                throw;
            }
        }
    } else {
        if (!ev.contains("s") || !ev["s"].is_array() ||
            ev["s"].size() != ev["t"].size()) {
            throw ConfigError("eval: array 's' with the same length as 't' is required");
        }
        const std::vector<double> ss = ev["s"].get<std::vector<double>>();
        header = {"t", "s", "C_series", "C_quadrature"};
        rows.resize(static_cast<Eigen::Index>(ts.size()), 4);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            try {
                rows(static_cast<Eigen::Index>(i), 0) = ts[i];
                rows(static_cast<Eigen::Index>(i), 1) = ss[i];
                rows(static_cast<Eigen::Index>(i), 2) =
                    fou2::kernel::covariance_series(p, ts[i], ss[i], ctl);
                rows(static_cast<Eigen::Index>(i), 3) =
                    fou2::kernel::covariance_quadrature(p, ts[i], ss[i], n_nodes, ctl);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "eval: failure at t=%s, s=%s: %s\n",
                             fou2::io::format_double(ts[i]).c_str(),
                             fou2::io::format_double(ss[i]).c_str(), e.what());
                throw;
            }
        }
    }

    fou2::io::write_csv((dir / "eval.csv").string(), file_comment(cfg), header, rows);
    std::printf("wrote %s\n", (dir / "eval.csv").c_str());
    return kExitOk;
}

// --- simulate --------------------------------------------------------------

fou2::langevin::KernelScheme parse_scheme(const std::string& name) {
    using fou2::langevin::KernelScheme;
    if (name == "midpoint") return KernelScheme::midpoint;
    if (name == "cell_integrated") return KernelScheme::cell_integrated;
    if (name == "first_cell_rms") return KernelScheme::first_cell_rms;
    if (name == "operator_inverse") return KernelScheme::operator_inverse;
    throw ConfigError("simulate: unknown scheme '" + name +
                      "' (midpoint, cell_integrated, first_cell_rms, operator_inverse)");
}

int cmd_simulate(const CommonOpts& opts) {
    json cfg = load_config(opts.config_path);
    reject_unknown_keys(cfg, "config", {"schema_version", "params", "series", "simulate"});
    require_schema_version(cfg);
    const fou2::ProcessParams p = parse_params(cfg);

    if (!cfg.contains("simulate") || !cfg["simulate"].is_object()) {
        throw ConfigError("config: object 'simulate' is required for the simulate subcommand");
    }
    json& sim = cfg["simulate"];
    reject_unknown_keys(sim, "simulate",
                        {"dt", "n_steps", "n_paths", "seed", "scheme", "csv"});
    const double dt = get_num(sim, "simulate", "dt");
    const std::int64_t n_steps = get_int(sim, "simulate", "n_steps");
    const std::int64_t n_paths = get_int(sim, "simulate", "n_paths");
    if (opts.seed_override.has_value()) {
        sim["seed"] = *opts.seed_override;  // effective seed is part of the config
    }
    if (!sim.contains("seed") || !sim["seed"].is_number_integer()) {
        throw ConfigError("simulate: integer 'seed' is required (or pass --seed)");
    }
    const std::uint64_t seed = sim["seed"].get<std::uint64_t>();
    const std::string scheme_name =
        sim.contains("scheme") ? sim["scheme"].get<std::string>() : "cell_integrated";
    const auto scheme = parse_scheme(scheme_name);
    const bool want_csv = sim.contains("csv") && sim["csv"].is_boolean() &&
                          sim["csv"].get<bool>();
    if (n_steps < 1 || n_paths < 1) {
        throw ConfigError("simulate: n_steps and n_paths must be >= 1");
    }
    const std::uint64_t max_cells = max_cells_from_env();

    const fs::path dir = prepare_out_dir(opts.out_dir);
    std::optional<fou2::langevin::PathEnsemble> ens_opt;
    try {
        ens_opt = fou2::langevin::simulate(p, dt, static_cast<int>(n_steps),
                                           static_cast<int>(n_paths), seed, scheme,
                                           opts.threads, max_cells);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }
    const fou2::langevin::PathEnsemble& ens = *ens_opt;

    fou2::io::write_ensemble((dir / "ensemble.bin").string(), ens.paths, ens.dt,
                             ens.seed, cfg.dump());

    if (want_csv) {
        const std::uint64_t cells =
            static_cast<std::uint64_t>(n_paths) * static_cast<std::uint64_t>(n_steps + 1);
        if (cells > 1000000ull) {
            throw ConfigError("simulate: csv output is limited to 1e6 samples; "
                              "got " + std::to_string(cells));
        }
        fou2::Mat rows(static_cast<Eigen::Index>(cells), 3);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < ens.paths.rows(); ++i) {
            for (Eigen::Index k = 0; k < ens.paths.cols(); ++k, ++r) {
                rows(r, 0) = static_cast<double>(i);
                rows(r, 1) = static_cast<double>(k) * dt;
                rows(r, 2) = ens.paths(i, k);
            }
        }
        fou2::io::write_csv((dir / "ensemble.csv").string(), file_comment(cfg),
                            {"path", "t", "x"}, rows);
    }

    // Summary: sample variance with standard errors against the analytic
    // variance, on the full grid up to 128 steps and subsampled above.
    const int stride = n_steps <= 128 ? 1 : static_cast<int>((n_steps + 31) / 32);
    std::vector<int> idx;
    for (int k = stride; k < n_steps; k += stride) {
        idx.push_back(k);
    }
    idx.push_back(static_cast<int>(n_steps));
    const bool se_ok = n_paths >= 2;

    JsonWriter w;
    w.open_obj();
    w.key("version"); w.str(fou2::kVersion);
    w.key("config"); w.raw(cfg.dump());
    w.key("scheme"); w.str(scheme_name);
    w.key("se_applicable"); w.boolean(se_ok);
    w.key("variance");
    w.open_arr();
    bool all_within = true;
    for (int k : idx) {
        const double analytic = fou2::kernel::variance_series(p, k * dt);
        w.open_obj();
        w.key("t"); w.num(k * dt);
        if (se_ok) {
            const auto est = fou2::langevin::sample_covariance(ens, k, k);
            const bool within = std::abs(est.value - analytic) <= 3.0 * est.se;
            all_within = all_within && within;
            w.key("sample"); w.num(est.value);
            w.key("analytic"); w.num(analytic);
            w.key("se"); w.num(est.se);
            w.key("within_3se"); w.boolean(within);
        } else {
            // One path: the squared sample is the only variance estimate and
            // carries no standard error.
            w.key("sample"); w.num(ens.paths(0, k) * ens.paths(0, k));
            w.key("analytic"); w.num(analytic);
            w.key("se"); w.null();
            w.key("within_3se"); w.null();
        }
        w.close_obj();
    }
    w.close_arr();
    w.key("all_within_3se");
    if (se_ok) {
        w.boolean(all_within);
    } else {
        w.null();
    }
    w.close_obj();
    fou2::io::write_text((dir / "summary.json").string(), w.take());

    std::printf("wrote %s and %s\n", (dir / "ensemble.bin").c_str(),
                (dir / "summary.json").c_str());
    return kExitOk;
}

// --- fpe --------------------------------------------------------------------

int cmd_fpe(const CommonOpts& opts) {
    const json cfg = load_config(opts.config_path);
    reject_unknown_keys(cfg, "config", {"schema_version", "params", "series", "fpe"});
    require_schema_version(cfg);
    const fou2::ProcessParams p = parse_params(cfg);

    if (!cfg.contains("fpe") || !cfg["fpe"].is_object()) {
        throw ConfigError("config: object 'fpe' is required for the fpe subcommand");
    }
    const json& f = cfg["fpe"];
    reject_unknown_keys(f, "fpe",
                        {"drift", "g", "omega", "x0", "x_min", "x_max", "n_x", "t0",
                         "t1", "n_t", "snapshot_times"});

    const std::string drift_kind =
        f.contains("drift") && f["drift"].is_string() ? f["drift"].get<std::string>() : "";
    fou2::fpe::DriftSpec drift = fou2::fpe::DriftSpec::make_free();
    if (drift_kind == "free") {
        // already the free drift
    } else if (drift_kind == "linear") {
        drift = fou2::fpe::DriftSpec::make_linear(get_num(f, "fpe", "g"));
    } else if (drift_kind == "harmonic") {
        drift = fou2::fpe::DriftSpec::make_harmonic(get_num(f, "fpe", "omega"));
    } else {
        throw ConfigError("fpe: 'drift' must be \"free\", \"linear\", or \"harmonic\"");
    }

    const double x0 = f.contains("x0") ? get_num(f, "fpe", "x0") : 0.0;
    const double x_min = get_num(f, "fpe", "x_min");
    const double x_max = get_num(f, "fpe", "x_max");
    const int n_x = static_cast<int>(get_int(f, "fpe", "n_x"));
    const double t0 = get_num(f, "fpe", "t0");
    const double t1 = get_num(f, "fpe", "t1");
    const int n_t = static_cast<int>(get_int(f, "fpe", "n_t"));

    std::vector<double> snaps{t1};
    if (f.contains("snapshot_times")) {
        if (!f["snapshot_times"].is_array() || f["snapshot_times"].empty()) {
            throw ConfigError("fpe: 'snapshot_times' must be a non-empty array");
        }
        snaps = f["snapshot_times"].get<std::vector<double>>();
        for (double s : snaps) {
            if (!(s > t0) || !(s <= t1)) {
                throw ConfigError("fpe: snapshot times must lie in (t0, t1]");
            }
        }
    }

    const fs::path dir = prepare_out_dir(opts.out_dir);
    JsonWriter rep;
    rep.open_obj();
    rep.key("version"); rep.str(fou2::kVersion);
    rep.key("config"); rep.raw(cfg.dump());
    rep.key("drift"); rep.str(drift_kind);
    rep.key("snapshots");
    rep.open_arr();
    double worst_mass_drift = 0.0;

    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const double t_end = snaps[i];
        const int n_t_i = std::max(
            1, static_cast<int>(std::lround(n_t * (t_end - t0) / (t1 - t0))));
        fou2::fpe::Grid1D grid(x_min, x_max, n_x, t0, t_end, n_t_i);
        fou2::fpe::EvolveStats stats;
        fou2::fpe::DensityField rho;
        try {
            rho = fou2::fpe::evolve(p, grid, drift, x0, &stats);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("fpe: ") + e.what());
        }
        worst_mass_drift = std::max(worst_mass_drift, stats.max_mass_drift);

        const double dx = grid.dx();
        fou2::Mat table(n_x, 2);
        double mass = 0.0, mean = 0.0, m2 = 0.0, l1 = 0.0;
        for (int k = 0; k < n_x; ++k) {
            const double x = grid.node(k);
            table(k, 0) = x;
            table(k, 1) = rho.values[k];
            const double wt = (k == 0 || k == n_x - 1) ? 0.5 : 1.0;
            mass += wt * rho.values[k];
            mean += wt * rho.values[k] * x;
            m2 += wt * rho.values[k] * x * x;
        }
        mass *= dx; mean *= dx; m2 *= dx;
        mean /= mass; m2 /= mass;

        const std::string snap_name = "snapshot_" + std::to_string(i) + ".csv";
        fou2::io::write_csv((dir / snap_name).string(), file_comment(cfg), {"x", "P"},
                            table);

        rep.open_obj();
        rep.key("t"); rep.num(t_end);
        rep.key("file"); rep.str(snap_name);
        rep.key("mass"); rep.num(mass);
        rep.key("mean"); rep.num(mean);
        rep.key("variance"); rep.num(m2 - mean * mean);
        rep.key("mass_drift"); rep.num(stats.max_mass_drift);
        if (drift.kind == fou2::fpe::DriftSpec::Kind::free) {
            for (int k = 0; k < n_x; ++k) {
                l1 += std::abs(rho.values[k] -
                               fou2::fpe::analytic_density(p, t_end, x0, grid.node(k)));
            }
            rep.key("l1_vs_analytic"); rep.num(l1 * dx);
            rep.key("analytic_variance"); rep.num(fou2::kernel::variance_series(p, t_end));
        }
        rep.close_obj();
    }
    rep.close_arr();
    rep.key("max_mass_drift"); rep.num(worst_mass_drift);
    rep.close_obj();
    fou2::io::write_text((dir / "report.json").string(), rep.take());

    std::printf("wrote %zu snapshot(s) and %s\n", snaps.size(),
                (dir / "report.json").c_str());
    return kExitOk;
}

// --- verify -------------------------------------------------------------------

std::string self_path(const char* argv0) {
    std::error_code ec;
    const fs::path link = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        return link.string();
    }
    return argv0 ? argv0 : "";
}

int cmd_verify(const CommonOpts& opts, const char* argv0) {
    std::string tier_name = opts.tier;
    if (!opts.config_path.empty()) {
        const json cfg = load_config(opts.config_path);
        reject_unknown_keys(cfg, "config", {"schema_version", "verify"});
        require_schema_version(cfg);
        if (cfg.contains("verify")) {
            reject_unknown_keys(cfg["verify"], "verify", {"tier"});
            if (cfg["verify"].contains("tier")) {
                tier_name = cfg["verify"]["tier"].get<std::string>();
            }
        }
    }
    fou2::verify::Tier tier;
    if (tier_name == "quick") {
        tier = fou2::verify::Tier::quick;
    } else if (tier_name == "full") {
        tier = fou2::verify::Tier::full;
    } else {
        throw ConfigError("verify: tier must be \"quick\" or \"full\", got '" +
                          tier_name + "'");
    }

    const fs::path dir = prepare_out_dir(opts.out_dir);
    std::printf("%-26s %-6s %-13s %-13s %s\n", "check", "status", "measured",
                "bound", "time");
    bool all_pass = true;
    JsonWriter rep;
    rep.open_obj();
    rep.key("version"); rep.str(fou2::kVersion);
    rep.key("tier"); rep.str(tier_name);
    rep.key("checks");
    rep.open_arr();
    for (const std::string& id : fou2::verify::check_ids(tier)) {
        const auto r = fou2::verify::run_check(id, self_path(argv0), opts.threads);
        all_pass = all_pass && r.pass;
        std::printf("%-26s %-6s %-13.6g %-13.6g %.2f s\n", r.id.c_str(),
                    r.pass ? "PASS" : "FAIL", r.measured, r.bound, r.runtime_s);
        if (!r.pass) {
            std::printf("  detail: %s\n", r.detail.c_str());
        }
        rep.open_obj();
        rep.key("id"); rep.str(r.id);
        rep.key("pass"); rep.boolean(r.pass);
        rep.key("measured"); rep.num(r.measured);
        rep.key("bound"); rep.num(r.bound);
        rep.key("runtime_s"); rep.num(r.runtime_s);
        rep.key("detail"); rep.str(r.detail);
        rep.close_obj();
    }
    rep.close_arr();
    rep.key("all_pass"); rep.boolean(all_pass);
    rep.close_obj();
    fou2::io::write_text((dir / "verify_report.json").string(), rep.take());

    std::printf("%s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
    return all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("fou2 ") + fou2::kVersion +
                 ": numerical toolkit for the two-index fractional relaxation process"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::uint64_t seed_flag = 0;

    CLI::App* eval = app.add_subcommand("eval", "evaluate variance/covariance tables");
    CLI::App* simulate = app.add_subcommand("simulate", "sample process paths");
    CLI::App* fpe = app.add_subcommand("fpe", "solve the effective diffusion equation");
    CLI::App* verify = app.add_subcommand("verify", "run the self-check suite");

    for (CLI::App* sub : {eval, simulate, fpe, verify}) {
        sub->add_option("--config", opts.config_path, "JSON run configuration");
        sub->add_option("--out", opts.out_dir, "output directory (default .)");
        sub->add_option("--threads", opts.threads, "worker threads")
            ->check(CLI::Range(1, 256));
    }
    CLI::Option* seed_opt =
        simulate->add_option("--seed", seed_flag, "override the config seed");
    verify->add_option("--tier", opts.tier, "quick|full")
        ->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    if (seed_opt->count() > 0) {
        opts.seed_override = seed_flag;
    }

    try {
        if (eval->parsed()) return cmd_eval(opts);
        if (simulate->parsed()) return cmd_simulate(opts);
        if (fpe->parsed()) return cmd_fpe(opts);
        return cmd_verify(opts, argv[0]);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "fou2: config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fou2: numeric failure: %s\n", e.what());
        return kExitNumeric;
    }
}
