#include "fou2/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fou2/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "the ensemble container is defined little-endian");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559,
              "the ensemble container stores IEEE-754 binary64 payloads");

namespace fou2 {
namespace io {

namespace {

constexpr std::size_t kMagicLen = 8;

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path, const char* field) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw std::runtime_error("read_ensemble: " + path + ": truncated before " +
                                 field);
    }
    return v;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return out;
}

}  // namespace

void write_ensemble(const std::string& path, const Mat& paths, double dt,
                    std::uint64_t seed, const std::string& config_json) {
    if (paths.rows() < 1 || paths.cols() < 2) {
        throw std::invalid_argument(
            "write_ensemble: paths must be n_paths x (n_steps + 1) with n_paths >= 1 "
            "and n_steps >= 1");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("write_ensemble: dt must be positive and finite");
    }

    std::ofstream out = open_out(path, std::ios::binary);
    out.write(kEnsembleMagic, kMagicLen);
    put<std::uint32_t>(out, kEnsembleLayoutVersion);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(paths.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(paths.cols() - 1));
    put<double>(out, dt);
    put<std::uint64_t>(out, seed);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(config_json.size()));
    out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));

    // Row-major payload; copy row by row so the column-major matrix never
    // needs a full transposed duplicate in memory.
    std::vector<double> row(static_cast<std::size_t>(paths.cols()));
    for (Eigen::Index i = 0; i < paths.rows(); ++i) {
        Eigen::Map<Eigen::RowVectorXd>(row.data(), paths.cols()) = paths.row(i);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write_ensemble: short write to " + path);
    }
}

EnsembleData read_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw std::runtime_error("read_ensemble: cannot open " + path);
    }
    const std::uint64_t file_size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);

    char magic[kMagicLen] = {};
    if (!in.read(magic, kMagicLen) || std::memcmp(magic, kEnsembleMagic, kMagicLen) != 0) {
        throw std::runtime_error("read_ensemble: " + path + ": bad magic, not a " +
                                 std::string(kEnsembleMagic) + " container");
    }
    const auto version = get<std::uint32_t>(in, path, "layout version");
    if (version != kEnsembleLayoutVersion) {
        throw std::runtime_error("read_ensemble: " + path + ": unsupported layout version " +
                                 std::to_string(version));
    }
    const auto n_paths = get<std::uint64_t>(in, path, "n_paths");
    const auto n_steps = get<std::uint64_t>(in, path, "n_steps");
    const auto dt = get<double>(in, path, "dt");
    const auto seed = get<std::uint64_t>(in, path, "seed");
    const auto config_len = get<std::uint64_t>(in, path, "config length");

    const std::uint64_t header_size = kMagicLen + 4 + 8 * 5;
    if (n_paths == 0 || n_steps == 0) {
        throw std::runtime_error("read_ensemble: " + path + ": empty ensemble header");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::runtime_error("read_ensemble: " + path + ": non-positive dt in header");
    }
    const std::uint64_t n_cols = n_steps + 1;
    if (n_paths > file_size || n_cols > file_size / sizeof(double) ||
        config_len > file_size) {
        throw std::runtime_error("read_ensemble: " + path +
                                 ": header sizes exceed the file size");
    }
    const std::uint64_t expect =
        header_size + config_len + n_paths * n_cols * sizeof(double);
    if (file_size != expect) {
        throw std::runtime_error("read_ensemble: " + path + ": expected " +
                                 std::to_string(expect) + " bytes, file has " +
                                 std::to_string(file_size));
    }

    EnsembleData data;
    data.dt = dt;
    data.seed = seed;
    data.config_json.resize(static_cast<std::size_t>(config_len));
    if (config_len > 0 &&
        !in.read(data.config_json.data(), static_cast<std::streamsize>(config_len))) {
        throw std::runtime_error("read_ensemble: " + path + ": truncated config block");
    }

    data.paths.resize(static_cast<Eigen::Index>(n_paths),
                      static_cast<Eigen::Index>(n_cols));
    std::vector<double> row(static_cast<std::size_t>(n_cols));
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        if (!in.read(reinterpret_cast<char*>(row.data()),
                     static_cast<std::streamsize>(row.size() * sizeof(double)))) {
            throw std::runtime_error("read_ensemble: " + path + ": truncated payload");
        }
        data.paths.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(row.data(),
                                                 static_cast<Eigen::Index>(n_cols));
    }
    return data;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const std::string& comment,
               const std::vector<std::string>& header, const Mat& rows) {
    if (static_cast<Eigen::Index>(header.size()) != rows.cols()) {
        throw std::invalid_argument("write_csv: header has " +
                                    std::to_string(header.size()) + " names for " +
                                    std::to_string(rows.cols()) + " columns");
    }
    std::ostringstream body;
    if (!comment.empty()) {
        body << "# " << comment << "\n";
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
        body << (j ? "," : "") << header[j];
    }
    body << "\n";
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            body << (j ? "," : "") << format_double(rows(i, j));
        }
        body << "\n";
    }
    write_text(path, body.str());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw std::runtime_error("write_text: short write to " + path);
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("read_text: cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace io
}  // namespace fou2
