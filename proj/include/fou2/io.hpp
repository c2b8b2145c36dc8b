#ifndef FOU2_IO_HPP
#define FOU2_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fou2/types.hpp"

namespace fou2 {
namespace io {

// Fixed binary container for simulated ensembles.  Layout, in file order,
// all integers little-endian:
//   bytes 0..7   magic "FOU2ENS1"
//   u32          layout version (currently 1)
//   u64          n_paths
//   u64          n_steps          (payload columns = n_steps + 1, t = 0 included)
//   f64          dt
//   u64          seed
//   u64          config_len
//   config_len bytes of UTF-8 JSON (the full run configuration)
//   n_paths * (n_steps + 1) f64 payload, row-major
struct EnsembleData {
    Mat paths;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string config_json;
};

inline constexpr std::uint32_t kEnsembleLayoutVersion = 1;

// Writes the container above.  paths must have at least one row and two
// columns (the t = 0 column plus one step).  Throws std::invalid_argument on
// shape violations and std::runtime_error when the file cannot be written.
void write_ensemble(const std::string& path, const Mat& paths, double dt,
                    std::uint64_t seed, const std::string& config_json);

// Reads the container back, validating magic, layout version, header
// consistency, and exact payload size.  Throws std::runtime_error with a
// descriptive message on any malformed input.
EnsembleData read_ensemble(const std::string& path);

// Shortest decimal form that parses back to the same double (printf %.17g).
std::string format_double(double x);

// Writes a CSV table: one leading comment line (pass "" to omit), a header
// row, then the matrix rows with 17-significant-digit floats, comma
// separators, and LF line endings.  header.size() must equal rows.cols().
void write_csv(const std::string& path, const std::string& comment,
               const std::vector<std::string>& header, const Mat& rows);

// Writes a string verbatim (used for JSON summaries and reports).
void write_text(const std::string& path, const std::string& content);

// Reads a whole file into a string.  Throws std::runtime_error if missing.
std::string read_text(const std::string& path);

}  // namespace io
}  // namespace fou2

#endif
