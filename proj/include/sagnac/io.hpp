#pragma once

// File interchange: interferogram CSV with a JSON metadata sidecar, and JSON
// reports for fits, ensembles and dispersion-slope sweeps.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sagnac/acquisition.hpp"
#include "sagnac/estimator.hpp"

namespace sagnac {

/// Malformed input file. `row` is 1-based (header = row 1); 0 when not row-specific.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::size_t row = 0);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

inline constexpr const char* kInterferogramHeader = "lambda_s_m,lambda_i_m,coincidences,singles_s,singles_i";

/// Shortest round-trip decimal representation.
std::string format_number(double v);

void write_interferogram_csv(std::ostream& out, const Interferogram& data);
/// Reads the point table; metadata fields stay at their defaults.
Interferogram read_interferogram_csv(std::istream& in);

nlohmann::ordered_json metadata_json(const Interferogram& data);
/// Fills pump, dwell, seed and truth from a sidecar object.
void apply_metadata(const nlohmann::json& meta, Interferogram& data);

/// `foo.csv` -> `foo.json`; other names get `.json` appended.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
/// `out.json` + "runs", "csv" -> `out_runs.csv`.
std::filesystem::path derived_path(const std::filesystem::path& base, const std::string& suffix,
                                   const std::string& extension);

nlohmann::ordered_json to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const NormalizedFringe& fringe);
NormalizedFringe fringe_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const EnsembleStats& stats);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};
/// Equal-width bins over [min, max]; `bins` = 0 uses the square-root rule.
Histogram make_histogram(std::span<const double> values, std::size_t bins = 0);

nlohmann::ordered_json to_json(const TodResult& tod);
TodResult tod_from_json(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sagnac
