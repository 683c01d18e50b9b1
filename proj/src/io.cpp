#include "sagnac/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sagnac {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_field(const std::string& text, std::size_t row, const char* column) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw FormatError(std::string("column ") + column + ": cannot parse '" + t + "'", row);
  }
  return v;
}

// Non-finite numbers serialize as null.
ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

}  // namespace

FormatError::FormatError(const std::string& message, std::size_t row)
    : std::runtime_error(row > 0 ? "row " + std::to_string(row) + ": " + message : message), row_(row) {}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_interferogram_csv(std::ostream& out, const Interferogram& data) {
  out << kInterferogramHeader << '\n';
  for (const auto& p : data.points) {
    out << format_number(p.signal_wavelength) << ',' << format_number(p.idler_wavelength) << ','
        << format_number(p.coincidences) << ',' << format_number(p.singles_s) << ','
        << format_number(p.singles_i) << '\n';
  }
}

Interferogram read_interferogram_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file", 1);
  if (trim(line) != kInterferogramHeader) {
    throw FormatError(std::string("expected header '") + kInterferogramHeader + "'", 1);
  }
  Interferogram data;
  std::size_t row = 1;
  static constexpr const char* kColumns[] = {"lambda_s_m", "lambda_i_m", "coincidences", "singles_s",
                                             "singles_i"};
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5) {
      throw FormatError("expected 5 fields, found " + std::to_string(fields.size()), row);
    }
    InterferogramPoint p;
    p.signal_wavelength = parse_field(fields[0], row, kColumns[0]);
    p.idler_wavelength = parse_field(fields[1], row, kColumns[1]);
    p.coincidences = parse_field(fields[2], row, kColumns[2]);
    p.singles_s = parse_field(fields[3], row, kColumns[3]);
    p.singles_i = parse_field(fields[4], row, kColumns[4]);
    if (!(p.signal_wavelength > 0.0) || !(p.idler_wavelength > 0.0)) {
      throw FormatError("wavelengths must be positive", row);
    }
    if (p.coincidences < 0.0 || p.singles_s < 0.0 || p.singles_i < 0.0) {
      throw FormatError("counts must be non-negative", row);
    }
    data.points.push_back(p);
  }
  if (data.points.empty()) throw FormatError("no data rows", row);
  // Energy conservation fixes the pump until metadata says otherwise.
  const auto& first = data.points.front();
  data.pump_wavelength = 2.0 / (1.0 / first.signal_wavelength + 1.0 / first.idler_wavelength);
  return data;
}

ordered_json metadata_json(const Interferogram& data) {
  ordered_json j;
  j["pump_m"] = data.pump_wavelength;
  j["dwell_s"] = data.dwell;
  j["seed"] = data.seed;
  if (data.truth) {
    j["truth"] = {{"beta2_si", data.truth->beta2},
                  {"length_m", data.truth->length},
                  {"phi_off_rad", data.truth->phi_off},
                  {"visibility", data.truth->visibility}};
  }
  return j;
}

void apply_metadata(const json& meta, Interferogram& data) {
  try {
    data.pump_wavelength = meta.at("pump_m").get<double>();
    data.dwell = meta.at("dwell_s").get<double>();
    data.seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("truth")) {
      const auto& t = meta["truth"];
      data.truth = SyntheticTruth{t.at("beta2_si").get<double>(), t.at("length_m").get<double>(),
                                  t.at("phi_off_rad").get<double>(), t.at("visibility").get<double>()};
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("metadata: ") + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  if (p.extension() == ".csv") return p.replace_extension(".json");
  return std::filesystem::path(p.string() + ".json");
}

std::filesystem::path derived_path(const std::filesystem::path& base, const std::string& suffix,
                                   const std::string& extension) {
  std::filesystem::path p = base;
  const std::string stem = p.stem().string();
  return p.replace_filename(stem + "_" + suffix + "." + extension);
}

ordered_json to_json(const FitResult& fit) {
  ordered_json j;
  j["kind"] = "fit_result";
  j["d_ps_nm_km"] = finite_or_null(fit.d_value);
  j["d_sigma_ps_nm_km"] = finite_or_null(fit.d_sigma());
  j["beta2_si"] = finite_or_null(fit.beta2);
  j["beta2_sigma_si"] = finite_or_null(fit.beta2_sigma());
  j["phi_off_rad"] = finite_or_null(fit.phi_off);
  j["visibility"] = finite_or_null(fit.visibility);
  j["amplitude"] = finite_or_null(fit.amplitude);
  j["parameter_order"] = {"beta2_si", "phi_off_rad", "visibility", "amplitude"};
  ordered_json cov = ordered_json::array();
  for (int r = 0; r < 4; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < 4; ++c) row.push_back(finite_or_null(fit.covariance(r, c)));
    cov.push_back(row);
  }
  j["covariance_si"] = cov;
  j["chi2_reduced"] = finite_or_null(fit.chi2_reduced);
  j["converged"] = fit.converged;
  j["n_iterations"] = fit.n_iterations;
  j["pump_m"] = fit.pump_wavelength;
  j["length_m"] = fit.length;
  j["n_points"] = fit.n_points;
  j["gradient_norm"] = finite_or_null(fit.gradient_norm);
  j["flags"] = {{"boundary", fit.boundary_warning},
                {"visibility_out_of_range", fit.visibility_warning},
                {"unidentifiable", fit.unidentifiable},
                {"sign_ambiguous", true}};
  j["message"] = fit.message;
  return j;
}

FitResult fit_from_json(const json& j) {
  try {
    if (j.value("kind", "") != "fit_result") throw FormatError("not a fit_result document");
    FitResult f;
    f.d_value = number_or_nan(j, "d_ps_nm_km");
    f.beta2 = number_or_nan(j, "beta2_si");
    f.phi_off = number_or_nan(j, "phi_off_rad");
    f.visibility = number_or_nan(j, "visibility");
    f.amplitude = number_or_nan(j, "amplitude");
    const auto& cov = j.at("covariance_si");
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        const auto& v = cov.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
        f.covariance(r, c) = v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
      }
    }
    f.chi2_reduced = number_or_nan(j, "chi2_reduced");
    f.converged = j.at("converged").get<bool>();
    f.n_iterations = j.at("n_iterations").get<int>();
    f.pump_wavelength = j.at("pump_m").get<double>();
    f.length = j.at("length_m").get<double>();
    f.n_points = j.at("n_points").get<std::size_t>();
    f.gradient_norm = number_or_nan(j, "gradient_norm");
    const auto& flags = j.at("flags");
    f.boundary_warning = flags.at("boundary").get<bool>();
    f.visibility_warning = flags.at("visibility_out_of_range").get<bool>();
    f.unidentifiable = flags.at("unidentifiable").get<bool>();
    f.message = j.value("message", "");
    return f;
  } catch (const json::exception& e) {
    throw FormatError(std::string("fit result: ") + e.what());
  }
}

ordered_json to_json(const NormalizedFringe& fringe) {
  ordered_json j;
  j["pump_m"] = fringe.pump_wavelength;
  j["scale"] = fringe.scale;
  j["dropped"] = fringe.dropped;
  ordered_json det = ordered_json::array(), lam = ordered_json::array(), val = ordered_json::array(),
               sig = ordered_json::array();
  for (const auto& p : fringe.points) {
    det.push_back(p.detuning);
    lam.push_back(p.signal_wavelength);
    val.push_back(p.value);
    sig.push_back(p.sigma);
  }
  j["detuning_rad_s"] = det;
  j["lambda_s_m"] = lam;
  j["value"] = val;
  j["sigma"] = sig;
  return j;
}

NormalizedFringe fringe_from_json(const json& j) {
  try {
    NormalizedFringe f;
    f.pump_wavelength = j.at("pump_m").get<double>();
    f.scale = j.at("scale").get<double>();
    f.dropped = j.at("dropped").get<std::size_t>();
    const auto& det = j.at("detuning_rad_s");
    const auto& lam = j.at("lambda_s_m");
    const auto& val = j.at("value");
    const auto& sig = j.at("sigma");
    if (det.size() != val.size() || lam.size() != val.size() || sig.size() != val.size()) {
      throw FormatError("fringe arrays differ in length");
    }
    for (std::size_t k = 0; k < val.size(); ++k) {
      f.points.push_back({det[k].get<double>(), lam[k].get<double>(), val[k].get<double>(),
                          sig[k].get<double>()});
    }
    return f;
  } catch (const json::exception& e) {
    throw FormatError(std::string("fringe: ") + e.what());
  }
}

ordered_json to_json(const EnsembleStats& s) {
  ordered_json j;
  j["kind"] = "ensemble_stats";
  j["mean_d_ps_nm_km"] = finite_or_null(s.mean_d);
  j["std_d_ps_nm_km"] = finite_or_null(s.std_d);
  j["relative_error"] = finite_or_null(s.relative_error);
  j["n"] = s.n;
  j["n_excluded"] = s.n_excluded;
  j["normality_pvalue"] = finite_or_null(s.normality_pvalue);
  j["normality_warning"] = s.normality_warning();
  j["failed"] = s.failed();
  return j;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw std::invalid_argument("make_histogram: no values");
  if (bins == 0) bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(values.size()))));
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    const double pad = lo != 0.0 ? std::abs(lo) * 1e-9 : 1e-12;
    lo -= pad;
    hi += pad;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / bins;
  for (double v : values) {
    auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(k, bins - 1)]++;
  }
  return h;
}

ordered_json to_json(const TodResult& tod) {
  ordered_json j;
  j["kind"] = "tod_result";
  j["slope_ps_nm2_km"] = finite_or_null(tod.slope);
  j["slope_uncertainty_ps_nm2_km"] = finite_or_null(tod.slope_uncertainty);
  j["slope_si"] = finite_or_null(tod.slope * kPsPerNm2Km);
  j["intercept_d_ps_nm_km"] = finite_or_null(tod.intercept_d);
  j["reference_wavelength_m"] = tod.reference_wavelength;
  ordered_json points = ordered_json::array();
  for (const auto& [pump, fit] : tod.per_point) {
    points.push_back({{"pump_m", pump}, {"fit", to_json(fit)}});
  }
  j["per_point"] = points;
  return j;
}

TodResult tod_from_json(const json& j) {
  try {
    if (j.value("kind", "") != "tod_result") throw FormatError("not a tod_result document");
    TodResult t;
    t.slope = number_or_nan(j, "slope_ps_nm2_km");
    t.slope_uncertainty = number_or_nan(j, "slope_uncertainty_ps_nm2_km");
    t.intercept_d = number_or_nan(j, "intercept_d_ps_nm_km");
    t.reference_wavelength = j.at("reference_wavelength_m").get<double>();
    for (const auto& p : j.at("per_point")) {
      t.per_point.emplace_back(p.at("pump_m").get<double>(), fit_from_json(p.at("fit")));
    }
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("tod result: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open for reading: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace sagnac
