#include "sagnac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sagnac {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string with_line(const std::string& field, const std::string& message, int line) {
  std::ostringstream s;
  if (line > 0) s << "line " << line << ": ";
  s << field << ": " << message;
  return s.str();
}

// Line of the first occurrence of `"key"` in the source text; 0 if absent.
int locate(const std::string& text, const std::string& dotted) {
  const auto dot = dotted.rfind('.');
  const std::string key = "\"" + (dot == std::string::npos ? dotted : dotted.substr(dot + 1)) + "\"";
  std::size_t from = 0;
  if (dot != std::string::npos) {
    const std::string parent = "\"" + dotted.substr(0, dotted.find('.')) + "\"";
    const auto at = text.find(parent);
    if (at != std::string::npos) from = at;
  }
  const auto pos = text.find(key, from);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    throw ConfigError(field, message, locate(text_, field));
  }

  void check_keys(const json& obj, const std::string& prefix, std::set<std::string> allowed) const {
    if (!obj.is_object()) fail(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.contains(key)) fail(prefix.empty() ? key : prefix + "." + key, "unknown field");
    }
  }

  double number(const json& obj, const std::string& key, const std::string& path, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "must be finite");
    return d;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path,
                     const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  const std::string& text_;
};

const char* to_string(EnvelopeShape s) { return s == EnvelopeShape::sinc2 ? "sinc2" : "gaussian"; }
const char* to_string(FilterShape s) { return s == FilterShape::rectangular ? "rectangular" : "gaussian"; }

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message, int line)
    : std::runtime_error(with_line(field, message, line)),
      field_(std::move(field)),
      detail_(message),
      line_(line) {}

double RunConfig::beta2_at(double wavelength) const {
  if (sut.beta2_si) return *sut.beta2_si;
  return d_to_beta2({sut.d_ps_nm_km.value_or(0.0), wavelength});
}

DispersionBranch RunConfig::branch() const {
  return beta2_at(pump_m) < 0.0 ? DispersionBranch::anomalous : DispersionBranch::normal;
}

TaylorDispersion RunConfig::dispersion() const {
  return make_dispersion(pump(), beta2_at(pump_m), sut.length_m, sut.phi_off_rad);
}

SimulationModel RunConfig::model(bool noiseless) const {
  SimulationModel m;
  m.envelope = {pump(), envelope.fwhm_m, envelope.shape};
  m.filter_bandwidth = filter.bandwidth_m;
  m.filter_shape = filter.shape;
  m.visibility = visibility;
  m.noise = {noise.sbrs_fraction, noise.sbrs_singles_cps};
  m.noiseless = noiseless;
  return m;
}

ScanPlan RunConfig::plan() const {
  ScanPlan p;
  p.pump = pump();
  p.signal_wavelengths = linear_scan(p.pump, scan.n_points, scan.span_m);
  p.dwell = scan.dwell_s;
  p.peak_coincidence_rate = scan.peak_coinc_cps;
  p.peak_singles_rate = scan.peak_singles_cps;
  p.seed = seed;
  return p;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& msg) { throw ConfigError(field, msg); };
  if (!(c.pump_m > 0.0)) fail("pump_m", "must be > 0");
  if (!(c.sut.length_m > 0.0)) fail("sut.length_m", "must be > 0");
  if (c.sut.d_ps_nm_km.has_value() == c.sut.beta2_si.has_value()) {
    fail("sut", "exactly one of d_ps_nm_km / beta2_si must be given");
  }
  if (!(c.envelope.fwhm_m > 0.0)) fail("envelope.fwhm_m", "must be > 0");
  if (!(c.filter.bandwidth_m > 0.0)) fail("filter.bandwidth_m", "must be > 0");
  if (!(c.noise.sbrs_fraction >= 0.0)) fail("noise.sbrs_fraction", "must be >= 0");
  if (!(c.noise.sbrs_singles_cps >= 0.0)) fail("noise.sbrs_singles_cps", "must be >= 0");
  if (c.scan.n_points < 8) fail("scan.n_points", "must be >= 8");
  if (!(c.scan.span_m > 0.0)) fail("scan.span_m", "must be > 0");
  if (!(c.scan.span_m < 2.0 * c.pump_m)) fail("scan.span_m", "reaches past the idler pole");
  if (!(c.scan.dwell_s > 0.0)) fail("scan.dwell_s", "must be > 0");
  if (!(c.scan.peak_coinc_cps > 0.0)) fail("scan.peak_coinc_cps", "must be > 0");
  if (!(c.scan.peak_singles_cps > 0.0)) fail("scan.peak_singles_cps", "must be > 0");
  if (!(c.visibility >= 0.0 && c.visibility <= 1.0)) fail("visibility", "must lie in [0, 1]");
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  const Reader r(text);
  r.check_keys(root, "", {"pump_m", "sut", "envelope", "filter", "noise", "scan", "visibility", "seed"});

  RunConfig c;
  c.pump_m = r.number(root, "pump_m", "pump_m", c.pump_m);
  c.visibility = r.number(root, "visibility", "visibility", c.visibility);
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
    c.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("sut")) {
    const auto& s = root["sut"];
    r.check_keys(s, "sut", {"length_m", "d_ps_nm_km", "beta2_si", "phi_off_rad"});
    c.sut.length_m = r.number(s, "length_m", "sut.length_m", c.sut.length_m);
    c.sut.phi_off_rad = r.number(s, "phi_off_rad", "sut.phi_off_rad", c.sut.phi_off_rad);
    if (s.contains("d_ps_nm_km") || s.contains("beta2_si")) {
      c.sut.d_ps_nm_km.reset();
      if (s.contains("d_ps_nm_km")) c.sut.d_ps_nm_km = r.number(s, "d_ps_nm_km", "sut.d_ps_nm_km", 0.0);
      if (s.contains("beta2_si")) c.sut.beta2_si = r.number(s, "beta2_si", "sut.beta2_si", 0.0);
      if (c.sut.d_ps_nm_km && c.sut.beta2_si) {
        r.fail("sut.beta2_si", "exactly one of d_ps_nm_km / beta2_si may be given");
      }
    }
  }
  if (root.contains("envelope")) {
    const auto& e = root["envelope"];
    r.check_keys(e, "envelope", {"fwhm_m", "shape"});
    c.envelope.fwhm_m = r.number(e, "fwhm_m", "envelope.fwhm_m", c.envelope.fwhm_m);
    const auto shape = r.string(e, "shape", "envelope.shape", "sinc2");
    if (shape == "sinc2") c.envelope.shape = EnvelopeShape::sinc2;
    else if (shape == "gaussian") c.envelope.shape = EnvelopeShape::gaussian;
    else r.fail("envelope.shape", "expected \"sinc2\" or \"gaussian\"");
  }
  if (root.contains("filter")) {
    const auto& f = root["filter"];
    r.check_keys(f, "filter", {"bandwidth_m", "shape"});
    c.filter.bandwidth_m = r.number(f, "bandwidth_m", "filter.bandwidth_m", c.filter.bandwidth_m);
    const auto shape = r.string(f, "shape", "filter.shape", "rectangular");
    if (shape == "rectangular") c.filter.shape = FilterShape::rectangular;
    else if (shape == "gaussian") c.filter.shape = FilterShape::gaussian;
    else r.fail("filter.shape", "expected \"rectangular\" or \"gaussian\"");
  }
  if (root.contains("noise")) {
    const auto& n = root["noise"];
    r.check_keys(n, "noise", {"sbrs_fraction", "sbrs_singles_cps"});
    c.noise.sbrs_fraction = r.number(n, "sbrs_fraction", "noise.sbrs_fraction", c.noise.sbrs_fraction);
    c.noise.sbrs_singles_cps =
        r.number(n, "sbrs_singles_cps", "noise.sbrs_singles_cps", c.noise.sbrs_singles_cps);
  }
  if (root.contains("scan")) {
    const auto& s = root["scan"];
    r.check_keys(s, "scan", {"n_points", "span_m", "dwell_s", "peak_coinc_cps", "peak_singles_cps"});
    if (s.contains("n_points")) {
      if (!s["n_points"].is_number_integer()) r.fail("scan.n_points", "expected an integer");
      c.scan.n_points = s["n_points"].get<int>();
    }
    c.scan.span_m = r.number(s, "span_m", "scan.span_m", c.scan.span_m);
    c.scan.dwell_s = r.number(s, "dwell_s", "scan.dwell_s", c.scan.dwell_s);
    c.scan.peak_coinc_cps = r.number(s, "peak_coinc_cps", "scan.peak_coinc_cps", c.scan.peak_coinc_cps);
    c.scan.peak_singles_cps =
        r.number(s, "peak_singles_cps", "scan.peak_singles_cps", c.scan.peak_singles_cps);
  }

  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), e.detail(), locate(text, e.field()));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["pump_m"] = c.pump_m;
  ordered_json sut;
  sut["length_m"] = c.sut.length_m;
  if (c.sut.d_ps_nm_km) sut["d_ps_nm_km"] = *c.sut.d_ps_nm_km;
  if (c.sut.beta2_si) sut["beta2_si"] = *c.sut.beta2_si;
  sut["phi_off_rad"] = c.sut.phi_off_rad;
  j["sut"] = sut;
  j["envelope"] = {{"fwhm_m", c.envelope.fwhm_m}, {"shape", to_string(c.envelope.shape)}};
  j["filter"] = {{"bandwidth_m", c.filter.bandwidth_m}, {"shape", to_string(c.filter.shape)}};
  j["noise"] = {{"sbrs_fraction", c.noise.sbrs_fraction}, {"sbrs_singles_cps", c.noise.sbrs_singles_cps}};
  j["scan"] = {{"n_points", c.scan.n_points},
               {"span_m", c.scan.span_m},
               {"dwell_s", c.scan.dwell_s},
               {"peak_coinc_cps", c.scan.peak_coinc_cps},
               {"peak_singles_cps", c.scan.peak_singles_cps}};
  j["visibility"] = c.visibility;
  j["seed"] = c.seed;
  return j;
}

}  // namespace sagnac
