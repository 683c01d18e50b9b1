#include "sagnac/rangemap.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "sagnac/io.hpp"

namespace sagnac {

std::string to_string(Zone z) {
  switch (z) {
    case Zone::too_narrow: return "too_narrow";
    case Zone::accessible: return "accessible";
    case Zone::wide: return "wide";
    case Zone::too_wide: return "too_wide";
  }
  return "?";
}

Zone zone_from_string(const std::string& s) {
  if (s == "too_narrow") return Zone::too_narrow;
  if (s == "accessible") return Zone::accessible;
  if (s == "wide") return Zone::wide;
  if (s == "too_wide") return Zone::too_wide;
  throw std::invalid_argument("unknown zone '" + s + "'");
}

Zone classify(double fringe_width, const ZoneThresholds& t) {
  if (fringe_width < t.narrow_factor * t.filter_bandwidth) return Zone::too_narrow;
  if (fringe_width > t.source_width) return Zone::too_wide;
  if (fringe_width > 0.5 * t.source_width) return Zone::wide;
  return Zone::accessible;
}

RangeMapGrid make_range_map(const SpectralPoint& pump, double length_min, double length_max,
                            std::size_t n_lengths, double d_min, double d_max, std::size_t n_cd,
                            const ZoneThresholds& thresholds) {
  if (n_lengths < 2 || n_cd < 2) throw std::invalid_argument("range map: grid must be at least 2x2");
  if (!(length_min > 0.0) || !(length_max > length_min)) {
    throw std::invalid_argument("range map: need 0 < length_min < length_max");
  }
  if (!(d_max > d_min)) throw std::invalid_argument("range map: need d_min < d_max");
  if (!(thresholds.filter_bandwidth > 0.0) || !(thresholds.source_width > 0.0)) {
    throw std::invalid_argument("range map: bandwidths must be > 0");
  }

  RangeMapGrid g;
  const double log_lo = std::log(length_min);
  const double log_step = (std::log(length_max) - log_lo) / static_cast<double>(n_lengths - 1);
  for (std::size_t i = 0; i < n_lengths; ++i) {
    g.lengths.push_back(i + 1 == n_lengths ? length_max : std::exp(log_lo + log_step * static_cast<double>(i)));
  }
  for (std::size_t j = 0; j < n_cd; ++j) {
    g.cd_values.push_back(j + 1 == n_cd ? d_max : d_min + (d_max - d_min) * static_cast<double>(j) / (n_cd - 1));
  }
  for (double length : g.lengths) {
    for (double d : g.cd_values) {
      const double beta2 = d_to_beta2({d, pump.wavelength()});
      if (beta2 == 0.0) {
        g.widths.push_back(std::numeric_limits<double>::infinity());
        g.zones.push_back(Zone::too_wide);
        continue;
      }
      const double w = fringe_width(pump, beta2, length).delta_lambda;
      g.widths.push_back(w);
      g.zones.push_back(classify(w, thresholds));
    }
  }
  return g;
}

void write_range_map_csv(std::ostream& out, const RangeMapGrid& grid) {
  out << kRangeMapHeader << '\n';
  for (std::size_t i = 0; i < grid.lengths.size(); ++i) {
    for (std::size_t j = 0; j < grid.cd_values.size(); ++j) {
      const double w = grid.width(i, j);
      out << format_number(grid.lengths[i]) << ',' << format_number(grid.cd_values[j]) << ','
          << (std::isinf(w) ? std::string("inf") : format_number(w)) << ',' << to_string(grid.zone(i, j))
          << '\n';
    }
  }
}

RangeMapGrid read_range_map_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRangeMapHeader) {
    throw FormatError(std::string("expected header '") + kRangeMapHeader + "'", 1);
  }
  struct Cell {
    double width;
    Zone zone;
  };
  std::map<std::pair<double, double>, Cell> cells;
  std::vector<double> lengths, cds;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) throw FormatError("expected 4 fields", row);
    }
    try {
      const double length = std::stod(f[0]);
      const double d = std::stod(f[1]);
      const double w = f[2] == "inf" ? std::numeric_limits<double>::infinity() : std::stod(f[2]);
      cells[{length, d}] = {w, zone_from_string(f[3])};
      if (std::find(lengths.begin(), lengths.end(), length) == lengths.end()) lengths.push_back(length);
      if (std::find(cds.begin(), cds.end(), d) == cds.end()) cds.push_back(d);
    } catch (const std::exception& e) {
      throw FormatError(e.what(), row);
    }
  }
  RangeMapGrid g;
  g.lengths = lengths;
  g.cd_values = cds;
  for (double l : lengths) {
    for (double d : cds) {
      const auto it = cells.find({l, d});
      if (it == cells.end()) throw FormatError("range map is not a full grid");
      g.widths.push_back(it->second.width);
      g.zones.push_back(it->second.zone);
    }
  }
  return g;
}

}  // namespace sagnac
