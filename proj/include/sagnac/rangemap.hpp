#pragma once

// Working-range map: first-fringe width over a (sample length x D) grid,
// with each cell classified by whether the fringe can be resolved with the
// available filters and single-photon bandwidth.

#include <iosfwd>
#include <string>
#include <vector>

#include "sagnac/optics.hpp"

namespace sagnac {

enum class Zone { too_narrow, accessible, wide, too_wide };

std::string to_string(Zone z);
Zone zone_from_string(const std::string& s);

struct ZoneThresholds {
  double filter_bandwidth = 500e-12;  // m
  /// Fringes narrower than this many filter bandwidths are unresolved.
  double narrow_factor = 4.0;
  double source_width = 60e-9;  // m, single-photon spectral width
};

Zone classify(double fringe_width, const ZoneThresholds& thresholds);

struct RangeMapGrid {
  std::vector<double> lengths;    // m, log-spaced
  std::vector<double> cd_values;  // ps/(nm km)
  /// Row-major [length][cd]; +inf where D = 0.
  std::vector<double> widths;
  std::vector<Zone> zones;

  double width(std::size_t i_length, std::size_t j_cd) const {
    return widths[i_length * cd_values.size() + j_cd];
  }
  Zone zone(std::size_t i_length, std::size_t j_cd) const {
    return zones[i_length * cd_values.size() + j_cd];
  }
};

/// Grid of `n_lengths` log-spaced lengths and `n_cd` linearly spaced D values.
RangeMapGrid make_range_map(const SpectralPoint& pump, double length_min, double length_max,
                            std::size_t n_lengths, double d_min, double d_max, std::size_t n_cd,
                            const ZoneThresholds& thresholds = {});

inline constexpr const char* kRangeMapHeader = "length_m,d_ps_nm_km,fringe_width_m,zone";

void write_range_map_csv(std::ostream& out, const RangeMapGrid& grid);
RangeMapGrid read_range_map_csv(std::istream& in);

}  // namespace sagnac
