#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"

#include "nfcrb/crb.hpp"
#include "nfcrb/types.hpp"

namespace nfcrb {

// Performance-defined near-field localization region: Cartesian position
// error bound from the polar CRB, absolute/relative acceptance criteria, and
// the three design scenarios (minimum time, minimum SNR, minimum sensors).

// sqrt(r^2 CRB(theta) + CRB(r)), meters. The flavor of the underlying bound
// comes from (params.model, params.gain).
double position_error_std(const ArrayConfig& cfg, const SourceLocation& loc,
                          const ScenarioParams& params);

// sqrt(CRB(theta) + CRB(r)/r^2) = position_error_std / r, dimensionless.
double relative_error_std(const ArrayConfig& cfg, const SourceLocation& loc,
                          const ScenarioParams& params);

struct NflrCriterion {
  enum class Kind { absolute_std, relative_error };
  Kind kind = Kind::absolute_std;
  double threshold = 0.0;  // meters (absolute) or dimensionless (relative)

  static NflrCriterion absolute(double std_max_m) {
    return {Kind::absolute_std, std_max_m};
  }
  static NflrCriterion relative(double epsilon) {
    return {Kind::relative_error, epsilon};
  }
};

struct NflrCell {
  double range = 0.0;       // m
  double theta = 0.0;       // rad
  double std_value = 0.0;   // per criterion kind; +inf when unevaluable
  bool inside = false;
  bool quality_flag = false;  // near-lateral bound or failed evaluation
};

struct NflrMap {
  RegionSpec region;
  NflrCriterion criterion;
  double reactive_bound = 0.0;  // lower Fresnel radius; cells at or below are outside
  std::vector<NflrCell> cells;  // row-major: cells[ir * grid_ntheta + it]

  const NflrCell& at(int ir, int it) const {
    return cells[static_cast<size_t>(ir) * static_cast<size_t>(region.grid_ntheta) +
                 static_cast<size_t>(it)];
  }
};

// Evaluates the criterion std on the region grid and classifies each cell.
// Cells whose bound cannot be evaluated (NearSingular / DegenerateGeometry)
// are outside with the quality flag set.
NflrMap nflr_map(const ArrayConfig& cfg, const RegionSpec& region, const ScenarioParams& params,
                 const NflrCriterion& criterion);

// Minimum observation time for a relative tolerance epsilon at one location
// (conditional model only; exact 1/T scaling makes this a closed form).
// Returned as a real; snapshot ceiling is presentation-level.
double min_observation_time(const ArrayConfig& cfg, const SourceLocation& loc,
                            const ScenarioParams& params, double epsilon);

// Minimum deterministic SNR (same units as params.det_snr()) for tolerance
// epsilon at fixed T. Conditional model only.
double min_snr(const ArrayConfig& cfg, const SourceLocation& loc, const ScenarioParams& params,
               double epsilon);

// Exact grid maximization of the pointwise design quantities over a region,
// with the maximizing cell for diagnostics.
struct RegionDesignResult {
  double value = 0.0;
  double argmax_range = 0.0;
  double argmax_theta = 0.0;
};
RegionDesignResult min_time_region(const ArrayConfig& cfg, const RegionSpec& region,
                                   const ScenarioParams& params, double epsilon);
RegionDesignResult min_snr_region(const ArrayConfig& cfg, const RegionSpec& region,
                                  const ScenarioParams& params, double epsilon);

// Smallest sensor count in [3, n_max] meeting the tolerance everywhere on the
// region grid. Scans linearly (monotonicity in N is not established) and
// reports every feasible count; n_min is empty when none qualifies.
struct MinSensorsResult {
  std::optional<int> n_min;
  std::vector<int> feasible;
};
MinSensorsResult min_sensors(const ArrayConfig& cfg_template, const RegionSpec& region,
                             const ScenarioParams& params, double epsilon, int n_max = 256);

// CSV columns: r_m, theta_deg, std, inside, quality_flag.
void write_nflr_csv(std::ostream& os, const NflrMap& map);
nlohmann::json nflr_to_json(const NflrMap& map);

}  // namespace nfcrb
