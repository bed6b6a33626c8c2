#include "nfcrb/nflr.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "nfcrb/geometry.hpp"
#include "nfcrb/io.hpp"

namespace nfcrb {

namespace {

void require_conditional(const ScenarioParams& params, const char* who) {
  params.validate();
  if (params.model != SignalModel::conditional)
    throw std::invalid_argument(std::string(who) + ": conditional model required");
}

void require_epsilon(double epsilon, const char* who) {
  if (!(epsilon > 0.0)) throw std::invalid_argument(std::string(who) + ": epsilon must be > 0");
}

template <typename PointOp>
RegionDesignResult region_max(const RegionSpec& region, const PointOp& op) {
  region.validate();
  RegionDesignResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (double r : region.range_grid())
    for (double th : region.angle_grid()) {
      const double v = op(SourceLocation(r, th));
      if (v > best.value) best = {v, r, th};
    }
  return best;
}

}  // namespace

double position_error_std(const ArrayConfig& cfg, const SourceLocation& loc,
                          const ScenarioParams& params) {
  const CrbResult c = closed_form_crb(cfg, loc, params);
  return std::sqrt(loc.range() * loc.range() * c.theta + c.range);
}

double relative_error_std(const ArrayConfig& cfg, const SourceLocation& loc,
                          const ScenarioParams& params) {
  const CrbResult c = closed_form_crb(cfg, loc, params);
  return std::sqrt(c.theta + c.range / (loc.range() * loc.range()));
}

NflrMap nflr_map(const ArrayConfig& cfg, const RegionSpec& region, const ScenarioParams& params,
                 const NflrCriterion& criterion) {
  region.validate();
  params.validate();
  if (!(criterion.threshold > 0.0))
    throw std::invalid_argument("nflr_map: criterion threshold must be > 0");

  NflrMap map;
  map.region = region;
  map.criterion = criterion;
  map.reactive_bound = fresnel_bounds(cfg).lower;
  map.cells.reserve(static_cast<size_t>(region.grid_nr) * static_cast<size_t>(region.grid_ntheta));

  for (double r : region.range_grid())
    for (double th : region.angle_grid()) {
      NflrCell cell;
      cell.range = r;
      cell.theta = th;
      try {
        const SourceLocation loc(r, th);
        const CrbResult c = closed_form_crb(cfg, loc, params);
        cell.std_value = criterion.kind == NflrCriterion::Kind::absolute_std
                             ? std::sqrt(r * r * c.theta + c.range)
                             : std::sqrt(c.theta + c.range / (r * r));
        cell.quality_flag = c.near_lateral;
        cell.inside = cell.std_value <= criterion.threshold && r > map.reactive_bound;
      } catch (const NearSingular&) {
        cell.std_value = std::numeric_limits<double>::infinity();
        cell.quality_flag = true;
        cell.inside = false;
      } catch (const DegenerateGeometry&) {
        cell.std_value = std::numeric_limits<double>::infinity();
        cell.quality_flag = true;
        cell.inside = false;
      }
      map.cells.push_back(cell);
    }
  return map;
}

double min_observation_time(const ArrayConfig& cfg, const SourceLocation& loc,
                            const ScenarioParams& params, double epsilon) {
  require_conditional(params, "min_observation_time");
  require_epsilon(epsilon, "min_observation_time");
  // conditional bounds scale exactly as 1/T, so T_min inverts the bound in
  // closed form: T_min = T * (rel/eps)^2 = G_N / (2 eps^2 D_snr)
  const double rel = relative_error_std(cfg, loc, params);
  return params.snapshots * (rel / epsilon) * (rel / epsilon);
}

double min_snr(const ArrayConfig& cfg, const SourceLocation& loc, const ScenarioParams& params,
               double epsilon) {
  require_conditional(params, "min_snr");
  require_epsilon(epsilon, "min_snr");
  const double rel = relative_error_std(cfg, loc, params);
  return params.det_snr() * (rel / epsilon) * (rel / epsilon);
}

RegionDesignResult min_time_region(const ArrayConfig& cfg, const RegionSpec& region,
                                   const ScenarioParams& params, double epsilon) {
  return region_max(region, [&](const SourceLocation& loc) {
    return min_observation_time(cfg, loc, params, epsilon);
  });
}

RegionDesignResult min_snr_region(const ArrayConfig& cfg, const RegionSpec& region,
                                  const ScenarioParams& params, double epsilon) {
  return region_max(region, [&](const SourceLocation& loc) {
    return min_snr(cfg, loc, params, epsilon);
  });
}

MinSensorsResult min_sensors(const ArrayConfig& cfg_template, const RegionSpec& region,
                             const ScenarioParams& params, double epsilon, int n_max) {
  region.validate();
  require_conditional(params, "min_sensors");
  require_epsilon(epsilon, "min_sensors");
  if (n_max < 3) throw std::invalid_argument("min_sensors: n_max must be >= 3");

  const std::vector<double> rs = region.range_grid();
  const std::vector<double> ths = region.angle_grid();
  MinSensorsResult out;
  for (int n = 3; n <= n_max; ++n) {
    const ArrayConfig cfg(n, cfg_template.spacing(), cfg_template.wavelength());
    bool ok = true;
    for (size_t i = 0; ok && i < rs.size(); ++i)
      for (size_t j = 0; ok && j < ths.size(); ++j) {
        try {
          ok = relative_error_std(cfg, SourceLocation(rs[i], ths[j]), params) <= epsilon;
        } catch (const NearSingular&) {
          ok = false;
        } catch (const DegenerateGeometry&) {
          ok = false;
        }
      }
    if (ok) {
      out.feasible.push_back(n);
      if (!out.n_min) out.n_min = n;
    }
  }
  return out;
}

void write_nflr_csv(std::ostream& os, const NflrMap& map) {
  CsvWriter w(os);
  w.comment("criterion", map.criterion.kind == NflrCriterion::Kind::absolute_std
                             ? "absolute_std_m"
                             : "relative_error");
  w.comment("threshold", format_double(map.criterion.threshold));
  w.comment("reactive_bound_m", format_double(map.reactive_bound));
  w.header({"r_m", "theta_deg", "std", "inside", "quality_flag"});
  for (const NflrCell& c : map.cells)
    w.row({format_double(c.range), format_double(rad2deg(c.theta)), format_double(c.std_value),
           c.inside ? "1" : "0", c.quality_flag ? "1" : "0"});
}

nlohmann::json nflr_to_json(const NflrMap& map) {
  nlohmann::json j;
  j["criterion"] = {{"kind", map.criterion.kind == NflrCriterion::Kind::absolute_std
                                 ? "absolute_std_m"
                                 : "relative_error"},
                    {"threshold", map.criterion.threshold}};
  j["reactive_bound_m"] = map.reactive_bound;
  j["region"] = {{"r_min", map.region.r_min},
                 {"r_max", map.region.r_max},
                 {"theta_min_deg", rad2deg(map.region.theta_min)},
                 {"theta_max_deg", rad2deg(map.region.theta_max)},
                 {"grid_nr", map.region.grid_nr},
                 {"grid_ntheta", map.region.grid_ntheta}};
  nlohmann::json cells = nlohmann::json::array();
  for (const NflrCell& c : map.cells)
    cells.push_back({{"r_m", c.range},
                     {"theta_deg", rad2deg(c.theta)},
                     {"std", std::isfinite(c.std_value) ? nlohmann::json(c.std_value)
                                                        : nlohmann::json()},
                     {"inside", c.inside},
                     {"quality_flag", c.quality_flag}});
  j["cells"] = std::move(cells);
  return j;
}

}  // namespace nfcrb
