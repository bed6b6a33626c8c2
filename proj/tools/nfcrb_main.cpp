// nfcrb: near-field localization bound toolkit.
//
// Subcommands: fresnel | crb-sweep | compare | nflr | min-time | min-snr |
// min-sensors | mc-validate. Global flags: --config, --seed, --format, --out
// plus the scenario parameters (all config-file addressable as key=value).
// Units at this boundary are meters and degrees; everything inside the
// library is radians.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nfcrb/crb.hpp"
#include "nfcrb/fim_oracle.hpp"
#include "nfcrb/geometry.hpp"
#include "nfcrb/io.hpp"
#include "nfcrb/ml_sim.hpp"
#include "nfcrb/nflr.hpp"
#include "nfcrb/types.hpp"

namespace {

using nfcrb::ArrayConfig;
using nfcrb::CrbResult;
using nfcrb::CrbSource;
using nfcrb::GainModel;
using nfcrb::RegionSpec;
using nfcrb::ScenarioParams;
using nfcrb::SignalModel;
using nfcrb::SourceLocation;
using nlohmann::json;

std::string fd(double v) { return nfcrb::format_double(v); }

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;  // empty = stdout

  int n_sensors = 0;
  double spacing = 0.0;
  double wavelength = 0.0;
  std::string model = "conditional";
  std::string gain = "equal";
  double snapshots = 90.0;
  double noise_var = 1e-3;
  double amplitude = 1.0;
  double signal_var = 1.0;

  ArrayConfig array() const { return {n_sensors, spacing, wavelength}; }

  GainModel gain_model() const {
    if (gain == "equal") return GainModel::equal;
    if (gain == "variable") return GainModel::variable;
    throw std::invalid_argument("--gain must be 'equal' or 'variable'");
  }
  SignalModel signal_model() const {
    if (model == "conditional") return SignalModel::conditional;
    if (model == "unconditional") return SignalModel::unconditional;
    throw std::invalid_argument("--model must be 'conditional' or 'unconditional'");
  }

  ScenarioParams conditional(GainModel g) const {
    return ScenarioParams::conditional(g, snapshots, noise_var, amplitude);
  }
  ScenarioParams unconditional(GainModel g) const {
    return ScenarioParams::unconditional(g, snapshots, noise_var, signal_var);
  }
  ScenarioParams scenario() const {
    return signal_model() == SignalModel::conditional ? conditional(gain_model())
                                                      : unconditional(gain_model());
  }
};

struct RegionOpts {
  double r_min = 0.0, r_max = 0.0;
  double theta_min_deg = 0.0, theta_max_deg = 0.0;
  int grid_nr = 100, grid_ntheta = 100;

  void attach(CLI::App* cmd, bool required) {
    auto* a = cmd->add_option("--r-min", r_min, "region lower range, m");
    auto* b = cmd->add_option("--r-max", r_max, "region upper range, m");
    auto* c = cmd->add_option("--theta-min-deg", theta_min_deg, "region lower angle, deg");
    auto* d = cmd->add_option("--theta-max-deg", theta_max_deg, "region upper angle, deg");
    cmd->add_option("--grid-nr", grid_nr, "range grid points");
    cmd->add_option("--grid-ntheta", grid_ntheta, "angle grid points");
    if (required) {
      a->required();
      b->required();
      c->required();
      d->required();
    }
  }
  bool given(const CLI::App* cmd) const {
    return cmd->count("--r-min") || cmd->count("--r-max") || cmd->count("--theta-min-deg") ||
           cmd->count("--theta-max-deg");
  }
  RegionSpec spec() const {
    return {r_min, r_max, nfcrb::deg2rad(theta_min_deg), nfcrb::deg2rad(theta_max_deg),
            grid_nr, grid_ntheta};
  }
};

void write_artifact(const GlobalOpts& g, const std::function<void(std::ostream&)>& write_csv,
                    const json& j) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!g.out.empty()) {
    file.open(g.out, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open output path: " + g.out);
    os = &file;
  }
  if (g.format == "csv") {
    write_csv(*os);
  } else if (g.format == "json") {
    *os << j.dump(2) << "\n";
  } else {
    throw std::invalid_argument("--format must be 'csv' or 'json'");
  }
}

json scenario_json(const GlobalOpts& g) {
  json j{{"n_sensors", g.n_sensors}, {"spacing_m", g.spacing},
         {"wavelength_m", g.wavelength}, {"model", g.model},
         {"gain", g.gain},            {"snapshots", g.snapshots},
         {"noise_var", g.noise_var}};
  if (g.model == "conditional")
    j["amplitude"] = g.amplitude;
  else
    j["signal_var"] = g.signal_var;
  return j;
}

// ---------------------------------------------------------------- fresnel

int cmd_fresnel(const GlobalOpts& g) {
  const nfcrb::FresnelBounds b = nfcrb::fresnel_bounds(g.array());
  write_artifact(
      g,
      [&](std::ostream& os) {
        nfcrb::CsvWriter w(os);
        w.header({"lower_m", "upper_m"});
        w.row({fd(b.lower), fd(b.upper)});
      },
      json{{"lower_m", b.lower}, {"upper_m", b.upper}});
  return 0;
}

// -------------------------------------------------------------- crb-sweep

struct SweepOpts {
  std::string axis = "range";
  double from = 0.0, to = 0.0;
  int points = 100;
  double range = 10.0;      // fixed r for angle sweeps, m
  double angle_deg = 45.0;  // fixed theta for range sweeps
  bool from_given = false, to_given = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--axis", axis, "sweep axis: range | angle")
        ->check(CLI::IsMember({"range", "angle"}));
    cmd->add_option("--from", from, "sweep start (m or deg)");
    cmd->add_option("--to", to, "sweep end (m or deg)");
    cmd->add_option("--points", points, "sweep sample count")->check(CLI::PositiveNumber);
    cmd->add_option("--range", range, "fixed range for angle sweeps, m");
    cmd->add_option("--angle-deg", angle_deg, "fixed angle for range sweeps, deg");
  }

  // default covers the experiment windows: (0, 50] m, (-90, 90) deg exclusive
  std::vector<double> values(const CLI::App* cmd) {
    from_given = cmd->count("--from");
    to_given = cmd->count("--to");
    double lo = from, hi = to;
    if (!from_given) lo = axis == "range" ? 0.5 : -89.9;
    if (!to_given) hi = axis == "range" ? 50.0 : 89.9;
    if (axis == "angle" && (std::abs(lo) >= 90.0 || std::abs(hi) >= 90.0))
      throw std::invalid_argument("angle sweep must stay strictly inside (-90, 90) deg");
    if (axis == "range" && lo <= 0.0)
      throw std::invalid_argument("range sweep must start above 0 m");
    if (!(lo < hi)) throw std::invalid_argument("--from must be below --to");
    if (points < 2) throw std::invalid_argument("--points must be >= 2");
    std::vector<double> v(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
      v[static_cast<size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return v;
  }

  SourceLocation location(double value) const {
    return axis == "range" ? SourceLocation(value, nfcrb::deg2rad(angle_deg))
                           : SourceLocation(range, nfcrb::deg2rad(value));
  }
};

std::vector<std::string> parse_sources(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok == "taylor") tok = "taylor_lemma2";
    if (tok == "approx") tok = "approx_lemma3";
    if (tok != "lemma1" && tok != "lemma4" && tok != "lemma5" && tok != "lemma6" &&
        tok != "taylor_lemma2" && tok != "approx_lemma3" && tok != "oracle")
      throw std::invalid_argument("unknown source tag: " + tok);
    out.push_back(tok);
  }
  if (out.empty()) throw std::invalid_argument("--sources must name at least one tag");
  return out;
}

CrbResult eval_source(const std::string& tag, const GlobalOpts& g, const ArrayConfig& cfg,
                      const SourceLocation& loc) {
  if (tag == "lemma1") return nfcrb::crb_conditional_eg(cfg, loc, g.conditional(GainModel::equal));
  if (tag == "lemma5")
    return nfcrb::crb_conditional_vg(cfg, loc, g.conditional(GainModel::variable));
  if (tag == "lemma4")
    return nfcrb::crb_unconditional(cfg, loc, g.unconditional(GainModel::equal));
  if (tag == "lemma6")
    return nfcrb::crb_unconditional(cfg, loc, g.unconditional(GainModel::variable));
  if (tag == "taylor_lemma2")
    return nfcrb::crb_taylor_eg(cfg, loc, g.conditional(GainModel::equal));
  if (tag == "approx_lemma3")
    return nfcrb::crb_approx_literature(cfg, loc, g.conditional(GainModel::equal));
  return nfcrb::oracle_crb(cfg, loc, g.scenario());
}

int cmd_crb_sweep(const GlobalOpts& g, SweepOpts& sw, const std::string& sources_csv,
                  const CLI::App* cmd) {
  const ArrayConfig cfg = g.array();
  const std::vector<std::string> sources = parse_sources(sources_csv);
  const std::vector<double> values = sw.values(cmd);
  const nfcrb::FresnelBounds fb = nfcrb::fresnel_bounds(cfg);

  struct Row {
    double value;
    std::string source;
    std::optional<CrbResult> crb;
  };
  std::vector<Row> rows;
  for (double v : values)
    for (const std::string& tag : sources) {
      Row row{v, tag, std::nullopt};
      try {
        row.crb = eval_source(tag, g, cfg, sw.location(v));
      } catch (const nfcrb::NearSingular&) {
      } catch (const nfcrb::IllConditioned&) {
      } catch (const nfcrb::DegenerateGeometry&) {
      }
      rows.push_back(std::move(row));
    }

  const std::string value_col = sw.axis == "range" ? "range_m" : "angle_deg";
  json jrows = json::array();
  for (const Row& r : rows) {
    json jr{{"value", r.value}, {"source", r.source}};
    if (r.crb) {
      jr["crb_theta"] = r.crb->theta;
      jr["crb_r"] = r.crb->range;
      if (r.crb->coupling) jr["crb_r_theta"] = *r.crb->coupling;
      jr["quality_flag"] = r.crb->near_lateral;
    } else {
      jr["quality_flag"] = true;
    }
    jrows.push_back(std::move(jr));
  }
  json j{{"axis", sw.axis},
         {"value_column", value_col},
         {"fresnel", {{"lower_m", fb.lower}, {"upper_m", fb.upper}}},
         {"scenario", scenario_json(g)},
         {"rows", jrows}};

  write_artifact(
      g,
      [&](std::ostream& os) {
        nfcrb::CsvWriter w(os);
        w.comment("axis", sw.axis);
        w.comment("fresnel_lower_m", fd(fb.lower));
        w.comment("fresnel_upper_m", fd(fb.upper));
        w.header({value_col, "crb_theta", "crb_r", "crb_r_theta", "source_tag", "quality_flag"});
        for (const Row& r : rows) {
          if (r.crb) {
            w.row({fd(r.value), fd(r.crb->theta), fd(r.crb->range),
                   r.crb->coupling ? fd(*r.crb->coupling) : "", r.source,
                   r.crb->near_lateral ? "1" : "0"});
          } else {
            w.row({fd(r.value), "", "", "", r.source, "1"});
          }
        }
      },
      j);
  return 0;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const GlobalOpts& g, SweepOpts& sw, const CLI::App* cmd) {
  const ArrayConfig cfg = g.array();
  const std::vector<double> values = sw.values(cmd);
  const nfcrb::FresnelBounds fb = nfcrb::fresnel_bounds(cfg);

  struct Row {
    double value;
    double approx_exact_theta, approx_exact_r;  // literature/exact ratios
    double egnorm_vg_theta, egnorm_vg_r;        // normalized EG over VG ratios
    bool quality;
    bool ok;
  };
  std::vector<Row> rows;
  for (double v : values) {
    Row row{};
    row.value = v;
    try {
      const SourceLocation loc = sw.location(v);
      const ScenarioParams cond_eg = g.conditional(GainModel::equal);
      const CrbResult exact = nfcrb::crb_conditional_eg(cfg, loc, cond_eg);
      const CrbResult approx = nfcrb::crb_approx_literature(cfg, loc, cond_eg);
      const CrbResult vg = nfcrb::crb_conditional_vg(cfg, loc, g.conditional(GainModel::variable));
      const CrbResult eg_norm = nfcrb::crb_conditional_eg(
          cfg, loc, nfcrb::received_power_normalized(cond_eg, loc.range()));
      row.approx_exact_theta = approx.theta / exact.theta;
      row.approx_exact_r = approx.range / exact.range;
      row.egnorm_vg_theta = eg_norm.theta / vg.theta;
      row.egnorm_vg_r = eg_norm.range / vg.range;
      row.quality = exact.near_lateral || vg.near_lateral;
      row.ok = true;
    } catch (const nfcrb::NearSingular&) {
      row.quality = true;
    } catch (const nfcrb::DegenerateGeometry&) {
      row.quality = true;
    }
    rows.push_back(row);
  }

  const std::string value_col = sw.axis == "range" ? "range_m" : "angle_deg";
  json jrows = json::array();
  for (const Row& r : rows) {
    json jr{{"value", r.value}, {"quality_flag", r.quality}};
    if (r.ok) {
      jr["approx_over_exact_theta"] = r.approx_exact_theta;
      jr["approx_over_exact_r"] = r.approx_exact_r;
      jr["egnorm_over_vg_theta"] = r.egnorm_vg_theta;
      jr["egnorm_over_vg_r"] = r.egnorm_vg_r;
    }
    jrows.push_back(std::move(jr));
  }
  write_artifact(
      g,
      [&](std::ostream& os) {
        nfcrb::CsvWriter w(os);
        w.comment("axis", sw.axis);
        w.comment("fresnel_lower_m", fd(fb.lower));
        w.comment("fresnel_upper_m", fd(fb.upper));
        w.header({value_col, "approx_over_exact_theta", "approx_over_exact_r",
                  "egnorm_over_vg_theta", "egnorm_over_vg_r", "quality_flag"});
        for (const Row& r : rows) {
          if (r.ok)
            w.row({fd(r.value), fd(r.approx_exact_theta), fd(r.approx_exact_r),
                   fd(r.egnorm_vg_theta), fd(r.egnorm_vg_r), r.quality ? "1" : "0"});
          else
            w.row({fd(r.value), "", "", "", "", "1"});
        }
      },
      json{{"axis", sw.axis},
           {"fresnel", {{"lower_m", fb.lower}, {"upper_m", fb.upper}}},
           {"scenario", scenario_json(g)},
           {"rows", jrows}});
  return 0;
}

// ------------------------------------------------------------------- nflr

int cmd_nflr(const GlobalOpts& g, const RegionOpts& region, double std_max, double epsilon,
             const CLI::App* cmd) {
  const bool have_abs = cmd->count("--std-max") > 0;
  const bool have_rel = cmd->count("--epsilon") > 0;
  if (have_abs == have_rel)
    throw std::invalid_argument("nflr: give exactly one of --std-max or --epsilon");
  const nfcrb::NflrCriterion crit = have_abs ? nfcrb::NflrCriterion::absolute(std_max)
                                             : nfcrb::NflrCriterion::relative(epsilon);
  const nfcrb::NflrMap map = nfcrb::nflr_map(g.array(), region.spec(), g.scenario(), crit);
  write_artifact(
      g, [&](std::ostream& os) { nfcrb::write_nflr_csv(os, map); },
      nfcrb::nflr_to_json(map));
  return 0;
}

// ------------------------------------------------- min-time / min-snr

int cmd_min_scalar(const GlobalOpts& g, const RegionOpts& region, double range, double angle_deg,
                   double epsilon, bool is_time, const CLI::App* cmd) {
  const ArrayConfig cfg = g.array();
  const ScenarioParams params = g.conditional(g.gain_model());
  json j{{"epsilon", epsilon}, {"scenario", scenario_json(g)}};
  std::vector<std::string> header, row;
  if (region.given(cmd)) {
    const nfcrb::RegionDesignResult res =
        is_time ? nfcrb::min_time_region(cfg, region.spec(), params, epsilon)
                : nfcrb::min_snr_region(cfg, region.spec(), params, epsilon);
    j["argmax_r_m"] = res.argmax_range;
    j["argmax_theta_deg"] = nfcrb::rad2deg(res.argmax_theta);
    if (is_time) {
      j["t_min"] = res.value;
      j["t_min_snapshots"] = std::ceil(res.value);
      header = {"t_min", "t_min_snapshots", "argmax_r_m", "argmax_theta_deg"};
      row = {fd(res.value), fd(std::ceil(res.value)), fd(res.argmax_range),
             fd(nfcrb::rad2deg(res.argmax_theta))};
    } else {
      j["det_snr_min"] = res.value;
      header = {"det_snr_min", "argmax_r_m", "argmax_theta_deg"};
      row = {fd(res.value), fd(res.argmax_range), fd(nfcrb::rad2deg(res.argmax_theta))};
    }
  } else {
    const SourceLocation loc(range, nfcrb::deg2rad(angle_deg));
    if (is_time) {
      const double t = nfcrb::min_observation_time(cfg, loc, params, epsilon);
      j["t_min"] = t;
      j["t_min_snapshots"] = std::ceil(t);
      header = {"t_min", "t_min_snapshots"};
      row = {fd(t), fd(std::ceil(t))};
    } else {
      const double s = nfcrb::min_snr(cfg, loc, params, epsilon);
      j["det_snr_min"] = s;
      header = {"det_snr_min"};
      row = {fd(s)};
    }
  }
  write_artifact(
      g,
      [&](std::ostream& os) {
        nfcrb::CsvWriter w(os);
        w.comment("epsilon", fd(epsilon));
        w.header(header);
        w.row(row);
      },
      j);
  return 0;
}

// ------------------------------------------------------------ min-sensors

int cmd_min_sensors(const GlobalOpts& g, const RegionOpts& region, double epsilon, int n_max) {
  const nfcrb::MinSensorsResult res =
      nfcrb::min_sensors(g.array(), region.spec(), g.conditional(g.gain_model()), epsilon, n_max);
  if (!res.n_min) {
    std::cerr << "min-sensors: target quality not achievable with n_max = " << n_max << "\n";
    return 3;
  }
  json j{{"epsilon", epsilon}, {"n_max", n_max}, {"n_min", *res.n_min},
         {"feasible", res.feasible}, {"scenario", scenario_json(g)}};
  write_artifact(
      g,
      [&](std::ostream& os) {
        nfcrb::CsvWriter w(os);
        w.comment("epsilon", fd(epsilon));
        w.comment("n_max", std::to_string(n_max));
        w.header({"n_min"});
        w.row({std::to_string(*res.n_min)});
      },
      j);
  return 0;
}

// ------------------------------------------------------------ mc-validate

int cmd_mc_validate(const GlobalOpts& g, const RegionOpts& region, double range, double angle_deg,
                    int runs, const std::string& delay_model, const CLI::App* cmd) {
  const ArrayConfig cfg = g.array();
  const SourceLocation truth(range, nfcrb::deg2rad(angle_deg));
  nfcrb::MlOptions opts;
  if (delay_model == "approx")
    opts.delay = nfcrb::DelayModel::approximate;
  else if (delay_model != "exact")
    throw std::invalid_argument("--delay-model must be 'exact' or 'approx'");

  RegionSpec search;
  if (region.given(cmd)) {
    search = region.spec();
  } else {
    // default: a window around the truth, clamped to the valid angle range
    const double th = nfcrb::rad2deg(truth.angle());
    search = RegionSpec(0.5 * truth.range(), 2.0 * truth.range(),
                        nfcrb::deg2rad(std::max(th - 20.0, -89.9)),
                        nfcrb::deg2rad(std::min(th + 20.0, 89.9)), 2, 2);
  }

  const nfcrb::McReport rep = nfcrb::monte_carlo(cfg, truth, g.scenario(), runs, g.seed,
                                                 search, opts);
  write_artifact(
      g,
      [&](std::ostream& os) {
        nfcrb::CsvWriter w(os);
        w.comment("seed", std::to_string(g.seed));
        w.header({"scenario", "runs", "failures", "mse_theta", "mse_r", "crb_theta", "crb_r",
                  "eff_theta", "eff_r"});
        w.row({rep.scenario, std::to_string(rep.runs), std::to_string(rep.failures),
               fd(rep.mse_theta), fd(rep.mse_r), fd(rep.crb_theta), fd(rep.crb_r),
               fd(rep.eff_theta), fd(rep.eff_r)});
      },
      json{{"scenario", rep.scenario},
           {"runs", rep.runs},
           {"failures", rep.failures},
           {"mse_theta", rep.mse_theta},
           {"mse_r", rep.mse_r},
           {"crb_theta", rep.crb_theta},
           {"crb_r", rep.crb_r},
           {"eff_theta", rep.eff_theta},
           {"eff_r", rep.eff_r},
           {"seed", g.seed}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-field localization bounds, regions and ML validation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (flags override file values)");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed for simulation commands");
  app.add_option("--format", g.format, "output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--n-sensors", g.n_sensors, "sensor count N")->required();
  app.add_option("--spacing", g.spacing, "inter-element spacing d, m")->required();
  app.add_option("--wavelength", g.wavelength, "carrier wavelength, m")->required();
  app.add_option("--model", g.model, "signal model: conditional | unconditional")
      ->check(CLI::IsMember({"conditional", "unconditional"}));
  app.add_option("--gain", g.gain, "gain model: equal | variable")
      ->check(CLI::IsMember({"equal", "variable"}));
  app.add_option("--snapshots", g.snapshots, "observation count T");
  app.add_option("--noise-var", g.noise_var, "noise variance sigma^2");
  app.add_option("--amplitude", g.amplitude, "conditional source amplitude (constant over t)");
  app.add_option("--signal-var", g.signal_var, "unconditional signal variance sigma_s^2");

  CLI::App* fresnel = app.add_subcommand("fresnel", "Fresnel region bounds");

  CLI::App* sweep = app.add_subcommand("crb-sweep", "bound sweep over range or angle");
  SweepOpts sweep_opts;
  sweep_opts.attach(sweep);
  std::string sources = "lemma1,oracle";
  sweep->add_option("--sources", sources,
                    "comma list: lemma1,lemma4,lemma5,lemma6,taylor,approx,oracle");

  CLI::App* compare = app.add_subcommand("compare", "exact/approximate and EG/VG ratio sweep");
  SweepOpts compare_opts;
  compare_opts.attach(compare);

  CLI::App* nflr = app.add_subcommand("nflr", "near-field localization region map");
  RegionOpts nflr_region;
  nflr_region.attach(nflr, true);
  double std_max = 0.0, nflr_eps = 0.0;
  nflr->add_option("--std-max", std_max, "absolute position-error tolerance, m");
  nflr->add_option("--epsilon", nflr_eps, "relative location-error tolerance");

  CLI::App* min_time = app.add_subcommand("min-time", "minimum observation time for a tolerance");
  RegionOpts mt_region;
  mt_region.attach(min_time, false);
  double mt_range = 10.0, mt_angle = 45.0, mt_eps = 0.0;
  min_time->add_option("--range", mt_range, "source range, m");
  min_time->add_option("--angle-deg", mt_angle, "source angle, deg");
  min_time->add_option("--epsilon", mt_eps, "relative tolerance")->required();

  CLI::App* min_snr = app.add_subcommand("min-snr", "minimum deterministic SNR for a tolerance");
  RegionOpts ms_region;
  ms_region.attach(min_snr, false);
  double ms_range = 10.0, ms_angle = 45.0, ms_eps = 0.0;
  min_snr->add_option("--range", ms_range, "source range, m");
  min_snr->add_option("--angle-deg", ms_angle, "source angle, deg");
  min_snr->add_option("--epsilon", ms_eps, "relative tolerance")->required();

  CLI::App* min_sensors = app.add_subcommand("min-sensors", "minimum sensor count over a region");
  RegionOpts msn_region;
  msn_region.attach(min_sensors, true);
  double msn_eps = 0.0;
  int n_max = 256;
  min_sensors->add_option("--epsilon", msn_eps, "relative tolerance")->required();
  min_sensors->add_option("--n-max", n_max, "search cap");

  CLI::App* mc = app.add_subcommand("mc-validate", "ML Monte-Carlo efficiency report");
  RegionOpts mc_region;
  mc_region.attach(mc, false);
  double mc_range = 10.0, mc_angle = 45.0;
  int mc_runs = 500;
  std::string mc_delay = "exact";
  mc->add_option("--range", mc_range, "true source range, m");
  mc->add_option("--angle-deg", mc_angle, "true source angle, deg");
  mc->add_option("--runs", mc_runs, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  mc->add_option("--delay-model", mc_delay, "estimator steering model: exact | approx");

  for (CLI::App* sub : {fresnel, sweep, compare, nflr, min_time, min_snr, min_sensors, mc})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (fresnel->parsed()) return cmd_fresnel(g);
    if (sweep->parsed()) return cmd_crb_sweep(g, sweep_opts, sources, sweep);
    if (compare->parsed()) return cmd_compare(g, compare_opts, compare);
    if (nflr->parsed()) return cmd_nflr(g, nflr_region, std_max, nflr_eps, nflr);
    if (min_time->parsed())
      return cmd_min_scalar(g, mt_region, mt_range, mt_angle, mt_eps, true, min_time);
    if (min_snr->parsed())
      return cmd_min_scalar(g, ms_region, ms_range, ms_angle, ms_eps, false, min_snr);
    if (min_sensors->parsed()) return cmd_min_sensors(g, msn_region, msn_eps, n_max);
    if (mc->parsed())
      return cmd_mc_validate(g, mc_region, mc_range, mc_angle, mc_runs, mc_delay, mc);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const nfcrb::IllConditioned& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const nfcrb::NearSingular& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const nfcrb::DegenerateGeometry& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const nfcrb::EmptySearchRegion& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
