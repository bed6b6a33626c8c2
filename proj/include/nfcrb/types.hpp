#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfcrb {

// Source is collinear with the array segment (phase/gain profiles blow up).
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fisher matrix condition number exceeds the trust threshold (1e12).
class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Energy-term determinant below 1e-30: the bound is numerically meaningless.
class NearSingular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No evaluable candidate in the requested search region.
class EmptySearchRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SignalModel { conditional, unconditional };
enum class GainModel { equal, variable };
enum class DelayModel { exact, approximate };

// Uniform linear array: N sensors at positions n*d, n = 0..N-1, sensor 0 is
// the phase reference.
class ArrayConfig {
 public:
  ArrayConfig(int n_sensors, double spacing_m, double wavelength_m)
      : n_(n_sensors), d_(spacing_m), lambda_(wavelength_m) {
    if (n_ < 3) throw std::invalid_argument("ArrayConfig: n_sensors must be >= 3");
    if (!(d_ > 0.0)) throw std::invalid_argument("ArrayConfig: spacing must be > 0");
    if (!(lambda_ > 0.0)) throw std::invalid_argument("ArrayConfig: wavelength must be > 0");
  }
  int n_sensors() const { return n_; }
  double spacing() const { return d_; }
  double wavelength() const { return lambda_; }
  double aperture() const { return (n_ - 1) * d_; }

 private:
  int n_;
  double d_;
  double lambda_;
};

// Polar source position relative to sensor 0. Angle is measured from the
// array broadside, open interval (-pi/2, pi/2); the endpoints are excluded
// because every bound diverges there.
class SourceLocation {
 public:
  SourceLocation(double range_m, double angle_rad) : r_(range_m), theta_(angle_rad) {
    if (!(r_ > 0.0)) throw std::invalid_argument("SourceLocation: range must be > 0");
    if (!(std::abs(theta_) < M_PI / 2.0))
      throw std::invalid_argument("SourceLocation: |angle| must be < pi/2 strictly");
  }
  double range() const { return r_; }
  double angle() const { return theta_; }

 private:
  double r_;
  double theta_;
};

// Signal/noise description of one scenario. `snapshots` is a real so that
// the design-scenario identities (T_min plugged back into the bound) stay
// exact; simulation and FIM assembly require it to be integral.
struct ScenarioParams {
  SignalModel model = SignalModel::conditional;
  GainModel gain = GainModel::equal;
  double snapshots = 1.0;          // T
  double noise_var = 1.0;          // sigma^2
  double signal_var = 0.0;         // sigma_s^2 (unconditional only)
  double amplitude = 1.0;          // constant alpha(t), used when amplitudes empty
  std::vector<double> amplitudes;  // optional per-snapshot alpha(t)
  std::vector<double> phases;      // optional per-snapshot psi(t); empty = all zero

  static ScenarioParams conditional(GainModel g, double t, double noise_var,
                                    double amplitude = 1.0) {
    ScenarioParams p;
    p.model = SignalModel::conditional;
    p.gain = g;
    p.snapshots = t;
    p.noise_var = noise_var;
    p.amplitude = amplitude;
    p.validate();
    return p;
  }

  static ScenarioParams conditional(GainModel g, std::vector<double> amps,
                                    std::vector<double> psis, double noise_var) {
    ScenarioParams p;
    p.model = SignalModel::conditional;
    p.gain = g;
    p.snapshots = static_cast<double>(amps.size());
    p.noise_var = noise_var;
    p.amplitudes = std::move(amps);
    p.phases = std::move(psis);
    p.validate();
    return p;
  }

  static ScenarioParams unconditional(GainModel g, double t, double noise_var,
                                      double signal_var) {
    ScenarioParams p;
    p.model = SignalModel::unconditional;
    p.gain = g;
    p.snapshots = t;
    p.noise_var = noise_var;
    p.signal_var = signal_var;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(snapshots >= 1.0)) throw std::invalid_argument("ScenarioParams: snapshots must be >= 1");
    if (!(noise_var > 0.0)) throw std::invalid_argument("ScenarioParams: noise_var must be > 0");
    if (model == SignalModel::unconditional) {
      if (!(signal_var > 0.0))
        throw std::invalid_argument("ScenarioParams: signal_var must be > 0");
    } else {
      if (amplitudes.empty()) {
        if (!(amplitude > 0.0))
          throw std::invalid_argument("ScenarioParams: amplitude must be > 0");
      } else {
        if (static_cast<double>(amplitudes.size()) != snapshots)
          throw std::invalid_argument("ScenarioParams: amplitudes size must equal snapshots");
        for (double a : amplitudes)
          if (!(a > 0.0)) throw std::invalid_argument("ScenarioParams: amplitudes must be > 0");
      }
      if (!phases.empty() && static_cast<double>(phases.size()) != snapshots)
        throw std::invalid_argument("ScenarioParams: phases size must equal snapshots");
    }
  }

  // Integral snapshot count for simulation / FIM assembly.
  int snapshot_count() const {
    const double rounded = std::nearbyint(snapshots);
    if (std::abs(snapshots - rounded) > 1e-9 || rounded < 1.0)
      throw std::invalid_argument("ScenarioParams: integral snapshot count required here");
    return static_cast<int>(rounded);
  }

  double amplitude_at(int t) const {
    return amplitudes.empty() ? amplitude : amplitudes[static_cast<size_t>(t)];
  }
  double phase_at(int t) const {
    return phases.empty() ? 0.0 : phases[static_cast<size_t>(t)];
  }

  double alpha_sq_sum() const {  // ||alpha||^2
    if (amplitudes.empty()) return snapshots * amplitude * amplitude;
    double s = 0.0;
    for (double a : amplitudes) s += a * a;
    return s;
  }

  // Deterministic SNR ||alpha||^2 / (T sigma^2). For the variable-gain model
  // the same number plays the role of the range-scaled deterministic SNR
  // (units m^2): the 1/r scaling lives in the gain profile.
  double det_snr() const { return alpha_sq_sum() / (snapshots * noise_var); }

  double snr() const { return signal_var / noise_var; }  // sigma_s^2 / sigma^2

  ScenarioParams with_snapshots(double t) const {
    ScenarioParams p = *this;
    p.snapshots = t;
    if (!p.amplitudes.empty() || !p.phases.empty()) {
      // per-snapshot vectors are tied to the old T; drop to the constant form
      throw std::invalid_argument("with_snapshots: only constant-amplitude params can be rescaled");
    }
    return p;
  }
};

enum class CrbSource {
  lemma1,
  lemma4,
  lemma5,
  lemma6,
  oracle_conditional,
  oracle_unconditional,
  taylor_lemma2,
  approx_lemma3,
  firstorder_sec43,
};

const char* to_string(CrbSource s);

// 2x2 lower bound on the covariance of any unbiased (theta, r) estimator.
// `coupling` is absent when the producing expansion does not provide the
// cross term (it is never silently zero).
struct CrbResult {
  double theta = 0.0;                  // rad^2
  double range = 0.0;                  // m^2
  std::optional<double> coupling;      // rad*m, sign as in the inverse FIM
  CrbSource source = CrbSource::lemma1;
  bool near_lateral = false;           // |cos(theta)| < 1e-3: bound legitimately huge
};

// Rectangular (r, theta) evaluation window with a uniform grid, endpoints
// included.
struct RegionSpec {
  double r_min = 0.0, r_max = 0.0;          // m
  double theta_min = 0.0, theta_max = 0.0;  // rad
  int grid_nr = 2, grid_ntheta = 2;

  RegionSpec() = default;
  RegionSpec(double rmin, double rmax, double tmin, double tmax, int nr, int ntheta)
      : r_min(rmin), r_max(rmax), theta_min(tmin), theta_max(tmax),
        grid_nr(nr), grid_ntheta(ntheta) {
    validate();
  }

  void validate() const {
    if (!(r_min > 0.0 && r_min < r_max))
      throw std::invalid_argument("RegionSpec: need 0 < r_min < r_max");
    if (!(theta_min < theta_max && std::abs(theta_min) < M_PI / 2 &&
          std::abs(theta_max) < M_PI / 2))
      throw std::invalid_argument("RegionSpec: need -pi/2 < theta_min < theta_max < pi/2");
    if (grid_nr < 2 || grid_ntheta < 2)
      throw std::invalid_argument("RegionSpec: grid sizes must be >= 2");
  }

  std::vector<double> range_grid() const {
    std::vector<double> g(static_cast<size_t>(grid_nr));
    for (int i = 0; i < grid_nr; ++i)
      g[static_cast<size_t>(i)] = r_min + (r_max - r_min) * i / (grid_nr - 1);
    return g;
  }
  std::vector<double> angle_grid() const {
    std::vector<double> g(static_cast<size_t>(grid_ntheta));
    for (int i = 0; i < grid_ntheta; ++i)
      g[static_cast<size_t>(i)] = theta_min + (theta_max - theta_min) * i / (grid_ntheta - 1);
    return g;
  }
};

inline double deg2rad(double deg) { return deg * M_PI / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / M_PI; }

}  // namespace nfcrb
