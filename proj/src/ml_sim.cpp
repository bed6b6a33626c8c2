#include "nfcrb/ml_sim.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

#include "nfcrb/crb.hpp"
#include "nfcrb/geometry.hpp"

namespace nfcrb {

namespace {

using Cx = std::complex<double>;

// Deterministic complex-Gaussian sampler: Box-Muller over explicit 53-bit
// uniforms from mt19937_64, so streams are identical across platforms.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

  // uniform in (0, 1]
  double uniform_pos() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

  Cx cnormal(double variance) {
    const double u1 = uniform_pos();
    const double u2 = uniform_pos();
    const double mag = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(variance / 2.0);
    return {mag * std::cos(2.0 * M_PI * u2), mag * std::sin(2.0 * M_PI * u2)};
  }

 private:
  std::mt19937_64 eng_;
};

struct ObjectiveParts {
  double value;
  double grad_theta;
  double grad_r;
};

ObjectiveParts objective_parts(const ArrayConfig& cfg, const Eigen::MatrixXcd& data,
                               const SourceLocation& candidate, GainModel gain,
                               DelayModel delay) {
  const SteeringDerivatives s = steering_derivatives(cfg, candidate, gain, delay);
  const double g2 = s.v.squaredNorm();
  const double g2_dth = 2.0 * s.v.dot(s.d_theta).real();
  const double g2_dr = 2.0 * s.v.dot(s.d_r).real();

  // c_t = v^H x_t and its parameter derivatives, batched over snapshots
  const Eigen::VectorXcd c = data.conjugate() * s.v;        // conj(c_t)
  const Eigen::VectorXcd c_dth = data.conjugate() * s.d_theta;
  const Eigen::VectorXcd c_dr = data.conjugate() * s.d_r;

  const double power = c.squaredNorm();  // sum_t |c_t|^2
  const double cross_th = c.dot(c_dth).real() * 2.0;
  const double cross_r = c.dot(c_dr).real() * 2.0;

  ObjectiveParts out;
  out.value = power / g2;
  out.grad_theta = cross_th / g2 - power * g2_dth / (g2 * g2);
  out.grad_r = cross_r / g2 - power * g2_dr / (g2 * g2);
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 over the combined state
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SnapshotSet generate_snapshots(const ArrayConfig& cfg, const SourceLocation& loc,
                               const ScenarioParams& params, std::uint64_t seed) {
  // generation tolerates zero variances (exact noiseless data is a valid and
  // useful draw); the bound evaluations keep the strict > 0 invariants
  if (params.noise_var < 0.0)
    throw std::invalid_argument("generate_snapshots: noise_var must be >= 0");
  if (params.model == SignalModel::unconditional && params.signal_var < 0.0)
    throw std::invalid_argument("generate_snapshots: signal_var must be >= 0");
  const int t_count = params.snapshot_count();
  const int n = cfg.n_sensors();
  const Eigen::VectorXcd v = steering_vector(cfg, loc, params.gain);

  GaussianSampler rng(seed);
  Eigen::MatrixXcd data(t_count, n);
  for (int t = 0; t < t_count; ++t) {
    Cx st;
    if (params.model == SignalModel::conditional) {
      st = std::polar(params.amplitude_at(t), params.phase_at(t));
    } else {
      st = rng.cnormal(params.signal_var);
    }
    for (int k = 0; k < n; ++k) data(t, k) = st * v(k);
  }
  // noise drawn after the signals so the signal stream is flavor-comparable
  if (params.noise_var > 0.0) {
    for (int t = 0; t < t_count; ++t)
      for (int k = 0; k < n; ++k) data(t, k) += rng.cnormal(params.noise_var);
  }
  return {std::move(data), cfg, loc, params, seed};
}

double ml_objective(const ArrayConfig& cfg, const Eigen::MatrixXcd& data,
                    const SourceLocation& candidate, GainModel gain, DelayModel delay) {
  const Eigen::VectorXcd v = steering_vector(cfg, candidate, gain, delay);
  return (data.conjugate() * v).squaredNorm() / v.squaredNorm();
}

std::array<double, 2> ml_objective_gradient(const ArrayConfig& cfg, const Eigen::MatrixXcd& data,
                                            const SourceLocation& candidate, GainModel gain,
                                            DelayModel delay) {
  const ObjectiveParts p = objective_parts(cfg, data, candidate, gain, delay);
  return {p.grad_theta, p.grad_r};
}

MlEstimate ml_estimate(const ArrayConfig& cfg, const Eigen::MatrixXcd& data,
                       const RegionSpec& search, GainModel gain, const MlOptions& opts) {
  search.validate();

  // coarse grid initialization
  RegionSpec grid = search;
  grid.grid_nr = opts.grid_nr;
  grid.grid_ntheta = opts.grid_ntheta;
  double best = -std::numeric_limits<double>::infinity();
  double theta = 0.0, r = 0.0;
  int evaluated = 0;
  for (double rr : grid.range_grid())
    for (double th : grid.angle_grid()) {
      try {
        const double val = ml_objective(cfg, data, SourceLocation(rr, th), gain, opts.delay);
        ++evaluated;
        if (val > best) {
          best = val;
          theta = th;
          r = rr;
        }
      } catch (const DegenerateGeometry&) {
      }
    }
  if (evaluated == 0)
    throw EmptySearchRegion("ml_estimate: no evaluable candidate in the search region");

  const auto clamp = [&](double& th, double& rr) {
    th = std::min(std::max(th, search.theta_min), search.theta_max);
    rr = std::min(std::max(rr, search.r_min), search.r_max);
  };

  // damped Newton-Raphson on (theta, r)
  MlEstimate est;
  double f = best;
  const double cell_th = (search.theta_max - search.theta_min) / opts.grid_ntheta;
  const double cell_r = (search.r_max - search.r_min) / opts.grid_nr;
  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iterations; ++iter) {
    const ObjectiveParts p = objective_parts(cfg, data, SourceLocation(r, theta), gain, opts.delay);
    f = p.value;
    const double gnorm = std::max(std::abs(p.grad_theta), std::abs(p.grad_r));
    if (gnorm <= opts.gradient_tol * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }

    // numeric Hessian by central differences of the analytic gradient
    const double h_th = 1e-6 * (1.0 + std::abs(theta));
    const double h_r = 1e-6 * std::max(1.0, r);
    const auto grad_at = [&](double th, double rr) {
      clamp(th, rr);
      return ml_objective_gradient(cfg, data, SourceLocation(rr, th), gain, opts.delay);
    };
    const auto gp_th = grad_at(theta + h_th, r);
    const auto gm_th = grad_at(theta - h_th, r);
    const auto gp_r = grad_at(theta, r + h_r);
    const auto gm_r = grad_at(theta, r - h_r);
    const double h00 = (gp_th[0] - gm_th[0]) / (2.0 * h_th);
    const double h11 = (gp_r[1] - gm_r[1]) / (2.0 * h_r);
    const double h01 = 0.5 * ((gp_th[1] - gm_th[1]) / (2.0 * h_th) +
                              (gp_r[0] - gm_r[0]) / (2.0 * h_r));

    // Newton step solves H s = -g; fall back to metric-scaled ascent when the
    // Newton direction is not an ascent direction
    const double det = h00 * h11 - h01 * h01;
    double s_th, s_r;
    bool have_newton = std::abs(det) > 1e-300;
    if (have_newton) {
      s_th = -(h11 * p.grad_theta - h01 * p.grad_r) / det;
      s_r = -(h00 * p.grad_r - h01 * p.grad_theta) / det;
      have_newton = s_th * p.grad_theta + s_r * p.grad_r > 0.0;
    }
    if (!have_newton) {
      s_th = p.grad_theta * cell_th * cell_th;
      s_r = p.grad_r * cell_r * cell_r;
    }

    // step halving on non-increase; near the flat top the objective
    // difference drowns in roundoff, so "non-increase" carries an eps-scale
    // slack (convergence is still decided by the gradient test alone)
    const double slack = 1e-12 * (1.0 + std::abs(f));
    double step = 1.0;
    bool accepted = false;
    for (; step > 1e-12; step *= 0.5) {
      double th_new = theta + step * s_th;
      double r_new = r + step * s_r;
      clamp(th_new, r_new);
      double f_new;
      try {
        f_new = ml_objective(cfg, data, SourceLocation(r_new, th_new), gain, opts.delay);
      } catch (const DegenerateGeometry&) {
        continue;  // candidate sits on the array line; halve further
      }
      if (f_new > f - slack) {
        theta = th_new;
        r = r_new;
        f = std::max(f_new, f);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  est.theta_hat = theta;
  est.r_hat = r;
  est.converged = converged;
  est.iterations = iter;
  est.objective_value = f;
  return est;
}

McReport monte_carlo(const ArrayConfig& cfg, const SourceLocation& loc,
                     const ScenarioParams& params, int runs, std::uint64_t base_seed,
                     const RegionSpec& search, const MlOptions& opts) {
  if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be >= 1");
  params.validate();

  McReport rep;
  {
    std::ostringstream id;
    id << "N" << cfg.n_sensors() << "_T" << params.snapshot_count() << "_r" << loc.range()
       << "_theta" << rad2deg(loc.angle())
       << (params.model == SignalModel::conditional ? "_cond" : "_uncond")
       << (params.gain == GainModel::equal ? "_eg" : "_vg")
       << (opts.delay == DelayModel::exact ? "" : "_approxmodel");
    rep.scenario = id.str();
  }
  rep.runs = runs;

  // every trial contributes its estimate (the constrained maximizer over the
  // search region); the failure count tracks trials whose gradient test did
  // not close, e.g. estimates pinned at the region boundary
  double se_theta = 0.0, se_r = 0.0;
  for (int trial = 0; trial < runs; ++trial) {
    const SnapshotSet snap =
        generate_snapshots(cfg, loc, params, derive_seed(base_seed, static_cast<std::uint64_t>(trial)));
    const MlEstimate est = ml_estimate(cfg, snap.data, search, params.gain, opts);
    if (!est.converged) ++rep.failures;
    se_theta += (est.theta_hat - loc.angle()) * (est.theta_hat - loc.angle());
    se_r += (est.r_hat - loc.range()) * (est.r_hat - loc.range());
  }
  rep.mse_theta = se_theta / runs;
  rep.mse_r = se_r / runs;

  const CrbResult crb = closed_form_crb(cfg, loc, params);
  rep.crb_theta = crb.theta;
  rep.crb_r = crb.range;
  rep.eff_theta = rep.mse_theta / crb.theta;
  rep.eff_r = rep.mse_r / crb.range;
  return rep;
}

}  // namespace nfcrb
