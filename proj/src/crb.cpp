#include "nfcrb/crb.hpp"

#include <cmath>

namespace nfcrb {

namespace {

constexpr double kDetFloor = 1e-30;
constexpr double kLateralCos = 1e-3;

struct Entries {
  double theta, range, coupling;
};

// Entries of the inverse of 2TD * [[E_th, E_rt], [E_rt, E_r]].
Entries invert_energy(double e_theta, double e_r, double e_r_theta, double two_t_d) {
  const double det = e_theta * e_r - e_r_theta * e_r_theta;
  if (!(det > kDetFloor))
    throw NearSingular("energy-term determinant below 1e-30 (theta too close to +-pi/2)");
  const double scale = 1.0 / (two_t_d * det);
  return {e_r * scale, e_theta * scale, -e_r_theta * scale};
}

CrbResult finish(const Entries& e, CrbSource source, const SourceLocation& loc) {
  CrbResult r;
  r.theta = e.theta;
  r.range = e.range;
  r.coupling = e.coupling;
  r.source = source;
  r.near_lateral = std::abs(std::cos(loc.angle())) < kLateralCos;
  return r;
}

void require_conditional(const ScenarioParams& params, const char* who) {
  params.validate();
  if (params.model != SignalModel::conditional)
    throw std::invalid_argument(std::string(who) + ": conditional params required");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

}  // namespace

EgEnergyTerms eg_energy_terms(const DelayProfile& tau) {
  const double n = static_cast<double>(tau.values.size());
  const double s_th = sum(tau.d_theta);
  const double s_r = sum(tau.d_r);
  return {dot(tau.d_theta, tau.d_theta) - s_th * s_th / n,
          dot(tau.d_r, tau.d_r) - s_r * s_r / n,
          dot(tau.d_theta, tau.d_r) - s_th * s_r / n};
}

VgEnergyTerms vg_energy_terms(const DelayProfile& tau, const GainProfile& gamma) {
  const size_t n = tau.values.size();
  double g2 = 0.0;           // ||gamma||^2
  double q_th = 0.0, q_r = 0.0;   // (gamma o gamma)^T dtau
  double p_th = 0.0, p_r = 0.0;   // gamma^T dgamma
  double w_th = 0.0, w_r = 0.0;   // ||dgamma||^2 + (gamma o gamma)^T (dtau o dtau)
  double w_rt = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double g = gamma.values[i];
    const double gg = g * g;
    g2 += gg;
    q_th += gg * tau.d_theta[i];
    q_r += gg * tau.d_r[i];
    p_th += g * gamma.d_theta[i];
    p_r += g * gamma.d_r[i];
    w_th += gamma.d_theta[i] * gamma.d_theta[i] + gg * tau.d_theta[i] * tau.d_theta[i];
    w_r += gamma.d_r[i] * gamma.d_r[i] + gg * tau.d_r[i] * tau.d_r[i];
    w_rt += gamma.d_theta[i] * gamma.d_r[i] + gg * tau.d_theta[i] * tau.d_r[i];
  }
  VgEnergyTerms e;
  e.e_theta = w_th - (q_th * q_th + p_th * p_th) / g2;
  e.e_r = w_r - (q_r * q_r + p_r * p_r) / g2;
  e.e_r_theta = w_rt - (q_th * q_r + p_th * p_r) / g2;
  e.gamma_sq_norm = g2;
  return e;
}

CrbResult crb_conditional_eg(const ArrayConfig& cfg, const SourceLocation& loc,
                             const ScenarioParams& params) {
  require_conditional(params, "crb_conditional_eg");
  const EgEnergyTerms e = eg_energy_terms(exact_delay(cfg, loc));
  const double two_t_d = 2.0 * params.snapshots * params.det_snr();
  return finish(invert_energy(e.e_theta, e.e_r, e.e_r_theta, two_t_d), CrbSource::lemma1, loc);
}

CrbResult crb_conditional_vg(const ArrayConfig& cfg, const SourceLocation& loc,
                             const ScenarioParams& params) {
  require_conditional(params, "crb_conditional_vg");
  const VgEnergyTerms e = vg_energy_terms(exact_delay(cfg, loc), gain_profile(cfg, loc));
  const double two_t_d = 2.0 * params.snapshots * params.det_snr();
  return finish(invert_energy(e.e_theta, e.e_r, e.e_r_theta, two_t_d), CrbSource::lemma5, loc);
}

CrbResult crb_unconditional(const ArrayConfig& cfg, const SourceLocation& loc,
                            const ScenarioParams& params) {
  params.validate();
  if (params.model != SignalModel::unconditional)
    throw std::invalid_argument("crb_unconditional: unconditional params required");
  const double snr = params.snr();

  double e_theta, e_r, e_r_theta, g2;
  CrbSource source;
  const DelayProfile tau = exact_delay(cfg, loc);
  if (params.gain == GainModel::equal) {
    const EgEnergyTerms e = eg_energy_terms(tau);
    e_theta = e.e_theta;
    e_r = e.e_r;
    e_r_theta = e.e_r_theta;
    g2 = static_cast<double>(cfg.n_sensors());
    source = CrbSource::lemma4;
  } else {
    const VgEnergyTerms e = vg_energy_terms(tau, gain_profile(cfg, loc));
    e_theta = e.e_theta;
    e_r = e.e_r;
    e_r_theta = e.e_r_theta;
    g2 = e.gamma_sq_norm;
    source = CrbSource::lemma6;
  }

  // (1 + SNR g) / (2 T SNR^2 g) * E / det(E): the unconditional factor applied
  // to the D-normalized conditional entries.
  const double two_t_eff = 2.0 * params.snapshots * (snr * snr * g2) / (1.0 + snr * g2);
  return finish(invert_energy(e_theta, e_r, e_r_theta, two_t_eff), source, loc);
}

CrbResult crb_taylor_eg(const ArrayConfig& cfg, const SourceLocation& loc,
                        const ScenarioParams& params) {
  require_conditional(params, "crb_taylor_eg");
  const double n = static_cast<double>(cfg.n_sensors());
  const double d = cfg.spacing();
  const double lambda = cfg.wavelength();
  const double r = loc.range();
  const double s = std::sin(loc.angle());
  const double c = std::cos(loc.angle());
  const double dr = d / r;
  const double two_t_d = 2.0 * params.snapshots * params.det_snr();
  const double p2 = p2_poly(cfg.n_sensors());
  const double p3 = p3_poly(cfg.n_sensors());

  const double theta_bracket =
      p2 - 6.0 * (n - 1.0) * (6.0 * n * n - 15.0 * n + 11.0) * s * dr +
      (1.0 / 70.0) * (2.0 * n - 1.0) *
          (384.0 * n * n * n - 1353.0 * n * n + 1379.0 * n - 368.0) * dr * dr +
      (1.0 / 14.0) *
          (186.0 * n * n * n * n - 1590.0 * n * n * n + 5351.0 * n * n - 6795.0 * n + 2890.0) *
          s * s * dr * dr;
  const double theta_pref = 3.0 * lambda * lambda /
                            (two_t_d * d * d * M_PI * M_PI * c * c * p3);

  const double range_bracket =
      15.0 * r * r - 60.0 * (n - 1.0) * s * d * r +
      (1.0 / 14.0) *
          (s * s * (1061.0 * n * n - 2625.0 * n + 2911.0) + 225.0 * n * n - 315.0 * n - 135.0) *
          d * d;
  const double range_pref = 12.0 * r * r * lambda * lambda /
                            (two_t_d * d * d * d * d * M_PI * M_PI * c * c * c * c * p3);

  CrbResult out;
  out.theta = theta_pref * theta_bracket;
  out.range = range_pref * range_bracket;
  out.coupling.reset();  // not available at this expansion order
  out.source = CrbSource::taylor_lemma2;
  out.near_lateral = std::abs(c) < kLateralCos;
  return out;
}

CrbResult crb_approx_literature(const ArrayConfig& cfg, const SourceLocation& loc,
                                const ScenarioParams& params) {
  require_conditional(params, "crb_approx_literature");
  const double n = static_cast<double>(cfg.n_sensors());
  const double d = cfg.spacing();
  const double lambda = cfg.wavelength();
  const double r = loc.range();
  const double s = std::sin(loc.angle());
  const double c = std::cos(loc.angle());
  const double two_t_d = 2.0 * params.snapshots * params.det_snr();
  const double p2 = p2_poly(cfg.n_sensors());
  const double p3 = p3_poly(cfg.n_sensors());

  CrbResult out;
  out.theta = 3.0 * lambda * lambda * p2 / (two_t_d * d * d * M_PI * M_PI * c * c * p3);
  out.range = 12.0 * r * r * lambda * lambda /
              (two_t_d * d * d * d * d * M_PI * M_PI * c * c * c * c * p3) *
              (15.0 * r * r + 30.0 * d * r * (n - 1.0) * s + d * d * p2 * s * s);
  out.coupling.reset();  // the literature form provides no cross term
  out.source = CrbSource::approx_lemma3;
  out.near_lateral = std::abs(c) < kLateralCos;
  return out;
}

CrbResult closed_form_crb(const ArrayConfig& cfg, const SourceLocation& loc,
                          const ScenarioParams& params) {
  if (params.model == SignalModel::unconditional) return crb_unconditional(cfg, loc, params);
  return params.gain == GainModel::equal ? crb_conditional_eg(cfg, loc, params)
                                         : crb_conditional_vg(cfg, loc, params);
}

FirstOrderComparison crb_firstorder_comparison(const ArrayConfig& cfg, const SourceLocation& loc,
                                               const ScenarioParams& params) {
  require_conditional(params, "crb_firstorder_comparison");
  const double d = cfg.spacing();
  const double lambda = cfg.wavelength();
  const double r = loc.range();
  const double c = std::cos(loc.angle());
  const double t = params.snapshots;
  const double dsnr = params.det_snr();
  const double p2 = p2_poly(cfg.n_sensors());
  const double p3 = p3_poly(cfg.n_sensors());
  const double l2 = lambda * lambda;
  const double f1 = f1_factor(cfg, loc.angle());
  const double f2 = f2_factor(cfg, loc.angle());

  FirstOrderComparison out;
  out.eg_theta = 3.0 * l2 * p2 / (2.0 * M_PI * M_PI * t * dsnr * d * d * c * c * p3);
  out.vg_theta = 3.0 * l2 * r * r * p2 * (1.0 + l2 * f1) /
                 (2.0 * M_PI * M_PI * t * dsnr * d * d * c * c * p3 * (1.0 + l2 * f2));
  const double c4 = c * c * c * c;
  out.eg_r = 90.0 * l2 * r * r * r * r / (M_PI * M_PI * t * dsnr * d * d * d * d * c4 * p3);
  out.vg_r = 90.0 * l2 * std::pow(r, 6) /
             (M_PI * M_PI * t * dsnr * d * d * d * d * c4 * p3 * (1.0 + l2 * f2));
  return out;
}

double p2_poly(int n_sensors) {
  const double n = static_cast<double>(n_sensors);
  return (8.0 * n - 11.0) * (2.0 * n - 1.0);
}

double p3_poly(int n_sensors) {
  const double n = static_cast<double>(n_sensors);
  return n * (n * n - 1.0) * (n * n - 4.0);
}

double f1_factor(const ArrayConfig& cfg, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double d = cfg.spacing();
  return 15.0 * s * s / (M_PI * M_PI * d * d * c * c * c * c * p2_poly(cfg.n_sensors()));
}

double f2_factor(const ArrayConfig& cfg, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double d = cfg.spacing();
  const double n = static_cast<double>(cfg.n_sensors());
  return 15.0 * s * s / (M_PI * M_PI * d * d * c * c * c * c * (n * n - 4.0));
}

ScenarioParams received_power_normalized(const ScenarioParams& params, double range) {
  ScenarioParams out = params;
  if (params.model == SignalModel::conditional) {
    out.amplitude = params.amplitude / range;
    for (double& a : out.amplitudes) a /= range;
  } else {
    out.signal_var = params.signal_var / (range * range);
  }
  return out;
}

}  // namespace nfcrb
