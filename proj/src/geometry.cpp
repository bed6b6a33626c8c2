#include "nfcrb/geometry.hpp"

#include <cmath>

namespace nfcrb {

namespace {
constexpr double kRadicandFloor = 1e-12;
}

DelayProfile exact_delay(const ArrayConfig& cfg, const SourceLocation& loc) {
  const int n = cfg.n_sensors();
  const double d = cfg.spacing();
  const double lambda = cfg.wavelength();
  const double r = loc.range();
  const double sin_t = std::sin(loc.angle());
  const double cos_t = std::cos(loc.angle());
  const double two_pi_over_lambda = 2.0 * M_PI / lambda;

  DelayProfile p;
  p.values.resize(static_cast<size_t>(n));
  p.d_theta.resize(static_cast<size_t>(n));
  p.d_r.resize(static_cast<size_t>(n));
  p.values[0] = 0.0;
  p.d_theta[0] = 0.0;
  p.d_r[0] = 0.0;
  for (int k = 1; k < n; ++k) {
    const double kd = k * d;
    const double u = kd / r;
    const double radicand = 1.0 + u * u - 2.0 * u * sin_t;
    if (radicand <= kRadicandFloor)
      throw DegenerateGeometry("exact_delay: source collinear with the array segment");
    const double dn = r * std::sqrt(radicand);  // source-to-sensor-n distance
    // cancellation-free forms of (2 pi / lambda)(d_n - r) and its
    // r-derivative, via d_n^2 - (r - kd sin)^2 = (kd cos)^2
    p.values[static_cast<size_t>(k)] =
        two_pi_over_lambda * kd * (kd - 2.0 * r * sin_t) / (dn + r);
    p.d_theta[static_cast<size_t>(k)] = -two_pi_over_lambda * kd * r * cos_t / dn;
    p.d_r[static_cast<size_t>(k)] = -two_pi_over_lambda * kd * kd * cos_t * cos_t /
                                    (dn * (r - kd * sin_t + dn));
  }
  return p;
}

DelayProfile approx_delay(const ArrayConfig& cfg, const SourceLocation& loc) {
  const int n = cfg.n_sensors();
  const double d = cfg.spacing();
  const double lambda = cfg.wavelength();
  const double r = loc.range();
  const double sin_t = std::sin(loc.angle());
  const double cos_t = std::cos(loc.angle());

  DelayProfile p;
  p.values.resize(static_cast<size_t>(n));
  p.d_theta.resize(static_cast<size_t>(n));
  p.d_r.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double lin = 2.0 * M_PI * d * k / lambda;
    const double quad = M_PI * d * d * k * k / lambda;
    p.values[static_cast<size_t>(k)] = -lin * sin_t + quad * cos_t * cos_t / r;
    p.d_theta[static_cast<size_t>(k)] = -lin * cos_t - 2.0 * quad * sin_t * cos_t / r;
    p.d_r[static_cast<size_t>(k)] = -quad * cos_t * cos_t / (r * r);
  }
  return p;
}

GainProfile gain_profile(const ArrayConfig& cfg, const SourceLocation& loc) {
  const int n = cfg.n_sensors();
  const double d = cfg.spacing();
  const double r = loc.range();
  const double sin_t = std::sin(loc.angle());
  const double cos_t = std::cos(loc.angle());

  GainProfile p;
  p.values.resize(static_cast<size_t>(n));
  p.d_theta.resize(static_cast<size_t>(n));
  p.d_r.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = k * d / r;
    const double radicand = 1.0 + u * u - 2.0 * u * sin_t;
    if (radicand <= kRadicandFloor)
      throw DegenerateGeometry("gain_profile: source collinear with the array segment");
    const double dn = r * std::sqrt(radicand);
    const double dn3 = dn * dn * dn;
    p.values[static_cast<size_t>(k)] = 1.0 / dn;
    p.d_theta[static_cast<size_t>(k)] = k * d * r * cos_t / dn3;
    p.d_r[static_cast<size_t>(k)] = -(r - k * d * sin_t) / dn3;
  }
  return p;
}

FresnelBounds fresnel_bounds(const ArrayConfig& cfg) {
  const double a = cfg.aperture();  // (N-1) d
  const double lambda = cfg.wavelength();
  return {0.62 * std::sqrt(a * a * a / lambda), 2.0 * a * a / lambda};
}

Eigen::VectorXcd steering_vector(const ArrayConfig& cfg, const SourceLocation& loc,
                                 GainModel gain, DelayModel delay) {
  const DelayProfile tau =
      delay == DelayModel::exact ? exact_delay(cfg, loc) : approx_delay(cfg, loc);
  const int n = cfg.n_sensors();
  Eigen::VectorXcd v(n);
  if (gain == GainModel::equal) {
    for (int k = 0; k < n; ++k) v(k) = std::polar(1.0, tau.values[static_cast<size_t>(k)]);
  } else {
    const GainProfile g = gain_profile(cfg, loc);
    for (int k = 0; k < n; ++k)
      v(k) = g.values[static_cast<size_t>(k)] *
             std::polar(1.0, tau.values[static_cast<size_t>(k)]);
  }
  return v;
}

SteeringDerivatives steering_derivatives(const ArrayConfig& cfg, const SourceLocation& loc,
                                         GainModel gain, DelayModel delay) {
  const DelayProfile tau =
      delay == DelayModel::exact ? exact_delay(cfg, loc) : approx_delay(cfg, loc);
  const int n = cfg.n_sensors();
  SteeringDerivatives s;
  s.v.resize(n);
  s.d_theta.resize(n);
  s.d_r.resize(n);
  const std::complex<double> j(0.0, 1.0);
  if (gain == GainModel::equal) {
    for (int k = 0; k < n; ++k) {
      const size_t i = static_cast<size_t>(k);
      const std::complex<double> e = std::polar(1.0, tau.values[i]);
      s.v(k) = e;
      s.d_theta(k) = j * tau.d_theta[i] * e;
      s.d_r(k) = j * tau.d_r[i] * e;
    }
  } else {
    const GainProfile g = gain_profile(cfg, loc);
    for (int k = 0; k < n; ++k) {
      const size_t i = static_cast<size_t>(k);
      const std::complex<double> e = std::polar(1.0, tau.values[i]);
      s.v(k) = g.values[i] * e;
      s.d_theta(k) = (g.d_theta[i] + j * g.values[i] * tau.d_theta[i]) * e;
      s.d_r(k) = (g.d_r[i] + j * g.values[i] * tau.d_r[i]) * e;
    }
  }
  return s;
}

}  // namespace nfcrb
