#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nfcrb/types.hpp"

namespace nfcrb {

// Per-sensor phase delay (radians) and its analytic partial derivatives.
// values[0], d_theta[0], d_r[0] are exactly zero: sensor 0 is the reference.
struct DelayProfile {
  std::vector<double> values;   // tau_n, rad
  std::vector<double> d_theta;  // dtau_n/dtheta, rad
  std::vector<double> d_r;      // dtau_n/dr, rad/m
};

// Per-sensor spherical-spreading gain 1/d_n (1/m) and derivatives.
struct GainProfile {
  std::vector<double> values;   // gamma_n, 1/m
  std::vector<double> d_theta;  // dgamma_n/dtheta
  std::vector<double> d_r;      // dgamma_n/dr
};

struct FresnelBounds {
  double lower;  // m, reactive-field exclusion radius
  double upper;  // m
};

// tau_n = (2 pi r / lambda) (sqrt(1 + n^2 d^2/r^2 - 2 n d sin(theta)/r) - 1),
// with closed-form derivatives. Throws DegenerateGeometry when the radicand
// falls below 1e-12 (source on the array line).
DelayProfile exact_delay(const ArrayConfig& cfg, const SourceLocation& loc);

// Second-order Fresnel approximation
// tau_n = -2 pi (d n / lambda) sin(theta) + pi (d^2 n^2 / lambda) cos^2(theta)/r.
DelayProfile approx_delay(const ArrayConfig& cfg, const SourceLocation& loc);

// gamma_n = 1/d_n, d_n the source-to-sensor-n distance.
GainProfile gain_profile(const ArrayConfig& cfg, const SourceLocation& loc);

// [0.62 sqrt(d^3 (N-1)^3 / lambda), 2 d^2 (N-1)^2 / lambda]. Both returned
// regardless of ordering; callers compare.
FresnelBounds fresnel_bounds(const ArrayConfig& cfg);

// Equal gain: a_n = e^{j tau_n}. Variable gain: b_n = gamma_n e^{j tau_n}.
Eigen::VectorXcd steering_vector(const ArrayConfig& cfg, const SourceLocation& loc,
                                 GainModel gain, DelayModel delay = DelayModel::exact);

// Steering vector plus its analytic (theta, r) derivatives, one column each.
struct SteeringDerivatives {
  Eigen::VectorXcd v;        // steering vector
  Eigen::VectorXcd d_theta;  // dv/dtheta
  Eigen::VectorXcd d_r;      // dv/dr
};
SteeringDerivatives steering_derivatives(const ArrayConfig& cfg, const SourceLocation& loc,
                                         GainModel gain, DelayModel delay = DelayModel::exact);

}  // namespace nfcrb
