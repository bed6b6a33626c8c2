#pragma once

#include "nfcrb/geometry.hpp"
#include "nfcrb/types.hpp"

namespace nfcrb {

// Closed-form Cramer-Rao bounds for the four model flavors, the truncated
// d/r expansion of the equal-gain conditional bound, the approximate-model
// bound from the prior literature, and the leading-order EG/VG comparison.

// Centered delay-derivative energies for the equal-gain conditional bound:
//   E(theta)    = ||dtau_th||^2 - (1^T dtau_th)^2 / N
//   E(r)        = ||dtau_r||^2  - (1^T dtau_r)^2 / N
//   E(r, theta) = dtau_th . dtau_r - (1^T dtau_th)(1^T dtau_r) / N
struct EgEnergyTerms {
  double e_theta;    // rad^2
  double e_r;        // (rad/m)^2
  double e_r_theta;  // rad^2/m
  double det() const { return e_theta * e_r - e_r_theta * e_r_theta; }
};
EgEnergyTerms eg_energy_terms(const DelayProfile& tau);

// Variable-gain analogue; the gain profile contributes both its own
// derivative energy and a gamma^2 weighting of the delay derivatives, and
// the centering is against the gamma-weighted means.
struct VgEnergyTerms {
  double e_theta;
  double e_r;
  double e_r_theta;
  double gamma_sq_norm;  // ||gamma||^2, needed by the unconditional factor
  double det() const { return e_theta * e_r - e_r_theta * e_r_theta; }
};
VgEnergyTerms vg_energy_terms(const DelayProfile& tau, const GainProfile& gamma);

// Exact conditional bound, equal gain: entries E/(2 T D_SNR det(E)).
// Throws NearSingular when det(E) < 1e-30. The returned coupling carries the
// inverse-FIM sign (-E(r,theta)/...), which the numeric oracle confirms.
CrbResult crb_conditional_eg(const ArrayConfig& cfg, const SourceLocation& loc,
                             const ScenarioParams& params);

// Exact conditional bound, variable gain.
CrbResult crb_conditional_vg(const ArrayConfig& cfg, const SourceLocation& loc,
                             const ScenarioParams& params);

// Exact unconditional bound (either gain flavor, selected by params.gain):
// the D-normalized conditional entries scaled by (1 + SNR g)/(SNR^2 g) with
// g = N (equal gain) or ||gamma||^2 (variable gain).
CrbResult crb_unconditional(const ArrayConfig& cfg, const SourceLocation& loc,
                            const ScenarioParams& params);

// Truncated expansion of the equal-gain conditional bound in powers of d/r
// (theta entry through (d/r)^2, range entry through the printed d^2 terms).
// No coupling term is available at this order; `coupling` is absent.
CrbResult crb_taylor_eg(const ArrayConfig& cfg, const SourceLocation& loc,
                        const ScenarioParams& params);

// Conditional equal-gain bound of the approximate (Fresnel) data model from
// the literature; its theta entry is range-independent by construction.
CrbResult crb_approx_literature(const ArrayConfig& cfg, const SourceLocation& loc,
                                const ScenarioParams& params);

// Dispatch to the matching lemma for (params.model, params.gain).
CrbResult closed_form_crb(const ArrayConfig& cfg, const SourceLocation& loc,
                          const ScenarioParams& params);

// Leading-order terms of the four bounds for the EG/VG comparison.
struct FirstOrderComparison {
  double eg_theta;
  double vg_theta;
  double eg_r;
  double vg_r;
};
FirstOrderComparison crb_firstorder_comparison(const ArrayConfig& cfg, const SourceLocation& loc,
                                               const ScenarioParams& params);

// Factored sensor-count polynomials (evaluated factored to limit
// cancellation at large N).
double p2_poly(int n_sensors);  // (8N-11)(2N-1)
double p3_poly(int n_sensors);  // N(N^2-1)(N^2-4)

// Angle factors of the leading-order VG corrections:
//   f1 = 15 sin^2 / (pi^2 d^2 cos^4 p2(N)),  f2 = same with (N^2-4) in place of p2.
double f1_factor(const ArrayConfig& cfg, double theta);
double f2_factor(const ArrayConfig& cfg, double theta);

// Received-power normalization for EG-vs-VG comparisons: divides ||alpha||^2
// by r^2 (conditional) or the signal variance by r^2 (unconditional), so the
// reference sensor sees the same power in both gain models.
ScenarioParams received_power_normalized(const ScenarioParams& params, double range);

}  // namespace nfcrb
