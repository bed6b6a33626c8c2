#pragma once

#include <Eigen/Dense>

#include "nfcrb/geometry.hpp"
#include "nfcrb/types.hpp"

namespace nfcrb {

// Numeric Fisher-matrix construction and inversion. This module is the
// brute-force reference every closed-form bound is checked against: entries
// are evaluated from the likelihood definitions with complex arithmetic,
// never from the reduced scalar formulas the closed forms use.

// Deterministic-signal FIM over xi = (theta, r, psi_1..T, alpha_1..T, sigma^2),
// dimension 2T+3. Works for both gain models; the equal-gain cross blocks
// (theta,r)x(alpha) and everything x sigma^2 come out exactly zero.
Eigen::MatrixXd fim_conditional(const ArrayConfig& cfg, const SourceLocation& loc,
                                const ScenarioParams& params);

// Gaussian-signal FIM over xi = (theta, r, sigma_s^2, sigma^2), dimension 4,
// from the covariance-derivative trace formula
//   [FIM]_ij = T tr(Sigma^-1 dSigma/dxi_i Sigma^-1 dSigma/dxi_j),
// Sigma = sigma_s^2 v v^H + sigma^2 I.
Eigen::MatrixXd fim_unconditional(const ArrayConfig& cfg, const SourceLocation& loc,
                                  const ScenarioParams& params);

// Trace engine behind fim_unconditional. signal_var may be zero here (the
// location block then vanishes); ScenarioParams-level validation is the
// caller's business.
Eigen::MatrixXd slepian_bangs_fim(const Eigen::VectorXcd& v, const Eigen::VectorXcd& v_dtheta,
                                  const Eigen::VectorXcd& v_dr, double signal_var,
                                  double noise_var, double snapshots);

// Top-left 2x2 of the inverse FIM via the Schur complement of the nuisance
// block. Throws IllConditioned when the FIM condition estimate exceeds 1e12.
CrbResult oracle_crb(const ArrayConfig& cfg, const SourceLocation& loc,
                     const ScenarioParams& params);

// Same bound through a full pivoted-LU inverse of the unreduced matrix; kept
// as an independent path for cross-checking the Schur extraction.
CrbResult oracle_crb_full_inverse(const ArrayConfig& cfg, const SourceLocation& loc,
                                  const ScenarioParams& params);

}  // namespace nfcrb
