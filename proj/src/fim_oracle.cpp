#include "nfcrb/fim_oracle.hpp"

#include <array>
#include <cmath>
#include <complex>

namespace nfcrb {

namespace {

constexpr double kRcondFloor = 1e-12;  // condition number guard at 1e12

using Cx = std::complex<double>;
const Cx kJ(0.0, 1.0);

struct Crb2x2 {
  double theta, range, coupling;
};

Crb2x2 invert_2x2(const Eigen::Matrix2d& q) {
  const double det = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
  return {q(1, 1) / det, q(0, 0) / det, -q(0, 1) / det};
}

CrbResult make_result(const Crb2x2& c, CrbSource source, const SourceLocation& loc) {
  CrbResult r;
  r.theta = c.theta;
  r.range = c.range;
  r.coupling = c.coupling;
  r.source = source;
  r.near_lateral = std::abs(std::cos(loc.angle())) < 1e-3;
  return r;
}

Eigen::MatrixXd assemble_fim(const ArrayConfig& cfg, const SourceLocation& loc,
                             const ScenarioParams& params) {
  params.validate();
  return params.model == SignalModel::conditional ? fim_conditional(cfg, loc, params)
                                                  : fim_unconditional(cfg, loc, params);
}

}  // namespace

Eigen::MatrixXd fim_conditional(const ArrayConfig& cfg, const SourceLocation& loc,
                                const ScenarioParams& params) {
  if (params.model != SignalModel::conditional)
    throw std::invalid_argument("fim_conditional: conditional params required");
  const int t_count = params.snapshot_count();
  const int n = cfg.n_sensors();
  const double sigma2 = params.noise_var;
  const double w = 2.0 / sigma2;

  const SteeringDerivatives s = steering_derivatives(cfg, loc, params.gain);
  // t-independent inner products of the steering vector and its derivatives
  const Cx c_thth = s.d_theta.dot(s.d_theta);
  const Cx c_thr = s.d_theta.dot(s.d_r);
  const Cx c_rr = s.d_r.dot(s.d_r);
  const Cx c_thv = s.d_theta.dot(s.v);  // dv_theta^H v
  const Cx c_rv = s.d_r.dot(s.v);
  const double g2 = s.v.squaredNorm();

  const int dim = 2 + 2 * t_count + 1;  // (theta, r, psi_1..T, alpha_1..T, sigma^2)
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(dim, dim);

  double alpha_sq = 0.0;
  for (int t = 0; t < t_count; ++t) alpha_sq += std::norm(std::polar(params.amplitude_at(t), params.phase_at(t)));

  f(0, 0) = w * alpha_sq * c_thth.real();
  f(0, 1) = f(1, 0) = w * alpha_sq * c_thr.real();
  f(1, 1) = w * alpha_sq * c_rr.real();

  for (int t = 0; t < t_count; ++t) {
    const Cx st = std::polar(params.amplitude_at(t), params.phase_at(t));
    const double wt = std::norm(st);
    const Cx ephase = std::polar(1.0, params.phase_at(t));
    const int ip = 2 + t;            // psi_t
    const int ia = 2 + t_count + t;  // alpha_t

    // d mu_t/d psi_t = j s_t v,  d mu_t/d alpha_t = e^{j psi_t} v
    f(0, ip) = f(ip, 0) = w * wt * std::real(kJ * c_thv);
    f(1, ip) = f(ip, 1) = w * wt * std::real(kJ * c_rv);
    f(0, ia) = f(ia, 0) = w * std::real(std::conj(st) * ephase * c_thv);
    f(1, ia) = f(ia, 1) = w * std::real(std::conj(st) * ephase * c_rv);
    f(ip, ip) = w * wt * g2;
    f(ia, ia) = w * g2;
    f(ip, ia) = f(ia, ip) = w * g2 * std::real(-kJ * std::conj(st) * ephase);
  }

  f(dim - 1, dim - 1) = static_cast<double>(n) * t_count / (sigma2 * sigma2);
  return f;
}

Eigen::MatrixXd slepian_bangs_fim(const Eigen::VectorXcd& v, const Eigen::VectorXcd& v_dtheta,
                                  const Eigen::VectorXcd& v_dr, double signal_var,
                                  double noise_var, double snapshots) {
  // Every covariance derivative except the noise one is a sum of outer
  // products, so each trace collapses to scalar products of numeric
  // Sigma^-1-solves:
  //   tr(S^-1 x y^H S^-1 u w^H) = (y^H S^-1 u)(w^H S^-1 x).
  // That keeps the error at one power of the conditioning instead of two;
  // extended precision covers the rest of the budget at high SNR.
  using Scalar = std::complex<long double>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const long double svar = signal_var;
  const Vec b = v.cast<Scalar>();
  const Vec b_th = v_dtheta.cast<Scalar>();
  const Vec b_r = v_dr.cast<Scalar>();

  Mat sigma = svar * (b * b.adjoint());
  sigma.diagonal().array() += static_cast<long double>(noise_var);
  const Eigen::PartialPivLU<Mat> lu(sigma);

  // dSigma/dxi = sum_k x_k y_k^H per parameter (noise variance handled as I)
  struct Rank {
    std::vector<Vec> x, y;
  };
  std::array<Rank, 3> lowrank;
  lowrank[0].x = {svar * b_th, svar * b};  // theta
  lowrank[0].y = {b, b_th};
  lowrank[1].x = {svar * b_r, svar * b};  // r
  lowrank[1].y = {b, b_r};
  lowrank[2].x = {b};  // signal variance
  lowrank[2].y = {b};

  // solves for every distinct factor vector
  const auto solve = [&](const Vec& x) { return Vec(lu.solve(x)); };
  std::array<std::vector<Vec>, 3> sx, sy;
  for (size_t p = 0; p < 3; ++p) {
    for (const Vec& x : lowrank[p].x) sx[p].push_back(solve(x));
    for (const Vec& y : lowrank[p].y) sy[p].push_back(solve(y));
  }

  Eigen::MatrixXd f(4, 4);
  const long double t = snapshots;
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = i; j < 3; ++j) {
      Scalar tr(0.0L, 0.0L);
      for (size_t k = 0; k < lowrank[i].x.size(); ++k)
        for (size_t l = 0; l < lowrank[j].x.size(); ++l)
          tr += lowrank[i].y[k].dot(sx[j][l]) * lowrank[j].y[l].dot(sx[i][k]);
      f(static_cast<int>(i), static_cast<int>(j)) =
          f(static_cast<int>(j), static_cast<int>(i)) = static_cast<double>(t * tr.real());
    }
  // cross terms with the noise variance: tr(S^-1 x y^H S^-1) = (S^-1 y)^H (S^-1 x)
  for (size_t i = 0; i < 3; ++i) {
    Scalar tr(0.0L, 0.0L);
    for (size_t k = 0; k < lowrank[i].x.size(); ++k) tr += sy[i][k].dot(sx[i][k]);
    f(static_cast<int>(i), 3) = f(3, static_cast<int>(i)) = static_cast<double>(t * tr.real());
  }
  // tr(S^-2) as the squared Frobenius norm of the Hermitian inverse
  f(3, 3) = static_cast<double>(t * lu.inverse().squaredNorm());
  return f;
}

Eigen::MatrixXd fim_unconditional(const ArrayConfig& cfg, const SourceLocation& loc,
                                  const ScenarioParams& params) {
  if (params.model != SignalModel::unconditional)
    throw std::invalid_argument("fim_unconditional: unconditional params required");
  // The per-sensor phase is a fixed diagonal unitary and drops out of every
  // covariance trace; the stripped representation keeps the small
  // gain-derivative real parts away from the large phase-derivative terms.
  const int n = cfg.n_sensors();
  const DelayProfile tau = exact_delay(cfg, loc);
  GainProfile gam;
  if (params.gain == GainModel::variable) {
    gam = gain_profile(cfg, loc);
  } else {
    gam.values.assign(static_cast<size_t>(n), 1.0);
    gam.d_theta.assign(static_cast<size_t>(n), 0.0);
    gam.d_r.assign(static_cast<size_t>(n), 0.0);
  }
  Eigen::VectorXcd v(n), v_th(n), v_r(n);
  for (int k = 0; k < n; ++k) {
    const size_t i = static_cast<size_t>(k);
    v(k) = gam.values[i];
    v_th(k) = {gam.d_theta[i], gam.values[i] * tau.d_theta[i]};
    v_r(k) = {gam.d_r[i], gam.values[i] * tau.d_r[i]};
  }
  return slepian_bangs_fim(v, v_th, v_r, params.signal_var, params.noise_var,
                           params.snapshots);
}

// Jacobi equilibration: the raw FIM mixes rad^-2, m^-2 and variance^-2 units,
// so its raw condition number mostly measures scaling. The guard and the
// solves read the unit-diagonal form F' = D^-1/2 F D^-1/2 instead, which is
// invariant under parameter rescaling and still diverges at the genuine
// lateral singularities.
struct Equilibrated {
  Eigen::MatrixXd fe;
  Eigen::VectorXd scale;  // d_i = sqrt(F_ii)
};

Equilibrated equilibrate(const Eigen::MatrixXd& f, const char* who) {
  Equilibrated eq;
  eq.scale = f.diagonal().cwiseMax(0.0).cwiseSqrt();
  if (!(eq.scale.minCoeff() > 0.0))
    throw IllConditioned(std::string(who) + ": FIM has a non-positive diagonal entry");
  eq.fe = f.array() / (eq.scale * eq.scale.transpose()).array();
  return eq;
}

CrbResult oracle_crb(const ArrayConfig& cfg, const SourceLocation& loc,
                     const ScenarioParams& params) {
  const Eigen::MatrixXd f = assemble_fim(cfg, loc, params);
  const Eigen::Index m = f.rows() - 2;
  const Equilibrated eq = equilibrate(f, "oracle_crb");

  const Eigen::PartialPivLU<Eigen::MatrixXd> full_lu(eq.fe);
  if (!(full_lu.rcond() > kRcondFloor))
    throw IllConditioned("oracle_crb: equilibrated FIM condition number exceeds 1e12");

  const Eigen::Matrix2d a = eq.fe.topLeftCorner<2, 2>();
  const Eigen::MatrixXd b = eq.fe.topRightCorner(2, m);
  const Eigen::PartialPivLU<Eigen::MatrixXd> nuisance_lu(eq.fe.bottomRightCorner(m, m));
  const Eigen::Matrix2d schur = a - b * nuisance_lu.solve(b.transpose());

  Crb2x2 c = invert_2x2(schur);
  c.theta /= eq.scale(0) * eq.scale(0);
  c.range /= eq.scale(1) * eq.scale(1);
  c.coupling /= eq.scale(0) * eq.scale(1);
  const CrbSource tag = params.model == SignalModel::conditional
                            ? CrbSource::oracle_conditional
                            : CrbSource::oracle_unconditional;
  return make_result(c, tag, loc);
}

CrbResult oracle_crb_full_inverse(const ArrayConfig& cfg, const SourceLocation& loc,
                                  const ScenarioParams& params) {
  const Eigen::MatrixXd f = assemble_fim(cfg, loc, params);
  const Equilibrated eq = equilibrate(f, "oracle_crb_full_inverse");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(eq.fe);
  if (!(lu.rcond() > kRcondFloor))
    throw IllConditioned(
        "oracle_crb_full_inverse: equilibrated FIM condition number exceeds 1e12");

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(f.rows(), 2);
  rhs(0, 0) = 1.0;
  rhs(1, 1) = 1.0;
  const Eigen::MatrixXd cols = lu.solve(rhs);  // first two columns of (F')^-1

  Crb2x2 c{cols(0, 0) / (eq.scale(0) * eq.scale(0)),
           cols(1, 1) / (eq.scale(1) * eq.scale(1)),
           0.5 * (cols(0, 1) + cols(1, 0)) / (eq.scale(0) * eq.scale(1))};
  const CrbSource tag = params.model == SignalModel::conditional
                            ? CrbSource::oracle_conditional
                            : CrbSource::oracle_unconditional;
  return make_result(c, tag, loc);
}

}  // namespace nfcrb
