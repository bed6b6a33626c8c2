#include "doctest.h"

#include <cmath>
#include <random>

#include "nfcrb/crb.hpp"
#include "nfcrb/ml_sim.hpp"

using namespace nfcrb;

namespace {

const ArrayConfig kCfg(15, 0.25, 0.5);
const SourceLocation kTruth(10.0, deg2rad(45.0));
const RegionSpec kSearch(5.0, 20.0, deg2rad(25.0), deg2rad(65.0), 2, 2);

ScenarioParams cond_eg(double t, double noise_var) {
  return ScenarioParams::conditional(GainModel::equal, t, noise_var, 1.0);
}

}  // namespace

TEST_CASE("snapshots: noiseless conditional data is the scaled steering vector") {
  auto params = cond_eg(5.0, 1.0);
  params.noise_var = 0.0;  // builder-level zero noise for the identity check
  std::vector<double> amps{1.5, 0.5, 1.0, 2.0, 0.7};
  std::vector<double> psis{0.0, 1.0, -0.5, 2.0, 0.1};
  params.amplitudes = amps;
  params.phases = psis;
  const SnapshotSet snap = generate_snapshots(kCfg, kTruth, params, 7);
  const Eigen::VectorXcd a = steering_vector(kCfg, kTruth, GainModel::equal);
  for (int t = 0; t < 5; ++t)
    for (int n = 0; n < 15; ++n) {
      const std::complex<double> expect =
          std::polar(amps[static_cast<size_t>(t)], psis[static_cast<size_t>(t)]) * a(n);
      CHECK(std::abs(snap.data(t, n) - expect) == 0.0);
    }
}

TEST_CASE("snapshots: identical seeds give identical bits, new seeds differ") {
  const auto params = cond_eg(16.0, 0.01);
  const SnapshotSet a = generate_snapshots(kCfg, kTruth, params, 1234);
  const SnapshotSet b = generate_snapshots(kCfg, kTruth, params, 1234);
  const SnapshotSet c = generate_snapshots(kCfg, kTruth, params, 1235);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
}

TEST_CASE("snapshots: sample noise variance within two percent") {
  auto params = cond_eg(100.0, 0.04);
  double acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 70; ++seed) {
    const SnapshotSet s = generate_snapshots(kCfg, kTruth, params, seed);
    const Eigen::VectorXcd a = steering_vector(kCfg, kTruth, GainModel::equal);
    for (int t = 0; t < 100; ++t)
      for (int n = 0; n < 15; ++n) {
        acc += std::norm(s.data(t, n) - a(n));  // alpha = 1, psi = 0
        ++count;
      }
  }
  CHECK(std::abs(acc / count - 0.04) < 0.02 * 0.04);
}

TEST_CASE("snapshots: unconditional signal variance behaves") {
  const auto params = ScenarioParams::unconditional(GainModel::equal, 200.0, 1e-12, 0.25);
  double acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const SnapshotSet s = generate_snapshots(kCfg, kTruth, params, seed);
    for (int t = 0; t < 200; ++t) {
      acc += std::norm(s.data(t, 0));  // |a_0| = 1, so this is |s(t)|^2
      ++count;
    }
  }
  CHECK(std::abs(acc / count - 0.25) < 0.02 * 0.25);
}

TEST_CASE("objective: noiseless identities") {
  auto params = cond_eg(8.0, 1.0);
  params.noise_var = 0.0;
  const SnapshotSet snap = generate_snapshots(kCfg, kTruth, params, 3);

  // at the truth the projection is lossless: sum_t |s|^2 ||v||^2
  const double at_truth = ml_objective(kCfg, snap.data, kTruth, GainModel::equal);
  CHECK(at_truth == doctest::Approx(8.0 * 15.0).epsilon(1e-12));

  // and no other candidate can beat it
  for (double r : {6.0, 9.0, 14.0, 19.0})
    for (double deg : {30.0, 40.0, 50.0, 60.0}) {
      const double v = ml_objective(kCfg, snap.data, SourceLocation(r, deg2rad(deg)),
                                    GainModel::equal);
      CHECK(v <= at_truth * (1.0 + 1e-12));
    }

  // global phase rotation leaves the criterion unchanged
  const Eigen::MatrixXcd rotated = snap.data * std::polar(1.0, 0.7);
  CHECK(ml_objective(kCfg, rotated, kTruth, GainModel::equal) ==
        doctest::Approx(at_truth).epsilon(1e-12));
}

TEST_CASE("objective gradient matches finite differences") {
  const auto params = cond_eg(12.0, 0.05);
  const SnapshotSet snap = generate_snapshots(kCfg, kTruth, params, 99);
  std::mt19937_64 eng(5150);
  std::uniform_real_distribution<double> ur(6.0, 18.0);
  std::uniform_real_distribution<double> ut(deg2rad(-70.0), deg2rad(70.0));
  const double h = 1e-6;
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const double r = ur(eng);
    const double th = ut(eng);
    const GainModel gain = i % 2 ? GainModel::variable : GainModel::equal;
    const auto grad =
        ml_objective_gradient(kCfg, snap.data, SourceLocation(r, th), gain);
    const double fd_th = (ml_objective(kCfg, snap.data, SourceLocation(r, th + h), gain) -
                          ml_objective(kCfg, snap.data, SourceLocation(r, th - h), gain)) /
                         (2 * h);
    const double fd_r = (ml_objective(kCfg, snap.data, SourceLocation(r + h, th), gain) -
                         ml_objective(kCfg, snap.data, SourceLocation(r - h, th), gain)) /
                        (2 * h);
    CHECK(std::abs(grad[0] - fd_th) <= 1e-4 * std::max(std::abs(fd_th), 1e-6));
    CHECK(std::abs(grad[1] - fd_r) <= 1e-4 * std::max(std::abs(fd_r), 1e-6));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("estimator: zero-noise data recovers the truth") {
  auto params = cond_eg(8.0, 1.0);
  params.noise_var = 0.0;
  const SnapshotSet snap = generate_snapshots(kCfg, kTruth, params, 11);
  const MlEstimate est = ml_estimate(kCfg, snap.data, kSearch, GainModel::equal);
  CHECK(est.converged);
  CHECK(std::abs(est.theta_hat - kTruth.angle()) < 1e-7);
  CHECK(std::abs(est.r_hat - kTruth.range()) < 1e-5 * kTruth.range());

  // convergence contract: the reported optimum satisfies the gradient test
  const auto grad = ml_objective_gradient(
      kCfg, snap.data, SourceLocation(est.r_hat, est.theta_hat), GainModel::equal);
  CHECK(std::max(std::abs(grad[0]), std::abs(grad[1])) <=
        1e-9 * (1.0 + std::abs(est.objective_value)));
}

TEST_CASE("monte carlo: zero-noise single run and plumbing identities") {
  auto params = cond_eg(8.0, 1.0);
  params.noise_var = 1e-30;  // validation requires > 0; effectively noiseless
  const McReport rep = monte_carlo(kCfg, kTruth, params, 1, 42, kSearch);
  CHECK(rep.runs == 1);
  CHECK(rep.failures == 0);
  CHECK(rep.mse_theta < 1e-12);
  CHECK(rep.mse_r < 1e-8);
  const CrbResult crb = closed_form_crb(kCfg, kTruth, params);
  CHECK(rep.crb_theta == crb.theta);
  CHECK(rep.crb_r == crb.range);
  CHECK(rep.eff_theta == rep.mse_theta / rep.crb_theta);
}

TEST_CASE("monte carlo: deterministic in the base seed") {
  const auto params = cond_eg(30.0, 0.01);
  const McReport a = monte_carlo(kCfg, kTruth, params, 20, 7, kSearch);
  const McReport b = monte_carlo(kCfg, kTruth, params, 20, 7, kSearch);
  CHECK(a.mse_theta == b.mse_theta);
  CHECK(a.mse_r == b.mse_r);
  CHECK(a.failures == b.failures);
  CHECK(a.scenario == b.scenario);
}

TEST_CASE("monte carlo: quadrupling T improves the angle MSE") {
  const McReport short_t = monte_carlo(kCfg, kTruth, cond_eg(90.0, 1e-3), 50, 2024, kSearch);
  const McReport long_t = monte_carlo(kCfg, kTruth, cond_eg(360.0, 1e-3), 50, 2024, kSearch);
  CHECK(long_t.mse_theta < short_t.mse_theta);
}

TEST_CASE("monte carlo: efficiency trend over SNR" * doctest::timeout(300)) {
  // 300 runs per SNR point; MSE non-increasing and near-efficient at 30 dB
  double prev = std::numeric_limits<double>::infinity();
  double eff_theta_30 = 0.0, eff_r_30 = 0.0;
  for (double snr_db : {10.0, 20.0, 30.0}) {
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);
    const McReport rep = monte_carlo(kCfg, kTruth, cond_eg(90.0, sigma2), 300, 99, kSearch);
    CHECK(rep.mse_theta <= prev * (1.0 + 1e-9));
    prev = rep.mse_theta;
    if (snr_db == 30.0) {
      eff_theta_30 = rep.eff_theta;
      eff_r_30 = rep.eff_r;
    }
  }
  CHECK(eff_theta_30 >= 0.8);
  CHECK(eff_theta_30 <= 3.0);
  CHECK(eff_r_30 >= 0.8);
  CHECK(eff_r_30 <= 3.0);
}

TEST_CASE("estimator: empty search region is rejected") {
  // a region whose every candidate is degenerate geometry: the far sensor
  // sits on the source ray at every grid corner
  const ArrayConfig tight(15, 0.25, 0.5);
  const RegionSpec bad(3.4999986, 3.5000014, M_PI / 2 - 1e-9, M_PI / 2 - 1e-10, 2, 2);
  const auto params = cond_eg(4.0, 0.01);
  const SnapshotSet snap = generate_snapshots(tight, kTruth, params, 5);
  CHECK_THROWS_AS(ml_estimate(tight, snap.data, bad, GainModel::equal), EmptySearchRegion);
}
