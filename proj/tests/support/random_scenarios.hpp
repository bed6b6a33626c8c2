#pragma once

// Shared random-scenario generator for the property suites: geometry drawn
// with r inside the Fresnel window, angles clear of the lateral poles, SNRs
// log-uniform across the dB window used throughout the tests.

#include <cmath>
#include <random>
#include <vector>

#include "nfcrb/geometry.hpp"
#include "nfcrb/types.hpp"

namespace nfcrb_test {

struct Scenario {
  nfcrb::ArrayConfig cfg;
  nfcrb::SourceLocation loc;
  double snapshots;
  double noise_var;
  double snr_linear;  // deterministic or stochastic SNR, drawn in dB
};

class ScenarioSampler {
 public:
  explicit ScenarioSampler(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }

  Scenario draw() {
    for (;;) {
      const int n = uniform_int(3, 20);
      const double lambda = uniform(0.25, 1.0);
      const double d = lambda * uniform(0.25, 0.75);
      const nfcrb::ArrayConfig cfg(n, d, lambda);
      const auto fb = nfcrb::fresnel_bounds(cfg);
      if (!(fb.lower < fb.upper)) continue;
      const double r = uniform(fb.lower, fb.upper);
      const double theta = nfcrb::deg2rad(uniform(-80.0, 80.0));
      const double t = static_cast<double>(uniform_int(1, 128));
      const double snr_db = uniform(-10.0, 40.0);
      return {cfg, nfcrb::SourceLocation(r, theta), t, 1.0, std::pow(10.0, snr_db / 10.0)};
    }
  }

  // conditional params with per-snapshot amplitudes scaled to the drawn
  // deterministic SNR and random phases
  nfcrb::ScenarioParams conditional(const Scenario& s, nfcrb::GainModel gain) {
    const int t = static_cast<int>(s.snapshots);
    std::vector<double> amps(static_cast<size_t>(t));
    std::vector<double> phases(static_cast<size_t>(t));
    double sq = 0.0;
    for (int i = 0; i < t; ++i) {
      amps[static_cast<size_t>(i)] = uniform(0.5, 2.0);
      phases[static_cast<size_t>(i)] = uniform(-M_PI, M_PI);
      sq += amps[static_cast<size_t>(i)] * amps[static_cast<size_t>(i)];
    }
    // ||alpha||^2 / (T sigma^2) == snr_linear
    const double scale = std::sqrt(s.snr_linear * s.snapshots * s.noise_var / sq);
    for (double& a : amps) a *= scale;
    auto p = nfcrb::ScenarioParams::conditional(gain, std::move(amps), std::move(phases),
                                                s.noise_var);
    return p;
  }

  nfcrb::ScenarioParams unconditional(const Scenario& s, nfcrb::GainModel gain) {
    return nfcrb::ScenarioParams::unconditional(gain, s.snapshots, s.noise_var,
                                                s.snr_linear * s.noise_var);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace nfcrb_test
