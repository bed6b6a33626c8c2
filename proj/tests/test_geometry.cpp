#include "doctest.h"

#include <cmath>
#include <random>

#include "nfcrb/geometry.hpp"
#include "support/random_scenarios.hpp"

using namespace nfcrb;

namespace {

// reference values computed independently with 50-digit arithmetic from the
// profile definitions (N=15, d=0.25 m, lambda=0.5 m, r=10 m, theta=45 deg)
constexpr double kTau14 = -26.117326999190183902;
constexpr double kGamma14 = 0.12623634051149615667;
constexpr double kFresnelLower15 = 5.7412803450101615814;

const ArrayConfig kCfg(15, 0.25, 0.5);
const SourceLocation kLoc(10.0, M_PI / 4);

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

template <typename Profile, typename Fn>
void check_derivatives_fd(const Fn& fn, const ArrayConfig& cfg, const SourceLocation& loc) {
  const double h = 1e-6;
  const Profile p = fn(cfg, loc);
  const double th_hi = loc.angle() + h, th_lo = loc.angle() - h;
  const double r_hi = loc.range() + h, r_lo = loc.range() - h;
  const Profile pt_hi = fn(cfg, SourceLocation(loc.range(), th_hi));
  const Profile pt_lo = fn(cfg, SourceLocation(loc.range(), th_lo));
  const Profile pr_hi = fn(cfg, SourceLocation(r_hi, loc.angle()));
  const Profile pr_lo = fn(cfg, SourceLocation(r_lo, loc.angle()));
  // divide by the realized steps; x+h rounds, and the nearby subtraction
  // recovering it is exact
  const double dth = th_hi - th_lo;
  const double dr = r_hi - r_lo;

  // the difference quotient cannot resolve below roundoff on the profile
  // values themselves; components under that floor are checked absolutely
  double value_scale = 0.0;
  for (double v : p.values) value_scale = std::max(value_scale, std::abs(v));
  const double noise_floor = 8.0 * 2.3e-16 * value_scale / h + 1e-300;

  for (size_t i = 0; i < p.values.size(); ++i) {
    const double fd_th = (pt_hi.values[i] - pt_lo.values[i]) / dth;
    const double fd_r = (pr_hi.values[i] - pr_lo.values[i]) / dr;
    CHECK(std::abs(fd_th - p.d_theta[i]) <=
          std::max(1e-5 * std::abs(p.d_theta[i]), noise_floor));
    CHECK(std::abs(fd_r - p.d_r[i]) <=
          std::max(1e-5 * std::abs(p.d_r[i]), noise_floor));
  }
}

}  // namespace

TEST_CASE("exact delay: reference sensor and frozen value") {
  const DelayProfile p = exact_delay(kCfg, kLoc);
  CHECK(p.values[0] == 0.0);
  CHECK(p.d_theta[0] == 0.0);
  CHECK(p.d_r[0] == 0.0);
  CHECK(rel_diff(p.values[14], kTau14) < 1e-13);
}

TEST_CASE("exact delay: collinear limit") {
  // theta -> pi/2 with nd < r collapses the radicand to (1 - nd/r)^2
  const SourceLocation loc(10.0, M_PI / 2 - 1e-12);
  const DelayProfile p = exact_delay(kCfg, loc);
  for (int n = 1; n < 15; ++n) {
    const double expected = -2.0 * M_PI * n * 0.25 / 0.5;
    CHECK(rel_diff(p.values[static_cast<size_t>(n)], expected) < 1e-6);
  }
}

TEST_CASE("exact delay: degenerate geometry rejected") {
  // radicand ~ cos^2(theta) < 1e-12 when nd/r hits sin(theta) near the pole
  const SourceLocation loc(3.5, M_PI / 2 - 1e-7);
  CHECK_THROWS_AS(exact_delay(kCfg, loc), DegenerateGeometry);
  CHECK_THROWS_AS(gain_profile(kCfg, loc), DegenerateGeometry);
}

TEST_CASE("approx delay: broadside and reference values") {
  const SourceLocation broadside(10.0, 0.0);
  const DelayProfile p = approx_delay(kCfg, broadside);
  for (int n = 0; n < 15; ++n) {
    const double expected = M_PI * 0.25 * 0.25 * n * n / (0.5 * 10.0);
    CHECK(p.values[static_cast<size_t>(n)] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(p.values[0] == 0.0);
}

TEST_CASE("approx delay: error shrinks with range") {
  auto max_err = [&](double r) {
    const SourceLocation loc(r, M_PI / 4);
    const DelayProfile ex = exact_delay(kCfg, loc);
    const DelayProfile ap = approx_delay(kCfg, loc);
    double m = 0.0;
    for (size_t i = 0; i < ex.values.size(); ++i)
      m = std::max(m, std::abs(ex.values[i] - ap.values[i]));
    return m;
  };
  CHECK(max_err(20.0) < max_err(10.0));

  // leading truncation error is cubic in d/r: doubling r at large range
  // shrinks it by at least the quadratic factor
  const double e50 = max_err(50.0);
  const double e100 = max_err(100.0);
  CHECK(e50 / e100 >= 3.5);
}

TEST_CASE("gain profile: reference sensor, frozen value, collinear limit") {
  const GainProfile p = gain_profile(kCfg, kLoc);
  CHECK(p.values[0] == 1.0 / 10.0);
  CHECK(p.d_theta[0] == 0.0);
  CHECK(rel_diff(p.values[14], kGamma14) < 1e-13);

  const GainProfile c = gain_profile(kCfg, SourceLocation(10.0, M_PI / 2 - 1e-12));
  for (int n = 1; n < 15; ++n)
    CHECK(rel_diff(c.values[static_cast<size_t>(n)], 1.0 / (10.0 - 0.25 * n)) < 1e-6);
}

TEST_CASE("gain profile: gamma_n times the source distance is one") {
  const GainProfile p = gain_profile(kCfg, kLoc);
  const double r = kLoc.range();
  const double s = std::sin(kLoc.angle());
  for (int n = 0; n < 15; ++n) {
    const double dn = std::sqrt(r * r - 2.0 * n * 0.25 * r * s + n * n * 0.25 * 0.25);
    CHECK(p.values[static_cast<size_t>(n)] * dn == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("fresnel bounds: frozen values and scaling") {
  const FresnelBounds b = fresnel_bounds(kCfg);
  CHECK(rel_diff(b.lower, kFresnelLower15) < 1e-14);
  CHECK(b.upper == 49.0);

  const FresnelBounds b2 = fresnel_bounds(ArrayConfig(15, 0.5, 0.5));
  CHECK(b2.upper == 4.0 * b.upper);

  CHECK_THROWS_AS(ArrayConfig(2, 0.25, 0.5), std::invalid_argument);
}

TEST_CASE("steering vectors") {
  const Eigen::VectorXcd a = steering_vector(kCfg, kLoc, GainModel::equal);
  CHECK(a(0) == std::complex<double>(1.0, 0.0));
  const Eigen::VectorXcd b = steering_vector(kCfg, kLoc, GainModel::variable);
  CHECK(b(0).real() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(b(0).imag() == 0.0);

  const GainProfile g = gain_profile(kCfg, kLoc);
  for (int n = 0; n < 15; ++n)
    CHECK(std::abs(b(n)) == doctest::Approx(g.values[static_cast<size_t>(n)]).epsilon(1e-14));
  for (int n = 0; n < 15; ++n) CHECK(std::abs(a(n)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("analytic derivatives match central differences") {
  nfcrb_test::ScenarioSampler sampler(20240817);
  for (int i = 0; i < 20; ++i) {
    const nfcrb_test::Scenario s = sampler.draw();
    check_derivatives_fd<DelayProfile>(
        [](const ArrayConfig& c, const SourceLocation& l) { return exact_delay(c, l); }, s.cfg,
        s.loc);
    check_derivatives_fd<DelayProfile>(
        [](const ArrayConfig& c, const SourceLocation& l) { return approx_delay(c, l); }, s.cfg,
        s.loc);
    check_derivatives_fd<GainProfile>(
        [](const ArrayConfig& c, const SourceLocation& l) { return gain_profile(c, l); }, s.cfg,
        s.loc);
  }
}

TEST_CASE("far-field limit of the exact delay") {
  const double theta = deg2rad(30.0);
  for (int n = 1; n < 15; ++n) {
    const double limit = -2.0 * M_PI * n * 0.25 * std::sin(theta) / 0.5;
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {1e2, 1e3, 1e4}) {
      const DelayProfile p = exact_delay(kCfg, SourceLocation(r, theta));
      const double err = std::abs(p.values[static_cast<size_t>(n)] - limit);
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("delay profile is asymmetric in the angle sign") {
  // sensor 0 as time reference breaks the +-theta symmetry
  const DelayProfile plus = exact_delay(kCfg, SourceLocation(10.0, deg2rad(60.0)));
  const DelayProfile minus = exact_delay(kCfg, SourceLocation(10.0, deg2rad(-60.0)));
  CHECK(std::abs(plus.values[14] - minus.values[14]) > 1.0);
}
