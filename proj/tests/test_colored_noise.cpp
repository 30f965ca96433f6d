#include <cmath>

#include "doctest.h"

#include "quantband/colored_noise.hpp"
#include "quantband/errors.hpp"
#include "quantband/spectral.hpp"

using namespace quantband;

namespace {

SynthesisSpec spec_of(double alpha, Eigen::Index n, double fs, std::uint64_t seed) {
  SynthesisSpec s;
  s.alpha = alpha;
  s.n_samples = n;
  s.sample_rate_hz = fs;
  s.seed = seed;
  return s;
}

double fitted_slope(const Signal& x) {
  const Psd psd = welch_psd(x);
  return fit_slope(psd, default_fit_band(psd)).slope;
}

}  // namespace

TEST_CASE("white noise has a flat spectrum") {
  const Signal x = synthesize(spec_of(0.0, 1 << 16, 2000.0, 3));
  CHECK(std::abs(fitted_slope(x)) < 0.1);
}

TEST_CASE("alpha 1.5 spectrum slope") {
  const Signal x = synthesize(spec_of(1.5, 100000, 2000.0, 11));
  CHECK(std::abs(fitted_slope(x) + 1.5) < 0.1);
}

TEST_CASE("synthesis is deterministic under a fixed seed") {
  const auto spec = spec_of(2.0, 100000, 2000.0, 7);
  const Signal a = synthesize(spec);
  const Signal b = synthesize(spec);
  REQUIRE(a.size() == 100000);
  CHECK((a.samples == b.samples).all());
  const Signal c = synthesize(spec_of(2.0, 100000, 2000.0, 8));
  CHECK_FALSE((a.samples == c.samples).all());
}

TEST_CASE("output is zero-mean and peak-normalized") {
  for (const Eigen::Index n : {Eigen::Index{1001}, Eigen::Index{4096}}) {
    const Signal x = synthesize(spec_of(2.0, n, 500.0, 5));
    CHECK(x.sample_rate_hz == 500.0);
    CHECK(std::abs(x.samples.mean()) < 1e-12);
    CHECK(x.samples.abs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(x.samples.allFinite());
  }
}

TEST_CASE("target shape follows the power law") {
  Eigen::ArrayXd f(3);
  f << 10.0, 100.0, 1.0;
  const Eigen::ArrayXd p2 = target_psd_shape(spec_of(2.0, 1024, 2000.0, 0), f);
  CHECK(p2[0] / p2[1] == doctest::Approx(100.0));

  Eigen::ArrayXd g(3);
  g << 1.0, 2.0, 4.0;
  const Eigen::ArrayXd p1 = target_psd_shape(spec_of(1.0, 1024, 2000.0, 0), g);
  CHECK(p1[0] / p1[2] == doctest::Approx(4.0));
  CHECK(p1[1] / p1[2] == doctest::Approx(2.0));
}

TEST_CASE("peak multiplier at the center is 1 + A") {
  auto spec = spec_of(2.0, 1024, 2000.0, 0);
  Eigen::ArrayXd f(1);
  f << 10.0;
  const double plain = target_psd_shape(spec, f)[0];
  spec.peaks.push_back({10.0, 1.0, 50.0});
  CHECK(target_psd_shape(spec, f)[0] / plain == doctest::Approx(51.0));
  CHECK(peak_multiplier(spec.peaks, 11.0) == doctest::Approx(1.0 + 50.0 * std::exp(-0.5)));
  CHECK(peak_multiplier({}, 3.0) == 1.0);
}

TEST_CASE("target shape rejects non-positive frequencies") {
  Eigen::ArrayXd f(2);
  f << 0.0, 1.0;
  CHECK_THROWS_AS(target_psd_shape(spec_of(2.0, 1024, 2000.0, 0), f), ValidationError);
  f << -1.0, 1.0;
  CHECK_THROWS_AS(target_psd_shape(spec_of(2.0, 1024, 2000.0, 0), f), ValidationError);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(synthesize(spec_of(-1.0, 1024, 2000.0, 0)), ValidationError);
  CHECK_THROWS_AS(synthesize(spec_of(NAN, 1024, 2000.0, 0)), ValidationError);
  CHECK_THROWS_AS(synthesize(spec_of(INFINITY, 1024, 2000.0, 0)), ValidationError);
  CHECK_THROWS_AS(synthesize(spec_of(2.0, 8, 2000.0, 0)), ValidationError);
  CHECK_THROWS_AS(synthesize(spec_of(2.0, 1024, 0.0, 0)), ValidationError);
  auto spec = spec_of(2.0, 1024, 2000.0, 0);
  spec.peaks.push_back({999.0, 5.0, 10.0});
  CHECK_THROWS_AS(synthesize(spec), ValidationError);
  spec.peaks = {{100.0, 0.0, 10.0}};
  CHECK_THROWS_AS(synthesize(spec), ValidationError);
  spec.peaks = {{100.0, 1.0, -1.0}};
  CHECK_THROWS_AS(synthesize(spec), ValidationError);
}

TEST_CASE("injected peak raises local power by about 1 + A") {
  auto plain = spec_of(2.0, 1 << 17, 2000.0, 21);
  auto peaked = plain;
  peaked.peaks.push_back({100.0, 5.0, 50.0});
  const Psd a = welch_psd(synthesize(plain));
  const Psd b = welch_psd(synthesize(peaked));
  // Both signals are peak-normalized, so compare against a reference band far from the peak.
  const FrequencyBand at_peak{98.0, 102.0}, far{20.0, 30.0};
  const double gain = (band_power(b, at_peak) / band_power(b, far)) /
                      (band_power(a, at_peak) / band_power(a, far));
  CHECK(gain > 30.0);
  CHECK(gain < 80.0);
}

TEST_CASE("trial seeds are consecutive") {
  static_assert(trial_seed(10, 0) == 10);
  CHECK(trial_seed(1, 19) == 20);
}
