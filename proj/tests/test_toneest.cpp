#include <catch_amalgamated.hpp>

#include <cmath>

#include "hdsft/toneest.hpp"
#include "support.hpp"

using namespace hdsft;
using testsupport::cplx;
using testsupport::expi;

namespace {

constexpr double kPi = std::numbers::pi;

ToneEstimatorConfig config(double T, double F, std::int64_t R, double Aprime = 1.0) {
  ToneEstimatorConfig c;
  c.T = T;
  c.F = F;
  c.per_stage = R;
  c.Aprime = Aprime;
  return c;
}

}  // namespace

TEST_CASE("constant tone") {
  Rng rng(1);
  const auto est = estimate_tone([](double) { return cplx(1.0, 0.0); }, config(16, 64, 8), rng);
  CHECK(std::abs(est.frequency) < 1e-12);
  CHECK(std::abs(est.amplitude - cplx(1.0, 0.0)) < 1e-12);
  CHECK(est.active);
  CHECK_FALSE(est.truncated);
}

TEST_CASE("exact tone 2 exp(2 pi i 3 t), T = 16, F = 64") {
  Rng rng(2);
  auto g = [](double t) { return 2.0 * expi(2.0 * kPi * 3.0 * t); };
  const auto est = estimate_tone(g, config(16, 64, 8), rng);
  CHECK(std::abs(est.frequency - 3.0) <= 1.0 / (16.0 * 64.0));
  CHECK(std::abs(est.amplitude - cplx(2.0, 0.0)) <= 1e-6);
}

TEST_CASE("off-grid exact tones are recovered to rounding") {
  Rng rng(3);
  for (double w : {-31.7, -0.013, 0.5, 7.123456, 31.99}) {
    const cplx a = std::polar(0.8, 1.1);
    auto g = [&](double t) { return a * expi(2.0 * kPi * w * t); };
    const auto est = estimate_tone(g, config(16, 64, 4), rng);
    CHECK(std::abs(est.frequency - w) < 1e-9);
    CHECK(std::abs(est.amplitude - a) < 1e-9);
  }
}

TEST_CASE("zero signal is inactive and skips the frequency stages") {
  Rng rng(4);
  const auto est = estimate_tone([](double) { return cplx{}; }, config(64, 256, 6), rng);
  CHECK_FALSE(est.active);
  CHECK(est.samples_used == 6);
  ToneEstimatorConfig no_gate = config(64, 256, 6);
  no_gate.energy_gate = false;
  const auto full = estimate_tone([](double) { return cplx{}; }, no_gate, rng);
  CHECK_FALSE(full.active);
}

TEST_CASE("budget exhaustion truncates") {
  Rng rng(5);
  ToneEstimatorConfig c = config(64, 256, 8);
  c.budget = 30;
  const auto est = estimate_tone([](double t) { return expi(2.0 * kPi * 0.3 * t); }, c, rng);
  CHECK(est.truncated);
  CHECK_FALSE(est.active);
  CHECK(est.samples_used <= 30);
}

TEST_CASE("detect_active boundary") {
  CHECK_FALSE(detect_active(cplx{}, 0.8));
  CHECK(detect_active(cplx(0.4, 0.0), 0.8));
  CHECK(detect_active(cplx(1.0, 0.0), 0.8));
  CHECK_FALSE(detect_active(cplx(0.3999999, 0.0), 0.8));
}

TEST_CASE("phase invariance: frequency bit-identical, amplitude rotated") {
  const double w = 2.37;
  const cplx a{0.6, -0.5};
  const cplx c = std::polar(1.0, 2.2);
  Rng noise(6);
  std::vector<cplx> pert(1024);
  for (auto& v : pert) v = {uniform_real(noise, -0.05, 0.05), uniform_real(noise, -0.05, 0.05)};
  auto g = [&](double t) {
    const auto cell = static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(t * 64)) + 512);
    return a * expi(2.0 * kPi * w * t) + pert[cell];
  };
  auto gc = [&](double t) { return c * g(t); };
  Rng r1(7), r2(7);
  const auto e1 = estimate_tone(g, config(16, 64, 8), r1);
  const auto e2 = estimate_tone(gc, config(16, 64, 8), r2);
  CHECK(std::abs(e1.frequency - e2.frequency) < 1e-12);
  CHECK(std::abs(e2.amplitude - c * e1.amplitude) < 1e-12);
}

TEST_CASE("time-shift covariance") {
  const double w = -5.61, shift = 0.75;
  auto g = [&](double t) { return expi(2.0 * kPi * w * t); };
  auto gs = [&](double t) { return g(t + shift); };
  Rng r1(8), r2(8);
  const auto e1 = estimate_tone(g, config(16, 64, 8), r1);
  const auto e2 = estimate_tone(gs, config(16, 64, 8), r2);
  CHECK(std::abs(e1.frequency - e2.frequency) < 2.0 / 16.0);
  CHECK(std::abs(e2.amplitude - e1.amplitude * expi(2.0 * kPi * e1.frequency * shift)) < 1e-6);
}

TEST_CASE("interval widths halve each stage") {
  Rng rng(9);
  const auto est = estimate_tone([](double t) { return expi(2.0 * kPi * 1.1 * t); }, config(64, 256, 4), rng);
  REQUIRE(est.interval_widths.size() == static_cast<std::size_t>(lag_stage_count(64, 256)));
  for (std::size_t i = 1; i < est.interval_widths.size(); ++i)
    CHECK(est.interval_widths[i] == est.interval_widths[i - 1] / 2.0);
  CHECK(est.interval_widths.back() <= 2.0 * est.interval_widths.front() / std::pow(2.0, est.interval_widths.size()));
}

TEST_CASE("bounded perturbation of mean square 0.05 A': |w - w_hat| <= 4/T in 99% of trials") {
  const double T = 16, F = 64, Aprime = 1.0;
  const double amp = std::sqrt(0.05) * Aprime;  // |perturbation|^2 = 0.05 A'^2 at every t
  int good = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    Rng setup(1000 + trial);
    const double w = uniform_real(setup, -8, 8);
    const cplx a = std::polar(uniform_real(setup, Aprime, 1.0), uniform_real(setup, 0, 2 * kPi));
    const double w2 = uniform_real(setup, -30, 30);
    const double phi = uniform_real(setup, 0, 2 * kPi);
    auto g = [&](double t) { return a * expi(2.0 * kPi * w * t) + amp * expi(2.0 * kPi * w2 * t + phi); };
    Rng rng(trial);
    const auto est = estimate_tone(g, config(T, F, 8, Aprime), rng);
    good += std::abs(est.frequency - w) <= 4.0 / T;
  }
  CHECK(good >= 495);
}

TEST_CASE("per_stage_samples and lag_stage_count") {
  AlgorithmParams p;
  p.s = 16;
  p.epsilon = 0.2;
  p.delta = 0.2;
  p.c_R = 1.0;
  const ModelConstants m{2, 3, 1.0, 0.5, 1.0, 0.9};
  const double ratio = 1.0 - 2.0 * 0.2 / 0.9;
  CHECK(per_stage_samples(p, m) == static_cast<std::int64_t>(std::ceil(std::log(3.0 * 16.0 / 0.2) / (ratio * ratio))));
  CHECK(lag_stage_count(64, 256) == 13);
  CHECK(lag_stage_count(16, 64) == 9);
}
