#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "hdsft/model.hpp"
#include "hdsft/rng.hpp"

namespace hdsft {

/// Single-tone frequency/amplitude estimation from samples of g on [-T/2, T/2).
///
/// g is only ever sampled at cell starts p/F, so the lags below are exact
/// multiples of the 1/F resolution of the line functions.
struct ToneEstimatorConfig {
  double T = 64.0;
  double F = 256.0;
  /// R: sample pairs per lag stage (and samples for the energy and amplitude stages).
  std::int64_t per_stage = 8;
  /// Maximum number of sampler calls.
  std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
  double Aprime = 1.0;
  /// Skip the frequency stages when the mean energy is clearly below the gate.
  bool energy_gate = true;
};

struct ToneEstimate {
  double frequency = 0.0;
  cplx amplitude{};
  bool active = false;
  bool truncated = false;
  std::uint64_t samples_used = 0;
  /// Ambiguity spacing 1/tau_m after each lag stage; halves stage to stage.
  std::vector<double> interval_widths;
};

/// The A'/2 gate. The boundary counts as active.
inline bool detect_active(const ToneEstimate& est, double Aprime) {
  return std::abs(est.amplitude) >= Aprime / 2.0;
}

inline bool detect_active(cplx amplitude, double Aprime) {
  return std::abs(amplitude) >= Aprime / 2.0;
}

/// R = ceil(c_R ln(d s / delta) / max(0.01, (1 - 2 eps'/A')^2)) with the
/// perturbation level eps' = epsilon A.
inline std::int64_t per_stage_samples(const AlgorithmParams& p, const ModelConstants& m) {
  const double ratio = 1.0 - 2.0 * p.epsilon * m.A / m.Aprime;
  const double denom = std::max(0.01, ratio * ratio);
  const double r = p.c_R * std::log(static_cast<double>(m.d) * static_cast<double>(p.s) / p.delta) / denom;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(r)));
}

/// Number of lag stages: tau_m = 2^m / F for m = 0 .. ceil(log2(TF)) - 2.
inline int lag_stage_count(double T, double F) {
  const int levels = static_cast<int>(std::ceil(std::log2(T * F)));
  return std::max(1, levels - 1);
}

/// Multi-scale phase estimator.
///
/// Stage m measures phi_m = arg(mean_r g(t_r + tau_m) conj(g(t_r))) with
/// t_r uniform on [-T/2, T/2 - tau_m). Stage 0 (tau_0 = 1/F) fixes the
/// frequency in [-F/2, F/2) with no wrap; every later stage picks the
/// branch of phi_m / (2 pi tau_m) closest to the running estimate. The
/// amplitude is then mean_r g(t_r) exp(-2 pi i w t_r).
///
/// The estimator only uses products g(.) conj(g(.)) for the frequency, so a
/// constant unit-modulus factor on g does not move it.
template <class Sampler>
ToneEstimate estimate_tone(Sampler&& g, const ToneEstimatorConfig& cfg, Rng& rng) {
  ToneEstimate est;
  const auto tf = static_cast<std::int64_t>(cfg.T * cfg.F);
  const std::int64_t half = tf / 2;
  const auto R = static_cast<std::uint64_t>(std::max<std::int64_t>(1, cfg.per_stage));
  const int stages = lag_stage_count(cfg.T, cfg.F);

  auto sample = [&](std::int64_t cell) -> cplx {
    ++est.samples_used;
    return g(static_cast<double>(cell) / cfg.F);
  };
  auto exhausted = [&](std::uint64_t more) { return est.samples_used + more > cfg.budget; };
  auto truncate = [&]() {
    est.truncated = true;
    est.active = false;
    return est;
  };

  if (cfg.energy_gate) {
    if (exhausted(R)) return truncate();
    double energy = 0.0;
    for (std::uint64_t r = 0; r < R; ++r) energy += std::norm(sample(uniform_int(rng, -half, half)));
    energy /= static_cast<double>(R);
    if (energy < cfg.Aprime * cfg.Aprime / 16.0) {
      est.amplitude = {std::sqrt(energy), 0.0};
      est.active = false;
      return est;
    }
  }

  double w = 0.0;
  for (int m = 0; m < stages; ++m) {
    const std::int64_t lag = std::int64_t{1} << m;
    if (lag >= tf) break;
    if (exhausted(2 * R)) return truncate();
    cplx acc{};
    for (std::uint64_t r = 0; r < R; ++r) {
      const std::int64_t cell = uniform_int(rng, -half, half - lag);
      const cplx a = sample(cell);
      const cplx b = sample(cell + lag);
      acc += b * std::conj(a);
    }
    const double tau = static_cast<double>(lag) / cfg.F;
    const double spacing = 1.0 / tau;
    const double base = std::arg(acc) / (kTwoPi * tau);
    if (m == 0) {
      w = fold(base, cfg.F);
    } else {
      // Branch of base + n * spacing nearest to the running estimate.
      const double n = std::floor((w - base) / spacing + 0.5);
      w = base + n * spacing;
    }
    est.interval_widths.push_back(spacing);
  }
  w = fold(w, cfg.F);
  est.frequency = w;

  if (exhausted(R)) return truncate();
  cplx amp{};
  for (std::uint64_t r = 0; r < R; ++r) {
    const std::int64_t cell = uniform_int(rng, -half, half);
    amp += sample(cell) * cis_cycles(-w * static_cast<double>(cell) / cfg.F);
  }
  est.amplitude = amp / static_cast<double>(R);
  est.active = detect_active(est.amplitude, cfg.Aprime);
  return est;
}

}  // namespace hdsft
