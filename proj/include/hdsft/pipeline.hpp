#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdsft/bucketfilter.hpp"
#include "hdsft/hashing.hpp"
#include "hdsft/linesampler.hpp"
#include "hdsft/model.hpp"
#include "hdsft/rng.hpp"
#include "hdsft/toneest.hpp"

namespace hdsft {

struct RecoveryOptions {
  std::uint64_t seed = 0;
  /// Independent passes (fresh hash, lines and sample set each); stops early
  /// once k distinct tones have been pooled. 1 = the plain algorithm.
  int max_passes = 1;
  Boundary boundary = Boundary::open;
  bool energy_gate = true;
};

enum class BucketStatus { inactive, active, failed };

inline const char* to_string(BucketStatus s) {
  switch (s) {
    case BucketStatus::inactive: return "inactive";
    case BucketStatus::active: return "active";
    case BucketStatus::failed: return "failed";
  }
  return "unknown";
}

struct BucketDiagnostics {
  int pass = 0;
  std::int64_t j = 1;
  BucketStatus status = BucketStatus::inactive;
  double gate_amplitude = 0.0;
  std::uint64_t g_samples = 0;
  std::vector<std::uint64_t> line_seeds;
  std::string note;
};

struct BucketRecovery {
  std::vector<double> frequency;
  double gate_amplitude = 0.0;
};

struct RecoveryResult {
  std::vector<Tone> recovered;
  std::vector<BucketDiagnostics> per_bucket;
  /// One hash per pass; hashes.front() is the plain algorithm's draw.
  std::vector<HashDraw> hashes;
  AlgorithmParams params;
  std::chrono::nanoseconds wall_time{0};
  std::uint64_t total_signal_samples = 0;
  std::uint64_t seed = 0;
  int passes = 0;
};

namespace streams {
inline constexpr std::uint64_t hash = 1;
inline constexpr std::uint64_t importance = 2;
inline constexpr std::uint64_t bucket = 1'000;
inline constexpr std::uint64_t amplitude = 2'000'000;
inline constexpr std::uint64_t pass = 9'000'000;
inline constexpr std::uint64_t line = 0;
inline constexpr std::uint64_t estimator = 100;
}  // namespace streams

/// Seed of pass r; pass 0 uses the master seed itself.
inline std::uint64_t pass_seed(std::uint64_t master, int pass) {
  return pass == 0 ? master : derive_seed(master, streams::pass + static_cast<std::uint64_t>(pass));
}

/// Runs the per-coordinate recovery for one bucket.
///
/// Line 0 is estimated first and gated on |amplitude| >= A'/2; only then are
/// lines 1..d-1 drawn. Returns nothing for an inactive or failed bucket; the
/// distinction is written to `diag`.
template <class Signal>
std::optional<BucketRecovery> recover_bucket(const Signal& f, const BucketConvolution& conv,
                                             const ModelConstants& m, const AlgorithmParams& p,
                                             std::uint64_t bucket_seed, bool energy_gate,
                                             BucketDiagnostics& diag) {
  const std::int64_t R = per_stage_samples(p, m);
  ToneEstimatorConfig cfg;
  cfg.T = p.T;
  cfg.F = p.F;
  cfg.per_stage = R;
  cfg.Aprime = m.Aprime;
  cfg.energy_gate = energy_gate;
  cfg.budget = static_cast<std::uint64_t>(R) * static_cast<std::uint64_t>(2 * lag_stage_count(p.T, p.F) + 2);

  diag.j = conv.bucket().j;
  BucketRecovery out;
  out.frequency.resize(m.d);
  for (std::size_t axis = 0; axis < m.d; ++axis) {
    const std::uint64_t line_seed = derive_seed(bucket_seed, streams::line + axis);
    diag.line_seeds.push_back(line_seed);
    Rng line_rng(line_seed);
    Rng est_rng(derive_seed(bucket_seed, streams::estimator + axis));
    const LineContext ctx = draw_line(line_rng, axis, m.d, p);
    const LineSampler<Signal> g(f, conv, ctx);
    if (axis > 0) cfg.energy_gate = false;
    const ToneEstimate est = estimate_tone(g, cfg, est_rng);
    diag.g_samples += est.samples_used;
    if (est.truncated) {
      diag.status = BucketStatus::failed;
      diag.note = "estimator budget exhausted on axis " + std::to_string(axis);
      return std::nullopt;
    }
    if (axis == 0) {
      diag.gate_amplitude = std::abs(est.amplitude);
      if (!est.active) {
        diag.status = BucketStatus::inactive;
        return std::nullopt;
      }
      out.gate_amplitude = diag.gate_amplitude;
    }
    if (std::abs(est.frequency) > m.M + m.eta) {
      diag.status = BucketStatus::failed;
      diag.note = "frequency outside [-M-eta, M+eta] on axis " + std::to_string(axis);
      return std::nullopt;
    }
    out.frequency[axis] = est.frequency;
  }
  diag.status = BucketStatus::active;
  return out;
}

/// Number of points for the amplitude integral:
/// ceil(c_a ln(1/delta) k^2 A^2 / epsilon^2).
inline std::int64_t amplitude_sample_count(const ModelConstants& m, const AlgorithmParams& p) {
  const double k = static_cast<double>(std::max<std::size_t>(m.k, 1));
  const double n = p.c_a * std::log(1.0 / p.delta) * k * k * m.A * m.A / (p.epsilon * p.epsilon);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

/// Monte-Carlo estimate of (eps^2/k)^d int_{[0,k/eps^2]^d} f(t) e^{-2 pi i w.t} dt.
template <class Signal>
cplx amplitude_mc(const Signal& f, std::span<const double> w, const ModelConstants& m,
                  const AlgorithmParams& p, Rng& rng) {
  const double k = static_cast<double>(std::max<std::size_t>(m.k, 1));
  const double side = k / (p.epsilon * p.epsilon);
  const std::int64_t n = amplitude_sample_count(m, p);
  std::vector<double> t(w.size());
  cplx acc{};
  for (std::int64_t i = 0; i < n; ++i) {
    double phase = 0.0;
    for (std::size_t c = 0; c < t.size(); ++c) {
      t[c] = uniform_real(rng, 0.0, side);
      phase += w[c] * t[c];
    }
    acc += f(std::span<const double>(t)) * cis_cycles(-phase);
  }
  return acc / static_cast<double>(n);
}

/// Greedy clustering: strongest first, keep a candidate only if it is more
/// than eta/2 from every kept frequency.
inline std::vector<Tone> dedupe(std::vector<Tone> candidates, double eta) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Tone& a, const Tone& b) { return std::abs(a.amplitude) > std::abs(b.amplitude); });
  std::vector<Tone> kept;
  for (Tone& c : candidates) {
    const bool far = std::all_of(kept.begin(), kept.end(),
                                 [&](const Tone& t) { return distance(t.frequency, c.frequency) > eta / 2.0; });
    if (far) kept.push_back(std::move(c));
  }
  return kept;
}

/// The full recovery: hash, shared importance-sample set, bucket loop with
/// the A'/2 gate, per-axis frequency recovery, amplitude integral, dedupe.
///
/// Candidates whose integrated amplitude falls below A'/2 are dropped. With
/// max_passes > 1 the whole procedure is repeated with fresh randomness and
/// the accepted tones are pooled until k distinct ones are found.
template <class Signal>
RecoveryResult recover_all(const Signal& f, const ModelConstants& m, const AlgorithmParams& p,
                           const RecoveryOptions& opt = {}) {
  check_params(p, m);
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t samples_before = f.samples();

  RecoveryResult result;
  result.params = p;
  result.seed = opt.seed;

  std::vector<Tone> pool;
  for (int pass = 0; pass < std::max(1, opt.max_passes); ++pass) {
    const std::uint64_t seed = pass_seed(opt.seed, pass);
    Rng hash_rng = make_rng(seed, streams::hash);
    const HashDraw hash = draw_hash(hash_rng, p, m);
    result.hashes.push_back(hash);
    const ImportanceSampleSet samples = draw_importance_samples(derive_seed(seed, streams::importance), p.N);

    std::vector<Tone> candidates;
    for (std::int64_t j = 1; j <= p.s; ++j) {
      const BucketConvolution conv = BucketConvolution::sampled(hash, p, BucketIndex{j}, samples, opt.boundary);
      BucketDiagnostics diag;
      diag.pass = pass;
      const std::uint64_t bucket_seed = derive_seed(seed, streams::bucket + static_cast<std::uint64_t>(j));
      const auto found = recover_bucket(f, conv, m, p, bucket_seed, opt.energy_gate, diag);
      if (found) {
        Rng amp_rng = make_rng(seed, streams::amplitude + static_cast<std::uint64_t>(j));
        const cplx a = amplitude_mc(f, found->frequency, m, p, amp_rng);
        if (detect_active(a, m.Aprime)) {
          candidates.push_back({a, found->frequency});
        } else {
          diag.note = "integrated amplitude below A'/2";
        }
      }
      result.per_bucket.push_back(std::move(diag));
    }
    pool.insert(pool.end(), candidates.begin(), candidates.end());
    pool = dedupe(std::move(pool), m.eta);
    result.passes = pass + 1;
    if (pool.size() >= m.k) break;
  }

  result.recovered = std::move(pool);
  result.total_signal_samples = f.samples() - samples_before;
  result.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

}  // namespace hdsft
