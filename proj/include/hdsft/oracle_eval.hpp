#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "hdsft/dense.hpp"
#include "hdsft/generator.hpp"
#include "hdsft/hashing.hpp"
#include "hdsft/model.hpp"
#include "hdsft/pipeline.hpp"
#include "hdsft/rng.hpp"

namespace hdsft {

/// Fraction of the dense-spectrum energy of a single tone that lies outside
/// the ball |xi - w| <= beta/2 (distances taken mod F per coordinate).
inline double concentration_probe(const SignalSpec& spec, const AlgorithmParams& p, double beta) {
  if (spec.k() != 1) throw std::invalid_argument("concentration_probe: expects a single tone");
  const DenseSpectrum G = dense_dft(sample_lattice([&](std::span<const double> t) { return eval_signal(spec, t); }, spec.d, p));
  const std::vector<double>& w = spec.tones.front().frequency;
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const double e = std::norm(G.values[i]);
    total += e;
    const auto idx = G.indices(i);
    double r2 = 0.0;
    for (std::size_t c = 0; c < spec.d; ++c) {
      const double diff = fold(static_cast<double>(idx[c]) / p.T - w[c], p.F);
      r2 += diff * diff;
    }
    if (std::sqrt(r2) > beta / 2.0) outside += e;
  }
  return total > 0.0 ? outside / total : 0.0;
}

struct IsolationStats {
  std::uint64_t trials = 0;
  std::uint64_t collisions = 0;
  std::uint64_t boundary = 0;
  std::uint64_t isolated = 0;

  double p_collision() const { return trials ? static_cast<double>(collisions) / static_cast<double>(trials) : 0.0; }
  double p_boundary() const { return trials ? static_cast<double>(boundary) / static_cast<double>(trials) : 0.0; }
  double p_isolated() const { return trials ? static_cast<double>(isolated) / static_cast<double>(trials) : 0.0; }
};

/// Per-tone bucket placement of the hashed beta-ball under one hash draw.
struct BallPlacement {
  std::int64_t first_bucket = 0;  // 0-based
  bool straddles = false;
};

/// The hashed ball H(phi_{w,beta}) has last coordinate in [c - r, c + r]
/// with c = H(w)_d and r = (beta/2) |(h_1, ..., h_d)|. It straddles when the
/// Gamma_2 cells it touches fall in more than one bucket.
inline BallPlacement place_ball(const HashDraw& hash, const AlgorithmParams& p, std::span<const double> w, double beta) {
  double c = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    c += static_cast<double>(hash.h[i]) * w[i];
    norm2 += static_cast<double>(hash.h[i]) * static_cast<double>(hash.h[i]);
  }
  c += kHashSign * static_cast<double>(hash.b) / p.T;
  const double r = beta / 2.0 * std::sqrt(norm2);
  const std::int64_t tf = p.grid_size();
  const std::int64_t width = p.bucket_width();
  const auto lo = static_cast<std::int64_t>(std::floor((c - r) * p.T + 0.5));
  const auto hi = static_cast<std::int64_t>(std::floor((c + r) * p.T + 0.5));
  auto bucket = [&](std::int64_t idx) {
    const std::int64_t shifted = idx + tf / 2;
    return shifted >= 0 ? shifted / width : -((-shifted + width - 1) / width);
  };
  const std::int64_t b_lo = bucket(lo);
  const std::int64_t b_hi = bucket(hi);
  const std::int64_t s = p.s;
  return {((b_lo % s) + s) % s, b_lo != b_hi};
}

/// Monte-Carlo frequencies of the three isolation events over `trials` hash draws:
/// collision (min last-coordinate gap <= 2F/s), boundary (some hashed ball
/// straddles a bucket edge), isolated (every ball strictly inside its own bucket).
inline IsolationStats isolation_probe(const SignalSpec& spec, const AlgorithmParams& p, std::uint64_t trials,
                                      std::uint64_t seed) {
  IsolationStats st;
  Rng rng = make_rng(seed, 77);
  const double threshold = 2.0 * p.F / static_cast<double>(p.s);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const HashDraw hash = draw_hash(rng, p, spec.constants());
    ++st.trials;
    if (spec.k() >= 2 && min_last_coord_gap(hash, spec, p) <= threshold) ++st.collisions;
    bool any_straddle = false;
    std::set<std::int64_t> used;
    for (const Tone& tone : spec.tones) {
      const BallPlacement b = place_ball(hash, p, tone.frequency, p.beta);
      any_straddle = any_straddle || b.straddles;
      used.insert(b.first_bucket);
    }
    if (any_straddle) ++st.boundary;
    if (!any_straddle && used.size() == spec.k()) ++st.isolated;
  }
  return st;
}

struct MatchedPair {
  std::size_t truth = 0;
  std::size_t recovered = 0;
  double freq_error = 0.0;
  double amp_error = 0.0;
};

struct MatchReport {
  std::vector<MatchedPair> pairs;
  double recall = 0.0;
  double max_freq_error = 0.0;      // Euclidean
  double max_freq_error_inf = 0.0;  // max-coordinate
  double max_amp_error = 0.0;
};

/// Greedy nearest matching: all (truth, recovered) pairs closer than
/// `threshold`, taken in increasing distance, each side used once.
inline MatchReport match_score(const SignalSpec& truth, const std::vector<Tone>& recovered, double threshold) {
  struct Cand {
    double dist;
    std::size_t t, r;
  };
  std::vector<Cand> cands;
  for (std::size_t t = 0; t < truth.k(); ++t)
    for (std::size_t r = 0; r < recovered.size(); ++r) {
      const double dist = distance(truth.tones[t].frequency, recovered[r].frequency);
      if (dist < threshold) cands.push_back({dist, t, r});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
  std::vector<bool> t_used(truth.k()), r_used(recovered.size());
  MatchReport rep;
  for (const Cand& c : cands) {
    if (t_used[c.t] || r_used[c.r]) continue;
    t_used[c.t] = r_used[c.r] = true;
    const Tone& tt = truth.tones[c.t];
    const Tone& rr = recovered[c.r];
    double inf = 0.0;
    for (std::size_t i = 0; i < tt.frequency.size(); ++i) inf = std::max(inf, std::abs(tt.frequency[i] - rr.frequency[i]));
    const double amp = std::abs(tt.amplitude - rr.amplitude);
    rep.pairs.push_back({c.t, c.r, c.dist, amp});
    rep.max_freq_error = std::max(rep.max_freq_error, c.dist);
    rep.max_freq_error_inf = std::max(rep.max_freq_error_inf, inf);
    rep.max_amp_error = std::max(rep.max_amp_error, amp);
  }
  rep.recall = truth.k() ? static_cast<double>(rep.pairs.size()) / static_cast<double>(truth.k()) : 1.0;
  return rep;
}

/// One instance family for a scaling sweep: generator settings minus d,
/// plus the parameter policy (fixed overrides, N from the formula).
struct SweepConfig {
  std::vector<std::size_t> dims{2, 4, 8, 16};
  std::vector<std::uint64_t> seeds{0};
  GeneratorSettings generator;
  double epsilon = 0.2;
  double delta = 0.2;
  ParamOverrides overrides;
  int max_passes = 1;
};

struct SweepRow {
  std::size_t d = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  double wall_time_ms = 0.0;
  double recall = 0.0;
  double max_freq_error = 0.0;
  bool failed = false;
};

/// Spec and params for one sweep cell.
inline std::pair<SignalSpec, AlgorithmParams> sweep_instance(const SweepConfig& cfg, std::size_t d, std::uint64_t seed) {
  GeneratorSettings g = cfg.generator;
  g.d = d;
  SignalSpec spec = generate_spec(g, seed);
  AlgorithmParams p = derive_params(spec.constants(), cfg.epsilon, cfg.delta, cfg.overrides);
  return {std::move(spec), p};
}

/// Runs recover_all for every (d, seed) cell. Deterministic per seed apart from wall time.
inline std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  for (std::size_t d : cfg.dims) {
    for (std::uint64_t seed : cfg.seeds) {
      SweepRow row;
      row.d = d;
      row.k = cfg.generator.k;
      row.seed = seed;
      try {
        auto [spec, p] = sweep_instance(cfg, d, seed);
        SignalOracle f(spec);
        RecoveryOptions opt;
        opt.seed = seed;
        opt.max_passes = cfg.max_passes;
        const RecoveryResult res = recover_all(f, spec.constants(), p, opt);
        const MatchReport rep = match_score(spec, res.recovered, spec.eta / 4.0);
        row.samples = res.total_signal_samples;
        row.wall_time_ms = std::chrono::duration<double, std::milli>(res.wall_time).count();
        row.recall = rep.recall;
        row.max_freq_error = rep.max_freq_error;
        row.failed = rep.recall < 1.0;
      } catch (const std::exception&) {
        row.failed = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Median of per-d values of a sweep column, in the order of `dims`.
template <class Proj>
std::vector<double> per_dim_median(const std::vector<SweepRow>& rows, std::span<const std::size_t> dims, Proj proj) {
  std::vector<double> out;
  for (std::size_t d : dims) {
    std::vector<double> v;
    for (const SweepRow& r : rows)
      if (r.d == d) v.push_back(proj(r));
    std::sort(v.begin(), v.end());
    out.push_back(v.empty() ? 0.0 : (v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2])));
  }
  return out;
}

}  // namespace hdsft
