#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdsft/errors.hpp"

namespace hdsft {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// e^{2 pi i phase}; phase is in cycles. The integer part is removed first
/// (exactly, for |phase| < 2^52) so sin/cos see an argument in (-2 pi, 2 pi).
inline cplx cis_cycles(double phase) {
  const double r = kTwoPi * (phase - static_cast<double>(static_cast<std::int64_t>(phase)));
  return {std::cos(r), std::sin(r)};
}

/// Plain complex product. std::complex's operator* carries the Annex G
/// inf/nan recovery, which costs a library call in the hot loops.
inline cplx cmul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Wraps v into the half-open interval [-period/2, period/2).
inline double fold(double v, double period) {
  return v - period * std::floor(v / period + 0.5);
}

/// Wraps an integer grid index into [-n/2, n/2); n even.
inline std::int64_t fold_index(std::int64_t i, std::int64_t n) {
  std::int64_t r = (i + n / 2) % n;
  if (r < 0) r += n;
  return r - n / 2;
}

inline bool is_pow2(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return false;
  int e = 0;
  return std::frexp(x, &e) == 0.5;
}

/// Smallest power of two (possibly fractional) that is >= x. Rounds up so
/// that every lower bound fed into it is preserved.
inline double next_pow2(double x) {
  if (!(x > 0.0)) return 1.0;
  int e = 0;
  const double m = std::frexp(x, &e);
  return m == 0.5 ? x : std::ldexp(1.0, e);
}

/// One complex exponential a * exp(2 pi i w . t).
struct Tone {
  cplx amplitude;
  std::vector<double> frequency;

  bool operator==(const Tone&) const = default;
};

/// The constants a recovery run is allowed to know: everything about the
/// signal model except the tones themselves.
struct ModelConstants {
  std::size_t k = 0;
  std::size_t d = 2;
  double M = 1.0;
  double eta = 0.5;
  double A = 1.0;
  double Aprime = 1.0;
};

/// Ground truth: f(t) = sum_j a_j exp(2 pi i w_j . t) with its model bounds.
struct SignalSpec {
  std::size_t d = 2;
  double M = 1.0;
  double eta = 0.5;
  double A = 1.0;
  double Aprime = 1.0;
  std::vector<Tone> tones;

  std::size_t k() const noexcept { return tones.size(); }

  ModelConstants constants() const { return {tones.size(), d, M, eta, A, Aprime}; }

  bool operator==(const SignalSpec&) const = default;
};

inline double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

/// Throws std::invalid_argument naming the first violated invariant.
/// An empty tone list is only accepted when allow_empty is set.
inline void validate(const SignalSpec& spec, bool allow_empty = false) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("signal spec: " + msg); };
  if (spec.d < 2) fail("d must be >= 2");
  if (!(spec.M > 0.0)) fail("M must be positive");
  if (!(spec.eta > 0.0)) fail("eta must be positive");
  if (!(spec.Aprime > 0.0) || !(spec.A >= spec.Aprime)) fail("need 0 < Aprime <= A");
  if (spec.tones.empty() && !allow_empty) fail("at least one tone is required");
  const double slack = 1e-12;
  for (std::size_t i = 0; i < spec.tones.size(); ++i) {
    const Tone& t = spec.tones[i];
    if (t.frequency.size() != spec.d) fail("tone " + std::to_string(i) + " has wrong dimension");
    const double mag = std::abs(t.amplitude);
    if (mag < spec.Aprime * (1 - slack) || mag > spec.A * (1 + slack))
      fail("tone " + std::to_string(i) + " amplitude outside [Aprime, A]");
    for (double w : t.frequency)
      if (!(std::abs(w) <= spec.M)) fail("tone " + std::to_string(i) + " frequency outside [-M, M]");
    for (std::size_t j = 0; j < i; ++j)
      if (!(distance(t.frequency, spec.tones[j].frequency) > spec.eta))
        fail("tones " + std::to_string(j) + " and " + std::to_string(i) + " closer than eta");
  }
}

/// f(t). Exact up to rounding of the individual exponentials.
inline cplx eval_signal(const SignalSpec& spec, std::span<const double> t) {
  if (t.size() != spec.d)
    throw std::invalid_argument("eval_signal: point has dimension " + std::to_string(t.size()) +
                                ", signal has " + std::to_string(spec.d));
  cplx acc{};
  for (const Tone& tone : spec.tones) {
    double phase = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) phase += tone.frequency[i] * t[i];
    acc += tone.amplitude * cis_cycles(phase);
  }
  return acc;
}

/// Black-box access to a signal. The recovery code only ever sees values of
/// f through this type, and every evaluation is counted.
class SignalOracle {
 public:
  explicit SignalOracle(SignalSpec spec) : spec_(std::move(spec)) {
    freqs_.reserve(spec_.k() * spec_.d);
    for (const Tone& t : spec_.tones) freqs_.insert(freqs_.end(), t.frequency.begin(), t.frequency.end());
  }

  SignalOracle(const SignalOracle&) = delete;
  SignalOracle& operator=(const SignalOracle&) = delete;

  std::size_t dims() const noexcept { return spec_.d; }

  cplx operator()(std::span<const double> t) const {
    if (t.size() != spec_.d) throw std::invalid_argument("SignalOracle: dimension mismatch");
    samples_.fetch_add(1, std::memory_order_relaxed);
    cplx acc{};
    const double* w = freqs_.data();
    for (const Tone& tone : spec_.tones) {
      double phase = 0.0;
      for (std::size_t i = 0; i < spec_.d; ++i) phase += w[i] * t[i];
      w += spec_.d;
      acc += cmul(tone.amplitude, cis_cycles(phase));
    }
    return acc;
  }

  std::uint64_t samples() const noexcept { return samples_.load(std::memory_order_relaxed); }

  /// Ground truth, for scoring only.
  const SignalSpec& truth() const noexcept { return spec_; }

 private:
  SignalSpec spec_;
  std::vector<double> freqs_;
  mutable std::atomic<std::uint64_t> samples_{0};
};

/// Discretization used by one recovery run.
///
/// T, F and s are powers of two with 1 < s < F and T > 1/eta. The grid has
/// TF points per axis: time lattice spacing 1/F over extent T, frequency
/// lattice spacing 1/T over extent F.
struct AlgorithmParams {
  double T = 64.0;
  double F = 256.0;
  std::int64_t s = 16;
  double beta = 0.0;
  std::int64_t N = 1;
  double epsilon = 0.1;
  double delta = 0.1;
  double c_s = 1.0, c_T = 1.0, c_F = 1.0, c_N = 1.0, c_a = 1.0, c_R = 1.0;

  /// TF as an integer. Throws if the grid does not fit exact integer math.
  std::int64_t grid_size() const {
    const double tf = T * F;
    if (!(tf >= 2.0) || tf > 0x1.0p62 || tf != std::floor(tf))
      throw InfeasibleParameters("grid size TF = " + std::to_string(tf) + " is not a usable integer");
    return static_cast<std::int64_t>(tf);
  }

  /// TF / s, the number of frequency cells in one bucket.
  std::int64_t bucket_width() const { return grid_size() / s; }

  bool operator==(const AlgorithmParams&) const = default;
};

/// Explicit replacements for derived quantities. Multipliers apply to the
/// formulas only; a field that is overridden ignores its multiplier.
struct ParamOverrides {
  std::optional<double> T, F, beta;
  std::optional<std::int64_t> s, N;
  double c_s = 1.0, c_T = 1.0, c_F = 1.0, c_N = 1.0, c_a = 1.0, c_R = 1.0;

  bool operator==(const ParamOverrides&) const = default;
};

/// Throws InfeasibleParameters unless p satisfies the AlgorithmParams
/// invariants for the given model.
inline void check_params(const AlgorithmParams& p, const ModelConstants& m) {
  auto fail = [](const std::string& msg) { throw InfeasibleParameters(msg); };
  if (!is_pow2(p.T) || !is_pow2(p.F) || !is_pow2(static_cast<double>(p.s)))
    fail("T, F and s must be powers of two");
  if (!(p.s > 1) || !(static_cast<double>(p.s) < p.F))
    fail("need 1 < s < F (s = " + std::to_string(p.s) + ", F = " + std::to_string(p.F) + ")");
  if (!(p.T > 1.0 / m.eta)) fail("need T > 1/eta");
  // T, F, s are powers of two, so TF/s >= 1 makes it an integer.
  if (!(p.T * p.F >= static_cast<double>(p.s))) fail("TF must be a multiple of s");
  if (!(p.N >= 1)) fail("N must be positive");
  if (!(p.beta > 0.0)) fail("beta must be positive");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0) || !(p.delta > 0.0 && p.delta < 1.0))
    fail("epsilon and delta must lie in (0, 1)");
}

/// Importance-sample count for the bucket convolution estimator:
/// ceil(c_N k^2 A^2 ln^2(TF) ln^2(1/delta) / eps^2).
inline std::int64_t importance_sample_count(const ModelConstants& m, double T, double F,
                                            double epsilon, double delta, double c_N) {
  const double k = static_cast<double>(std::max<std::size_t>(m.k, 1));
  const double l1 = std::log(T * F);
  const double l2 = std::log(1.0 / delta);
  const double n = c_N * k * k * m.A * m.A * l1 * l1 * l2 * l2 / (epsilon * epsilon);
  if (!(n < 9.0e18)) throw InfeasibleParameters("importance sample count overflows");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

/// Derives (T, F, s, beta, N) from the model constants.
///
/// s = pow2 >= c_s sqrt(d) k^2 / delta
/// F = pow2 >= c_F max(k^2 M / delta, sqrt(d) M / epsilon)
/// T = pow2 >= c_T k^4 d^{5/2} (d s / (epsilon delta))^2 / (eta delta^2), and T > 1/eta
/// N = ceil(c_N k^2 A^2 ln^2(TF) ln^2(1/delta) / epsilon^2)
/// beta = eta delta / (sqrt(d) k s)
///
/// The formula for T is astronomically large for any realistic input; runs
/// at desk scale override it.
inline AlgorithmParams derive_params(const ModelConstants& m, double epsilon, double delta,
                                     const ParamOverrides& o = {}) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("derive_params: delta must lie in (0, 1/2)");
  const double eps_max = std::min({1.0, m.eta, m.Aprime / 4.0, 1.0 / (4.0 * m.A * m.A)});
  if (!(epsilon > 0.0 && epsilon < eps_max))
    throw std::invalid_argument("derive_params: epsilon must lie in (0, " + std::to_string(eps_max) + ")");

  // k = 0 is allowed for empty-signal runs; the formulas use k >= 1.
  const double k = static_cast<double>(std::max<std::size_t>(m.k, 1));
  const double d = static_cast<double>(m.d);

  AlgorithmParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.c_s = o.c_s;
  p.c_T = o.c_T;
  p.c_F = o.c_F;
  p.c_N = o.c_N;
  p.c_a = o.c_a;
  p.c_R = o.c_R;

  if (o.s) {
    p.s = *o.s;
  } else {
    const double raw = next_pow2(o.c_s * std::sqrt(d) * k * k / delta);
    if (raw > 0x1.0p62) throw InfeasibleParameters("derived s overflows");
    p.s = static_cast<std::int64_t>(raw);
  }
  p.F = o.F ? *o.F : next_pow2(o.c_F * std::max(k * k * m.M / delta, std::sqrt(d) * m.M / epsilon));
  if (o.T) {
    p.T = *o.T;
  } else {
    const double sd = static_cast<double>(p.s);
    const double ratio = d * sd / (epsilon * delta);
    const double raw = o.c_T * std::pow(k, 4) * std::pow(d, 2.5) * ratio * ratio / (m.eta * delta * delta);
    double T = next_pow2(std::max(raw, 1.0 / m.eta));
    if (!(T > 1.0 / m.eta)) T *= 2.0;
    p.T = T;
  }
  p.beta = o.beta ? *o.beta : m.eta * delta / (std::sqrt(d) * k * static_cast<double>(p.s));
  p.N = o.N ? *o.N : importance_sample_count(m, p.T, p.F, epsilon, delta, o.c_N);

  if (!(static_cast<double>(p.s) < p.F))
    throw InfeasibleParameters("derived s = " + std::to_string(p.s) + " is not below F = " + std::to_string(p.F));
  check_params(p, m);
  return p;
}

}  // namespace hdsft
