#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hdsft/errors.hpp"
#include "hdsft/model.hpp"
#include "hdsft/rng.hpp"

namespace hdsft {

struct GeneratorSettings {
  std::size_t k = 2;
  std::size_t d = 2;
  double M = 1.0;
  double eta = 0.5;
  double A = 1.0;
  double Aprime = 0.8;
  std::uint64_t max_attempts = 10'000;
};

/// Random instance: frequencies uniform on [-M, M]^d, rejection-sampled to
/// pairwise distance > eta; |a| uniform on [A', A], phase uniform.
inline SignalSpec generate_spec(const GeneratorSettings& g, std::uint64_t seed) {
  if (g.d < 2) throw std::invalid_argument("generate_spec: d must be >= 2");
  if (!(g.M > 0.0) || !(g.eta > 0.0) || !(g.Aprime > 0.0) || !(g.A >= g.Aprime))
    throw std::invalid_argument("generate_spec: need M, eta > 0 and 0 < Aprime <= A");

  SignalSpec spec;
  spec.d = g.d;
  spec.M = g.M;
  spec.eta = g.eta;
  spec.A = g.A;
  spec.Aprime = g.Aprime;

  Rng rng = make_rng(seed, 0);
  std::uint64_t attempts = 0;
  std::vector<double> w(g.d);
  while (spec.tones.size() < g.k) {
    if (attempts == g.max_attempts) {
      const double diameter = 2.0 * g.M * std::sqrt(static_cast<double>(g.d));
      throw InfeasibleInstance("could not place " + std::to_string(g.k) + " tones with gap eta = " +
                               std::to_string(g.eta) + " in [-M, M]^d within " + std::to_string(attempts) +
                               " attempts (placed " + std::to_string(spec.tones.size()) +
                               ", cube diameter " + std::to_string(diameter) + ")");
    }
    ++attempts;
    for (double& v : w) v = uniform_real(rng, -g.M, g.M);
    bool ok = true;
    for (const Tone& t : spec.tones)
      if (!(distance(t.frequency, w) > g.eta)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    const double mag = uniform_real(rng, g.Aprime, g.A);
    const double phase = uniform01(rng);
    spec.tones.push_back({std::polar(mag, kTwoPi * phase), w});
  }
  return spec;
}

}  // namespace hdsft
