#pragma once

// Test-side helpers and brute-force references. Nothing here calls the
// library code it is meant to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hdsft/model.hpp"

namespace testsupport {

using cplx = std::complex<double>;

inline cplx expi(double radians) { return std::polar(1.0, radians); }

inline hdsft::SignalSpec one_tone(std::size_t d, cplx a, std::vector<double> w, double M = 1.0, double eta = 0.5,
                                  double A = 1.0, double Aprime = 0.5) {
  hdsft::SignalSpec s;
  s.d = d;
  s.M = M;
  s.eta = eta;
  s.A = A;
  s.Aprime = Aprime;
  s.tones.push_back({a, std::move(w)});
  return s;
}

inline hdsft::AlgorithmParams grid(double T, double F, std::int64_t s, std::int64_t N = 1) {
  hdsft::AlgorithmParams p;
  p.T = T;
  p.F = F;
  p.s = s;
  p.N = N;
  p.beta = 1.0;
  return p;
}

/// (1/TF) sum over the bucket's integer indices n of exp(2 pi i y n / TF), summed term by term.
inline cplx v2_geometric(std::int64_t y, std::int64_t j, std::int64_t tf, std::int64_t s) {
  const std::int64_t width = tf / s;
  const std::int64_t lo = width * (j - 1) - tf / 2;
  cplx acc{};
  for (std::int64_t n = lo; n < lo + width; ++n)
    acc += expi(2.0 * std::numbers::pi * static_cast<double>(y) * static_cast<double>(n) / static_cast<double>(tf));
  return acc / static_cast<double>(tf);
}

/// Definitional d = 2 DFT on the centered lattice, forward normalization (sqrt(T) F)^{-2}.
inline std::vector<cplx> naive_dft2(const std::vector<cplx>& g, std::int64_t tf, double T, double F) {
  std::vector<cplx> out(g.size());
  const double scale = 1.0 / std::pow(std::sqrt(T) * F, 2);
  for (std::int64_t a0 = 0; a0 < tf; ++a0)
    for (std::int64_t a1 = 0; a1 < tf; ++a1) {
      cplx acc{};
      for (std::int64_t b0 = 0; b0 < tf; ++b0)
        for (std::int64_t b1 = 0; b1 < tf; ++b1) {
          const double x0 = static_cast<double>(b0 - tf / 2) / F, x1 = static_cast<double>(b1 - tf / 2) / F;
          const double xi0 = static_cast<double>(a0 - tf / 2) / T, xi1 = static_cast<double>(a1 - tf / 2) / T;
          acc += g[static_cast<std::size_t>(b0 * tf + b1)] * expi(-2.0 * std::numbers::pi * (x0 * xi0 + x1 * xi1));
        }
      out[static_cast<std::size_t>(a0 * tf + a1)] = acc * scale;
    }
  return out;
}

}  // namespace testsupport
