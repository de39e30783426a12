#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "hdsft/errors.hpp"
#include "hdsft/hashing.hpp"
#include "hdsft/model.hpp"

namespace hdsft {

/// Largest dense grid ((TF)^d cells) the brute-force oracles accept.
inline constexpr std::uint64_t kDenseGridLimit = std::uint64_t{1} << 22;

/// Values on the full d-dimensional lattice, TF points per axis, row-major
/// with the last coordinate fastest. Axis index i holds lattice index
/// n = i - TF/2. Used for both the time lattice (points n/F) and the
/// frequency lattice (points n/T).
struct DenseGrid {
  std::size_t d = 2;
  std::int64_t tf = 0;
  double T = 0.0;
  double F = 0.0;
  std::vector<cplx> values;

  std::size_t size() const noexcept { return values.size(); }

  /// Lattice indices (each in [-TF/2, TF/2)) of flat position `flat`.
  std::vector<std::int64_t> indices(std::size_t flat) const {
    std::vector<std::int64_t> idx(d);
    for (std::size_t c = d; c-- > 0;) {
      idx[c] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(tf)) - tf / 2;
      flat /= static_cast<std::size_t>(tf);
    }
    return idx;
  }

  std::size_t flat(std::span<const std::int64_t> idx) const {
    std::size_t f = 0;
    for (std::int64_t i : idx) f = f * static_cast<std::size_t>(tf) + static_cast<std::size_t>(i + tf / 2);
    return f;
  }
};

using DenseSpectrum = DenseGrid;

/// Throws GridTooLarge with a size report when (TF)^d exceeds the guard.
inline void check_dense_size(std::size_t d, std::int64_t tf) {
  double cells = 1.0;
  for (std::size_t c = 0; c < d; ++c) cells *= static_cast<double>(tf);
  if (cells > static_cast<double>(kDenseGridLimit))
    throw GridTooLarge("dense grid of (TF)^d = " + std::to_string(tf) + "^" + std::to_string(d) + " = " +
                       std::to_string(cells) + " cells exceeds the limit of " + std::to_string(kDenseGridLimit));
}

/// Samples g on the time lattice Gamma_1.
template <class Fn>
DenseGrid sample_lattice(Fn&& g, std::size_t d, const AlgorithmParams& p) {
  const std::int64_t tf = p.grid_size();
  check_dense_size(d, tf);
  DenseGrid grid{d, tf, p.T, p.F, {}};
  std::size_t total = 1;
  for (std::size_t c = 0; c < d; ++c) total *= static_cast<std::size_t>(tf);
  grid.values.resize(total);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < total; ++i) {
    const auto idx = grid.indices(i);
    for (std::size_t c = 0; c < d; ++c) x[c] = static_cast<double>(idx[c]) / p.F;
    grid.values[i] = g(std::span<const double>(x));
  }
  return grid;
}

namespace detail {

/// Centered transform over all axes:
/// out[m] = scale^d sum_{n in [-N/2, N/2)^d} in[n] exp(sign 2 pi i n.m / N), m in [-N/2, N/2)^d.
/// With i = n + N/2 and j = m + N/2 the kernel per axis is
/// (-1)^{i + j + N/2} exp(sign 2 pi i ij/N), so the uncentered FFT is
/// wrapped in two checkerboard sign flips.
inline void centered_transform(DenseGrid& g, int sign, double scale_per_axis) {
  const auto n = static_cast<std::size_t>(g.tf);
  auto parity = [&](std::size_t flat) {
    std::size_t sum = 0;
    for (std::size_t c = 0; c < g.d; ++c, flat /= n) sum += flat % n;
    return sum % 2 == 0 ? 1.0 : -1.0;
  };
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] *= parity(i);

  std::vector<int> dims(g.d, static_cast<int>(g.tf));
  auto* data = reinterpret_cast<fftw_complex*>(g.values.data());
  fftw_plan plan = fftw_plan_dft(static_cast<int>(g.d), dims.data(), data, data,
                                 sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plan == nullptr) throw InternalError("fftw_plan_dft failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const double half_sign = (g.tf / 2) % 2 == 0 ? 1.0 : -1.0;
  const double scale = std::pow(half_sign * scale_per_axis, static_cast<double>(g.d));
  for (std::size_t j = 0; j < g.size(); ++j) g.values[j] *= parity(j) * scale;
}

}  // namespace detail

/// F[g](xi) = (sqrt(T) F)^{-d} sum_{x in Gamma_1} g(x) exp(-2 pi i x.xi), xi in Gamma_2.
inline DenseSpectrum dense_dft(DenseGrid samples) {
  check_dense_size(samples.d, samples.tf);
  detail::centered_transform(samples, -1, 1.0 / (std::sqrt(samples.T) * samples.F));
  return samples;
}

/// F^{-1}[G](x) = (sqrt(T))^{-d} sum_{xi in Gamma_2} G(xi) exp(2 pi i x.xi), x in Gamma_1.
inline DenseGrid dense_idft(DenseSpectrum spectrum) {
  check_dense_size(spectrum.d, spectrum.tf);
  detail::centered_transform(spectrum, +1, 1.0 / std::sqrt(spectrum.T));
  return spectrum;
}

/// F^{-1}[X_j F[g]] on the lattice: zero every frequency cell whose last
/// index lies outside bucket j.
inline DenseGrid dense_bucket_filter(const DenseGrid& samples, BucketIndex j, const AlgorithmParams& p) {
  DenseSpectrum spec = dense_dft(samples);
  const auto n = static_cast<std::size_t>(spec.tf);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto last = static_cast<std::int64_t>(i % n) - spec.tf / 2;
    if (bucket_of(last, p).j != j.j) spec.values[i] = {};
  }
  return dense_idft(std::move(spec));
}

/// Index of the largest-magnitude cell.
inline std::size_t argmax_abs(const DenseGrid& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::norm(g.values[i]) > std::norm(g.values[best])) best = i;
  return best;
}

}  // namespace hdsft
