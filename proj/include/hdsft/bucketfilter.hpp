#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdsft/hashing.hpp"
#include "hdsft/model.hpp"
#include "hdsft/rng.hpp"

namespace hdsft {

/// How the shifted point x - (0,...,0,z/F) is treated when it leaves the
/// time window [-T/2, T/2) in the last coordinate.
enum class Boundary {
  /// Evaluate f_H at the shifted point as is. This is the production path:
  /// f is defined on all of R^d and the dehashed line evaluation needs points
  /// off the lattice.
  open,
  /// Wrap the last coordinate mod T. On the lattice this reproduces the
  /// circular convolution of the dense DFT exactly.
  periodic,
};

/// f_H(x) = f(h^* x) exp(sigma_b 2 pi i x_d b / T), for any real x.
template <class Signal>
cplx fH_eval(const Signal& f, const HashDraw& hash, const AlgorithmParams& p, std::span<const double> x) {
  detail::require_dims(hash.dims(), x.size(), "fH_eval");
  std::vector<double> y(x.size());
  apply_h_star(hash, x, y);
  return f(std::span<const double>(y)) * cis_cycles(kHashSign * x.back() * static_cast<double>(hash.b) / p.T);
}

/// Kernel of the bucket filter along the last coordinate:
///
///   v2(y) = (1/TF) sum_{n in B_j} exp(2 pi i y n / TF)
///         = exp(-pi i y)(exp(2 pi i y(j-1)/s) - exp(2 pi i y j/s)) / (TF (1 - exp(2 pi i y/TF)))
///
/// with v2(0) = 1/s. All phases are reduced with integer arithmetic.
inline cplx v2_weight(std::int64_t y, BucketIndex j, const AlgorithmParams& p) {
  const std::int64_t tf = p.grid_size();
  if (y < -tf / 2 || y >= tf / 2) throw std::invalid_argument("v2_weight: y outside [-TF/2, TF/2)");
  if (j.j < 1 || j.j > p.s) throw std::invalid_argument("v2_weight: bucket index outside [1, s]");
  if (y == 0) return {1.0 / static_cast<double>(p.s), 0.0};
  const std::int64_t ys = ((y % p.s) + p.s) % p.s;
  const double lo = static_cast<double>((ys * (j.j - 1)) % p.s) / static_cast<double>(p.s);
  const double hi = static_cast<double>((ys * j.j) % p.s) / static_cast<double>(p.s);
  const double sign = (y % 2 == 0) ? 1.0 : -1.0;
  const cplx den = static_cast<double>(tf) * (1.0 - cis_cycles(static_cast<double>(y) / static_cast<double>(tf)));
  if (std::abs(den) < 1e-300) throw InternalError("v2_weight: vanishing denominator at y = " + std::to_string(y));
  return sign * (cis_cycles(lo) - cis_cycles(hi)) / den;
}

/// v2 for one bucket, cached over every y in [-TF/2, TF/2).
class FilterWeightTable {
 public:
  FilterWeightTable(BucketIndex j, const AlgorithmParams& p)
      : j_(j), tf_(p.grid_size()), s_(p.s), values_(static_cast<std::size_t>(tf_)) {
    for (std::int64_t y = -tf_ / 2; y < tf_ / 2; ++y) values_[static_cast<std::size_t>(y + tf_ / 2)] = v2_weight(y, j, p);
  }

  cplx operator()(std::int64_t y) const { return values_.at(static_cast<std::size_t>(y + tf_ / 2)); }

  BucketIndex bucket() const noexcept { return j_; }
  std::int64_t grid_size() const noexcept { return tf_; }
  std::int64_t buckets() const noexcept { return s_; }

 private:
  BucketIndex j_;
  std::int64_t tf_;
  std::int64_t s_;
  std::vector<cplx> values_;
};

/// floor(sgn(t) ((TF/2 + 1)^{2|t|} - 1)), with sgn(0) = +1.
///
/// The value TF/2 can only come out of rounding at t -> 1/2; it is wrapped
/// to -TF/2 so the result stays on the half-open grid.
inline std::int64_t z_of_t(double t, const AlgorithmParams& p) {
  const std::int64_t tf = p.grid_size();
  const double base = static_cast<double>(tf) / 2.0 + 1.0;
  const double mag = std::pow(base, 2.0 * std::abs(t)) - 1.0;
  auto z = static_cast<std::int64_t>(std::floor(t >= 0.0 ? mag : -mag));
  if (z >= tf / 2) z = -tf / 2;
  if (z < -tf / 2) z = -tf / 2;
  return z;
}

/// v(t) = 2 ln(TF/2 + 1) (TF/2 + 1)^{2|t|} v2(z(t)).
///
/// The exponent uses |t|: the change of variables on the negative half-line
/// has Jacobian (1 - z), which is (TF/2 + 1)^{2|t|} there.
inline cplx importance_weight(double t, BucketIndex j, const AlgorithmParams& p) {
  const double base = static_cast<double>(p.grid_size()) / 2.0 + 1.0;
  return 2.0 * std::log(base) * std::pow(base, 2.0 * std::abs(t)) * v2_weight(z_of_t(t, p), j, p);
}

/// The shared draw set for the importance-sampled convolution.
struct ImportanceSampleSet {
  std::vector<double> t_points;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return t_points.size(); }
};

/// N independent draws uniform on (-1/2, 1/2).
inline ImportanceSampleSet draw_importance_samples(std::uint64_t seed, std::int64_t N) {
  Rng rng(seed);
  ImportanceSampleSet set;
  set.seed = seed;
  set.t_points.reserve(static_cast<std::size_t>(N));
  while (set.t_points.size() < static_cast<std::size_t>(N)) {
    const double t = uniform01(rng) - 0.5;
    if (t > -0.5) set.t_points.push_back(t);
  }
  return set;
}

/// The bucket-restricted convolution F^{-1}[X_j F[f_H]] evaluated at
/// arbitrary x as a finite sum
///
///   sum_i c_i f_H(x - (0,...,0,z_i/F)).
///
/// direct():  z_i runs over the whole grid with c_i = v2(z_i). Exact; O(TF) per point.
/// sampled(): z_i = z(t_i) for the shared draw set with c_i = v(t_i)/N.
class BucketConvolution {
 public:
  static BucketConvolution direct(const HashDraw& hash, const AlgorithmParams& p, BucketIndex j,
                                  Boundary boundary = Boundary::open) {
    const FilterWeightTable table(j, p);
    BucketConvolution conv(hash, p, j, boundary);
    const std::int64_t tf = p.grid_size();
    conv.z_.reserve(static_cast<std::size_t>(tf));
    conv.coeff_.reserve(static_cast<std::size_t>(tf));
    for (std::int64_t z = -tf / 2; z < tf / 2; ++z) {
      conv.z_.push_back(z);
      conv.coeff_.push_back(table(z));
    }
    conv.finish();
    return conv;
  }

  static BucketConvolution sampled(const HashDraw& hash, const AlgorithmParams& p, BucketIndex j,
                                   const ImportanceSampleSet& samples, Boundary boundary = Boundary::open) {
    BucketConvolution conv(hash, p, j, boundary);
    const double inv_n = samples.size() ? 1.0 / static_cast<double>(samples.size()) : 0.0;
    conv.z_.reserve(samples.size());
    conv.coeff_.reserve(samples.size());
    for (double t : samples.t_points) {
      conv.z_.push_back(z_of_t(t, p));
      conv.coeff_.push_back(importance_weight(t, j, p) * inv_n);
    }
    conv.finish();
    return conv;
  }

  template <class Signal>
  cplx operator()(const Signal& f, std::span<const double> x) const {
    detail::require_dims(hash_.dims(), x.size(), "BucketConvolution");
    return boundary_ == Boundary::open ? eval_open(f, x) : eval_periodic(f, x);
  }

  BucketIndex bucket() const noexcept { return j_; }
  std::size_t terms() const noexcept { return z_.size(); }
  const HashDraw& hash() const noexcept { return hash_; }
  const AlgorithmParams& params() const noexcept { return params_; }

 private:
  BucketConvolution(const HashDraw& hash, const AlgorithmParams& p, BucketIndex j, Boundary boundary)
      : hash_(hash), params_(p), j_(j), boundary_(boundary) {
    if (j.j < 1 || j.j > p.s) throw std::invalid_argument("bucket index outside [1, s]");
  }

  // For the open boundary the translation phase of every term is
  // exp(-sigma_b 2 pi i z b / TF); it is folded into the coefficients.
  void finish() {
    const std::int64_t tf = params_.grid_size();
    open_coeff_.resize(coeff_.size());
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      const auto prod = static_cast<__int128>(z_[i]) * static_cast<__int128>(hash_.b);
      const std::int64_t r = fold_index(static_cast<std::int64_t>(prod % tf), tf);
      open_coeff_[i] = coeff_[i] * cis_cycles(-kHashSign * static_cast<double>(r) / static_cast<double>(tf));
    }
  }

  template <class Signal>
  cplx eval_open(const Signal& f, std::span<const double> x) const {
    const std::size_t d = x.size();
    std::vector<double> y0(d), hstep(d), pt(d);
    apply_h_star(hash_, x, y0);
    // h^*(x - z e_d / F) = h^* x - (z/F) (h_1, ..., h_d)
    for (std::size_t c = 0; c < d; ++c) hstep[c] = static_cast<double>(hash_.h[c]) / params_.F;
    cplx acc{};
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const double z = static_cast<double>(z_[i]);
      for (std::size_t c = 0; c < d; ++c) pt[c] = y0[c] - z * hstep[c];
      acc += cmul(f(std::span<const double>(pt)), open_coeff_[i]);
    }
    return acc * cis_cycles(kHashSign * x.back() * static_cast<double>(hash_.b) / params_.T);
  }

  template <class Signal>
  cplx eval_periodic(const Signal& f, std::span<const double> x) const {
    std::vector<double> q(x.begin(), x.end());
    cplx acc{};
    for (std::size_t i = 0; i < z_.size(); ++i) {
      q.back() = fold(x.back() - static_cast<double>(z_[i]) / params_.F, params_.T);
      acc += fH_eval(f, hash_, params_, q) * coeff_[i];
    }
    return acc;
  }

  HashDraw hash_;
  AlgorithmParams params_;
  BucketIndex j_;
  Boundary boundary_;
  std::vector<std::int64_t> z_;
  std::vector<cplx> coeff_;
  std::vector<cplx> open_coeff_;
};

/// Exact sum over every z in [-TF/2, TF/2). Oracle path.
template <class Signal>
cplx conv_direct(const Signal& f, std::span<const double> x, BucketIndex j, const HashDraw& hash,
                 const AlgorithmParams& p, Boundary boundary = Boundary::open) {
  return BucketConvolution::direct(hash, p, j, boundary)(f, x);
}

/// Importance-sampled estimate (1/N) sum_i f_H(x - z(t_i)/F e_d) v(t_i).
/// Rebuilds the coefficients on every call; hold a BucketConvolution to reuse them.
template <class Signal>
cplx conv_sampled(const Signal& f, std::span<const double> x, BucketIndex j, const HashDraw& hash,
                  const AlgorithmParams& p, const ImportanceSampleSet& samples,
                  Boundary boundary = Boundary::open) {
  if (samples.size() == 0) return {};
  return BucketConvolution::sampled(hash, p, j, samples, boundary)(f, x);
}

}  // namespace hdsft
