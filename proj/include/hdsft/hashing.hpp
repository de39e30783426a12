#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdsft/model.hpp"
#include "hdsft/rng.hpp"

namespace hdsft {

/// Sign of the translation term in the hashed frequency H(w) = h(w) + sigma_b (0,...,0,b/T).
///
/// f_H(x) = f(h^* x) exp(-2 pi i x_d b / T) puts a tone at w onto h(w) - b/T e_d.
/// The dense-DFT argmax test in test_hashing pins this value.
inline constexpr int kHashSign = -1;

/// The random shear h (odd integers h_1..h_d) and translation b.
struct HashDraw {
  std::vector<std::int64_t> h;
  std::int64_t b = 0;

  std::size_t dims() const noexcept { return h.size(); }
  bool operator==(const HashDraw&) const = default;
};

/// One of the s buckets, 1-based as in the bucket definition.
struct BucketIndex {
  std::int64_t j = 1;
  bool operator==(const BucketIndex&) const = default;
};

namespace detail {
inline void require_dims(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(expected) +
                                ", got " + std::to_string(got));
}
}  // namespace detail

/// h_i uniform on the odd integers of [0, floor(F/eta)], b uniform on [0, TF/s).
inline HashDraw draw_hash(Rng& rng, const AlgorithmParams& p, const ModelConstants& m) {
  const double upper = std::floor(p.F / m.eta);
  if (!(upper >= 1.0)) throw InfeasibleParameters("no odd integer in [0, F/eta]: F/eta = " + std::to_string(p.F / m.eta));
  const auto odd_count = static_cast<std::uint64_t>(std::floor((upper + 1.0) / 2.0));
  HashDraw draw;
  draw.h.resize(m.d);
  for (auto& hi : draw.h) hi = 2 * static_cast<std::int64_t>(uniform_index(rng, odd_count)) + 1;
  draw.b = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(p.bucket_width())));
  return draw;
}

/// h(xi): identity on the first d-1 coordinates, last = sum_i h_i xi_i.
inline std::vector<double> apply_h(const HashDraw& hash, std::span<const double> xi) {
  detail::require_dims(hash.dims(), xi.size(), "apply_h");
  std::vector<double> out(xi.begin(), xi.end());
  double last = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) last += static_cast<double>(hash.h[i]) * xi[i];
  out.back() = last;
  return out;
}

/// h^{-1}(y) in closed form.
inline std::vector<double> apply_h_inv(const HashDraw& hash, std::span<const double> y) {
  detail::require_dims(hash.dims(), y.size(), "apply_h_inv");
  std::vector<double> out(y.begin(), y.end());
  const std::size_t d = y.size();
  double acc = y[d - 1];
  for (std::size_t i = 0; i + 1 < d; ++i) acc -= static_cast<double>(hash.h[i]) * y[i];
  out[d - 1] = acc / static_cast<double>(hash.h[d - 1]);
  return out;
}

/// h^* x = (x_1 + h_1 x_d, ..., x_{d-1} + h_{d-1} x_d, h_d x_d).
inline void apply_h_star(const HashDraw& hash, std::span<const double> x, std::span<double> out) {
  const std::size_t d = x.size();
  const double xd = x[d - 1];
  for (std::size_t i = 0; i + 1 < d; ++i) out[i] = x[i] + static_cast<double>(hash.h[i]) * xd;
  out[d - 1] = static_cast<double>(hash.h[d - 1]) * xd;
}

inline std::vector<double> apply_h_star(const HashDraw& hash, std::span<const double> x) {
  detail::require_dims(hash.dims(), x.size(), "apply_h_star");
  std::vector<double> out(x.size());
  apply_h_star(hash, x, out);
  return out;
}

/// (h^{-1})^* x = (x_1 - h_1 x_d / h_d, ..., x_d / h_d).
inline void apply_h_inv_star(const HashDraw& hash, std::span<const double> x, std::span<double> out) {
  const std::size_t d = x.size();
  const double xd = x[d - 1] / static_cast<double>(hash.h[d - 1]);
  for (std::size_t i = 0; i + 1 < d; ++i) out[i] = x[i] - static_cast<double>(hash.h[i]) * xd;
  out[d - 1] = xd;
}

inline std::vector<double> apply_h_inv_star(const HashDraw& hash, std::span<const double> x) {
  detail::require_dims(hash.dims(), x.size(), "apply_h_inv_star");
  std::vector<double> out(x.size());
  apply_h_inv_star(hash, x, out);
  return out;
}

/// H(w) folded coordinate-wise into [-F/2, F/2).
inline std::vector<double> hashed_frequency(const HashDraw& hash, const AlgorithmParams& p,
                                            std::span<const double> w) {
  std::vector<double> out = apply_h(hash, w);
  out.back() += kHashSign * static_cast<double>(hash.b) / p.T;
  for (double& v : out) v = fold(v, p.F);
  return out;
}

/// Bucket containing the integer frequency index xi_d in [-TF/2, TF/2).
inline BucketIndex bucket_of(std::int64_t xi_d, const AlgorithmParams& p) {
  const std::int64_t tf = p.grid_size();
  if (xi_d < -tf / 2 || xi_d >= tf / 2)
    throw std::invalid_argument("bucket_of: index " + std::to_string(xi_d) + " outside [-TF/2, TF/2)");
  return {(xi_d + tf / 2) / p.bucket_width() + 1};
}

/// Nearest frequency-lattice index (units of 1/T) of a real last coordinate.
inline std::int64_t frequency_index(double v, const AlgorithmParams& p) {
  const auto raw = static_cast<std::int64_t>(std::floor(v * p.T + 0.5));
  return fold_index(raw, p.grid_size());
}

/// min over tone pairs of |fold_F((h(w_i - w_j))_d)|; +inf for k < 2.
inline double min_last_coord_gap(const HashDraw& hash, const SignalSpec& spec, const AlgorithmParams& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.k(); ++i) {
    for (std::size_t j = i + 1; j < spec.k(); ++j) {
      double last = 0.0;
      for (std::size_t c = 0; c < spec.d; ++c)
        last += static_cast<double>(hash.h[c]) * (spec.tones[i].frequency[c] - spec.tones[j].frequency[c]);
      best = std::min(best, std::abs(fold(last, p.F)));
    }
  }
  return best;
}

}  // namespace hdsft
