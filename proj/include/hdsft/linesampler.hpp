#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hdsft/bucketfilter.hpp"
#include "hdsft/hashing.hpp"
#include "hdsft/model.hpp"
#include "hdsft/rng.hpp"

namespace hdsft {

/// A random axis-parallel line through the time lattice: coordinate `axis`
/// varies, the other d-1 coordinates are frozen at integer grid indices.
struct LineContext {
  std::size_t axis = 0;
  std::vector<std::int64_t> frozen;
};

/// Frozen coordinates uniform on Z^{d-1} cap [-TF/2, TF/2)^{d-1}.
inline LineContext draw_line(Rng& rng, std::size_t axis, std::size_t d, const AlgorithmParams& p) {
  if (axis >= d) throw std::invalid_argument("draw_line: axis outside [0, d)");
  const std::int64_t half = p.grid_size() / 2;
  LineContext ctx;
  ctx.axis = axis;
  ctx.frozen.resize(d - 1);
  for (auto& v : ctx.frozen) v = uniform_int(rng, -half, half);
  return ctx;
}

/// Lattice point x_{l,t} (real coordinates) for grid cell `cell` along the line.
inline std::vector<double> line_point(const LineContext& ctx, std::int64_t cell, double F) {
  std::vector<double> y(ctx.frozen.size() + 1);
  for (std::size_t c = 0, f = 0; c < y.size(); ++c)
    y[c] = static_cast<double>(c == ctx.axis ? cell : ctx.frozen[f++]) / F;
  return y;
}

/// exp(2 pi i sum_{m != l} w_m x_m / F): the phase a tone at w picks up from
/// the frozen coordinates of the line.
inline cplx line_phase(const LineContext& ctx, std::span<const double> w, double F) {
  double phase = 0.0;
  for (std::size_t c = 0, f = 0; c < w.size(); ++c) {
    if (c == ctx.axis) continue;
    phase += w[c] * static_cast<double>(ctx.frozen[f++]) / F;
  }
  return cis_cycles(phase);
}

/// g_{j,l}(t): the bucket-filtered signal read back at the dehashed point
/// (h^{-1})^* x_{l,t} and demodulated there,
///
///   g(t) = exp(-sigma_b 2 pi i ((h^{-1})^* y)_d b / T) conv_j((h^{-1})^* y),
///   y = x_{l,t}, y_l = floor(tF)/F.
///
/// For a tone isolated in bucket j this is a theta e^{2 pi i w_l floor(tF)/F}
/// times the filter's in-band gain.
template <class Signal>
class LineSampler {
 public:
  LineSampler(const Signal& f, const BucketConvolution& conv, LineContext ctx)
      : f_(f), conv_(conv), ctx_(std::move(ctx)) {
    if (ctx_.frozen.size() + 1 != conv_.hash().dims()) throw std::invalid_argument("LineSampler: dimension mismatch");
  }

  cplx at_cell(std::int64_t cell) const {
    const AlgorithmParams& p = conv_.params();
    const std::vector<double> y = line_point(ctx_, cell, p.F);
    std::vector<double> x(y.size());
    apply_h_inv_star(conv_.hash(), y, x);
    const cplx demod = cis_cycles(-kHashSign * x.back() * static_cast<double>(conv_.hash().b) / p.T);
    return demod * conv_(f_, x);
  }

  cplx operator()(double t) const { return at_cell(static_cast<std::int64_t>(std::floor(t * conv_.params().F))); }

  const LineContext& context() const noexcept { return ctx_; }

 private:
  const Signal& f_;
  const BucketConvolution& conv_;
  LineContext ctx_;
};

/// One sample of g_{j,l} at time t in [-T/2, T/2).
template <class Signal>
cplx g_sample(const LineContext& ctx, double t, const Signal& f, const BucketConvolution& conv) {
  return LineSampler<Signal>(f, conv, ctx)(t);
}

}  // namespace hdsft
