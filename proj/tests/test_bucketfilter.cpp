#include <catch_amalgamated.hpp>

#include <cmath>

#include "hdsft/bucketfilter.hpp"
#include "hdsft/dense.hpp"
#include "hdsft/generator.hpp"
#include "support.hpp"

using namespace hdsft;
using testsupport::cplx;

namespace {

SignalSpec two_tones(std::uint64_t seed, std::size_t d = 2) {
  GeneratorSettings g;
  g.k = 2;
  g.d = d;
  g.Aprime = 0.5;
  return generate_spec(g, seed);
}

std::vector<double> random_point(Rng& rng, std::size_t d, double T) {
  std::vector<double> x(d);
  for (auto& v : x) v = uniform_real(rng, -T / 2, T / 2);
  return x;
}

}  // namespace

TEST_CASE("fH_eval: b = 0 is f(h* x); origin gives the amplitude sum") {
  const SignalSpec s = two_tones(1);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  const HashDraw h{{3, 5}, 0};
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng, 2, 8);
    CHECK(fH_eval(f, h, p, x) == eval_signal(s, apply_h_star(h, x)));
  }
  const HashDraw hb{{3, 5}, 7};
  const std::vector<double> zero{0, 0};
  CHECK(std::abs(fH_eval(f, hb, p, zero) - (s.tones[0].amplitude + s.tones[1].amplitude)) < 1e-15);
}

TEST_CASE("fH_eval on the lattice is the modulated, sheared signal") {
  const SignalSpec s = two_tones(3);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  const HashDraw h{{3, 1}, 5};
  for (std::int64_t a = -32; a < 32; a += 7)
    for (std::int64_t b = -32; b < 32; b += 5) {
      const std::vector<double> x{a / 8.0, b / 8.0};
      const cplx expect =
          eval_signal(s, apply_h_star(h, x)) * testsupport::expi(-2.0 * std::numbers::pi * x[1] * 5.0 / 8.0);
      CHECK(std::abs(fH_eval(f, h, p, x) - expect) < 1e-12);
    }
}

TEST_CASE("v2: y = 0 gives 1/s") {
  const AlgorithmParams p = testsupport::grid(8, 4, 4);
  for (std::int64_t j = 1; j <= 4; ++j) CHECK(v2_weight(0, BucketIndex{j}, p) == cplx(0.25, 0.0));
}

TEST_CASE("v2 closed form matches the geometric sum for every y and j") {
  for (std::int64_t tf : {16, 32, 64, 256})
    for (std::int64_t s : {2, 4, 8}) {
      const AlgorithmParams p = testsupport::grid(static_cast<double>(tf) / 4.0, 4.0, s);
      double err = 0.0;
      for (std::int64_t j = 1; j <= s; ++j)
        for (std::int64_t y = -tf / 2; y < tf / 2; ++y)
          err = std::max(err, std::abs(v2_weight(y, BucketIndex{j}, p) - testsupport::v2_geometric(y, j, tf, s)));
      INFO("TF=" << tf << " s=" << s);
      CHECK(err <= 1e-12);
    }
}

TEST_CASE("v2 summed over buckets is the full geometric sum") {
  const AlgorithmParams p = testsupport::grid(16, 4, 8);
  for (std::int64_t y = -32; y < 32; ++y) {
    cplx sum{};
    for (std::int64_t j = 1; j <= 8; ++j) sum += v2_weight(y, BucketIndex{j}, p);
    CHECK(std::abs(sum - cplx(y == 0 ? 1.0 : 0.0, 0.0)) < 1e-14);
  }
}

TEST_CASE("v2 rejects out-of-range arguments") {
  const AlgorithmParams p = testsupport::grid(4, 4, 4);
  CHECK_THROWS_AS(v2_weight(8, BucketIndex{1}, p), std::invalid_argument);
  CHECK_THROWS_AS(v2_weight(0, BucketIndex{5}, p), std::invalid_argument);
}

TEST_CASE("FilterWeightTable caches the closed form") {
  const AlgorithmParams p = testsupport::grid(16, 8, 4);
  const FilterWeightTable t(BucketIndex{3}, p);
  for (std::int64_t y = -64; y < 64; ++y) CHECK(std::abs(t(y) - v2_weight(y, BucketIndex{3}, p)) <= 1e-14);
}

TEST_CASE("z_of_t examples") {
  const AlgorithmParams p = testsupport::grid(4, 4, 2);  // TF = 16
  CHECK(z_of_t(0.0, p) == 0);
  CHECK(z_of_t(-0.25, p) == -2);
  CHECK(z_of_t(0.25, p) == 2);
  const std::int64_t top = z_of_t(std::nextafter(0.5, 0.0), p);
  CHECK(top >= -8);
  CHECK(top < 8);
  for (double t = -0.4999; t < 0.5; t += 0.001) {
    const std::int64_t z = z_of_t(t, p);
    CHECK(z >= -8);
    CHECK(z < 8);
  }
}

TEST_CASE("importance_weight: value at zero and log-size bound") {
  const AlgorithmParams p = testsupport::grid(8, 8, 4);  // TF = 64
  const double L = std::log(33.0);
  CHECK(std::abs(importance_weight(0.0, BucketIndex{2}, p) - cplx(2.0 * L / 4.0, 0.0)) < 1e-14);
  double sup = 0.0;
  for (double t = -0.4999; t < 0.5; t += 1e-4)
    for (std::int64_t j = 1; j <= 4; ++j) sup = std::max(sup, std::abs(importance_weight(t, BucketIndex{j}, p)));
  // |v(t)| <= C ln(TF): (|z|+1)|v2(z)| stays O(1).
  CHECK(sup <= 4.0 * std::log(64.0));
}

TEST_CASE("importance samples lie in (-1/2, 1/2) and are reproducible") {
  const auto a = draw_importance_samples(9, 5000);
  const auto b = draw_importance_samples(9, 5000);
  CHECK(a.size() == 5000);
  CHECK(a.t_points == b.t_points);
  for (double t : a.t_points) {
    CHECK(t > -0.5);
    CHECK(t < 0.5);
  }
}

TEST_CASE("conv_direct: partition of unity off the lattice") {
  const SignalSpec s = two_tones(5, 3);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  Rng rng(6);
  const HashDraw h = draw_hash(rng, p, s.constants());
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng, 3, 8);
    cplx sum{};
    for (std::int64_t j = 1; j <= 4; ++j) sum += conv_direct(f, x, BucketIndex{j}, h, p);
    CHECK(std::abs(sum - fH_eval(f, h, p, x)) < 1e-10);
  }
}

TEST_CASE("conv_direct (periodic) equals the dense-grid filter on the lattice") {
  const SignalSpec s = two_tones(7);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  Rng rng(8);
  const HashDraw h = draw_hash(rng, p, s.constants());
  const DenseGrid fh = sample_lattice([&](std::span<const double> x) { return fH_eval(f, h, p, x); }, 2, p);
  for (std::int64_t j = 1; j <= 4; ++j) {
    const DenseGrid want = dense_bucket_filter(fh, BucketIndex{j}, p);
    const auto conv = BucketConvolution::direct(h, p, BucketIndex{j}, Boundary::periodic);
    double err = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      const auto idx = want.indices(i);
      const std::vector<double> x{idx[0] / 8.0, idx[1] / 8.0};
      err = std::max(err, std::abs(conv(f, x) - want.values[i]));
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("conv_direct concentrates on the tone's bucket") {
  const SignalSpec s = testsupport::one_tone(2, {0.9, 0.0}, {0.31, -0.42}, 1.0, 0.5, 1.0, 0.5);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(16, 16, 4);
  const HashDraw h{{3, 5}, 1};
  const std::int64_t jstar = bucket_of(frequency_index(hashed_frequency(h, p, s.tones[0].frequency)[1], p), p).j;
  Rng rng(10);
  for (int i = 0; i < 10; ++i) {
    const auto x = random_point(rng, 2, 16);
    CHECK(std::abs(std::abs(conv_direct(f, x, BucketIndex{jstar}, h, p)) - 0.9) < 0.1);
    const std::int64_t far = (jstar + 1) % 4 + 1;  // two buckets away
    CHECK(std::abs(conv_direct(f, x, BucketIndex{far}, h, p)) < 0.1);
  }
}

TEST_CASE("conv_sampled: empty signal gives exactly zero") {
  SignalSpec s = testsupport::one_tone(2, {1, 0}, {0, 0});
  s.tones.clear();
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  const auto set = draw_importance_samples(1, 100);
  const std::vector<double> x{0.3, 0.1};
  CHECK(conv_sampled(f, x, BucketIndex{2}, HashDraw{{1, 1}, 3}, p, set) == cplx(0.0, 0.0));
}

TEST_CASE("conv_sampled is unbiased") {
  const SignalSpec s = two_tones(11);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  Rng rng(12);
  const HashDraw h = draw_hash(rng, p, s.constants());
  const std::vector<double> x{0.7, -1.3};
  const BucketIndex j{2};
  const cplx truth = conv_direct(f, x, j, h, p);
  const int reps = 200;
  cplx mean{};
  std::vector<cplx> vals;
  for (int r = 0; r < reps; ++r) {
    vals.push_back(conv_sampled(f, x, j, h, p, draw_importance_samples(1000 + r, 500)));
    mean += vals.back();
  }
  mean /= static_cast<double>(reps);
  double var = 0.0;
  for (const cplx& v : vals) var += std::norm(v - mean);
  const double sd = std::sqrt(var / (reps - 1));
  CHECK(std::abs(mean - truth) < 3.0 * sd / std::sqrt(static_cast<double>(reps)) + 1e-12);
}

TEST_CASE("conv_sampled converges to conv_direct at large N") {
  const SignalSpec s = two_tones(13);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);  // TF = 64
  Rng rng(14);
  const HashDraw h = draw_hash(rng, p, s.constants());
  const auto set = draw_importance_samples(15, 1'000'000);
  for (std::int64_t j = 1; j <= 4; ++j) {
    const std::vector<double> x{0.25, 2.5};
    CHECK(std::abs(conv_sampled(f, x, BucketIndex{j}, h, p, set) - conv_direct(f, x, BucketIndex{j}, h, p)) < 1e-2);
  }
}

TEST_CASE("conv_sampled RMSE halves when N quadruples") {
  const SignalSpec s = two_tones(16);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  Rng rng(17);
  const HashDraw h = draw_hash(rng, p, s.constants());
  const std::vector<double> x{-0.4, 1.1};
  const BucketIndex j{3};
  const cplx truth = conv_direct(f, x, j, h, p);
  auto rmse = [&](std::int64_t n) {
    double acc = 0.0;
    for (int r = 0; r < 200; ++r) acc += std::norm(conv_sampled(f, x, j, h, p, draw_importance_samples(5000 + r, n)) - truth);
    return std::sqrt(acc / 200.0);
  };
  const double r1 = rmse(250), r4 = rmse(1000);
  CHECK(r4 / r1 > 0.5 / 1.5);
  CHECK(r4 / r1 < 0.5 * 1.5);
}

TEST_CASE("degenerate TF = 2 grid: sampled tracks direct at 1/sqrt(N)") {
  const SignalSpec s = testsupport::one_tone(2, {1, 0}, {0.2, 0.1});
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(2, 1, 1);
  const HashDraw h{{1, 1}, 0};
  const std::vector<double> x{0.1, 0.3};
  for (std::int64_t j = 1; j <= 1; ++j) {
    const cplx truth = conv_direct(f, x, BucketIndex{j}, h, p);
    double e_small = 0.0, e_big = 0.0;
    for (int r = 0; r < 100; ++r) {
      e_small += std::norm(conv_sampled(f, x, BucketIndex{j}, h, p, draw_importance_samples(r, 100)) - truth);
      e_big += std::norm(conv_sampled(f, x, BucketIndex{j}, h, p, draw_importance_samples(r + 999, 1600)) - truth);
    }
    CHECK(std::sqrt(e_big / e_small) < 0.25 * 1.5);
  }
}

TEST_CASE("open boundary sums the shifted off-lattice points without wrapping") {
  const SignalSpec s = two_tones(18);
  const SignalOracle f(s);
  const AlgorithmParams p = testsupport::grid(8, 8, 4);
  const HashDraw h{{3, 7}, 5};
  const std::vector<double> x{0.3, 0.2};
  cplx want{};
  for (std::int64_t z = -32; z < 32; ++z) {
    const std::vector<double> q{x[0], x[1] - static_cast<double>(z) / 8.0};
    want += fH_eval(f, h, p, q) * v2_weight(z, BucketIndex{2}, p);
  }
  CHECK(std::abs(conv_direct(f, x, BucketIndex{2}, h, p, Boundary::open) - want) < 1e-12);
}
