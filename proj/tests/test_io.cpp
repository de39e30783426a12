#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "hdsft/io.hpp"
#include "support.hpp"

using namespace hdsft;

TEST_CASE("spec round trip is exact") {
  GeneratorSettings g;
  g.k = 3;
  g.d = 4;
  const SignalSpec s = generate_spec(g, 9);
  const SignalSpec back = spec_from_json(json::parse(dump(spec_to_json(s))));
  CHECK(back.d == s.d);
  CHECK(back.M == s.M);
  CHECK(back.eta == s.eta);
  CHECK(back.tones == s.tones);
}

TEST_CASE("spec parsing rejects unknown keys, missing keys and invalid specs") {
  const json good = spec_to_json(testsupport::one_tone(2, {1, 0}, {0.1, 0.2}));
  json extra = good;
  extra["colour"] = 1;
  CHECK_THROWS_AS(spec_from_json(extra), IoError);
  json missing = good;
  missing.erase("eta");
  CHECK_THROWS_AS(spec_from_json(missing), IoError);
  json tone_extra = good;
  tone_extra["tones"][0]["phase"] = 0;
  CHECK_THROWS_AS(spec_from_json(tone_extra), IoError);
  json out_of_box = good;
  out_of_box["tones"][0]["w"] = {1.5, 0.0};
  CHECK_THROWS_AS(spec_from_json(out_of_box), IoError);
  json wrong_dim = good;
  wrong_dim["tones"][0]["w"] = {0.1};
  CHECK_THROWS_AS(spec_from_json(wrong_dim), IoError);
  json empty = good;
  empty["tones"] = json::array();
  CHECK_THROWS_AS(spec_from_json(empty), IoError);
  CHECK(spec_from_json(empty, true).k() == 0);
}

TEST_CASE("params round trip") {
  ParamOverrides o;
  o.T = 64;
  o.F = 256;
  o.s = 16;
  const AlgorithmParams p = derive_params({2, 2, 1, 0.5, 1, 0.9}, 0.2, 0.2, o);
  const AlgorithmParams back = params_from_json(json::parse(params_to_json(p).dump()));
  CHECK(back.T == p.T);
  CHECK(back.F == p.F);
  CHECK(back.s == p.s);
  CHECK(back.N == p.N);
  CHECK(back.beta == p.beta);
  CHECK(back.c_N == p.c_N);
}

TEST_CASE("config round trip, layering and validation") {
  RunConfig c;
  c.k = 4;
  c.spec = "x.json";
  c.overrides.N = 100;
  c.overrides.T.reset();
  c.dims = {2, 3};
  c.level = "full";
  CHECK(config_from_json(config_to_json(c)) == c);

  const RunConfig layered = config_from_json(json{{"d", 5}});
  CHECK(layered.d == 5);
  CHECK(layered.k == RunConfig{}.k);
  CHECK(layered.overrides.T == 64.0);

  CHECK_FALSE(config_from_json(json{{"overrides", {{"T", nullptr}}}}).overrides.T.has_value());
  CHECK_THROWS_AS(config_from_json(json{{"kk", 1}}), IoError);
  CHECK_THROWS_AS(config_from_json(json{{"overrides", {{"Q", 1}}}}), IoError);
  CHECK_THROWS_AS(config_from_json(json{{"level", "medium"}}), IoError);
  CHECK_THROWS_AS(config_from_json(json{{"k", "two"}}), IoError);
}

TEST_CASE("result document layout") {
  const SignalSpec s = testsupport::one_tone(2, {1, 0}, {0.3, -0.2}, 1.0, 0.5, 1.0, 0.9);
  const SignalOracle f(s);
  const AlgorithmParams p = derive_params(s.constants(), 0.2, 0.2, RunConfig::desk_overrides());
  RecoveryOptions opt;
  opt.seed = 1;
  const RecoveryResult r = recover_all(f, s.constants(), p, opt);
  const json doc = result_to_json(r, false);
  for (const char* key : {"params", "hash", "recovered", "diagnostics", "wall_time_ms", "total_signal_samples", "seed"})
    CHECK(doc.contains(key));
  CHECK(doc["wall_time_ms"].is_null());
  CHECK(result_to_json(r, true)["wall_time_ms"].is_number());
  CHECK(doc["hash"]["sigma_b"] == -1);
  CHECK(doc["diagnostics"]["buckets"].size() == static_cast<std::size_t>(p.s) * static_cast<std::size_t>(r.passes));
  CHECK(recovered_from_json(doc) == r.recovered);
}

TEST_CASE("file IO errors") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/spec.json"), IoError);
  const auto tmp = std::filesystem::temp_directory_path() / "hdsft_io_bad.json";
  write_text_file(tmp.string(), "{ not json");
  CHECK_THROWS_AS(read_json_file(tmp.string()), IoError);
  std::filesystem::remove(tmp);
}

TEST_CASE("sweep CSV") {
  std::vector<SweepRow> rows(1);
  rows[0].d = 4;
  rows[0].k = 2;
  rows[0].seed = 3;
  rows[0].samples = 1000;
  rows[0].recall = 1;
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str() == std::string(kSweepCsvHeader) + "\n4,2,3,1000,0,1,0,0\n");
}
