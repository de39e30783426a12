#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdsft/generator.hpp"
#include "hdsft/hashing.hpp"
#include "hdsft/model.hpp"
#include "hdsft/oracle_eval.hpp"
#include "hdsft/pipeline.hpp"

namespace hdsft {

using json = nlohmann::json;

/// Raised for unreadable, unwritable or malformed documents.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw IoError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key())) throw IoError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
T get_required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw IoError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <class T>
void get_optional(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  get_optional(j, key, v, where);
  out = v;
}

}  // namespace detail

// ---- signal spec ----

inline json tone_to_json(const Tone& t) {
  return {{"re", t.amplitude.real()}, {"im", t.amplitude.imag()}, {"w", t.frequency}};
}

inline Tone tone_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"re", "im", "w"}, "tone");
  Tone t;
  t.amplitude = {detail::get_required<double>(j, "re", "tone"), detail::get_required<double>(j, "im", "tone")};
  t.frequency = detail::get_required<std::vector<double>>(j, "w", "tone");
  return t;
}

inline json spec_to_json(const SignalSpec& s) {
  json tones = json::array();
  for (const Tone& t : s.tones) tones.push_back(tone_to_json(t));
  return {{"d", s.d}, {"M", s.M}, {"eta", s.eta}, {"A", s.A}, {"Aprime", s.Aprime}, {"tones", tones}};
}

/// Parses and validates. allow_empty admits k = 0 (only useful in tests).
inline SignalSpec spec_from_json(const json& j, bool allow_empty = false) {
  const std::string where = "signal spec";
  detail::reject_unknown_keys(j, {"d", "M", "eta", "A", "Aprime", "tones"}, where);
  SignalSpec s;
  s.d = detail::get_required<std::size_t>(j, "d", where);
  s.M = detail::get_required<double>(j, "M", where);
  s.eta = detail::get_required<double>(j, "eta", where);
  s.A = detail::get_required<double>(j, "A", where);
  s.Aprime = detail::get_required<double>(j, "Aprime", where);
  const json tones = detail::get_required<json>(j, "tones", where);
  if (!tones.is_array()) throw IoError(where + ": 'tones' must be a list");
  for (const json& t : tones) s.tones.push_back(tone_from_json(t));
  try {
    validate(s, allow_empty);
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  return s;
}

// ---- params, hash, result ----

inline json params_to_json(const AlgorithmParams& p) {
  return {{"T", p.T},         {"F", p.F},         {"s", p.s},     {"beta", p.beta}, {"N", p.N},
          {"epsilon", p.epsilon}, {"delta", p.delta}, {"c_s", p.c_s}, {"c_T", p.c_T},   {"c_F", p.c_F},
          {"c_N", p.c_N},     {"c_a", p.c_a},     {"c_R", p.c_R}};
}

inline AlgorithmParams params_from_json(const json& j) {
  const std::string where = "params";
  detail::reject_unknown_keys(j, {"T", "F", "s", "beta", "N", "epsilon", "delta", "c_s", "c_T", "c_F", "c_N", "c_a", "c_R"},
                              where);
  AlgorithmParams p;
  p.T = detail::get_required<double>(j, "T", where);
  p.F = detail::get_required<double>(j, "F", where);
  p.s = detail::get_required<std::int64_t>(j, "s", where);
  p.beta = detail::get_required<double>(j, "beta", where);
  p.N = detail::get_required<std::int64_t>(j, "N", where);
  p.epsilon = detail::get_required<double>(j, "epsilon", where);
  p.delta = detail::get_required<double>(j, "delta", where);
  detail::get_optional(j, "c_s", p.c_s, where);
  detail::get_optional(j, "c_T", p.c_T, where);
  detail::get_optional(j, "c_F", p.c_F, where);
  detail::get_optional(j, "c_N", p.c_N, where);
  detail::get_optional(j, "c_a", p.c_a, where);
  detail::get_optional(j, "c_R", p.c_R, where);
  return p;
}

inline json hash_to_json(const HashDraw& h) { return {{"h", h.h}, {"b", h.b}, {"sigma_b", kHashSign}}; }

/// Result document. Wall time is non-deterministic, so it is written only
/// when asked for; otherwise the key holds null and reruns are byte-identical.
inline json result_to_json(const RecoveryResult& r, bool include_timing) {
  json recovered = json::array();
  for (const Tone& t : r.recovered) recovered.push_back(tone_to_json(t));
  json buckets = json::array();
  for (const BucketDiagnostics& b : r.per_bucket) {
    json e = {{"pass", b.pass},
              {"j", b.j},
              {"status", to_string(b.status)},
              {"gate_amplitude", b.gate_amplitude},
              {"g_samples", b.g_samples},
              {"line_seeds", b.line_seeds}};
    if (!b.note.empty()) e["note"] = b.note;
    buckets.push_back(std::move(e));
  }
  json hashes = json::array();
  for (const HashDraw& h : r.hashes) hashes.push_back(hash_to_json(h));
  json doc;
  doc["params"] = params_to_json(r.params);
  doc["hash"] = r.hashes.empty() ? json(nullptr) : hash_to_json(r.hashes.front());
  doc["recovered"] = recovered;
  doc["diagnostics"] = {{"passes", r.passes}, {"pass_hashes", hashes}, {"buckets", buckets}};
  doc["wall_time_ms"] =
      include_timing ? json(std::chrono::duration<double, std::milli>(r.wall_time).count()) : json(nullptr);
  doc["total_signal_samples"] = r.total_signal_samples;
  doc["seed"] = r.seed;
  return doc;
}

/// Recovered tones of a result document.
inline std::vector<Tone> recovered_from_json(const json& doc) {
  std::vector<Tone> out;
  for (const json& t : detail::get_required<json>(doc, "recovered", "result")) out.push_back(tone_from_json(t));
  return out;
}

// ---- run configuration ----

/// Settings shared by every CLI command. Defaults are the desk-scale preset.
struct RunConfig {
  std::optional<std::string> spec;  // path to a signal spec; otherwise generate
  std::size_t k = 2;
  std::size_t d = 2;
  double M = 1.0;
  double eta = 0.5;
  double A = 1.0;
  double Aprime = 0.9;
  double epsilon = 0.2;
  double delta = 0.2;
  std::uint64_t seed = 0;
  ParamOverrides overrides = desk_overrides();
  std::optional<std::string> out;
  std::uint64_t trials = 3;
  std::vector<std::size_t> dims{2, 4, 8, 16};
  int max_passes = 3;
  bool timing = false;
  std::string level = "fast";

  static ParamOverrides desk_overrides() {
    ParamOverrides o;
    o.T = 64.0;
    o.F = 256.0;
    o.s = 16;
    o.c_N = 0.2;
    o.c_R = 0.3;
    return o;
  }

  GeneratorSettings generator() const {
    GeneratorSettings g;
    g.k = k;
    g.d = d;
    g.M = M;
    g.eta = eta;
    g.A = A;
    g.Aprime = Aprime;
    return g;
  }

  bool operator==(const RunConfig&) const = default;
};

inline json overrides_to_json(const ParamOverrides& o) {
  json j = {{"c_s", o.c_s}, {"c_T", o.c_T}, {"c_F", o.c_F}, {"c_N", o.c_N}, {"c_a", o.c_a}, {"c_R", o.c_R}};
  j["T"] = o.T ? json(*o.T) : json(nullptr);
  j["F"] = o.F ? json(*o.F) : json(nullptr);
  j["s"] = o.s ? json(*o.s) : json(nullptr);
  j["N"] = o.N ? json(*o.N) : json(nullptr);
  j["beta"] = o.beta ? json(*o.beta) : json(nullptr);
  return j;
}

/// Keys absent from `j` keep their value in `o`; explicit null clears an override.
inline void overrides_from_json(const json& j, ParamOverrides& o) {
  const std::string where = "config.overrides";
  detail::reject_unknown_keys(j, {"T", "F", "s", "N", "beta", "c_s", "c_T", "c_F", "c_N", "c_a", "c_R"}, where);
  auto opt = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
      field.reset();
      return;
    }
    detail::get_optional(j, key, field, where);
  };
  opt("T", o.T);
  opt("F", o.F);
  opt("s", o.s);
  opt("N", o.N);
  opt("beta", o.beta);
  detail::get_optional(j, "c_s", o.c_s, where);
  detail::get_optional(j, "c_T", o.c_T, where);
  detail::get_optional(j, "c_F", o.c_F, where);
  detail::get_optional(j, "c_N", o.c_N, where);
  detail::get_optional(j, "c_a", o.c_a, where);
  detail::get_optional(j, "c_R", o.c_R, where);
}

inline json config_to_json(const RunConfig& c) {
  json j = {{"k", c.k},
            {"d", c.d},
            {"M", c.M},
            {"eta", c.eta},
            {"A", c.A},
            {"Aprime", c.Aprime},
            {"epsilon", c.epsilon},
            {"delta", c.delta},
            {"seed", c.seed},
            {"overrides", overrides_to_json(c.overrides)},
            {"trials", c.trials},
            {"dims", c.dims},
            {"max_passes", c.max_passes},
            {"timing", c.timing},
            {"level", c.level}};
  j["spec"] = c.spec ? json(*c.spec) : json(nullptr);
  j["out"] = c.out ? json(*c.out) : json(nullptr);
  return j;
}

/// Applies the keys present in `j` on top of `base`. Unknown keys are an error.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
  const std::string where = "config";
  detail::reject_unknown_keys(j,
                              {"spec", "k", "d", "M", "eta", "A", "Aprime", "epsilon", "delta", "seed", "overrides",
                               "out", "trials", "dims", "max_passes", "timing", "level"},
                              where);
  auto opt_string = [&](const char* key, std::optional<std::string>& field) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
      field.reset();
      return;
    }
    detail::get_optional(j, key, field, where);
  };
  opt_string("spec", base.spec);
  opt_string("out", base.out);
  detail::get_optional(j, "k", base.k, where);
  detail::get_optional(j, "d", base.d, where);
  detail::get_optional(j, "M", base.M, where);
  detail::get_optional(j, "eta", base.eta, where);
  detail::get_optional(j, "A", base.A, where);
  detail::get_optional(j, "Aprime", base.Aprime, where);
  detail::get_optional(j, "epsilon", base.epsilon, where);
  detail::get_optional(j, "delta", base.delta, where);
  detail::get_optional(j, "seed", base.seed, where);
  detail::get_optional(j, "trials", base.trials, where);
  detail::get_optional(j, "dims", base.dims, where);
  detail::get_optional(j, "max_passes", base.max_passes, where);
  detail::get_optional(j, "timing", base.timing, where);
  detail::get_optional(j, "level", base.level, where);
  if (j.contains("overrides")) overrides_from_json(j.at("overrides"), base.overrides);
  if (base.level != "fast" && base.level != "full") throw IoError(where + ": level must be 'fast' or 'full'");
  return base;
}

// ---- files ----

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// Canonical text form: two-space indent and a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline SignalSpec read_spec_file(const std::string& path) { return spec_from_json(read_json_file(path)); }

// ---- sweep CSV ----

inline constexpr const char* kSweepCsvHeader = "d,k,seed,samples,wall_time_ms,recall,max_freq_error,failed";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    std::ostringstream line;
    line.precision(17);
    line << r.d << ',' << r.k << ',' << r.seed << ',' << r.samples << ',' << r.wall_time_ms << ',' << r.recall << ','
         << r.max_freq_error << ',' << (r.failed ? 1 : 0);
    os << line.str() << '\n';
  }
}

}  // namespace hdsft
