// hdsft: gen | run | verify | sweep
//
// Exit status: 0 ok, 1 a check or assertion failed, 2 usage / IO / infeasible input.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdsft/hdsft.hpp"

namespace {

using namespace hdsft;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

// Flags shared by every subcommand. Unset optionals leave the config value alone.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct ModelFlags {
  std::optional<std::string> spec;
  std::optional<std::size_t> k, d;
  std::optional<double> M, eta, A, Aprime, epsilon, delta;
  std::optional<double> T, F, beta;
  std::optional<std::int64_t> s, N;
  std::optional<double> c_N, c_R, c_a;
  std::optional<int> max_passes;
  bool timing = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file (flags override its keys)");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output path (default: stdout)");
}

void add_model(CLI::App* app, ModelFlags& f, bool with_spec) {
  if (with_spec) app->add_option("--spec", f.spec, "signal spec JSON (otherwise one is generated)");
  app->add_option("-k,--k", f.k, "number of tones");
  app->add_option("-d,--d", f.d, "dimension");
  app->add_option("--M", f.M, "frequency bound");
  app->add_option("--eta", f.eta, "minimum frequency gap");
  app->add_option("--A", f.A, "largest amplitude");
  app->add_option("--Aprime", f.Aprime, "smallest amplitude");
  app->add_option("--epsilon", f.epsilon);
  app->add_option("--delta", f.delta);
  app->add_option("--T", f.T, "override T");
  app->add_option("--F", f.F, "override F");
  app->add_option("--s", f.s, "override s");
  app->add_option("--N", f.N, "override N");
  app->add_option("--beta", f.beta, "override beta");
  app->add_option("--c-N", f.c_N, "importance-sample multiplier");
  app->add_option("--c-R", f.c_R, "per-stage estimator multiplier");
  app->add_option("--c-a", f.c_a, "amplitude-integral multiplier");
  app->add_option("--max-passes", f.max_passes, "independent restarts pooled until k tones are found");
  app->add_flag("--timing", f.timing, "record wall time in the result document");
}

// defaults < config file < flags
RunConfig resolve(const CommonFlags& c, const ModelFlags& m) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = config_from_json(read_json_file(c.config), cfg);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out = *c.out;
  if (m.spec) cfg.spec = *m.spec;
  if (m.k) cfg.k = *m.k;
  if (m.d) cfg.d = *m.d;
  if (m.M) cfg.M = *m.M;
  if (m.eta) cfg.eta = *m.eta;
  if (m.A) cfg.A = *m.A;
  if (m.Aprime) cfg.Aprime = *m.Aprime;
  if (m.epsilon) cfg.epsilon = *m.epsilon;
  if (m.delta) cfg.delta = *m.delta;
  if (m.T) cfg.overrides.T = *m.T;
  if (m.F) cfg.overrides.F = *m.F;
  if (m.s) cfg.overrides.s = *m.s;
  if (m.N) cfg.overrides.N = *m.N;
  if (m.beta) cfg.overrides.beta = *m.beta;
  if (m.c_N) cfg.overrides.c_N = *m.c_N;
  if (m.c_R) cfg.overrides.c_R = *m.c_R;
  if (m.c_a) cfg.overrides.c_a = *m.c_a;
  if (m.max_passes) cfg.max_passes = *m.max_passes;
  if (m.timing) cfg.timing = true;
  return cfg;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out)
    write_text_file(*cfg.out, text);
  else
    std::cout << text << std::flush;
}

// Summary goes to stdout when the document goes to a file, else to stderr.
std::ostream& summary_stream(const RunConfig& cfg) { return cfg.out ? std::cout : std::cerr; }

int cmd_gen(const RunConfig& cfg) {
  const SignalSpec spec = generate_spec(cfg.generator(), cfg.seed);
  emit(cfg, dump(spec_to_json(spec)));
  return kOk;
}

int cmd_run(const RunConfig& cfg) {
  const SignalSpec spec = cfg.spec ? read_spec_file(*cfg.spec) : generate_spec(cfg.generator(), cfg.seed);
  const AlgorithmParams p = derive_params(spec.constants(), cfg.epsilon, cfg.delta, cfg.overrides);
  SignalOracle f(spec);
  RecoveryOptions opt;
  opt.seed = cfg.seed;
  opt.max_passes = cfg.max_passes;
  const RecoveryResult res = recover_all(f, spec.constants(), p, opt);
  emit(cfg, dump(result_to_json(res, cfg.timing)));

  const MatchReport rep = match_score(spec, res.recovered, spec.eta / 4.0);
  std::ostream& os = summary_stream(cfg);
  os << "recovered " << res.recovered.size() << " of k=" << spec.k() << " tones, recall " << rep.recall
     << ", max |w_o - w| " << rep.max_freq_error << ", max |a_o - a| " << rep.max_amp_error << "\n"
     << "signal samples " << res.total_signal_samples << ", passes " << res.passes << ", wall time "
     << std::chrono::duration<double, std::milli>(res.wall_time).count() << " ms\n";
  return kOk;
}

int cmd_verify(const RunConfig& cfg, bool inject_fault, std::optional<std::int64_t> dense_tf) {
  VerifyOptions opt;
  opt.level = cfg.level == "full" ? VerifyLevel::full : VerifyLevel::fast;
  opt.seed = cfg.seed;
  opt.inject_v2_sign_fault = inject_fault;
  opt.dense_tf = dense_tf;
  const std::vector<CheckResult> checks = run_verify(opt);

  std::ostringstream report;
  for (const CheckResult& c : checks) {
    char line[512];
    std::snprintf(line, sizeof line, "%s  %-72s measured %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.measured, c.relation.c_str(), c.threshold);
    report << line;
  }
  const bool ok = all_pass(checks);
  report << (ok ? "all checks passed" : "verification FAILED") << "\n";
  emit(cfg, report.str());
  return ok ? kOk : kCheckFailed;
}

int cmd_sweep(const RunConfig& cfg, bool assert_poly) {
  SweepConfig sc;
  sc.dims = cfg.dims;
  sc.seeds.clear();
  for (std::uint64_t t = 0; t < cfg.trials; ++t) sc.seeds.push_back(cfg.seed + t);
  sc.generator = cfg.generator();
  sc.epsilon = cfg.epsilon;
  sc.delta = cfg.delta;
  sc.overrides = cfg.overrides;
  sc.max_passes = cfg.max_passes;
  const std::vector<SweepRow> rows = sweep(sc);

  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  emit(cfg, csv.str());

  if (sc.dims.size() >= 2) {
    std::vector<double> x(sc.dims.begin(), sc.dims.end());
    const std::vector<double> y =
        per_dim_median(rows, sc.dims, [](const SweepRow& r) { return static_cast<double>(r.samples); });
    const double slope = fit_loglog_slope(x, y);
    summary_stream(cfg) << "log-log slope of samples vs d: " << slope << "\n";
    if (assert_poly && !(slope <= 6.0)) {
      std::cerr << "assert-poly: slope " << slope << " exceeds 6\n";
      return kCheckFailed;
    }
  } else if (assert_poly) {
    std::cerr << "assert-poly needs at least two dimensions\n";
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Fourier transform for k off-grid frequencies in [-M, M]^d"};
  app.require_subcommand(1);

  CommonFlags gen_c, run_c, ver_c, sw_c;
  ModelFlags gen_m, run_m, sw_m;

  CLI::App* gen = app.add_subcommand("gen", "generate a random signal spec");
  add_common(gen, gen_c);
  add_model(gen, gen_m, false);

  CLI::App* run = app.add_subcommand("run", "recover the tones of a spec");
  add_common(run, run_c);
  add_model(run, run_m, true);

  CLI::App* ver = app.add_subcommand("verify", "run the oracle and invariant checks");
  add_common(ver, ver_c);
  std::optional<std::string> level;
  bool inject_fault = false;
  std::optional<std::int64_t> dense_tf;
  ver->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  ver->add_flag("--inject-v2-fault", inject_fault, "test hook: corrupt the v2 sign")->group("");
  ver->add_option("--dense-tf", dense_tf, "grid points per axis for the dense cross-checks");

  CLI::App* sw = app.add_subcommand("sweep", "scaling sweep over d, CSV output");
  add_common(sw, sw_c);
  add_model(sw, sw_m, false);
  std::optional<std::string> dims;
  std::optional<std::uint64_t> trials;
  bool assert_poly = false;
  sw->add_option("--dims", dims, "comma-separated list of d values");
  sw->add_option("--trials", trials, "seeds per dimension (seed, seed+1, ...)");
  sw->add_flag("--assert-poly", assert_poly, "exit 1 if the fitted log-log slope exceeds 6");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(resolve(gen_c, gen_m));
    if (*run) return cmd_run(resolve(run_c, run_m));
    if (*ver) {
      RunConfig cfg = resolve(ver_c, ModelFlags{});
      if (level) cfg.level = *level;
      return cmd_verify(cfg, inject_fault, dense_tf);
    }
    if (*sw) {
      RunConfig cfg = resolve(sw_c, sw_m);
      if (trials) cfg.trials = *trials;
      if (dims) {
        cfg.dims.clear();
        std::stringstream ss(*dims);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item.empty()) continue;
          std::size_t pos = 0;
          const unsigned long v = std::stoul(item, &pos);
          if (pos != item.size()) throw std::invalid_argument("--dims: bad entry '" + item + "'");
          cfg.dims.push_back(v);
        }
        if (cfg.dims.empty()) throw std::invalid_argument("--dims: empty list");
      }
      return cmd_sweep(cfg, assert_poly);
    }
  } catch (const GridTooLarge& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleParameters& e) {
    std::cerr << "infeasible parameters: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleInstance& e) {
    std::cerr << "infeasible instance: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
