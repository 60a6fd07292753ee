// Command-line front end. Talks to the library exclusively through the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mucogarch.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

[[noreturn]] void die(int status) {
  std::cerr << "error (" << mcg_status_name(status) << "): " << mcg_last_error() << "\n";
  std::exit(kExitFatal);
}

void check_ok(int status) {
  if (status != MCG_OK) die(status);
}

// Takes ownership of an API string and returns it as std::string.
std::string take_string(char* s) {
  std::string out = s ? s : "";
  mcg_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(kExitFatal);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(kExitFatal);
  }
  out << text;
}

struct ModelHandle {
  mcg_model* m = nullptr;
  ~ModelHandle() { mcg_model_free(m); }
};

struct SampleHandle {
  mcg_sample* s = nullptr;
  ~SampleHandle() { mcg_sample_free(s); }
};

// Splits "truncated:12" into kind and truncation lag.
void parse_weight(const std::string& spec, std::string& kind, int& cov_M) {
  const auto colon = spec.find(':');
  kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
  if (colon != std::string::npos) {
    try {
      cov_M = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
      std::cerr << "error: bad truncation lag in --weight " << spec << "\n";
      std::exit(kExitFatal);
    }
  }
  if (kind != "identity" && kind != "basic" && kind != "truncated" && kind != "diag") {
    std::cerr << "error: unknown weight kind " << kind << "\n";
    std::exit(kExitFatal);
  }
  if (kind == "truncated" && cov_M < 1) {
    std::cerr << "error: --weight truncated needs a positive lag, e.g. truncated:20\n";
    std::exit(kExitFatal);
  }
}

int cmd_simulate(const std::string& params_path, long long n, const std::string& out_csv,
                 const std::string& vol_csv, int substeps, double burn_in,
                 unsigned long long seed, unsigned long long replicate) {
  ModelHandle model;
  check_ok(mcg_model_from_file(params_path.c_str(), &model.m));
  SampleHandle sample;
  check_ok(mcg_simulate(model.m, n, substeps, burn_in, seed, replicate, !vol_csv.empty(),
                        &sample.s));
  check_ok(mcg_sample_write_csv(sample.s, out_csv.c_str()));
  if (!vol_csv.empty()) check_ok(mcg_sample_write_vol_csv(sample.s, vol_csv.c_str()));
  std::cerr << "wrote " << n << " returns to " << out_csv << "\n";
  return kExitOk;
}

int cmd_moments(const std::string& params_path, int r, const std::string& out_path) {
  ModelHandle model;
  check_ok(mcg_model_from_file(params_path.c_str(), &model.m));
  char* json = nullptr;
  check_ok(mcg_model_moments(model.m, r, &json));
  write_output(take_string(json), out_path);
  return kExitOk;
}

int cmd_stats(const std::string& returns_path, int r, double delta, double scale,
              bool divisor_n_minus_r, const std::string& out_path) {
  SampleHandle sample;
  check_ok(mcg_sample_from_csv(returns_path.c_str(), delta, &sample.s));
  if (scale != 1.0) check_ok(mcg_sample_scale(sample.s, scale));
  char* json = nullptr;
  check_ok(mcg_sample_moments(sample.s, r, divisor_n_minus_r ? 1 : 0, &json));
  write_output(take_string(json), out_path);
  return kExitOk;
}

int cmd_check(const std::string& params_path, long long mc_samples, unsigned long long seed,
              const std::string& out_path, bool quiet) {
  ModelHandle model;
  check_ok(mcg_model_from_file(params_path.c_str(), &model.m));
  char* json = nullptr;
  check_ok(mcg_check(model.m, mc_samples, seed, &json));
  const std::string text = take_string(json);
  if (!out_path.empty()) write_output(text, out_path);

  const Json rep = Json::parse(text);
  if (!quiet) {
    std::printf("%-12s %-14s %14s  %s\n", "condition", "status", "value", "detail");
    for (const auto& e : rep.at("entries")) {
      const std::string id = e.at("id").get<std::string>();
      const std::string status = e.at("status").get<std::string>();
      const double value = e.at("value").get<double>();
      const std::string detail = e.at("detail").get<std::string>();
      std::printf("%-12s %-14s %14.6g  %s\n", id.c_str(), status.c_str(), value, detail.c_str());
    }
  }
  const bool all_pass = rep.at("all_pass").get<bool>();
  std::printf("all_pass: %s\n", all_pass ? "true" : "false");
  return all_pass ? kExitOk : kExitPartial;
}

int cmd_recover(const std::string& moments_path, const std::string& returns_path, int r,
                double delta, const std::string& noise_path, const std::string& out_path) {
  ModelHandle noise;
  check_ok(mcg_model_from_file(noise_path.c_str(), &noise.m));
  std::string moments_json;
  if (!moments_path.empty()) {
    moments_json = read_file(moments_path);
  } else {
    SampleHandle sample;
    check_ok(mcg_sample_from_csv(returns_path.c_str(), delta, &sample.s));
    char* json = nullptr;
    check_ok(mcg_sample_moments(sample.s, r, 0, &json));
    moments_json = take_string(json);
  }
  char* json = nullptr;
  check_ok(mcg_recover(noise.m, moments_json.c_str(), &json));
  const std::string text = take_string(json);
  write_output(text, out_path);
  const Json res = Json::parse(text);
  return res.at("ok").get<bool>() ? kExitOk : kExitPartial;
}

int cmd_estimate(const std::string& returns_path, int r, double delta, double scale,
                 const std::string& weight_spec, const std::string& init_spec, bool two_step,
                 const std::string& noise_path, double box_frac, int max_evals, bool no_report,
                 const std::string& out_path) {
  std::string weight_kind = "identity";
  int cov_M = 0;
  parse_weight(weight_spec, weight_kind, cov_M);

  std::string init_policy;
  std::string init_file;
  if (init_spec == "moment") {
    init_policy = "moment";
  } else if (init_spec.rfind("json:", 0) == 0) {
    init_policy = "model";
    init_file = init_spec.substr(5);
  } else {
    std::cerr << "error: --init must be 'moment' or 'json:<params-file>'\n";
    return kExitFatal;
  }
  const std::string model_path = !init_file.empty() ? init_file : noise_path;
  if (model_path.empty()) {
    std::cerr << "error: --init moment needs --noise <params-json> for the driving noise\n";
    return kExitFatal;
  }

  ModelHandle noise;
  check_ok(mcg_model_from_file(model_path.c_str(), &noise.m));
  SampleHandle sample;
  check_ok(mcg_sample_from_csv(returns_path.c_str(), delta, &sample.s));
  if (scale != 1.0) check_ok(mcg_sample_scale(sample.s, scale));

  Json opts;
  opts["r"] = r;
  opts["weight"] = weight_kind;
  opts["cov_M"] = cov_M;
  opts["two_step"] = two_step;
  opts["init"] = init_policy;
  opts["box_frac"] = box_frac;
  if (max_evals > 0) opts["max_evals"] = max_evals;
  opts["attach_report"] = !no_report;

  char* json = nullptr;
  check_ok(mcg_estimate(sample.s, noise.m, opts.dump().c_str(), &json));
  const std::string text = take_string(json);
  write_output(text, out_path);
  const Json res = Json::parse(text);
  const bool converged = res.at("converged").get<bool>();
  if (!converged) std::cerr << "warning: optimizer did not converge\n";
  return converged ? kExitOk : kExitPartial;
}

int cmd_study(const std::string& config_path, const std::string& output_dir, int threads,
              int replicates, long long seed, const std::string& out_path) {
  Json cfg;
  try {
    cfg = Json::parse(read_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: study config: " << e.what() << "\n";
    return kExitFatal;
  }
  if (replicates > 0) cfg["replicates"] = replicates;
  if (seed >= 0) cfg["seed"] = seed;

  char* json = nullptr;
  check_ok(mcg_study(cfg.dump().c_str(), output_dir.c_str(), threads, &json));
  const std::string text = take_string(json);
  if (!out_path.empty()) write_output(text, out_path);

  const Json summary = Json::parse(text);
  bool partial = false;
  for (const auto& cell : summary.at("cells")) {
    const int n = cell.at("n").get<int>();
    const int r = cell.at("r").get<int>();
    const int conv = cell.at("n_converged").get<int>();
    const int reps = cell.at("replicates").get<int>();
    const int failed = cell.at("n_failed").get<int>();
    std::printf("cell n=%d r=%d: converged %d/%d, failed %d\n", n, r, conv, reps, failed);
    if (failed > 0) partial = true;
  }
  if (!output_dir.empty()) std::cerr << "study outputs written to " << output_dir << "\n";
  return partial ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate COGARCH(1,1): simulation, moments, diagnostics, GMM estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mcg_version()));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate returns from a params JSON");
  std::string sim_params, sim_out, sim_vol;
  long long sim_n = 1000;
  int sim_substeps = 10;
  double sim_burn = -1.0;
  unsigned long long sim_seed = 0, sim_rep = 0;
  sim->add_option("--params", sim_params, "model params JSON file")->required();
  sim->add_option("--n", sim_n, "number of returns")->required();
  sim->add_option("--out", sim_out, "output CSV path")->required();
  sim->add_option("--emit-vol", sim_vol, "also write the volatility path CSV here");
  sim->add_option("--substeps", sim_substeps, "Euler substeps per interval (default 10)");
  sim->add_option("--burn-in", sim_burn, "burn-in time (default: stationary heuristic)");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--replicate", sim_rep, "RNG replicate index");

  // moments
  auto* mom = app.add_subcommand("moments", "Closed-form moment vector of a model");
  std::string mom_params, mom_out;
  int mom_r = 10;
  mom->add_option("--params", mom_params, "model params JSON file")->required();
  mom->add_option("--r", mom_r, "max lag (default 10)");
  mom->add_option("--out", mom_out, "output path (default stdout)");

  // stats
  auto* sts = app.add_subcommand("stats", "Empirical moment vector of a returns CSV");
  std::string sts_returns, sts_out;
  int sts_r = 10;
  double sts_delta = 0.0, sts_scale = 1.0;
  bool sts_nmr = false;
  sts->add_option("--returns", sts_returns, "returns CSV file")->required();
  sts->add_option("--r", sts_r, "max lag (default 10)");
  sts->add_option("--delta", sts_delta, "grid width when the CSV has no time column");
  sts->add_option("--scale", sts_scale, "multiply returns by this factor first");
  sts->add_flag("--divisor-n-minus-r", sts_nmr, "divide lag sums by n-r instead of n");
  sts->add_option("--out", sts_out, "output path (default stdout)");

  // check
  auto* chk = app.add_subcommand("check", "Stationarity/moment/identifiability conditions");
  std::string chk_params, chk_out;
  long long chk_mc = 1000000;
  unsigned long long chk_seed = 0;
  bool chk_quiet = false;
  chk->add_option("--params", chk_params, "model params JSON file")->required();
  chk->add_option("--mc-samples", chk_mc, "Monte-Carlo samples (default 1e6)");
  chk->add_option("--seed", chk_seed, "RNG seed");
  chk->add_option("--out", chk_out, "also write the report JSON here");
  chk->add_flag("--quiet", chk_quiet, "suppress the per-condition table");

  // recover
  auto* rec = app.add_subcommand("recover", "Closed-form parameter recovery from moments");
  std::string rec_moments, rec_returns, rec_noise, rec_out;
  int rec_r = 10;
  double rec_delta = 0.0;
  rec->add_option("--moments", rec_moments, "moment-vector JSON file");
  rec->add_option("--returns", rec_returns, "returns CSV (computes moments internally)");
  rec->add_option("--r", rec_r, "max lag when reading returns (default 10)");
  rec->add_option("--delta", rec_delta, "grid width when the CSV has no time column");
  rec->add_option("--noise", rec_noise, "params JSON supplying the driving-noise constants")
      ->required();
  rec->add_option("--out", rec_out, "output path (default stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "GMM fit on a returns CSV");
  std::string est_returns, est_weight = "identity", est_init = "moment", est_noise, est_out;
  int est_r = 10, est_maxev = 0;
  double est_delta = 0.0, est_scale = 1.0, est_boxfrac = 0.5;
  bool est_two = false, est_noreport = false;
  est->add_option("--returns", est_returns, "returns CSV file")->required();
  est->add_option("--r", est_r, "max lag (default 10)")->required();
  est->add_option("--weight", est_weight,
                  "identity | basic | truncated:<M> | diag (default identity)");
  est->add_option("--init", est_init, "moment | json:<params-file> (default moment)");
  est->add_flag("--two-step", est_two, "identity-weight step 1, then estimated weight");
  est->add_option("--noise", est_noise,
                  "params JSON supplying driving-noise constants (defaults to --init json file)");
  est->add_option("--delta", est_delta, "grid width when the CSV has no time column");
  est->add_option("--scale", est_scale, "multiply returns by this factor first");
  est->add_option("--box-frac", est_boxfrac, "search box half-width around init (default 0.5)");
  est->add_option("--max-evals", est_maxev, "objective evaluation budget");
  est->add_flag("--no-report", est_noreport, "skip the condition report at the fit");
  est->add_option("--out", est_out, "output path (default stdout)");

  // study
  auto* stu = app.add_subcommand("study", "Monte-Carlo replication study from a config JSON");
  std::string stu_config, stu_dir = "study_out", stu_out;
  int stu_threads = 0, stu_reps = 0;
  long long stu_seed = -1;
  stu->add_option("--config", stu_config, "study config JSON file")->required();
  stu->add_option("--output-dir", stu_dir, "directory for summary.json and CSVs");
  stu->add_option("--threads", stu_threads, "worker threads (default: env or hardware)");
  stu->add_option("--replicates", stu_reps, "override the config's replicate count");
  stu->add_option("--seed", stu_seed, "override the config's seed");
  stu->add_option("--out", stu_out, "also write the summary JSON here");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    return cmd_simulate(sim_params, sim_n, sim_out, sim_vol, sim_substeps, sim_burn, sim_seed,
                        sim_rep);
  }
  if (mom->parsed()) return cmd_moments(mom_params, mom_r, mom_out);
  if (sts->parsed()) return cmd_stats(sts_returns, sts_r, sts_delta, sts_scale, sts_nmr, sts_out);
  if (chk->parsed()) return cmd_check(chk_params, chk_mc, chk_seed, chk_out, chk_quiet);
  if (rec->parsed()) {
    if (rec_moments.empty() == rec_returns.empty()) {
      std::cerr << "error: recover needs exactly one of --moments or --returns\n";
      return kExitFatal;
    }
    return cmd_recover(rec_moments, rec_returns, rec_r, rec_delta, rec_noise, rec_out);
  }
  if (est->parsed()) {
    return cmd_estimate(est_returns, est_r, est_delta, est_scale, est_weight, est_init, est_two,
                        est_noise, est_boxfrac, est_maxev, est_noreport, est_out);
  }
  if (stu->parsed()) return cmd_study(stu_config, stu_dir, stu_threads, stu_reps, stu_seed, stu_out);
  return kExitFatal;
}
