#include "mucogarch.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/csv_io.hpp"
#include "core/json_io.hpp"
#include "core/study.hpp"

namespace {

using namespace mucogarch;

thread_local std::string g_last_error;

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
      return MCG_INVALID_CONFIG;
    case ErrorCode::ParseError:
      return MCG_PARSE_ERROR;
    case ErrorCode::ShapeError:
    case ErrorCode::DimensionMismatch:
      return MCG_SHAPE_ERROR;
    default:
      return MCG_RUNTIME_ERROR;
  }
}

// Runs fn inside the library's exception boundary; fn returns a status.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = std::string(error_code_name(e.code())) + ": " + e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = std::string("InternalError: ") + e.what();
    return MCG_RUNTIME_ERROR;
  } catch (...) {
    g_last_error = "InternalError: unknown exception";
    return MCG_RUNTIME_ERROR;
  }
}

int invalid_arg(const char* what) {
  g_last_error = std::string("InvalidConfig: ") + what;
  return MCG_INVALID_CONFIG;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int emit_json(const Json& j, char** out_json) {
  *out_json = dup_string(j.dump(2) + "\n");
  if (!*out_json) {
    g_last_error = "InternalError: allocation failed";
    return MCG_RUNTIME_ERROR;
  }
  return MCG_OK;
}

WeightKind weight_kind_of(const std::string& name) {
  if (name == "identity") return WeightKind::Identity;
  if (name == "basic") return WeightKind::Basic;
  if (name == "truncated") return WeightKind::Truncated;
  if (name == "diag") return WeightKind::Diag;
  fail(ErrorCode::InvalidConfig, "unknown weight kind: " + name);
}

CovKind cov_kind_of(WeightKind w) {
  switch (w) {
    case WeightKind::Basic:
      return CovKind::Basic;
    case WeightKind::Truncated:
      return CovKind::Truncated;
    case WeightKind::Diag:
      return CovKind::Diag;
    default:
      fail(ErrorCode::InvalidConfig,
           "two-step estimation needs a covariance estimator: basic, truncated, or diag");
  }
}

}  // namespace

struct mcg_model {
  mucogarch::ModelFile mf;
};

struct mcg_sample {
  mucogarch::ReturnsSample rs;
};

extern "C" {

const char* mcg_version(void) { return "0.1.0"; }

const char* mcg_status_name(int status) {
  switch (status) {
    case MCG_OK:
      return "ok";
    case MCG_INVALID_CONFIG:
      return "invalid-config";
    case MCG_PARSE_ERROR:
      return "parse-error";
    case MCG_SHAPE_ERROR:
      return "shape-error";
    default:
      return "runtime-error";
  }
}

const char* mcg_last_error(void) { return g_last_error.c_str(); }

void mcg_string_free(char* s) { std::free(s); }

int mcg_model_from_json(const char* json_text, mcg_model** out) {
  if (!json_text || !out) return invalid_arg("mcg_model_from_json: null argument");
  *out = nullptr;
  return guarded([&] {
    Json j;
    try {
      j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, std::string("model JSON: ") + e.what());
    }
    auto* m = new mcg_model{model_from_json(j)};
    *out = m;
    return MCG_OK;
  });
}

int mcg_model_from_file(const char* path, mcg_model** out) {
  if (!path || !out) return invalid_arg("mcg_model_from_file: null argument");
  *out = nullptr;
  return guarded([&] {
    auto* m = new mcg_model{model_from_json(load_json_file(path))};
    *out = m;
    return MCG_OK;
  });
}

int mcg_model_to_json(const mcg_model* m, char** out_json) {
  if (!m || !out_json) return invalid_arg("mcg_model_to_json: null argument");
  return guarded([&] { return emit_json(model_to_json(m->mf), out_json); });
}

void mcg_model_free(mcg_model* m) { delete m; }

int mcg_sample_from_csv(const char* path, double delta_override, mcg_sample** out) {
  if (!path || !out) return invalid_arg("mcg_sample_from_csv: null argument");
  *out = nullptr;
  return guarded([&] {
    auto* s = new mcg_sample{read_returns_csv(path, delta_override)};
    *out = s;
    return MCG_OK;
  });
}

int mcg_sample_dims(const mcg_sample* s, long long* n, int* d, double* delta) {
  if (!s) return invalid_arg("mcg_sample_dims: null sample");
  if (n) *n = static_cast<long long>(s->rs.returns.rows());
  if (d) *d = s->rs.d;
  if (delta) *delta = s->rs.delta;
  return MCG_OK;
}

int mcg_sample_scale(mcg_sample* s, double factor) {
  if (!s) return invalid_arg("mcg_sample_scale: null sample");
  return guarded([&] {
    if (!(factor > 0.0)) fail(ErrorCode::InvalidConfig, "scale factor must be positive");
    s->rs.returns *= factor;
    for (Mat& y : s->rs.vol_Y) y *= factor * factor;
    return MCG_OK;
  });
}

int mcg_sample_write_csv(const mcg_sample* s, const char* path) {
  if (!s || !path) return invalid_arg("mcg_sample_write_csv: null argument");
  return guarded([&] {
    write_returns_csv(path, s->rs);
    return MCG_OK;
  });
}

int mcg_sample_write_vol_csv(const mcg_sample* s, const char* path) {
  if (!s || !path) return invalid_arg("mcg_sample_write_vol_csv: null argument");
  return guarded([&] {
    write_vol_csv(path, s->rs);
    return MCG_OK;
  });
}

void mcg_sample_free(mcg_sample* s) { delete s; }

int mcg_simulate(const mcg_model* m, long long n, int euler_substeps, double burn_in,
                 unsigned long long seed, unsigned long long replicate, int collect_vol,
                 mcg_sample** out) {
  if (!m || !out) return invalid_arg("mcg_simulate: null argument");
  *out = nullptr;
  return guarded([&] {
    if (n < 1) fail(ErrorCode::InvalidConfig, "simulate: n must be >= 1");
    SimulateOptions so;
    so.euler_substeps = euler_substeps;
    so.burn_in = burn_in;
    so.seed = seed;
    so.replicate = replicate;
    so.collect_vol = collect_vol != 0;
    auto* s = new mcg_sample{
        simulate_returns(m->mf.params, m->mf.levy, m->mf.delta, static_cast<int>(n), so)};
    *out = s;
    return MCG_OK;
  });
}

int mcg_model_moments(const mcg_model* m, int r, char** out_json) {
  if (!m || !out_json) return invalid_arg("mcg_model_moments: null argument");
  return guarded([&] {
    const MomentVector k = model_moment_vector(m->mf.params, m->mf.levy, m->mf.delta, r);
    return emit_json(moment_vector_to_json(k), out_json);
  });
}

int mcg_sample_moments(const mcg_sample* s, int r, int divisor_n_minus_r, char** out_json) {
  if (!s || !out_json) return invalid_arg("mcg_sample_moments: null argument");
  return guarded([&] {
    const MomentVector k = empirical_moment_vector(s->rs, r, divisor_n_minus_r != 0);
    return emit_json(moment_vector_to_json(k), out_json);
  });
}

int mcg_check(const mcg_model* m, long long mc_samples, unsigned long long seed,
              char** out_json) {
  if (!m || !out_json) return invalid_arg("mcg_check: null argument");
  return guarded([&] {
    const std::int64_t samples = mc_samples > 0 ? mc_samples : 1000000;
    const ConditionReport rep =
        full_condition_report(m->mf.params, m->mf.levy, m->mf.delta, samples, seed);
    return emit_json(condition_report_to_json(rep), out_json);
  });
}

int mcg_recover(const mcg_model* noise, const char* moments_json, char** out_json) {
  if (!noise || !moments_json || !out_json) return invalid_arg("mcg_recover: null argument");
  return guarded([&] {
    Json j;
    try {
      j = Json::parse(moments_json);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, std::string("moment-vector JSON: ") + e.what());
    }
    const MomentVector k = moment_vector_from_json(j);
    const MomentInitResult res = moment_init(k, noise->mf.levy, k.delta);
    return emit_json(recovery_to_json(res), out_json);
  });
}

int mcg_estimate(const mcg_sample* s, const mcg_model* noise, const char* options_json,
                 char** out_json) {
  if (!s || !noise || !options_json || !out_json) {
    return invalid_arg("mcg_estimate: null argument");
  }
  return guarded([&] {
    Json j;
    try {
      j = Json::parse(options_json);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, std::string("estimate options JSON: ") + e.what());
    }
    if (!j.contains("r")) fail(ErrorCode::InvalidConfig, "estimate options: r is required");
    const int r = j.at("r").get<int>();
    const WeightKind wkind = weight_kind_of(j.value("weight", std::string("identity")));
    const int cov_M = j.value("cov_M", 0);
    const bool two_step = j.value("two_step", false);

    const LevySpec& levy = noise->mf.levy;
    const std::string init_policy = j.value("init", std::string("model"));
    Vec init;
    if (init_policy == "model") {
      init = matrices_to_theta(noise->mf.params);
    } else if (init_policy == "theta") {
      if (!j.contains("theta_init")) {
        fail(ErrorCode::InvalidConfig, "estimate options: init \"theta\" needs theta_init");
      }
      init = vec_from_json(j.at("theta_init"));
    } else if (init_policy == "moment") {
      const MomentVector kh = empirical_moment_vector(s->rs, r);
      const MomentInitResult mi = moment_init(kh, levy, s->rs.delta);
      if (!mi.ok) {
        fail(mi.error, "moment-based init failed: " + mi.message);
      }
      init = mi.theta;
    } else {
      fail(ErrorCode::InvalidConfig, "estimate options: unknown init policy " + init_policy);
    }

    ThetaBox box;
    if (j.contains("box_lo") || j.contains("box_hi")) {
      if (!j.contains("box_lo") || !j.contains("box_hi")) {
        fail(ErrorCode::InvalidConfig, "estimate options: box_lo and box_hi come together");
      }
      box.lo = vec_from_json(j.at("box_lo"));
      box.hi = vec_from_json(j.at("box_hi"));
    } else {
      box = default_box_around(init, j.value("box_frac", 0.5));
    }

    OptimizerConfig cfg;
    cfg.max_evals = j.value("max_evals", cfg.max_evals);
    cfg.rel_f_tol = j.value("rel_f_tol", cfg.rel_f_tol);
    cfg.attach_report = j.value("attach_report", cfg.attach_report);
    cfg.report_mc_samples = j.value("report_mc_samples", cfg.report_mc_samples);
    cfg.report_seed = j.value("report_seed", cfg.report_seed);

    EstimationResult res;
    if (two_step) {
      res = two_step_estimate(s->rs, r, levy, cov_kind_of(wkind), cov_M, init, box, cfg);
    } else {
      res = estimate_sample(s->rs, r, levy, wkind, cov_M, init, box, cfg);
    }
    Json out = estimation_result_to_json(res);
    out["r"] = r;
    out["n"] = static_cast<long long>(s->rs.returns.rows());
    out["init_policy"] = init_policy;
    return emit_json(out, out_json);
  });
}

int mcg_study(const char* config_json, const char* output_dir, int threads, char** out_json) {
  if (!config_json || !out_json) return invalid_arg("mcg_study: null argument");
  return guarded([&] {
    Json j;
    try {
      j = Json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, std::string("study config JSON: ") + e.what());
    }
    StudyConfig cfg = study_config_from_json(j);
    cfg.threads = threads > 0 ? threads : -1;
    cfg.output_dir = output_dir ? output_dir : "";
    const StudySummary summary = run_study(cfg);
    return emit_json(study_summary_to_json(summary), out_json);
  });
}

}  // extern "C"
