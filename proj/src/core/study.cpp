#include "core/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "core/parallel.hpp"
#include "core/recover.hpp"
#include "core/rng.hpp"

namespace mucogarch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const StudyConfig& cfg) {
  if (cfg.theta0.size() != 10) fail(ErrorCode::InvalidConfig, "study: theta0 must have 10 coordinates");
  if (cfg.replicates < 1) fail(ErrorCode::InvalidConfig, "study: replicates must be >= 1");
  if (cfg.n_list.empty() || cfg.r_list.empty()) {
    fail(ErrorCode::InvalidConfig, "study: n_list and r_list must be non-empty");
  }
  for (int n : cfg.n_list)
    if (n < 1) fail(ErrorCode::InvalidConfig, "study: sample sizes must be positive");
  for (int r : cfg.r_list)
    if (r < 2) fail(ErrorCode::InvalidConfig, "study: lag depths must be >= 2");
  if (!(cfg.delta > 0.0)) fail(ErrorCode::InvalidConfig, "study: delta must be positive");
  if (cfg.init_policy != "truth" && cfg.init_policy != "moment") {
    fail(ErrorCode::InvalidConfig, "study: init_policy must be 'truth' or 'moment'");
  }
}

// Multiplicative perturbation of theta0, redrawn until feasible; falls back
// to theta0 itself when the neighborhood is unlucky.
Vec draw_truth_init(const Vec& theta0, const LevySpec& levy, const ThetaBox& box,
                    double radius, PhiloxRng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec init = theta0;
    for (Eigen::Index i = 0; i < init.size(); ++i) {
      init(i) *= 1.0 + radius * (2.0 * rng.uniform() - 1.0);
    }
    if (feasibility_violation(init, levy, box) == 0.0) return init;
  }
  return theta0;
}

}  // namespace

StudySummary run_study(const StudyConfig& cfg) {
  validate_config(cfg);
  const MucogarchParams p0 = theta_to_matrices(cfg.theta0);
  const ThetaBox box = default_box_around(cfg.theta0, cfg.box_frac);
  if (feasibility_violation(cfg.theta0, cfg.levy, box) != 0.0) {
    fail(ErrorCode::InvalidConfig, "study: theta0 is not feasible in its own box");
  }

  const size_t n_cells_n = cfg.n_list.size();
  const size_t n_r = cfg.r_list.size();
  const size_t reps = static_cast<size_t>(cfg.replicates);

  StudySummary out;
  out.config = cfg;
  out.raw.resize(n_cells_n * reps * n_r);

  // One task per (n, replicate): simulate once, fit at every lag depth.
  // Slots are preassigned so parallel and serial runs fill identical output.
  const auto task = [&](size_t t) {
    const size_t n_idx = t / reps;
    const size_t rep = t % reps;
    const int n = cfg.n_list[n_idx];
    const std::uint64_t replicate_id = static_cast<std::uint64_t>(t);

    const auto slot = [&](size_t r_idx) -> ReplicateOutcome& {
      return out.raw[(n_idx * reps + rep) * n_r + r_idx];
    };
    for (size_t r_idx = 0; r_idx < n_r; ++r_idx) {
      ReplicateOutcome& o = slot(r_idx);
      o.n = n;
      o.r = cfg.r_list[r_idx];
      o.replicate = static_cast<int>(rep);
    }

    ReturnsSample sample;
    try {
      SimulateOptions so;
      so.seed = cfg.seed;
      so.replicate = replicate_id;
      sample = simulate_returns(p0, cfg.levy, cfg.delta, n, so);
    } catch (const Error& e) {
      for (size_t r_idx = 0; r_idx < n_r; ++r_idx) {
        slot(r_idx).error = std::string(error_code_name(e.code())) + ": simulation failed";
      }
      return;
    }

    PhiloxRng init_rng(cfg.seed, replicate_id, 3);
    const Vec truth_init = draw_truth_init(cfg.theta0, cfg.levy, box, cfg.init_radius, init_rng);

    for (size_t r_idx = 0; r_idx < n_r; ++r_idx) {
      ReplicateOutcome& o = slot(r_idx);
      Vec init = truth_init;
      o.init_used = "truth";
      if (cfg.init_policy == "moment") {
        try {
          const MomentVector kh = empirical_moment_vector(sample, o.r);
          const MomentInitResult mi = moment_init(kh, cfg.levy, cfg.delta);
          if (mi.ok && feasibility_violation(mi.theta, cfg.levy, box) == 0.0) {
            init = mi.theta;
            o.init_used = "moment";
          } else {
            o.init_used = "truth-fallback";
          }
        } catch (const Error&) {
          o.init_used = "truth-fallback";
        }
      }
      try {
        const EstimationResult est = estimate_sample(sample, o.r, cfg.levy, cfg.weight_kind,
                                                     cfg.cov_M, init, box, cfg.optimizer);
        o.estimated = true;
        o.converged = est.converged;
        o.theta_hat = est.theta_hat;
        o.objective = est.objective;
        o.iterations = est.iterations;
      } catch (const Error& e) {
        o.error = std::string(error_code_name(e.code())) + ": " + e.what();
      }
    }
  };
  parallel_for_chunks(n_cells_n * reps, task, cfg.threads);

  // Sequential aggregation in cell order.
  for (size_t n_idx = 0; n_idx < n_cells_n; ++n_idx) {
    for (size_t r_idx = 0; r_idx < n_r; ++r_idx) {
      CellStats cell;
      cell.n = cfg.n_list[n_idx];
      cell.r = cfg.r_list[r_idx];
      cell.replicates = cfg.replicates;
      const Eigen::Index q = cfg.theta0.size();
      Vec sum = Vec::Zero(q);
      std::vector<Vec> converged_fits;
      for (size_t rep = 0; rep < reps; ++rep) {
        const ReplicateOutcome& o = out.raw[(n_idx * reps + rep) * n_r + r_idx];
        if (!o.estimated) {
          ++cell.n_failed;
          continue;
        }
        if (o.converged) {
          converged_fits.push_back(o.theta_hat);
          sum += o.theta_hat;
        }
      }
      cell.n_converged = static_cast<int>(converged_fits.size());
      cell.bias = Vec::Constant(q, kNaN);
      cell.stddev = Vec::Constant(q, kNaN);
      if (cell.n_converged > 0) {
        const Vec mean = sum / static_cast<double>(cell.n_converged);
        cell.bias = mean - cfg.theta0;
        if (cell.n_converged > 1) {
          Vec ss = Vec::Zero(q);
          for (const Vec& th : converged_fits) ss += (th - mean).cwiseAbs2();
          cell.stddev = (ss / static_cast<double>(cell.n_converged - 1)).cwiseSqrt();
        }
      }
      out.cells.push_back(std::move(cell));
    }
  }

  if (!cfg.output_dir.empty()) write_study_outputs(out, cfg.output_dir);
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidConfig, "normal_quantile: p must be in (0,1)");
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double qv = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * qv + c[1]) * qv + c[2]) * qv + c[3]) * qv + c[4]) * qv + c[5]) /
        ((((d[0] * qv + d[1]) * qv + d[2]) * qv + d[3]) * qv + 1.0);
  } else if (p <= 1.0 - plow) {
    const double qv = p - 0.5;
    const double rv = qv * qv;
    x = (((((a[0] * rv + a[1]) * rv + a[2]) * rv + a[3]) * rv + a[4]) * rv + a[5]) * qv /
        (((((b[0] * rv + b[1]) * rv + b[2]) * rv + b[3]) * rv + b[4]) * rv + 1.0);
  } else {
    const double qv = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * qv + c[1]) * qv + c[2]) * qv + c[3]) * qv + c[4]) * qv + c[5]) /
        ((((d[0] * qv + d[1]) * qv + d[2]) * qv + d[3]) * qv + 1.0);
  }
  // One Halley step against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::vector<QqPoint> qq_data(const StudySummary& s, int n, int r, int coord) {
  if (coord < 1 || coord > s.config.theta0.size()) {
    fail(ErrorCode::InvalidConfig, "qq_data: coordinate out of range");
  }
  struct Entry {
    double value;
    bool converged;
  };
  std::vector<Entry> entries;
  for (const ReplicateOutcome& o : s.raw) {
    if (o.n == n && o.r == r && o.estimated) {
      entries.push_back({o.theta_hat(coord - 1), o.converged});
    }
  }
  if (entries.size() < 10) {
    fail(ErrorCode::TooFewReplicates, "qq_data: needs at least 10 estimated replicates");
  }
  // Standardize by the converged-subset mean/std, matching the reported cell
  // statistics.
  double mean = 0.0;
  int m = 0;
  for (const Entry& e : entries)
    if (e.converged) {
      mean += e.value;
      ++m;
    }
  if (m < 2) fail(ErrorCode::TooFewReplicates, "qq_data: needs at least 2 converged fits");
  mean /= m;
  double ss = 0.0;
  for (const Entry& e : entries)
    if (e.converged) ss += (e.value - mean) * (e.value - mean);
  const double sd = std::sqrt(ss / (m - 1));
  if (!(sd > 0.0)) fail(ErrorCode::TooFewReplicates, "qq_data: degenerate spread");

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) { return x.value < y.value; });
  std::vector<QqPoint> out(entries.size());
  const double count = static_cast<double>(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    out[i].theoretical = normal_quantile((static_cast<double>(i) + 0.5) / count);
    out[i].standardized = (entries[i].value - mean) / sd;
    out[i].converged = entries[i].converged;
  }
  return out;
}

Json study_config_to_json(const StudyConfig& c) {
  Json j;
  j["theta0"] = vec_to_json(c.theta0);
  j["sigma_W"] = c.levy.sigma_W;
  j["cpp_rate"] = c.levy.cpp_rate;
  j["jump_scale"] = c.levy.jump_scale;
  j["delta"] = c.delta;
  j["n_list"] = c.n_list;
  j["r_list"] = c.r_list;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["weight"] = weight_kind_name(c.weight_kind);
  j["cov_M"] = c.cov_M;
  j["init_policy"] = c.init_policy;
  j["init_radius"] = c.init_radius;
  j["box_frac"] = c.box_frac;
  j["max_evals"] = c.optimizer.max_evals;
  return j;
}

StudyConfig study_config_from_json(const Json& j) {
  StudyConfig c;
  c.theta0 = vec_from_json(j.at("theta0"));
  c.levy = make_levy(j.at("cpp_rate").get<double>(), j.at("jump_scale").get<double>(),
                     j.at("sigma_W").get<double>());
  c.delta = j.at("delta").get<double>();
  c.n_list = j.at("n_list").get<std::vector<int>>();
  c.r_list = j.at("r_list").get<std::vector<int>>();
  if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("weight")) {
    const std::string w = j.at("weight").get<std::string>();
    if (w == "identity") c.weight_kind = WeightKind::Identity;
    else if (w == "basic") c.weight_kind = WeightKind::Basic;
    else if (w == "truncated") c.weight_kind = WeightKind::Truncated;
    else if (w == "diag") c.weight_kind = WeightKind::Diag;
    else fail(ErrorCode::ParseError, "study config: unknown weight kind " + w);
  }
  if (j.contains("cov_M")) c.cov_M = j.at("cov_M").get<int>();
  if (j.contains("init_policy")) c.init_policy = j.at("init_policy").get<std::string>();
  if (j.contains("init_radius")) c.init_radius = j.at("init_radius").get<double>();
  if (j.contains("box_frac")) c.box_frac = j.at("box_frac").get<double>();
  if (j.contains("max_evals")) c.optimizer.max_evals = j.at("max_evals").get<int>();
  return c;
}

Json study_summary_to_json(const StudySummary& s) {
  Json j;
  j["config"] = study_config_to_json(s.config);
  j["format_version"] = 1;
  Json cells = Json::array();
  for (const CellStats& c : s.cells) {
    Json jc;
    jc["n"] = c.n;
    jc["r"] = c.r;
    jc["replicates"] = c.replicates;
    jc["n_converged"] = c.n_converged;
    jc["n_excluded"] = c.replicates - c.n_converged;
    jc["n_failed"] = c.n_failed;
    jc["bias"] = vec_to_json(c.bias);
    jc["std"] = vec_to_json(c.stddev);
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  Json raw = Json::array();
  for (const ReplicateOutcome& o : s.raw) {
    Json jo;
    jo["n"] = o.n;
    jo["r"] = o.r;
    jo["replicate"] = o.replicate;
    jo["estimated"] = o.estimated;
    jo["converged"] = o.converged;
    if (o.estimated) {
      jo["theta_hat"] = vec_to_json(o.theta_hat);
      jo["objective"] = o.objective;
      jo["iterations"] = o.iterations;
    }
    jo["init"] = o.init_used;
    if (!o.error.empty()) jo["error"] = o.error;
    raw.push_back(std::move(jo));
  }
  j["replicates"] = std::move(raw);
  return j;
}

void write_study_outputs(const StudySummary& s, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::ParseError, "cannot create output directory " + dir);

  save_json_file((fs::path(dir) / "summary.json").string(), study_summary_to_json(s));

  {
    std::ofstream out(fs::path(dir) / "bias_std.csv");
    if (!out) fail(ErrorCode::ParseError, "cannot write bias_std.csv");
    out << "n,r,coord,bias,std,n_converged\n";
    char buf[64];
    for (const CellStats& c : s.cells) {
      for (Eigen::Index k = 0; k < c.bias.size(); ++k) {
        out << c.n << ',' << c.r << ',' << (k + 1) << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", c.bias(k));
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", c.stddev(k));
        out << buf << ',' << c.n_converged << '\n';
      }
    }
  }

  const Eigen::Index q = s.config.theta0.size();
  for (Eigen::Index coord = 1; coord <= q; ++coord) {
    std::ofstream out(fs::path(dir) / ("qq_" + std::to_string(coord) + ".csv"));
    if (!out) fail(ErrorCode::ParseError, "cannot write qq csv");
    out << "n,r,theoretical,standardized,converged\n";
    char buf[64];
    for (const CellStats& c : s.cells) {
      std::vector<QqPoint> pts;
      try {
        pts = qq_data(s, c.n, c.r, static_cast<int>(coord));
      } catch (const Error&) {
        continue;  // cell too small for a QQ series
      }
      for (const QqPoint& ptv : pts) {
        out << c.n << ',' << c.r << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", ptv.theoretical);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", ptv.standardized);
        out << buf << ',' << (ptv.converged ? 1 : 0) << '\n';
      }
    }
  }
}

EstimationResult real_data_workflow(const ReturnsSample& data, int r, const Vec& init,
                                    const LevySpec& levy, CovKind cov_kind, int M,
                                    bool scale_by_1000, const OptimizerConfig& opt) {
  ReturnsSample scaled = data;
  if (scale_by_1000) scaled.returns *= 1000.0;
  const ThetaBox box = default_box_around(init, 0.5);
  return two_step_estimate(scaled, r, levy, cov_kind, M, init, box, opt);
}

}  // namespace mucogarch
