#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/gmm.hpp"
#include "core/json_io.hpp"

namespace mucogarch {

// Monte-Carlo replication study: simulate, fit, and aggregate bias/std per
// (sample size, lag depth, coordinate) cell. Deterministic given the seed,
// independent of thread count.
struct StudyConfig {
  StudyConfig() { optimizer.attach_report = false; }

  Vec theta0;
  LevySpec levy;
  double delta = 0.1;
  std::vector<int> n_list;
  std::vector<int> r_list;
  int replicates = 50;
  std::uint64_t seed = 0;
  WeightKind weight_kind = WeightKind::Identity;
  int cov_M = 0;                      // truncation lag when the weight needs one
  std::string init_policy = "truth";  // "truth" or "moment" (moment falls back to truth)
  double init_radius = 0.10;          // relative radius of the truth neighborhood
  double box_frac = 0.5;              // parameter box half-width, relative to theta0
  int threads = -1;                   // -1: MUCOGARCH_THREADS or hardware
  std::string output_dir;             // empty: keep results in memory only
  OptimizerConfig optimizer;
};

struct ReplicateOutcome {
  int n = 0;
  int r = 0;
  int replicate = 0;  // index within the cell
  bool estimated = false;
  bool converged = false;
  Vec theta_hat;  // empty when not estimated
  double objective = 0.0;
  int iterations = 0;
  std::string init_used;  // "truth" | "moment" | "truth-fallback"
  std::string error;      // set when not estimated
};

struct CellStats {
  int n = 0;
  int r = 0;
  int replicates = 0;
  int n_converged = 0;
  int n_failed = 0;   // estimation raised an error
  Vec bias;           // mean(theta_hat) - theta0 over converged fits, NaN when none
  Vec stddev;         // sample std over converged fits, NaN when fewer than 2
};

struct StudySummary {
  StudyConfig config;
  std::vector<CellStats> cells;          // n-major, then r, matching config order
  std::vector<ReplicateOutcome> raw;     // fixed order: (n, replicate, r)
};

StudySummary run_study(const StudyConfig& cfg);

// One QQ pair per estimated replicate of the (n, r) cell: standardized
// theta_hat(coord) against the matching normal quantile, sorted; the flag
// keeps non-converged fits identifiable.
struct QqPoint {
  double theoretical = 0.0;
  double standardized = 0.0;
  bool converged = false;
};
std::vector<QqPoint> qq_data(const StudySummary& s, int n, int r, int coord);

// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement); |error| well below the QQ plotting resolution.
double normal_quantile(double p);

// summary.json (no volatile fields), bias_std.csv, qq_<coord>.csv.
void write_study_outputs(const StudySummary& s, const std::string& dir);

Json study_summary_to_json(const StudySummary& s);
Json study_config_to_json(const StudyConfig& c);
StudyConfig study_config_from_json(const Json& j);

// Two-step fit on externally supplied returns, optionally rescaled by 1000;
// the condition report (including the moment drift bounds) is attached at the
// fitted parameters.
EstimationResult real_data_workflow(const ReturnsSample& data, int r, const Vec& init,
                                    const LevySpec& levy, CovKind cov_kind, int M,
                                    bool scale_by_1000, const OptimizerConfig& opt = {});

}  // namespace mucogarch
