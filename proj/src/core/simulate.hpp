#pragma once

#include <cstdint>
#include <vector>

#include "core/levy_model.hpp"

namespace mucogarch {

// Equidistant returns G_i (rows), each the increment of G over one
// delta-window after the burn-in period.
struct ReturnsSample {
  int d = 0;
  double delta = 0.0;
  Mat returns;  // n x d
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::int64_t n_jumps = 0;  // jump arrivals within the post-burn-in span
  // Filled only when requested: Y at the end of each post-burn-in window.
  std::vector<double> vol_times;
  std::vector<Mat> vol_Y;
};

struct SimulateOptions {
  int euler_substeps = 10;
  double burn_in = -1.0;  // < 0 selects stationary_burn_in_default
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  bool collect_vol = false;
};

// Twenty mean-reversion time constants: 20 / |max Re sigma(calB)|.
double stationary_burn_in_default(const MucogarchParams& params, const LevySpec& levy);

// Jump part exact (Y propagated by e^{B t} . e^{B^T t} between events, jump
// increments applied at exact arrival times); Brownian part of G
// Euler-discretized on delta/euler_substeps subgrid with left-endpoint V,
// subintervals split at jump times. Deterministic given (seed, replicate).
ReturnsSample simulate_returns(const MucogarchParams& params, const LevySpec& levy, double delta,
                               int n, const SimulateOptions& opts);

}  // namespace mucogarch
