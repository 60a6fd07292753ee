#include "core/simulate.hpp"

#include <cmath>

#include "core/moments.hpp"
#include "core/rng.hpp"

namespace mucogarch {

namespace {

constexpr std::uint32_t kStreamArrivals = 0;
constexpr std::uint32_t kStreamJumpSizes = 1;
constexpr std::uint32_t kStreamBrownian = 2;

// Symmetrize and clip tiny negative eigenvalues; anything below the relative
// floor indicates a defect in the recursion, not roundoff.
Mat enforce_psd(const Mat& Y) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(Y));
  Vec lam = es.eigenvalues();
  double floor = -1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < floor)
    fail(ErrorCode::NonPsdVolatility,
         "simulate: Y eigenvalue " + std::to_string(lam.minCoeff()) + " below tolerance");
  Vec clipped = lam.cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

Vec draw_normals(PhiloxRng& rng, int d) {
  Vec z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  return z;
}

}  // namespace

double stationary_burn_in_default(const MucogarchParams& params, const LevySpec& levy) {
  Mat calB = cal_B(params, levy.sigma_L);
  double mre = max_real_eig(calB);
  if (mre >= 0.0) fail(ErrorCode::UnstableDynamics, "burn-in: calB spectrum not stable");
  return 20.0 / std::abs(mre);
}

ReturnsSample simulate_returns(const MucogarchParams& params, const LevySpec& levy, double delta,
                               int n, const SimulateOptions& opts) {
  validate_params(params);
  if (delta <= 0.0 || n < 1 || opts.euler_substeps < 1)
    fail(ErrorCode::InvalidConfig, "simulate: need delta > 0, n >= 1, euler_substeps >= 1");
  double burn = opts.burn_in >= 0.0 ? opts.burn_in : stationary_burn_in_default(params, levy);

  int d = params.d;
  // Start at the stationary mean of Y projected to PSD, then burn in.
  Mat Y = enforce_psd(unvec(stationary_mean_Y(params, levy)));

  PhiloxRng rng_arrivals(opts.seed, opts.replicate, kStreamArrivals);
  PhiloxRng rng_jumps(opts.seed, opts.replicate, kStreamJumpSizes);
  PhiloxRng rng_brownian(opts.seed, opts.replicate, kStreamBrownian);

  int burn_windows = static_cast<int>(std::ceil(burn / delta - 1e-12));
  if (burn_windows < 0) burn_windows = 0;
  int total_windows = burn_windows + n;
  double dt_sub = delta / opts.euler_substeps;
  Mat E_sub = expm(params.B * dt_sub);

  double sqrt_jump = std::sqrt(levy.jump_scale);
  double sqrt_W = std::sqrt(levy.sigma_W);

  ReturnsSample out;
  out.d = d;
  out.delta = delta;
  out.returns.resize(n, d);
  out.seed = opts.seed;
  out.replicate = opts.replicate;
  if (opts.collect_vol) {
    out.vol_times.reserve(n);
    out.vol_Y.reserve(n);
  }

  double next_jump = rng_arrivals.exponential(levy.cpp_rate);
  double t0 = 0.0;
  for (int w = 0; w < total_windows; ++w) {
    Vec g = Vec::Zero(d);
    for (int s = 0; s < opts.euler_substeps; ++s) {
      double t_lo = t0 + s * dt_sub;
      double t_hi = t_lo + dt_sub;
      double tl = t_lo;
      while (next_jump < t_hi) {
        double tau = next_jump;
        // Brownian piece over [tl, tau) at the left-endpoint volatility.
        if (levy.sigma_W > 0.0) {
          Mat Vh = psd_sqrt(symmetrize(params.C + Y));
          if (tau > tl) g += sqrt_W * std::sqrt(tau - tl) * (Vh * draw_normals(rng_brownian, d));
        }
        // Exact evolution to the jump time, then the jump itself.
        Mat E = expm(params.B * (tau - tl));
        Y = E * Y * E.transpose();
        Mat Vh = psd_sqrt(symmetrize(params.C + Y));
        Vec y = sqrt_jump * draw_normals(rng_jumps, d);
        Vec Vy = Vh * y;
        g += Vy;
        Vec AVy = params.A * Vy;
        Y = symmetrize(Y + AVy * AVy.transpose());
        tl = tau;
        if (w >= burn_windows) ++out.n_jumps;
        next_jump = tau + rng_arrivals.exponential(levy.cpp_rate);
      }
      if (levy.sigma_W > 0.0 && t_hi > tl) {
        Mat Vh = psd_sqrt(symmetrize(params.C + Y));
        g += sqrt_W * std::sqrt(t_hi - tl) * (Vh * draw_normals(rng_brownian, d));
      }
      if (tl == t_lo) {
        Y = E_sub * Y * E_sub.transpose();
      } else {
        Mat Ep = expm(params.B * (t_hi - tl));
        Y = Ep * Y * Ep.transpose();
      }
      Y = enforce_psd(Y);
    }
    if (w >= burn_windows) {
      out.returns.row(w - burn_windows) = g.transpose();
      if (opts.collect_vol) {
        out.vol_times.push_back((w - burn_windows + 1) * delta);
        out.vol_Y.push_back(Y);
      }
    }
    t0 += delta;
  }
  return out;
}

}  // namespace mucogarch
