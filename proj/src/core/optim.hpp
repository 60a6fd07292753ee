#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "core/tensor_ops.hpp"

namespace mucogarch {

// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
struct NmOptions {
  int max_evals = 20000;
  double rel_f_tol = 1e-10;  // stop when f_worst - f_best <= tol * (|f_best| + tol)
};

struct NmResult {
  Vec x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

// Rows of `simplex` are the q+1 initial vertices (q = dimension).
inline NmResult nelder_mead(const std::function<double(const Vec&)>& fn, Mat simplex,
                            const NmOptions& opts = {}) {
  const Eigen::Index q = simplex.cols();
  const Eigen::Index m = simplex.rows();
  if (m != q + 1) fail(ErrorCode::InvalidConfig, "nelder_mead: need q+1 vertices");
  Vec fv(m);
  int evals = 0;
  for (Eigen::Index i = 0; i < m; ++i) fv(i) = (++evals, fn(simplex.row(i).transpose()));

  std::vector<Eigen::Index> order(m);
  auto sort_order = [&] {
    for (Eigen::Index i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return fv(a) < fv(b); });
  };

  NmResult res;
  while (true) {
    sort_order();
    Eigen::Index best = order[0], worst = order[m - 1], second = order[m - 2];
    const double spread = fv(worst) - fv(best);
    const double stop_at = opts.rel_f_tol * (std::abs(fv(best)) + opts.rel_f_tol);
    if (spread <= stop_at || evals >= opts.max_evals) {
      res.x = simplex.row(best).transpose();
      res.f = fv(best);
      res.evals = evals;
      res.converged = spread <= stop_at;
      return res;
    }
    Vec centroid = Vec::Zero(q);
    for (Eigen::Index i = 0; i < m; ++i)
      if (i != worst) centroid += simplex.row(i).transpose();
    centroid /= static_cast<double>(q);

    Vec xw = simplex.row(worst).transpose();
    Vec xr = centroid + (centroid - xw);
    double fr = (++evals, fn(xr));
    if (fr < fv(best)) {
      Vec xe = centroid + 2.0 * (centroid - xw);
      double fe = (++evals, fn(xe));
      if (fe < fr) {
        simplex.row(worst) = xe.transpose();
        fv(worst) = fe;
      } else {
        simplex.row(worst) = xr.transpose();
        fv(worst) = fr;
      }
    } else if (fr < fv(second)) {
      simplex.row(worst) = xr.transpose();
      fv(worst) = fr;
    } else {
      bool shrink = false;
      if (fr < fv(worst)) {
        Vec xc = centroid + 0.5 * (xr - centroid);
        double fc = (++evals, fn(xc));
        if (fc <= fr) {
          simplex.row(worst) = xc.transpose();
          fv(worst) = fc;
        } else {
          shrink = true;
        }
      } else {
        Vec xc = centroid + 0.5 * (xw - centroid);
        double fc = (++evals, fn(xc));
        if (fc < fv(worst)) {
          simplex.row(worst) = xc.transpose();
          fv(worst) = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        Vec xb = simplex.row(order[0]).transpose();
        for (Eigen::Index i = 0; i < m; ++i) {
          if (i == order[0]) continue;
          Vec xi = xb + 0.5 * (simplex.row(i).transpose() - xb);
          simplex.row(i) = xi.transpose();
          fv(i) = (++evals, fn(xi));
        }
      }
    }
  }
}

// Vertex j+1 offsets x0 by step(j) along coordinate j.
inline Mat initial_simplex(const Vec& x0, const Vec& step) {
  Eigen::Index q = x0.size();
  Mat s(q + 1, q);
  s.row(0) = x0.transpose();
  for (Eigen::Index j = 0; j < q; ++j) {
    s.row(j + 1) = x0.transpose();
    s(j + 1, j) += step(j);
  }
  return s;
}

}  // namespace mucogarch
