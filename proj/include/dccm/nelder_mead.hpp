// Derivative-free simplex minimizer (Nelder & Mead 1965), used for the
// conditional-sum-of-squares objective. Standard coefficients, restarts
// around the incumbent to polish.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dccm {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0;
  long long evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double f_tol = 1e-11;
  double x_tol = 1e-9;
  long long max_evaluations = 200000;
  int restarts = 2;
  double initial_step = 0.25;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start,
                                    NelderMeadOptions opt = {}) {
  const std::size_t n = start.size();
  if (n == 0) return {std::move(start), f({}), 1, true};

  NelderMeadResult result;
  result.x = start;
  result.value = f(start);
  result.evaluations = 1;

  auto run_once = [&](std::vector<double> x0, double step) {
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i < n; ++i)
      simplex[i + 1][i] += (x0[i] != 0.0 ? std::abs(x0[i]) * step + step : step);
    for (std::size_t i = 0; i <= n; ++i) {
      fx[i] = f(simplex[i]);
      ++result.evaluations;
    }
    std::vector<std::size_t> idx(n + 1);
    while (result.evaluations < opt.max_evaluations) {
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
      const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];

      double f_spread = std::abs(fx[worst] - fx[best]);
      double x_spread = 0;
      for (std::size_t i = 0; i < n; ++i)
        x_spread = std::max(x_spread, std::abs(simplex[worst][i] - simplex[best][i]));
      if (f_spread <= opt.f_tol * (1.0 + std::abs(fx[best])) && x_spread <= opt.x_tol) {
        result.converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t k = 0; k <= n; ++k) {
        if (k == worst) continue;
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      auto blend = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i)
          p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
        return p;
      };

      auto reflected = blend(-1.0);
      double fr = f(reflected);
      ++result.evaluations;
      if (fr < fx[best]) {
        auto expanded = blend(-2.0);
        double fe = f(expanded);
        ++result.evaluations;
        if (fe < fr) { simplex[worst] = std::move(expanded); fx[worst] = fe; }
        else { simplex[worst] = std::move(reflected); fx[worst] = fr; }
      } else if (fr < fx[second]) {
        simplex[worst] = std::move(reflected);
        fx[worst] = fr;
      } else {
        auto contracted = blend(fr < fx[worst] ? -0.5 : 0.5);
        double fc = f(contracted);
        ++result.evaluations;
        if (fc < std::min(fr, fx[worst])) {
          simplex[worst] = std::move(contracted);
          fx[worst] = fc;
        } else {
          // shrink toward the best vertex
          for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) continue;
            for (std::size_t i = 0; i < n; ++i)
              simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
            fx[k] = f(simplex[k]);
            ++result.evaluations;
          }
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
      if (fx[i] < fx[best]) best = i;
    if (fx[best] < result.value) {
      result.value = fx[best];
      result.x = simplex[best];
    }
  };

  double step = opt.initial_step;
  for (int r = 0; r <= opt.restarts; ++r) {
    result.converged = false;
    run_once(result.x, step);
    step *= 0.25;
    if (result.evaluations >= opt.max_evaluations) break;
  }
  return result;
}

}  // namespace dccm
