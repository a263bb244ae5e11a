#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cohres::detail {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

inline std::vector<double> logspace(double a, double b, int n) {
  auto out = linspace(std::log(a), std::log(b), n);
  for (double& v : out) v = std::exp(v);
  return out;
}

// Least-squares slope of log|y| against log x; points with y = 0 are skipped.
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] <= 0.0 || y[i] == 0.0 || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Relative discrepancy with a caller-supplied scale floor, so structural
// zeros compared against roundoff do not masquerade as large errors.
inline double relative_error(double a, double b, double scale_floor = 0.0) {
  const double scale =
      std::max({std::fabs(a), std::fabs(b), scale_floor});
  if (scale == 0.0) return 0.0;
  return std::fabs(a - b) / scale;
}

// Index-parallel loop with deterministic output ordering: the worker writes
// into caller storage addressed by index, so scheduling cannot reorder
// results.  Falls back to serial execution for small ranges.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         std::size_t min_parallel = 16) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || n < min_parallel) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(hw, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cohres::detail
