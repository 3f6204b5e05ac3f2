// Benchmark of the OpenMP-parallel kernels against the serial reference
// path.  Both paths must produce bitwise-identical results (the parallel
// reductions use the same fixed blocking as the serial ones), which this
// tool verifies while timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cusplab/grid.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/par.hpp"

using namespace cusplab;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bitwise_equal(const Field& a, const Field& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i] && !(std::isnan(a[i]) && std::isnan(b[i]))) return false;
  return true;
}

}  // namespace

int main() {
  const std::ptrdiff_t n = 1 << 21;
  const Grid1D grid(-8.0, 8.0, n);
  Field f(n), g(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    f[i] = std::sin(3.0 * x) * std::exp(-0.1 * x * x);
    g[i] = std::cos(2.0 * x) / (1.0 + x * x);
  }
  const int reps = 20;

  std::printf("kernel benchmark: n = %td, %d reps, %d threads\n", n, reps,
              par::max_threads());
  std::printf("%-14s %12s %12s %9s %s\n", "kernel", "serial(ms)",
              "parallel(ms)", "speedup", "bitwise");

  bool all_equal = true;
  const auto row = [&](const char* name, const std::function<Field()>& ser,
                       const std::function<Field()>& par) {
    Field rs, rp;
    const double ts = time_ms([&] { rs = ser(); }, reps);
    const double tp = time_ms([&] { rp = par(); }, reps);
    const bool eq = bitwise_equal(rs, rp);
    all_equal = all_equal && eq;
    std::printf("%-14s %12.3f %12.3f %8.2fx %s\n", name, ts, tp, ts / tp,
                eq ? "yes" : "NO");
  };

  row("deriv1", [&] { return deriv1(f, grid.dx, false); },
      [&] { return deriv1(f, grid.dx, true); });
  row("deriv2", [&] { return deriv2(f, grid.dx, false); },
      [&] { return deriv2(f, grid.dx, true); });
  row("deriv3", [&] { return deriv3(f, grid.dx, false); },
      [&] { return deriv3(f, grid.dx, true); });
  row("deriv1_o6", [&] { return deriv1_o6(f, grid.dx, false); },
      [&] { return deriv1_o6(f, grid.dx, true); });

  // Scalar reductions: compare values exactly.
  {
    double vs = 0, vp = 0;
    const double ts = time_ms([&] { vs = trapz(f, grid.dx, false); }, reps);
    const double tp = time_ms([&] { vp = trapz(f, grid.dx, true); }, reps);
    const bool eq = (vs == vp);
    all_equal = all_equal && eq;
    std::printf("%-14s %12.3f %12.3f %8.2fx %s\n", "trapz", ts, tp, ts / tp,
                eq ? "yes" : "NO");
  }
  {
    double vs = 0, vp = 0;
    const double ts = time_ms([&] { vs = max_abs(f, false); }, reps);
    const double tp = time_ms([&] { vp = max_abs(f, true); }, reps);
    const bool eq = (vs == vp);
    all_equal = all_equal && eq;
    std::printf("%-14s %12.3f %12.3f %8.2fx %s\n", "max_abs", ts, tp, ts / tp,
                eq ? "yes" : "NO");
  }

  std::printf(all_equal ? "all kernels bitwise-identical\n"
                        : "BITWISE MISMATCH DETECTED\n");
  return all_equal ? 0 : 1;
}
