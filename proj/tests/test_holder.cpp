#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cusplab/grid.hpp"
#include "cusplab/holder.hpp"
#include "cusplab/kernels.hpp"

using namespace cusplab;

namespace {

Field sample(const Grid1D& g, double (*f)(double)) {
  Field out(static_cast<std::size_t>(g.n));
  for (std::ptrdiff_t i = 0; i < g.n; ++i)
    out[static_cast<std::size_t>(i)] = f(g.x(i));
  return out;
}

double cusp35(double x) { return std::pow(std::abs(x), 0.6); }

}  // namespace

TEST_CASE("the 3/5-cusp has unit 3/5-seminorm") {
  // For f = |x|^{3/5} the quotient |f(x)-f(x')| / |x-x'|^{3/5} attains its
  // supremum 1 exactly on pairs through the origin.
  const Grid1D g(-1.0, 1.0, 2001);  // subsample stride 2 keeps x = 0
  const Field f = sample(g, cusp35);
  const double s = holder_seminorm(f, g, 0.6);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  // A denser subsample does not change the answer.
  CHECK(holder_seminorm(f, g, 0.6, 3000) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("seminorm is monotone in the exponent on small domains") {
  // With all pair distances <= 1, raising alpha shrinks denominators.
  const Grid1D g(-0.5, 0.5, 501);
  const Field f = sample(g, [](double x) { return std::sin(2.0 * x); });
  const double s6 = holder_seminorm(f, g, 0.6);
  const double s8 = holder_seminorm(f, g, 0.8);
  const double s10 = holder_seminorm(f, g, 1.0);
  CHECK(s6 > 0.0);
  CHECK(s8 >= s6);
  CHECK(s10 >= s8);
  // The Lipschitz seminorm of sin(2x) is its maximum slope 2 (attained in
  // the limit of close pairs; the discrete value is slightly below).
  CHECK(s10 == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(s10 <= 2.0 + 1e-12);
}

TEST_CASE("grid-density doubling moves the seminorm by under 2%") {
  const auto sem = [](std::ptrdiff_t n) {
    const Grid1D g(-1.0, 1.0, n);
    const Field f = sample(
        g, [](double x) { return std::tanh(3.0 * x) + 0.2 * std::sin(5.0 * x); });
    return holder_seminorm(f, g, 0.7);
  };
  const double a = sem(1001), b = sem(2001);
  CHECK(std::abs(a - b) <= 0.02 * b);
}

TEST_CASE("exclusion window removes the cusp contribution") {
  const Grid1D g(-1.0, 1.0, 2001);
  const Field f = sample(g, cusp35);
  const double s = holder_seminorm(f, g, 0.6, 2000, -1, -0.25, 0.25);
  // Away from the cusp the function is smooth; the quotient drops well
  // below 1 but stays order one.
  CHECK(s >= 0.5);
  CHECK(s <= 0.95);
}

TEST_CASE("must_include pins the steepest node into the subsample") {
  // A spike two nodes wide would be skipped by a coarse subsample unless
  // its index is forced in.
  const Grid1D g(-1.0, 1.0, 4001);
  Field f(4001, 0.0);
  f[1234] = 1.0;
  const double coarse = holder_seminorm(f, g, 0.6, 100);
  const double pinned = holder_seminorm(f, g, 0.6, 100, 1234);
  CHECK(coarse <= 1e-12);
  CHECK(pinned > 10.0);  // 1 / dx^{0.6} against a near neighbour
}

TEST_CASE("seminorm argument validation") {
  const Grid1D g(-1.0, 1.0, 101);
  const Field f = sample(g, cusp35);
  CHECK_THROWS_AS(holder_seminorm(f, g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(holder_seminorm(f, g, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(holder_seminorm(f, g, 0.6, 1), std::invalid_argument);
  const Field wrong(50, 0.0);
  CHECK_THROWS_AS(holder_seminorm(wrong, g, 0.6), std::invalid_argument);
}

TEST_CASE("power-law fit recovers an exact blow-up rate") {
  // value = 3 (T* - t)^{-1/2} with T* = 0.7.
  std::vector<SeminormPoint> pts;
  for (int i = 0; i < 12; ++i) {
    const double T = 0.5 * std::pow(0.7, i);  // spans a factor 0.7^11 ~ 1/50
    pts.push_back({0.7 - T, 3.0 * std::pow(T, -0.5)});
  }
  const LineFit lf = fit_blowup_rate(pts, 0.7);
  CHECK(lf.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::exp(lf.intercept) == doctest::Approx(3.0).epsilon(1e-12));

  // Too few samples.
  std::vector<SeminormPoint> few(pts.begin(), pts.begin() + 5);
  CHECK_THROWS_AS(fit_blowup_rate(few, 0.7), std::runtime_error);
  // Narrow time span: all T within a factor 2.
  std::vector<SeminormPoint> narrow;
  for (int i = 0; i < 10; ++i) {
    const double T = 0.5 - 0.02 * i;  // 0.5 .. 0.32
    narrow.push_back({0.7 - T, 3.0 * std::pow(T, -0.5)});
  }
  CHECK_THROWS_AS(fit_blowup_rate(narrow, 0.7), std::runtime_error);
}

TEST_CASE("expected rate exponents") {
  CHECK(expected_rate_exponent(0.6) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(expected_rate_exponent(0.8) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(expected_rate_exponent(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
}
