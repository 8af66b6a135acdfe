#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mlplab/grid.hpp"

namespace mlp {
namespace {

TEST(Grid, ZeroFunctionSamplesZero) {
  const auto gf = make_grid_function(Box::cube(1, 1.0), 16, [](auto) { return 0.0; },
                                     Extension::zero());
  for (double v : gf.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Grid, IdentityOnFourCells) {
  const auto gf = make_grid_function(Box::cube(1, 1.0), 4, [](auto x) { return x[0]; },
                                     Extension::zero());
  const double expected[] = {-0.75, -0.25, 0.25, 0.75};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(gf[i], expected[i]);
  EXPECT_EQ(gf.spacing(), 0.5);
}

TEST(Grid, LogSingularityStaysOffNodes) {
  const auto gf = make_grid_function(Box::cube(1, 8.0), 1024,
                                     [](auto x) { return std::log(std::fabs(x[0])); },
                                     Extension::zero());
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < gf.size(); ++i) {
    ASSERT_TRUE(std::isfinite(gf[i]));
    if (gf[i] < gf[argmin]) argmin = i;
  }
  EXPECT_TRUE(argmin == 511 || argmin == 512);
  EXPECT_EQ(gf[511], gf[512]);
}

TEST(Grid, NonFiniteSampleNamesNode) {
  try {
    make_grid_function(Box::cube(1, 1.0), 5, [](auto x) { return std::log(std::fabs(x[0])); },
                       Extension::zero());
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("0"), std::string::npos);
  }
}

TEST(Grid, RejectsBadGeometry) {
  auto one = [](auto) { return 1.0; };
  EXPECT_THROW(make_grid_function(Box::cube(1, 1.0), 3, one, Extension::zero()),
               std::invalid_argument);
  EXPECT_THROW(make_grid_function(Box::cube(3, 1.0), 8, one, Extension::zero()),
               std::invalid_argument);
  EXPECT_THROW(make_grid_function(Box::cube(1, -1.0), 8, one, Extension::zero()),
               std::invalid_argument);
  Box unequal{{0.0, 0.0}, {1.0, 2.0}};
  EXPECT_THROW(unequal.validate(), std::invalid_argument);
}

TEST(Grid, RowMajorAxisZeroSlowest) {
  const auto gf = make_grid_function(Box::cube(2, 1.0), 4,
                                     [](auto x) { return 10.0 * x[0] + x[1]; },
                                     Extension::zero());
  const auto p1 = gf.node(1);
  EXPECT_EQ(p1[0], -0.75);
  EXPECT_EQ(p1[1], -0.25);
  const auto p4 = gf.node(4);
  EXPECT_EQ(p4[0], -0.25);
  EXPECT_EQ(p4[1], -0.75);
  const long long idx[] = {1, 0};
  EXPECT_EQ(gf.flat_index(idx), 4u);
}

TEST(Grid, ExtensionPolicies) {
  auto rule = [](auto x) { return x[0]; };
  const Box box = Box::cube(1, 1.0);
  const auto zero = make_grid_function(box, 8, rule, Extension::zero());
  const auto per = make_grid_function(box, 8, rule, Extension::periodic());
  const auto hold = make_grid_function(box, 8, rule, Extension::edge_hold());
  const double out[] = {1.3};
  EXPECT_EQ(evaluate_extended(zero, out), 0.0);
  EXPECT_EQ(evaluate_extended(hold, out), hold[7]);
  const double wrapped[] = {1.3 - 2.0};
  EXPECT_EQ(evaluate_extended(per, out), evaluate_extended(per, wrapped));
  for (std::size_t i = 0; i < 8; ++i) {
    const auto x = zero.node(i);
    EXPECT_EQ(evaluate_extended(zero, x), zero[i]);
  }
  const long long far[] = {-3};
  EXPECT_EQ(per.lattice_value(far), per[5]);
}

TEST(Grid, AnalyticTailIsExact) {
  const double a[] = {0.3};
  auto rule = [](auto x) { return 2.0 * std::log(std::fabs(x[0] - 0.3)); };
  const auto gf = make_grid_function(Box::cube(1, 1.0), 64, rule, Extension::log_tail(2.0, a));
  for (double x : {2.0, -2.7, 5.5}) {
    const double p[] = {x};
    EXPECT_EQ(evaluate_extended(gf, p), 2.0 * std::log(std::fabs(x - 0.3)));
  }
}

TEST(Grid, ExtensionTextRoundTrip) {
  const double a[] = {0.25, -1.5};
  for (const auto& e : {Extension::zero(), Extension::periodic(), Extension::edge_hold(),
                        Extension::log_tail(-0.5, a)}) {
    EXPECT_EQ(Extension::parse(e.to_string()), e);
  }
  EXPECT_THROW(Extension::parse("mirror"), std::invalid_argument);
}

TEST(Grid, IntegrateConstantExactly) {
  const auto gf = make_grid_function(Box::cube(1, 1.0), 1024, [](auto) { return 2.5; },
                                     Extension::zero());
  EXPECT_EQ(integrate(gf), 2.5 * 2.0);
  const auto g2 = make_grid_function(Box::cube(2, 2.0), 64, [](auto) { return -3.0; },
                                     Extension::zero());
  EXPECT_EQ(integrate(g2), -3.0 * 16.0);
}

TEST(Grid, IntegrateOddFunctionVanishes) {
  const auto gf = make_grid_function(Box::cube(1, 3.0), 999,
                                     [](auto x) { return std::sin(x[0]) * std::exp(x[0] * x[0]); },
                                     Extension::zero());
  double sup = 0.0;
  for (double v : gf.samples()) sup = std::max(sup, std::fabs(v));
  EXPECT_LE(std::fabs(integrate(gf)), 1e-12 * sup * 6.0);
}

TEST(Grid, IntegrateQuadraticConverges) {
  // midpoint error for x^2 on [-1, 1] is h^2 / 6 exactly
  const std::size_t N = 4096;
  const auto gf = make_grid_function(Box::cube(1, 1.0), N, [](auto x) { return x[0] * x[0]; },
                                     Extension::zero());
  const double h = 2.0 / N;
  EXPECT_NEAR(integrate(gf), 2.0 / 3.0 - h * h / 6.0, 1e-14);
}

TEST(Grid, IntegrateIsLinear) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(256), b(256), c(256);
  for (std::size_t i = 0; i < 256; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    c[i] = 1.5 * a[i] - 0.25 * b[i];
  }
  const Box box = Box::cube(1, 2.0);
  const GridFunction fa(box, 256, a, Extension::zero());
  const GridFunction fb(box, 256, b, Extension::zero());
  const GridFunction fc(box, 256, c, Extension::zero());
  EXPECT_NEAR(integrate(fc), 1.5 * integrate(fa) - 0.25 * integrate(fb), 1e-12);
}

TEST(Grid, QuadratureWeightsSumToVolume) {
  const auto gf = make_grid_function(Box::cube(2, 1.5), 30, [](auto) { return 0.0; },
                                     Extension::zero());
  const auto q = quadrature_rule(gf);
  EXPECT_EQ(q.kind, "midpoint");
  EXPECT_EQ(q.count, 900u);
  EXPECT_NEAR(q.total(), 9.0, 1e-12);
}

TEST(Grid, DeterministicSampling) {
  auto rule = [](auto x) { return std::cos(x[0]) * std::sin(3.0 * x[1]); };
  const auto a = make_grid_function(Box::cube(2, 1.0), 48, rule, Extension::periodic());
  const auto b = make_grid_function(Box::cube(2, 1.0), 48, rule, Extension::periodic());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

}  // namespace
}  // namespace mlp
