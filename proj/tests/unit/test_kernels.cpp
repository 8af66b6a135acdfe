#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mlplab/kernels.hpp"

namespace mlp {
namespace {

ProbePlan plan_for(const KernelSpec& k) {
  ProbePlan plan;
  plan.extent = std::max(8.0, k.support_radius_hint + 0.5);
  return plan;
}

TEST(Kernels, TensorDilationExample) {
  // psi(y) = y e^{-y^2}, t = 1/2, y = (1/2, 1/2): t^{-2} psi(1)^2 = 4 e^{-2}
  const auto k = builtin_kernel("tensor-odd-gaussian", {2, 1, {}});
  const double y[] = {0.5, 0.5};
  EXPECT_NEAR(eval_dilated(k, 0.5, {}, y), 4.0 * std::exp(-2.0), 1e-15);
}

TEST(Kernels, DilationIdentityAndScaling) {
  const auto k = builtin_kernel("mexican-hat", {1, 2, {}});
  const double y[] = {0.3, -1.1};
  EXPECT_EQ(eval_dilated(k, 1.0, {}, y), k({}, y));
  const double t = 2.5;
  const double ty[] = {t * 0.3, t * -1.1};
  EXPECT_NEAR(eval_dilated(k, t, {}, ty), k({}, y) / (t * t), 1e-16);
  EXPECT_THROW(eval_dilated(k, 0.0, {}, y), std::invalid_argument);
  EXPECT_THROW(eval_dilated(k, -1.0, {}, y), std::invalid_argument);
}

TEST(Kernels, DilationPreservesIntegral) {
  const auto k = builtin_kernel("gaussian-no-vanish", {1, 1, {}});
  const double q = 0.01;
  const double t = 3.0;
  double base = 0.0;
  double dilated = 0.0;
  for (int i = -1000; i < 1000; ++i) {
    const double y[] = {(i + 0.5) * q};
    const double ty[] = {t * y[0]};
    base += k({}, y) * q;
    dilated += eval_dilated(k, t, {}, ty) * t * q;
  }
  EXPECT_NEAR(dilated, base, 1e-12 * base);
}

TEST(Kernels, TensorIsProductOfFactors) {
  const auto k = builtin_kernel("tensor-odd-gaussian", {3, 2, {}});
  const double y[] = {0.2, -0.4, 1.0, 0.5, -0.7, 0.1};
  double expect = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double a = y[2 * i];
    const double b = y[2 * i + 1];
    expect *= a * std::exp(-(a * a + b * b));
  }
  EXPECT_NEAR(k({}, y), expect, 1e-16);
}

TEST(Kernels, MexicanHatFourierNormalization) {
  // int psi(x) cos(xi x) dx = xi^2 exp(-xi^2) in one dimension
  const auto k = builtin_kernel("mexican-hat", {1, 1, {}});
  const double q = 0.005;
  for (double xi : {0.5, 1.0, 2.0}) {
    double acc = 0.0;
    for (int i = -8000; i < 8000; ++i) {
      const double y[] = {(i + 0.5) * q};
      acc += k({}, y) * std::cos(xi * y[0]) * q;
    }
    EXPECT_NEAR(acc, xi * xi * std::exp(-xi * xi), 1e-10);
  }
}

TEST(Kernels, BuiltinsPassValidation) {
  const std::pair<std::string, KernelParams> cases[] = {
      {"tensor-odd-gaussian", {1, 1, {}}}, {"tensor-odd-gaussian", {2, 1, {}}},
      {"tensor-odd-gaussian", {3, 1, {}}}, {"tensor-odd-gaussian", {1, 2, {}}},
      {"tensor-odd-gaussian", {2, 2, {}}}, {"odd-gaussian", {1, 1, {}}},
      {"mexican-hat", {1, 1, {}}},         {"mexican-hat", {1, 2, {}}},
  };
  for (const auto& [name, params] : cases) {
    const auto k = builtin_kernel(name, params);
    const auto r = validate_kernel(k, plan_for(k));
    for (const auto& c : r.conditions) {
      EXPECT_TRUE(c.pass) << name << " m=" << params.m << " n=" << params.n << ' ' << c.name
                          << " value " << c.value;
    }
    EXPECT_NE(r.find("vanishing"), nullptr);
    EXPECT_NE(r.find("size"), nullptr);
    EXPECT_NE(r.find("smoothness"), nullptr);
  }
}

TEST(Kernels, MexicanHatGradientChecked) {
  const auto k = builtin_kernel("mexican-hat", {1, 1, {}});
  const auto r = validate_kernel(k, plan_for(k));
  const auto* g = r.find("gradient");
  ASSERT_NE(g, nullptr);
  EXPECT_TRUE(g->pass);
}

TEST(Kernels, GaussianWithoutVanishingFails) {
  const auto k = builtin_kernel("gaussian-no-vanish", {1, 1, {}});
  const auto r = validate_kernel(k, plan_for(k));
  EXPECT_FALSE(r.pass());
  const auto* v = r.find("vanishing");
  ASSERT_NE(v, nullptr);
  EXPECT_FALSE(v->pass);
  EXPECT_NEAR(v->fitted_constant, std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_TRUE(r.find("size")->pass);
  EXPECT_TRUE(r.find("smoothness")->pass);
}

TEST(Kernels, ShiftedNonConvolutionPasses) {
  for (int m : {1, 2}) {
    const auto k = builtin_kernel("shifted-nonconv", {m, 1, {}});
    EXPECT_EQ(k.form, KernelForm::non_convolution);
    const auto r = validate_kernel(k, plan_for(k));
    const auto* xs = r.find("x-smoothness");
    ASSERT_NE(xs, nullptr);
    EXPECT_GT(xs->discarded, 0u);
    for (const auto& c : r.conditions) EXPECT_TRUE(c.pass) << m << ' ' << c.name << ' ' << c.value;
  }
}

TEST(Kernels, NonConvolutionViewMatches) {
  const auto k = builtin_kernel("tensor-odd-gaussian", {2, 1, {}});
  const auto nc = as_non_convolution(k);
  EXPECT_EQ(nc.form, KernelForm::non_convolution);
  const double x[] = {0.7};
  const double y[] = {0.2, 1.5};
  const double d[] = {0.5, -0.8};
  EXPECT_NEAR(nc(x, y), k({}, d), 1e-15);
  EXPECT_THROW(as_non_convolution(nc), std::invalid_argument);
}

TEST(Kernels, SizeTailBoundDecreases) {
  const auto k = builtin_kernel("tensor-odd-gaussian", {2, 1, {}});
  double prev = size_tail_bound(k, 1.0);
  EXPECT_GT(prev, 0.0);
  for (double r : {2.0, 4.0, 8.0}) {
    const double b = size_tail_bound(k, r);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Kernels, Errors) {
  EXPECT_THROW(builtin_kernel("no-such-kernel"), std::invalid_argument);
  EXPECT_THROW(builtin_kernel("mexican-hat", {2, 1, {}}), std::invalid_argument);
  EXPECT_THROW(builtin_kernel("tensor-odd-gaussian", {4, 1, {}}), std::invalid_argument);
  EXPECT_THROW(builtin_kernel("tensor-odd-gaussian", {1, 3, {}}), std::invalid_argument);
  EXPECT_THROW(builtin_kernel("shifted-nonconv", {1, 1, {{"amplitude", 1.5}}}),
               std::invalid_argument);
  EXPECT_THROW(builtin_kernel("odd-gaussian", {1, 1, {{"bogus", 1.0}}}), std::invalid_argument);
  const auto k = builtin_kernel("mexican-hat", {1, 1, {}});
  ProbePlan narrow;
  narrow.extent = 4.0;
  EXPECT_THROW(validate_kernel(k, narrow), std::invalid_argument);
  Profile even = [](std::span<const double> y) { return std::exp(-y[0] * y[0]); };
  EXPECT_THROW(make_tensor_kernel("even", 1, {even}, {}, 6.5), std::invalid_argument);
}

TEST(Kernels, ParseKernelText) {
  const auto k = parse_kernel("shifted-nonconv:amplitude=0.3,m=2", 1, 1);
  EXPECT_EQ(k.m, 2);
  EXPECT_EQ(k.n, 1);
  const double x[] = {std::numbers::pi / 2.0};
  const double y[] = {x[0] + 0.5, x[0] - 0.25};
  const double psi = [](double u) { return u * std::exp(-u * u); }(0.5) *
                     [](double u) { return u * std::exp(-u * u); }(-0.25);
  EXPECT_NEAR(k(x, y), 1.3 * psi, 1e-15);
  const auto d = parse_kernel("tensor-odd-gaussian", 3, 1);
  EXPECT_EQ(d.m, 3);
  EXPECT_THROW(parse_kernel("tensor-odd-gaussian:m", 1, 1), std::invalid_argument);
  EXPECT_EQ(builtin_kernel_names().size(), 5u);
}

TEST(Kernels, ValidationCsv) {
  const auto k = builtin_kernel("odd-gaussian", {1, 1, {}});
  const auto r = validate_kernel(k, plan_for(k));
  std::stringstream ss;
  write_validation_csv(ss, r);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "condition,value,probes,discarded,pass,fitted_constant");
  std::size_t rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, r.conditions.size());
}

}  // namespace
}  // namespace mlp
