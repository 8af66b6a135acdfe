#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "convolution.hpp"
#include "mlplab/grid_io.hpp"
#include "mlplab/operators.hpp"

namespace mlp {
namespace {

GridFunction random_input(std::size_t N, double L, Extension ext, unsigned seed, int n = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s(n == 1 ? N : N * N);
  for (auto& v : s) v = u(rng);
  return GridFunction(Box::cube(n, L), N, std::move(s), ext);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

const KernelSpec& tensor2() {
  static const KernelSpec k = builtin_kernel("tensor-odd-gaussian", {2, 1, {}});
  return k;
}

TEST(TGridTest, LogMidpointNodes) {
  const auto tg = TGrid::log_spaced(0.01, 16.0, 40);
  ASSERT_EQ(tg.nodes.size(), 40u);
  double total = 0.0;
  for (std::size_t k = 0; k < tg.count; ++k) {
    EXPECT_GT(tg.nodes[k], 0.01);
    EXPECT_LT(tg.nodes[k], 16.0);
    if (k) EXPECT_GT(tg.nodes[k], tg.nodes[k - 1]);
    total += tg.weights[k];
  }
  EXPECT_NEAR(total, std::log(1600.0), 1e-12);
  EXPECT_THROW(TGrid::log_spaced(0.1, 1.0, 7), std::invalid_argument);
  EXPECT_THROW(TGrid::log_spaced(1.0, 1.0, 16), std::invalid_argument);
  EXPECT_THROW(TGrid::log_spaced(0.0, 1.0, 16), std::invalid_argument);
  const auto f = random_input(128, 4.0, Extension::zero(), 1);
  const auto d = TGrid::defaults(f);
  EXPECT_EQ(d.t_min, f.spacing());
  EXPECT_EQ(d.t_max, 8.0);
  EXPECT_EQ(d.count, 64u);
}

TEST(ConeSpecTest, TruncationRadius) {
  const ConeSpec cone;
  const double t = 0.5;
  const double r = cone.truncation_radius(t, 8.0, 1);
  EXPECT_NEAR(std::pow(t / (t + r), 8.0), 1e-8, 1e-20);
  EXPECT_EQ(cone.truncation_radius(t, 1e6, 1), t);
}

TEST(OperatorKindTest, Names) {
  for (auto k : {OperatorKind::g, OperatorKind::S, OperatorKind::gstar, OperatorKind::g_prime,
                 OperatorKind::S_prime, OperatorKind::gstarstar}) {
    EXPECT_EQ(parse_operator_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_operator_kind("g*"), OperatorKind::gstar);
  EXPECT_EQ(parse_operator_kind("g**"), OperatorKind::gstarstar);
  EXPECT_THROW(parse_operator_kind("h"), std::invalid_argument);
  EXPECT_TRUE(needs_lambda(OperatorKind::gstarstar));
  EXPECT_FALSE(needs_lambda(OperatorKind::S));
}

TEST(GtField, IndicatorProductOracle) {
  // tensor G_t at a node equals the product of two one-variable midpoint sums
  const std::size_t N = 128;
  const double L = 2.0;
  auto ind = [](auto x) { return x[0] > 0.0 && x[0] < 1.0 ? 1.0 : 0.0; };
  const auto f = make_grid_function(Box::cube(1, L), N, ind, Extension::zero());
  const GridFunction fs[] = {f, f};
  const double t = 0.5;
  const auto G = gt_field(tensor2(), fs, t);
  const double h = f.spacing();
  for (std::size_t xi : {40u, 63u, 64u, 80u}) {
    const double x = f.node(xi)[0];
    double one = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double y = f.node(j)[0];
      const double u = (x - y) / t;
      if (std::fabs(x - y) <= std::floor(t * 6.5 / h) * h + 1e-12) {
        one += u * std::exp(-u * u) / t * f[j] * h;
      }
    }
    EXPECT_NEAR(G[xi], one * one, 1e-13) << xi;
  }
}

TEST(GtField, ZeroInputGivesZero) {
  const auto f = random_input(64, 4.0, Extension::zero(), 2);
  const GridFunction z(Box::cube(1, 4.0), 64, std::vector<double>(64, 0.0), Extension::zero());
  const GridFunction fs[] = {f, z};
  const auto G = gt_field(tensor2(), fs, 0.7);
  for (double v : G.samples()) EXPECT_EQ(v, 0.0);
}

TEST(GtField, FastMatchesDirect) {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const Extension ext = seed % 2 ? Extension::periodic() : Extension::zero();
    const auto a = random_input(256, 4.0, ext, seed);
    const auto b = random_input(256, 4.0, ext, seed + 100);
    const GridFunction fs[] = {a, b};
    const double t = 0.05 * seed * seed;
    const auto direct = gt_field(tensor2(), fs, t);
    const auto fast = tensor_fast_gt(tensor2(), fs, t);
    EXPECT_LE(max_diff(direct.samples(), fast.samples()), 1e-12 * max_abs(direct.samples()));
  }
}

TEST(GtField, FastMatchesDirectIn2D) {
  const auto k = builtin_kernel("tensor-odd-gaussian", {2, 2, {}});
  const auto a = random_input(24, 2.0, Extension::periodic(), 5, 2);
  const auto b = random_input(24, 2.0, Extension::periodic(), 6, 2);
  const GridFunction fs[] = {a, b};
  const auto direct = gt_field(k, fs, 0.4);
  const auto fast = tensor_fast_gt(k, fs, 0.4);
  EXPECT_LE(max_diff(direct.samples(), fast.samples()), 1e-12 * max_abs(direct.samples()));
}

TEST(GtField, Errors) {
  const auto a = random_input(64, 4.0, Extension::zero(), 1);
  const auto b = random_input(32, 4.0, Extension::zero(), 1);
  const GridFunction mixed[] = {a, b};
  EXPECT_THROW(gt_field(tensor2(), mixed, 1.0), std::invalid_argument);
  const GridFunction one[] = {a};
  EXPECT_THROW(gt_field(tensor2(), one, 1.0), std::invalid_argument);
  const GridFunction two[] = {a, a};
  EXPECT_THROW(gt_field(tensor2(), two, 0.0), std::invalid_argument);
  EXPECT_THROW(tensor_fast_gt(as_non_convolution(tensor2()), two, 1.0), std::invalid_argument);
}

TEST(PaddedConvolution, FftMatchesDirect) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {1, 2}) {
    const std::size_t N = n == 1 ? 100 : 20;
    const std::size_t P = 7;
    const std::size_t side = N + 2 * P;
    std::vector<double> ext(n == 1 ? side : side * side);
    std::vector<double> st(n == 1 ? 2 * P + 1 : (2 * P + 1) * (2 * P + 1));
    for (auto& v : ext) v = u(rng);
    for (auto& v : st) v = u(rng);
    const auto d = detail::padded_convolution_direct(ext, st, N, P, n);
    const auto f = detail::padded_convolution_fft(ext, st, N, P, n);
    const auto a = detail::padded_convolution(ext, st, N, P, n);
    EXPECT_LE(max_diff(d, f), 1e-12 * max_abs(d));
    EXPECT_LE(max_diff(d, a), 1e-12 * max_abs(d));
    if (n == 1) {
      // out[x] = sum_d st[d + P] ext[x + P - d]
      double ref = 0.0;
      for (long long dd = -7; dd <= 7; ++dd) ref += st[dd + 7] * ext[static_cast<std::size_t>(3 + 7 - dd)];
      EXPECT_NEAR(d[3], ref, 1e-13);
    }
  }
}

TEST(Operators, VanishOnConstants) {
  const auto tg = TGrid::log_spaced(1.0 / 32.0, 16.0, 32);
  const GridFunction c(Box::cube(1, 8.0), 512, std::vector<double>(512, 3.7),
                       Extension::periodic());
  const auto f = random_input(512, 8.0, Extension::periodic(), 4);
  for (int slot = 0; slot < 2; ++slot) {
    const GridFunction fs[] = {slot ? f : c, slot ? c : f};
    const auto stack = compute_gt_stack(tensor2(), fs, tg);
    for (auto kind : {OperatorKind::g, OperatorKind::S, OperatorKind::gstar}) {
      const auto F = evaluate_operator(kind, tensor2(), stack, 8.0);
      EXPECT_LE(max_abs(F.values.samples()), 1e-12 * 3.7 * max_abs(f.samples()))
          << to_string(kind);
    }
  }
}

TEST(Operators, Homogeneity) {
  const auto tg = TGrid::log_spaced(0.0625, 8.0, 16);
  const auto a = random_input(128, 4.0, Extension::zero(), 21);
  const auto b = random_input(128, 4.0, Extension::zero(), 22);
  std::vector<double> sa(a.samples().begin(), a.samples().end());
  std::vector<double> sb(b.samples().begin(), b.samples().end());
  for (auto& v : sa) v *= -2.0;
  for (auto& v : sb) v *= 0.75;
  const GridFunction base[] = {a, b};
  const GridFunction scaled[] = {a.with_samples(sa), b.with_samples(sb)};
  const auto s0 = compute_gt_stack(tensor2(), base, tg);
  const auto s1 = compute_gt_stack(tensor2(), scaled, tg);
  for (auto kind : {OperatorKind::g, OperatorKind::S, OperatorKind::gstar}) {
    const auto F0 = evaluate_operator(kind, tensor2(), s0, 8.0);
    const auto F1 = evaluate_operator(kind, tensor2(), s1, 8.0);
    const auto v0 = F0.values.samples();
    const auto v1 = F1.values.samples();
    for (std::size_t i = 0; i < v0.size(); ++i) {
      EXPECT_NEAR(v1[i], 1.5 * v0[i], 1e-12 * max_abs(v0)) << to_string(kind);
      EXPECT_GE(v0[i], 0.0);
    }
  }
}

TEST(Operators, AreaIntegralSpikeOracle) {
  // independent S from a precomputed stack: sum_k w_k / t^n sum_{|z - x| < t} G_k(z)^2 h
  const auto tg = TGrid::log_spaced(0.125, 4.0, 12);
  const auto a = random_input(64, 2.0, Extension::zero(), 31);
  const auto b = random_input(64, 2.0, Extension::zero(), 32);
  const GridFunction fs[] = {a, b};
  const auto stack = compute_gt_stack(tensor2(), fs, tg, GtPath::direct);
  const auto S = area_integral(tensor2(), stack);
  const auto gs = g_star_lambda(tensor2(), stack, 5.0);
  const double h = a.spacing();
  for (std::size_t x = 0; x < 64; x += 7) {
    long double s = 0.0L;
    long double gsum = 0.0L;
    for (std::size_t k = 0; k < tg.count; ++k) {
      const double t = tg.nodes[k];
      const double R = std::max(t, t * (std::pow(1e-8, -1.0 / 5.0) - 1.0));
      for (std::size_t z = 0; z < 64; ++z) {
        const double d = std::fabs(a.node(x)[0] - a.node(z)[0]);
        const long double g2 = static_cast<long double>(stack.fields[k][z]) * stack.fields[k][z];
        if (d < t) s += g2 * h * tg.weights[k] / t;
        if (d <= R) gsum += std::pow(t / (t + d), 5.0) * g2 * h * tg.weights[k] / t;
      }
    }
    EXPECT_NEAR(S.values[x], std::sqrt(static_cast<double>(s)), 1e-12 * max_abs(S.values.samples()));
    EXPECT_NEAR(gs.values[x], std::sqrt(static_cast<double>(gsum)),
                1e-12 * max_abs(gs.values.samples()));
  }
}

TEST(Operators, ConeDominationAndLambdaMonotone) {
  const auto tg = TGrid::log_spaced(0.0625, 8.0, 24);
  const auto a = random_input(128, 4.0, Extension::periodic(), 41);
  const auto b = random_input(128, 4.0, Extension::periodic(), 42);
  const GridFunction fs[] = {a, b};
  const auto stack = compute_gt_stack(tensor2(), fs, tg);
  const auto S = area_integral(tensor2(), stack);
  const auto g5 = g_star_lambda(tensor2(), stack, 5.0);
  const auto g9 = g_star_lambda(tensor2(), stack, 9.0);
  const double scale = std::pow(2.0, 5.0 / 2.0);
  for (std::size_t i = 0; i < 128; ++i) {
    EXPECT_LE(S.values[i], scale * g5.values[i] * (1.0 + 1e-12));
    EXPECT_LE(g9.values[i], g5.values[i] * (1.0 + 1e-12));
  }
}

TEST(Operators, LambdaChecksAndWarnings) {
  const auto tg = TGrid::log_spaced(0.125, 4.0, 8);
  const auto a = random_input(32, 2.0, Extension::zero(), 1);
  const GridFunction fs[] = {a, a};
  const auto stack = compute_gt_stack(tensor2(), fs, tg);
  EXPECT_THROW(g_star_lambda(tensor2(), stack, 1.0), std::invalid_argument);
  EXPECT_THROW(g_star_lambda(tensor2(), stack, 0.5), std::invalid_argument);
  EXPECT_EQ(g_star_lambda(tensor2(), stack, 3.0).meta.warnings.size(), 2u);
  EXPECT_EQ(g_star_lambda(tensor2(), stack, 7.0).meta.warnings.size(), 1u);
  EXPECT_TRUE(g_star_lambda(tensor2(), stack, 8.0).meta.warnings.empty());
}

TEST(Operators, SplitIsPythagorean) {
  const auto tg = TGrid::log_spaced(0.0625, 8.0, 32);
  const auto a = random_input(128, 4.0, Extension::zero(), 51);
  const auto b = random_input(128, 4.0, Extension::zero(), 52);
  const GridFunction fs[] = {a, b};
  const auto stack = compute_gt_stack(tensor2(), fs, tg);
  const auto g = g_function(tensor2(), stack);
  const double g2max = std::pow(max_abs(g.values.samples()), 2);
  for (double r : {0.1, 1.0, 3.0}) {
    const auto [lo, hi] = split_g(tensor2(), stack, r);
    for (std::size_t i = 0; i < 128; ++i) {
      const double sum = lo.values[i] * lo.values[i] + hi.values[i] * hi.values[i];
      EXPECT_NEAR(sum, g.values[i] * g.values[i], 1e-12 * g2max);
    }
  }
  const auto [all, none] = split_g(tensor2(), stack, 8.0);
  EXPECT_EQ(max_abs(none.values.samples()), 0.0);
  EXPECT_LE(max_diff(all.values.samples(), g.values.samples()), 1e-14 * std::sqrt(g2max));
  EXPECT_THROW(split_g(tensor2(), stack, 0.0625), std::invalid_argument);
  EXPECT_THROW(split_g(tensor2(), stack, 9.0), std::invalid_argument);
}

TEST(Operators, NonConvolutionReduction) {
  const auto tg = TGrid::log_spaced(0.125, 4.0, 10);
  const auto nc = as_non_convolution(tensor2());
  const auto a = random_input(32, 2.0, Extension::zero(), 61);
  const auto b = random_input(32, 2.0, Extension::zero(), 62);
  const GridFunction fs[] = {a, b};
  const auto sc = compute_gt_stack(tensor2(), fs, tg, GtPath::direct);
  const auto sn = compute_gt_stack(nc, fs, tg, GtPath::direct);
  const std::pair<OperatorKind, OperatorKind> pairs[] = {
      {OperatorKind::g, OperatorKind::g_prime},
      {OperatorKind::S, OperatorKind::S_prime},
      {OperatorKind::gstar, OperatorKind::gstarstar}};
  for (const auto& [conv, prime] : pairs) {
    const auto A = evaluate_operator(conv, tensor2(), sc, 8.0);
    const auto B = evaluate_operator(prime, nc, sn, 8.0);
    EXPECT_LE(max_diff(A.values.samples(), B.values.samples()),
              1e-12 * max_abs(A.values.samples()))
        << to_string(prime);
  }
  EXPECT_THROW(evaluate_operator(OperatorKind::g_prime, tensor2(), sc), std::invalid_argument);
  EXPECT_THROW(evaluate_operator(OperatorKind::g, nc, sn), std::invalid_argument);
  EXPECT_THROW(compute_gt_stack(nc, fs, tg, GtPath::fast), std::invalid_argument);
}

TEST(Operators, SavedFieldHasSidecar) {
  const auto tg = TGrid::log_spaced(0.125, 4.0, 8);
  const auto a = random_input(32, 2.0, Extension::zero(), 71);
  const GridFunction fs[] = {a, a};
  const auto F = g_star_lambda(tensor2(), fs, tg, 8.0);
  const auto dir = std::filesystem::temp_directory_path() / "mlplab_ops_test";
  std::filesystem::create_directories(dir);
  save_operator_field(dir / "gs.csv", F);
  const auto back = load_grid(dir / "gs.csv");
  EXPECT_EQ(max_diff(back.samples(), F.values.samples()), 0.0);
  const auto meta = read_metadata(dir / "gs.csv.meta");
  EXPECT_EQ(meta.at("kernel"), "tensor-odd-gaussian");
  EXPECT_EQ(meta.at("operator"), "gstar");
  EXPECT_EQ(meta.at("lambda"), "8");
  EXPECT_EQ(meta.at("t_count"), "8");
  for (const char* key : {"t_min", "t_max", "tail_bound", "path", "warnings"}) {
    EXPECT_TRUE(meta.count(key)) << key;
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mlp
