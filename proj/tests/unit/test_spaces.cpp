#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mlplab/spaces.hpp"

namespace mlp {
namespace {

GridFunction sample(int n, std::size_t N, double L, const PointRule& rule) {
  return make_grid_function(Box::cube(n, L), N, rule, Extension::zero());
}

GridFunction random_function(int n, std::size_t N, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> s(n == 1 ? N : N * N);
  for (auto& v : s) v = d(rng);
  return GridFunction(Box::cube(n, 1.0), N, std::move(s), Extension::zero());
}

// Recomputes membership from coordinates and both suprema by brute force.
struct Brute {
  double bmo = 0.0;
  double blo = 0.0;
};

Brute brute_force(const GridFunction& gf, const BallFamily& fam) {
  Brute out;
  for (std::size_t k = 0; k < fam.size(); ++k) {
    const auto c = fam.center(k);
    const double r = fam.radius(k);
    std::vector<double> vals;
    for (std::size_t i = 0; i < gf.size(); ++i) {
      const auto x = gf.node(i);
      double d2 = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
      // radii may be square roots of integers; nodes on the sphere are outside
      if (d2 < r * r * (1.0 - 1e-12)) vals.push_back(gf[i]);
    }
    long double mean = 0.0L;
    for (double v : vals) mean += v;
    mean /= vals.size();
    long double dev = 0.0L;
    for (double v : vals) dev += std::fabs(static_cast<long double>(v) - mean);
    dev /= vals.size();
    const double lo = *std::min_element(vals.begin(), vals.end());
    out.bmo = std::max(out.bmo, static_cast<double>(dev));
    out.blo = std::max(out.blo, static_cast<double>(mean - lo));
  }
  return out;
}

TEST(Spaces, MeanOverBalls) {
  const auto c = sample(1, 64, 1.0, [](auto) { return 3.5; });
  const double centre[] = {0.0};
  EXPECT_DOUBLE_EQ(mean_over(c, make_ball(c, centre, 0.5)), 3.5);
  const auto x = sample(1, 64, 1.0, [](auto p) { return p[0]; });
  EXPECT_NEAR(mean_over(x, make_ball(x, centre, 0.5)), 0.0, 1e-15);
}

TEST(Spaces, LogMeanOverLargeBall) {
  // average of log|x| over (-R, R) is log R - 1
  const auto f = sample(1, 1 << 14, 8.0, [](auto p) { return std::log(std::fabs(p[0])); });
  const double centre[] = {0.0};
  const double R = 2.0;
  EXPECT_NEAR(mean_over(f, make_ball(f, centre, R)), std::log(R) - 1.0, 1e-2);
}

TEST(Spaces, BallMembershipIsStrict) {
  const auto f = sample(1, 8, 1.0, [](auto) { return 0.0; });
  const double centre[] = {-0.125};  // node 3
  const Ball b = make_ball(f, centre, 0.25);
  ASSERT_EQ(b.members.size(), 1u);  // neighbours at distance exactly 0.25 are excluded
  EXPECT_EQ(b.members[0], 3u);
  const double outside[] = {0.9};
  EXPECT_THROW(make_ball(f, outside, 0.5), std::invalid_argument);
  EXPECT_FALSE(ball_inside_box(f, outside, 0.5));
}

TEST(Spaces, DyadicFamilyShape) {
  const auto f = sample(1, 64, 1.0, [](auto) { return 0.0; });
  const auto fam = BallFamily::dyadic(f);
  ASSERT_FALSE(fam.empty());
  const double h = f.spacing();
  for (std::size_t k = 0; k < fam.size(); ++k) {
    const double j = std::log2(fam.radius(k) / h);
    EXPECT_EQ(j, std::round(j));
    const auto c = fam.center(k);
    EXPECT_TRUE(ball_inside_box(f, c, fam.radius(k)));
  }
  const auto strided = BallFamily::dyadic(f, 4);
  EXPECT_LT(strided.size(), fam.size());
  EXPECT_EQ(strided.stride(), 4u);
}

TEST(Spaces, ExhaustiveFamilyHasEveryInterval) {
  const auto f = sample(1, 24, 1.0, [](auto) { return 0.0; });
  const auto fam = BallFamily::exhaustive(f);
  EXPECT_EQ(fam.size(), 24u * 25u / 2u);
  std::vector<std::size_t> m;
  for (std::size_t k = 0; k < fam.size(); ++k) {
    fam.members(k, m);
    ASSERT_FALSE(m.empty());
    EXPECT_EQ(m.back() - m.front() + 1, m.size());
  }
  EXPECT_THROW(BallFamily::exhaustive(sample(1, 1024, 1.0, [](auto) { return 0.0; })),
               std::invalid_argument);
}

TEST(Spaces, SupremaMatchBruteForce) {
  for (int n : {1, 2}) {
    const std::size_t N = n == 1 ? 64 : 16;
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const auto f = random_function(n, N, seed);
      for (const auto& fam : {BallFamily::dyadic(f), BallFamily::exhaustive(f)}) {
        const Brute b = brute_force(f, fam);
        EXPECT_NEAR(bmo_seminorm(f, fam).value, b.bmo, 1e-12 * std::max(1.0, b.bmo));
        EXPECT_NEAR(blo_constant(f, fam).value, b.blo, 1e-12 * std::max(1.0, b.blo));
      }
    }
  }
}

TEST(Spaces, ExhaustiveDominatesDyadic) {
  const auto f = random_function(1, 128, 7);
  const auto dy = BallFamily::dyadic(f);
  const auto ex = BallFamily::exhaustive(f);
  EXPECT_LE(bmo_seminorm(f, dy).value, bmo_seminorm(f, ex).value);
  EXPECT_LE(blo_constant(f, dy).value, blo_constant(f, ex).value);
}

TEST(Spaces, ConstantHasZeroSeminorms) {
  const auto f = sample(2, 16, 1.0, [](auto) { return -2.0; });
  const auto fam = BallFamily::dyadic(f);
  const auto bmo = bmo_seminorm(f, fam);
  EXPECT_EQ(bmo.value, 0.0);
  EXPECT_EQ(bmo.witness, 0u);  // ties resolve to the first ball
  EXPECT_EQ(blo_constant(f, fam).value, 0.0);
}

TEST(Spaces, SignFunctionBounds) {
  const auto f = sample(1, 256, 1.0, [](auto p) { return p[0] > 0.0 ? 1.0 : -1.0; });
  const auto fam = BallFamily::dyadic(f);
  const double bmo = bmo_seminorm(f, fam).value;
  EXPECT_GT(bmo, 0.9);
  EXPECT_LE(bmo, 1.0);
  const auto ind = sample(1, 256, 1.0, [](auto p) { return p[0] > 0.0 ? 1.0 : 0.0; });
  const double blo = blo_constant(ind, fam).value;
  EXPECT_GT(blo, 0.4);
  EXPECT_LE(blo, 1.0);
}

TEST(Spaces, BloIsNotSymmetric) {
  // -log|x| has a lower bound on every ball away from its pole; log|x| does not
  const auto plus = sample(1, 1024, 4.0, [](auto p) { return std::log(std::fabs(p[0])); });
  const auto minus = plus.with_samples([&] {
    std::vector<double> s(plus.samples().begin(), plus.samples().end());
    for (auto& v : s) v = -v;
    return s;
  }());
  const auto fam = BallFamily::dyadic(plus);
  EXPECT_EQ(bmo_seminorm(plus, fam).value, bmo_seminorm(minus, fam).value);
  EXPECT_GT(blo_constant(plus, fam).value, 2.0 * blo_constant(minus, fam).value);
}

TEST(Spaces, InclusionChainAndSquareInequality) {
  for (unsigned seed = 11; seed < 21; ++seed) {
    const auto f = random_function(1, 128, seed);
    const auto fam = BallFamily::dyadic(f);
    const double bmo = bmo_seminorm(f, fam).value;
    const double blo = blo_constant(f, fam).value;
    const double linf = lebesgue_norms(f, 2.0).linf;
    EXPECT_LE(blo, 2.0 * linf);
    EXPECT_LE(bmo, 2.0 * blo * (1.0 + 1e-14));
    std::vector<double> a(f.samples().begin(), f.samples().end()), sq(a);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = std::fabs(a[i]);
      sq[i] = a[i] * a[i];
    }
    const double blo_abs = blo_constant(f.with_samples(a), fam).value;
    const double blo_sq = blo_constant(f.with_samples(sq), fam).value;
    EXPECT_LE(blo_abs * blo_abs, blo_sq * (1.0 + 1e-12));
    EXPECT_EQ(essinf_esssup_violation(f, fam), 0.0);
  }
}

TEST(Spaces, ConstantShiftInvariance) {
  const auto f = random_function(1, 128, 4);
  std::vector<double> s(f.samples().begin(), f.samples().end());
  for (auto& v : s) v += 100.0;
  const auto g = f.with_samples(s);
  const auto fam = BallFamily::dyadic(f);
  EXPECT_NEAR(bmo_seminorm(g, fam).value, bmo_seminorm(f, fam).value, 1e-11);
  EXPECT_NEAR(blo_constant(g, fam).value, blo_constant(f, fam).value, 1e-11);
}

TEST(Spaces, LebesgueNormsOfIndicatorAndTwoValued) {
  const auto one = sample(1, 1024, 2.0, [](auto) { return 1.0; });
  const auto n1 = lebesgue_norms(one, 3.0);
  EXPECT_NEAR(n1.lp, std::pow(4.0, 1.0 / 3.0), 1e-12);
  EXPECT_EQ(n1.linf, 1.0);
  EXPECT_NEAR(n1.weak_lp, std::pow(4.0, 1.0 / 3.0), 1e-12);

  // 3 on a set of measure 1, 1 on a set of measure 3 (box [-2, 2])
  const auto two = sample(1, 1024, 2.0, [](auto p) { return p[0] < -1.0 ? 3.0 : 1.0; });
  for (double p : {0.5, 1.0, 2.0}) {
    const auto r = lebesgue_norms(two, p);
    EXPECT_NEAR(r.lp, std::pow(std::pow(3.0, p) + 3.0, 1.0 / p), 1e-12);
    const double weak = std::max(3.0 * 1.0, 1.0 * std::pow(4.0, 1.0 / p));
    EXPECT_NEAR(r.weak_lp, weak, 1e-12);
  }
  EXPECT_THROW(lebesgue_norms(two, 0.0), std::invalid_argument);
  EXPECT_THROW(lebesgue_norms(two, -1.0), std::invalid_argument);
}

TEST(Spaces, WeakNeverExceedsStrong) {
  for (unsigned seed = 1; seed < 10; ++seed) {
    const auto f = random_function(2, 24, seed);
    for (double p : {0.5, 1.0, 2.0, 4.0}) {
      const auto r = lebesgue_norms(f, p);
      EXPECT_LE(r.weak_lp, r.lp * (1.0 + 1e-12));
    }
  }
}

TEST(Spaces, LogGrowthIsLinearInK) {
  const auto f = sample(1, 4096, 8.0, [](auto p) { return std::log(std::fabs(p[0])); });
  const double centre[] = {0.0};
  const Ball base = make_ball(f, centre, 0.125);
  const auto rows = oscillation_growth(f, base, 6);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].mean_difference, 0.0);
  for (int k = 1; k <= 6; ++k) {
    const double expected = k * std::log(2.0);
    EXPECT_NEAR(rows[k].mean_difference, expected, 0.02 * expected);
  }
}

TEST(Spaces, GrowthBoundedByBmo) {
  const auto f = random_function(1, 512, 17);
  const auto fam = BallFamily::dyadic(f);
  const double bmo = bmo_seminorm(f, fam).value;
  const double centre[] = {f.node(255)[0]};
  const Ball base = make_ball(f, centre, f.spacing());
  const auto rows = oscillation_growth(f, base, 6);
  for (const auto& r : rows) EXPECT_LE(r.mean_difference, 3.0 * r.k * bmo + 1e-12);
}

TEST(Spaces, GrowthEscapeNamesLargestK) {
  const auto f = sample(1, 256, 1.0, [](auto) { return 0.0; });
  const double centre[] = {0.0};
  const Ball base = make_ball(f, centre, 0.125);
  try {
    oscillation_growth(f, base, 5);
    FAIL() << "expected out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("largest valid k is 3"), std::string::npos) << e.what();
  }
}

TEST(Spaces, NormCsvRow) {
  const auto f = random_function(1, 64, 2);
  const auto r = compute_norms(f, BallFamily::dyadic(f), 2.0, "rand");
  std::stringstream ss;
  write_norm_csv_header(ss);
  write_norm_csv_row(ss, r);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "function_id,bmo,blo,linf,p,lp,weak_lp,witness_center,witness_radius");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 8);
  EXPECT_EQ(row.rfind("rand,", 0), 0u);
}

}  // namespace
}  // namespace mlp
