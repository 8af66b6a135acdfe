#include "mlplab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mlplab/numerics.hpp"

namespace mlp {
namespace {

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

bool is_sum_of_two_squares(std::int64_t v) {
  for (std::int64_t a = 0; a * a <= v; ++a) {
    const std::int64_t b = isqrt(v - a * a);
    if (b * b == v - a * a) return true;
  }
  return false;
}

double mean_abs_deviation(std::span<const double> s, std::span<const std::size_t> members,
                          double mean) {
  double acc = 0.0;
  for (std::size_t i : members) acc += std::fabs(s[i] - mean);
  return acc / static_cast<double>(members.size());
}

double member_min(std::span<const double> s, std::span<const std::size_t> members) {
  double m = s[members[0]];
  for (std::size_t i : members) m = std::min(m, s[i]);
  return m;
}

template <typename PerBall>
Supremum sweep(const GridFunction& gf, const BallFamily& fam, PerBall&& per_ball) {
  if (!fam.matches(gf)) throw std::invalid_argument("ball family built for a different grid");
  Supremum best;
  std::vector<std::size_t> buf;
  const auto s = gf.samples();
  for (std::size_t k = 0; k < fam.size(); ++k) {
    fam.members(k, buf);
    const double v = per_ball(s, std::span<const std::size_t>(buf));
    if (best.witness == SIZE_MAX || v > best.value) {
      best.value = v;
      best.witness = k;
    }
  }
  return best;
}

}  // namespace

bool ball_inside_box(const GridFunction& grid, std::span<const double> center, double radius) {
  const Box& b = grid.box();
  for (int a = 0; a < grid.dim(); ++a) {
    if (center[a] - radius < b.lower(a) || center[a] + radius > b.upper(a)) return false;
  }
  return true;
}

Ball make_ball(const GridFunction& grid, std::span<const double> center, double radius) {
  if (center.size() != static_cast<std::size_t>(grid.dim()) || !(radius > 0.0)) {
    throw std::invalid_argument("ball needs a centre of the grid's dimension and radius > 0");
  }
  if (!ball_inside_box(grid, center, radius)) {
    throw std::invalid_argument("ball B(" + format_double(center[0]) + ", " +
                                format_double(radius) + ") leaves the box");
  }
  Ball ball{std::vector<double>(center.begin(), center.end()), radius, {}};
  const double h = grid.spacing();
  const auto n = static_cast<long long>(grid.points_per_axis());
  long long lo[kMaxDim] = {0, 0};
  long long hi[kMaxDim] = {0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    const double u = (center[a] - grid.box().lower(a)) / h - 0.5;
    lo[a] = std::max(0LL, static_cast<long long>(std::floor(u - radius / h)) - 1);
    hi[a] = std::min(n - 1, static_cast<long long>(std::ceil(u + radius / h)) + 1);
  }
  const double r2 = radius * radius;
  if (grid.dim() == 1) {
    for (long long i = lo[0]; i <= hi[0]; ++i) {
      const double d = grid.lattice_coordinate(i, 0) - center[0];
      if (d * d < r2) ball.members.push_back(static_cast<std::size_t>(i));
    }
  } else {
    for (long long i = lo[0]; i <= hi[0]; ++i) {
      const double dx = grid.lattice_coordinate(i, 0) - center[0];
      for (long long j = lo[1]; j <= hi[1]; ++j) {
        const double dy = grid.lattice_coordinate(j, 1) - center[1];
        if (dx * dx + dy * dy < r2) {
          ball.members.push_back(static_cast<std::size_t>(i * n + j));
        }
      }
    }
  }
  if (ball.members.empty()) throw std::invalid_argument("ball contains no grid node");
  return ball;
}

// ---------------------------------------------------------------------------

BallFamily::BallFamily(const GridFunction& grid, FamilyPolicy policy, std::size_t stride)
    : box_(grid.box()),
      points_(grid.points_per_axis()),
      spacing_(grid.spacing()),
      policy_(policy),
      stride_(stride) {}

bool BallFamily::matches(const GridFunction& gf) const {
  return gf.points_per_axis() == points_ && gf.box().center == box_.center &&
         gf.box().half_width == box_.half_width;
}

void BallFamily::add_if_inside(const Entry& e) {
  const auto top = static_cast<std::int64_t>(2 * points_) - 1;
  for (int a = 0; a < box_.dim(); ++a) {
    const std::int64_t below = e.c[a] + 1;
    const std::int64_t above = top - e.c[a];
    if (below < 0 || above < 0 || below * below < e.r2 || above * above < e.r2) return;
  }
  entries_.push_back(e);
}

BallFamily BallFamily::dyadic(const GridFunction& grid, std::size_t stride) {
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  BallFamily fam(grid, stride == 1 ? FamilyPolicy::dyadic_all_centers
                                   : FamilyPolicy::dyadic_strided,
                 stride);
  const auto n = static_cast<std::int64_t>(grid.points_per_axis());
  // L / h = N / 2.
  int j_max = 0;
  while ((std::int64_t{2} << j_max) <= n) ++j_max;
  j_max -= 1;
  for (int j = 0; j <= j_max; ++j) {
    const std::int64_t r = std::int64_t{2} << j;  // 2^{j+1} half-cells = h 2^j
    Entry e{{0, 0}, r * r};
    if (grid.dim() == 1) {
      for (std::int64_t k = 0; k < n; k += static_cast<std::int64_t>(stride)) {
        e.c[0] = 2 * k;
        fam.add_if_inside(e);
      }
    } else {
      for (std::int64_t k0 = 0; k0 < n; k0 += static_cast<std::int64_t>(stride)) {
        for (std::int64_t k1 = 0; k1 < n; k1 += static_cast<std::int64_t>(stride)) {
          e.c[0] = 2 * k0;
          e.c[1] = 2 * k1;
          fam.add_if_inside(e);
        }
      }
    }
  }
  return fam;
}

BallFamily BallFamily::exhaustive(const GridFunction& grid) {
  BallFamily fam(grid, FamilyPolicy::exhaustive, 1);
  const auto n = static_cast<std::int64_t>(grid.points_per_axis());
  if (grid.dim() == 1) {
    if (n > 512) throw std::invalid_argument("exhaustive family limited to N <= 512 in 1D");
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = i; j < n; ++j) {
        const std::int64_t r = j - i + 1;
        fam.add_if_inside(Entry{{i + j, 0}, r * r});
      }
    }
  } else {
    if (n > 32) throw std::invalid_argument("exhaustive family limited to N <= 32 in 2D");
    std::vector<std::int64_t> thresholds;  // s with {d : |d|^2 < s} new
    for (std::int64_t s = 1; s <= 2 * n * n; ++s) {
      if (is_sum_of_two_squares(s - 1)) thresholds.push_back(s);
    }
    for (std::int64_t k0 = 0; k0 < n; ++k0) {
      for (std::int64_t k1 = 0; k1 < n; ++k1) {
        for (std::int64_t s : thresholds) fam.add_if_inside(Entry{{2 * k0, 2 * k1}, 4 * s});
      }
    }
  }
  return fam;
}

double BallFamily::radius(std::size_t k) const {
  return 0.5 * spacing_ * std::sqrt(static_cast<double>(entries_[k].r2));
}

std::vector<double> BallFamily::center(std::size_t k) const {
  std::vector<double> c(static_cast<std::size_t>(box_.dim()));
  for (int a = 0; a < box_.dim(); ++a) {
    c[a] = box_.lower(a) + 0.5 * spacing_ * (static_cast<double>(entries_[k].c[a]) + 1.0);
  }
  return c;
}

void BallFamily::members(std::size_t k, std::vector<std::size_t>& out) const {
  out.clear();
  const Entry& e = entries_[k];
  const auto n = static_cast<std::int64_t>(points_);
  const std::int64_t r = isqrt(e.r2) + 1;
  std::int64_t lo[kMaxDim] = {0, 0};
  std::int64_t hi[kMaxDim] = {0, 0};
  for (int a = 0; a < box_.dim(); ++a) {
    lo[a] = std::max<std::int64_t>(0, (e.c[a] - r) / 2 - 1);
    hi[a] = std::min<std::int64_t>(n - 1, (e.c[a] + r) / 2 + 1);
  }
  if (box_.dim() == 1) {
    for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
      const std::int64_t d = 2 * i - e.c[0];
      if (d * d < e.r2) out.push_back(static_cast<std::size_t>(i));
    }
  } else {
    for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
      const std::int64_t dx = 2 * i - e.c[0];
      for (std::int64_t j = lo[1]; j <= hi[1]; ++j) {
        const std::int64_t dy = 2 * j - e.c[1];
        if (dx * dx + dy * dy < e.r2) out.push_back(static_cast<std::size_t>(i * n + j));
      }
    }
  }
}

Ball BallFamily::ball(std::size_t k) const {
  Ball b{center(k), radius(k), {}};
  members(k, b.members);
  return b;
}

// ---------------------------------------------------------------------------

double mean_over(std::span<const double> samples, std::span<const std::size_t> members) {
  if (members.empty()) throw std::invalid_argument("mean over an empty ball");
  double acc = 0.0;
  for (std::size_t i : members) acc += samples[i];
  return acc / static_cast<double>(members.size());
}

double mean_over(const GridFunction& gf, const Ball& ball) {
  return mean_over(gf.samples(), ball.members);
}

Supremum bmo_seminorm(const GridFunction& gf, const BallFamily& fam) {
  return sweep(gf, fam, [](std::span<const double> s, std::span<const std::size_t> m) {
    return mean_abs_deviation(s, m, mean_over(s, m));
  });
}

Supremum blo_constant(const GridFunction& gf, const BallFamily& fam) {
  return sweep(gf, fam, [](std::span<const double> s, std::span<const std::size_t> m) {
    return mean_over(s, m) - member_min(s, m);
  });
}

LebesgueNorms lebesgue_norms(const GridFunction& gf, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("lebesgue_norms needs p > 0");
  const double cell = gf.cell_volume();
  std::vector<double> mag(gf.size());
  NeumaierSum acc;
  LebesgueNorms out;
  for (std::size_t i = 0; i < gf.size(); ++i) {
    mag[i] = std::fabs(gf[i]);
    acc.add(std::pow(mag[i], p));
    out.linf = std::max(out.linf, mag[i]);
  }
  out.lp = std::pow(acc.value() * cell, 1.0 / p);

  // m{|f| > lambda} is a step function of lambda; just below each distinct
  // magnitude v it equals h^n * #{|f| >= v}.
  std::sort(mag.begin(), mag.end(), std::greater<>());
  for (std::size_t i = 0; i < mag.size();) {
    std::size_t j = i;
    while (j < mag.size() && mag[j] == mag[i]) ++j;
    const double candidate = mag[i] * std::pow(cell * static_cast<double>(j), 1.0 / p);
    if (candidate > out.weak_lp) {
      out.weak_lp = candidate;
      out.weak_level = mag[i];
    }
    i = j;
  }
  return out;
}

NormReport compute_norms(const GridFunction& gf, const BallFamily& fam, double p,
                         std::string function_id) {
  NormReport r;
  r.function_id = std::move(function_id);
  const Supremum bmo = bmo_seminorm(gf, fam);
  const Supremum blo = blo_constant(gf, fam);
  const LebesgueNorms leb = lebesgue_norms(gf, p);
  r.bmo = bmo.value;
  r.blo = blo.value;
  r.linf = leb.linf;
  r.p = p;
  r.lp = leb.lp;
  r.weak_lp = leb.weak_lp;
  if (bmo.witness != SIZE_MAX) r.bmo_witness = fam.ball(bmo.witness);
  if (blo.witness != SIZE_MAX) r.blo_witness = fam.ball(blo.witness);
  return r;
}

void write_norm_csv_header(std::ostream& out) {
  out << "function_id,bmo,blo,linf,p,lp,weak_lp,witness_center,witness_radius\n";
}

void write_norm_csv_row(std::ostream& out, const NormReport& r) {
  std::string center;
  for (std::size_t a = 0; a < r.bmo_witness.center.size(); ++a) {
    center += (a ? " " : "") + format_double(r.bmo_witness.center[a]);
  }
  out << r.function_id << ',' << format_double(r.bmo) << ',' << format_double(r.blo) << ','
      << format_double(r.linf) << ',' << format_double(r.p) << ',' << format_double(r.lp) << ','
      << format_double(r.weak_lp) << ',' << center << ',' << format_double(r.bmo_witness.radius)
      << '\n';
}

std::vector<GrowthRow> oscillation_growth(const GridFunction& gf, const Ball& base, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
  int largest = -1;
  for (int k = 0; k <= k_max; ++k) {
    if (!ball_inside_box(gf, base.center, std::ldexp(base.radius, k))) break;
    largest = k;
  }
  if (largest < k_max) {
    throw std::out_of_range("dilate 2^k B leaves the box for k = " + std::to_string(largest + 1) +
                            "; largest valid k is " + std::to_string(largest));
  }
  const auto s = gf.samples();
  const double base_mean = mean_over(s, base.members);
  std::vector<GrowthRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    const Ball big = k == 0 ? base : make_ball(gf, base.center, std::ldexp(base.radius, k));
    GrowthRow row;
    row.k = k;
    row.oscillation = mean_abs_deviation(s, big.members, base_mean);
    row.mean_difference = std::fabs(mean_over(s, big.members) - base_mean);
    rows.push_back(row);
  }
  return rows;
}

double essinf_esssup_violation(const GridFunction& gf, const BallFamily& fam) {
  if (!fam.matches(gf)) throw std::invalid_argument("ball family built for a different grid");
  double worst = 0.0;
  std::vector<std::size_t> buf;
  const auto s = gf.samples();
  for (std::size_t k = 0; k < fam.size(); ++k) {
    fam.members(k, buf);
    const double lo = member_min(s, buf);
    double hi = lo;
    for (std::size_t i : buf) hi = std::max(hi, s[i]);
    for (std::size_t i : buf) {
      // max_y |F(x) - F(y)| = max(F(x) - min, max - F(x)).
      const double spread = std::max(s[i] - lo, hi - s[i]);
      worst = std::max(worst, (s[i] - lo) - spread);
    }
  }
  return worst;
}

}  // namespace mlp
