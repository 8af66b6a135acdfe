#pragma once

// Discrete BMO / BLO / Lebesgue estimators over finite ball families.
//
// Ball membership is the strict inequality |x - center| < radius on cell
// centres. Family balls are described in half-cell integer units so that
// membership is decided in exact integer arithmetic.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlplab/grid.hpp"

namespace mlp {

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
  std::vector<std::size_t> members;  // flat sample indices, ascending
};

/// Ball with an arbitrary centre. Throws std::invalid_argument if the ball
/// leaves the box or contains no node.
Ball make_ball(const GridFunction& grid, std::span<const double> center, double radius);

bool ball_inside_box(const GridFunction& grid, std::span<const double> center, double radius);

enum class FamilyPolicy { dyadic_all_centers, dyadic_strided, exhaustive };

class BallFamily {
 public:
  /// Radii h * 2^j, j = 0..floor(log2(L/h)), centred at every `stride`-th
  /// node per axis; only balls inside the box are kept.
  static BallFamily dyadic(const GridFunction& grid, std::size_t stride = 1);
  /// Every distinct discrete ball: all intervals in 1D, all node centres with
  /// every integer squared radius in 2D. Oracle use only (N <= 512 in 1D,
  /// N <= 32 in 2D).
  static BallFamily exhaustive(const GridFunction& grid);

  FamilyPolicy policy() const { return policy_; }
  std::size_t stride() const { return stride_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool matches(const GridFunction& gf) const;

  Ball ball(std::size_t k) const;
  /// Fills `out` with the member indices of ball k (cleared first).
  void members(std::size_t k, std::vector<std::size_t>& out) const;
  double radius(std::size_t k) const;
  std::vector<double> center(std::size_t k) const;

 private:
  struct Entry {
    std::int64_t c[kMaxDim];  // doubled centre, in units of h/2 from node 0 minus h/2
    std::int64_t r2;          // squared radius in units of (h/2)^2
  };
  BallFamily(const GridFunction& grid, FamilyPolicy policy, std::size_t stride);
  void add_if_inside(const Entry& e);

  Box box_;
  std::size_t points_ = 0;
  double spacing_ = 0.0;
  FamilyPolicy policy_ = FamilyPolicy::dyadic_all_centers;
  std::size_t stride_ = 1;
  std::vector<Entry> entries_;
};

/// Supremum over a family with the ball that attains it (smallest index on
/// ties). `witness` is SIZE_MAX for an empty family.
struct Supremum {
  double value = 0.0;
  std::size_t witness = SIZE_MAX;
};

double mean_over(const GridFunction& gf, const Ball& ball);
double mean_over(std::span<const double> samples, std::span<const std::size_t> members);

Supremum bmo_seminorm(const GridFunction& gf, const BallFamily& fam);
Supremum blo_constant(const GridFunction& gf, const BallFamily& fam);

struct LebesgueNorms {
  double lp = 0.0;
  double linf = 0.0;
  double weak_lp = 0.0;
  double weak_level = 0.0;  // lambda attaining the weak-L^p supremum
};

/// Throws std::invalid_argument for p <= 0.
LebesgueNorms lebesgue_norms(const GridFunction& gf, double p);

struct NormReport {
  std::string function_id;
  double bmo = 0.0;
  double blo = 0.0;
  double linf = 0.0;
  double p = 1.0;
  double lp = 0.0;
  double weak_lp = 0.0;
  Ball bmo_witness;
  Ball blo_witness;
};

NormReport compute_norms(const GridFunction& gf, const BallFamily& fam, double p,
                         std::string function_id = {});

/// `function_id, bmo, blo, linf, p, lp, weak_lp, witness_center, witness_radius`
/// with the BMO witness; 2D centres are space-separated.
void write_norm_csv_header(std::ostream& out);
void write_norm_csv_row(std::ostream& out, const NormReport& r);

struct GrowthRow {
  int k = 0;
  double oscillation = 0.0;      // mean of |f - f_B| over 2^k B
  double mean_difference = 0.0;  // |f_{2^k B} - f_B|
};

/// Rows for k = 0..k_max. Throws std::out_of_range naming the largest valid
/// k when 2^k_max B leaves the box.
std::vector<GrowthRow> oscillation_growth(const GridFunction& gf, const Ball& base, int k_max);

/// Largest violation of F(x) - min_B F <= max_{y in B} |F(x) - F(y)| over all
/// family balls and members (0 when the relation holds everywhere).
double essinf_esssup_violation(const GridFunction& gf, const BallFamily& fam);

}  // namespace mlp
