#pragma once

// Test-function families and the ratio experiments built on them.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlplab/grid.hpp"
#include "mlplab/kernels.hpp"
#include "mlplab/operators.hpp"
#include "mlplab/spaces.hpp"

namespace mlp {

/// Geometry shared by every generated instance: [-L, L]^n with N points per
/// axis.
struct GridSpec {
  int n = 1;
  std::size_t N = 512;
  double L = 8.0;

  Box box() const { return Box::cube(n, L); }
  double spacing() const { return 2.0 * L / static_cast<double>(N); }
};

enum class FamilyKind {
  log_singularity,    // sign * scale * log|x - a|, analytic tail
  dyadic_martingale,  // +-sigma per dyadic generation, periodic
  smooth_bump,        // plateau bump, zero extension
  half_indicator,     // height on {x_0 > c}, edge-hold
  indicator,          // height on [lo, hi]^n, zero extension
  custom_file,
};

std::string to_string(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& text);

/// Every length is absolute, so the same family describes the same function
/// on any grid. With count > 1 the random parameters are redrawn per
/// instance from the seed.
struct TestFamily {
  FamilyKind kind = FamilyKind::smooth_bump;
  std::size_t count = 1;
  std::uint64_t seed = 1;
  // log-singularity: a uniform in [-spread, spread]^n
  double sign = 1.0;
  double scale = 1.0;
  // dyadic-martingale on the period [-extent, extent)^n
  int depth = 6;
  double sigma = 1.0;
  double extent = 8.0;
  // smooth-bump and indicators: centre / threshold drawn within spread
  double spread = 1.0;
  double width = 1.0;
  double height = 1.0;
  double lo = -1.0;
  double hi = 1.0;
  std::filesystem::path path;

  /// "<kind>[:k=v,...]", e.g. "dyadic-martingale:depth=5,sigma=0.5,count=4".
  static TestFamily parse(const std::string& text);
  std::string to_string() const;
};

struct Instance {
  std::string id;
  GridFunction f;
  PointRule rule;    // continuum generator; empty for custom files
  std::string note;  // e.g. a recorded singularity shift
};

/// Deterministic in (family, grid). A log singularity landing on a node is
/// moved by h/4 along every axis and the shift recorded in `note`.
std::vector<Instance> generate(const TestFamily& family, const GridSpec& grid);

/// f(x / s) on the same grid: resampled from `rule` when given, otherwise
/// read from f through its extension policy.
GridFunction dilate(const GridFunction& f, double s, const PointRule& rule = {});

/// m inputs per tuple; slot i of tuple j comes from family (j m + i) mod F
/// with a seed derived from (seed, j, i).
struct InputTuple {
  std::vector<std::string> ids;
  std::vector<GridFunction> inputs;
  std::vector<PointRule> rules;
};

std::vector<InputTuple> draw_tuples(const std::vector<TestFamily>& families,
                                    const GridSpec& grid, int m, std::size_t count,
                                    std::uint64_t seed);

enum class Denominator { bmo, linf };

struct RatioRow {
  std::string instance;
  std::vector<std::string> inputs;
  double numerator = 0.0;    // blo(F^2)
  double denominator = 0.0;  // prod bmo(f_i)^2 or prod linf(f_i)^2
  double ratio = 0.0;
  bool excluded = false;
  Ball witness;              // ball attaining blo(F^2)
  double square_gap = 0.0;   // blo(F)^2 - blo(F^2), <= 0 up to rounding
  bool square_ok = true;
  bool consistency_ok = true;  // linf study: prod bmo^2 <= prod (4 linf)^2
};

struct RatioReport {
  std::string study;
  OperatorKind kind = OperatorKind::g;
  std::string kernel_id;
  double lambda = 0.0;
  std::size_t requested = 0;
  std::size_t excluded = 0;
  std::vector<RatioRow> rows;
  std::vector<std::string> warnings;

  double max_ratio() const;
  double median_ratio() const;
  std::size_t reported() const { return rows.size() - excluded; }
  bool square_ok() const;
  bool consistency_ok() const;
};

/// Every kind shares one G_t stack per tuple. Fields are squared and
/// measured with blo over the dyadic family. A tuple is excluded when some
/// input has bmo <= 1e-12 max(1, linf) (resp. linf == 0).
std::vector<RatioReport> ratio_study(Denominator den, const std::vector<OperatorKind>& kinds,
                                     const KernelSpec& k, const std::vector<InputTuple>& tuples,
                                     const TGrid& tg, double lambda = 0.0,
                                     GtPath path = GtPath::automatic);

RatioReport bmo_blo_ratio_study(OperatorKind kind, const KernelSpec& k,
                                const std::vector<InputTuple>& tuples, const TGrid& tg,
                                double lambda = 0.0);
/// Throws std::invalid_argument if any input has unbounded (log) origin.
RatioReport linf_blo_ratio_study(OperatorKind kind, const KernelSpec& k,
                                 const std::vector<InputTuple>& tuples, const TGrid& tg,
                                 double lambda = 0.0);

void write_ratio_csv(std::ostream& out, const RatioReport& report);
void write_ratio_summary(std::ostream& out, const RatioReport& report);
/// Scatter of ratio against instance index.
void write_ratio_svg(std::ostream& out, const RatioReport& report);

/// Everything needed to rerun a ratio study on another grid.
struct StudyConfig {
  GridSpec grid;
  std::string kernel = "tensor-odd-gaussian";
  int m = 2;
  std::vector<OperatorKind> kinds = {OperatorKind::g};
  Denominator denominator = Denominator::bmo;
  double lambda = 8.0;
  std::vector<TestFamily> families;
  std::size_t tuples = 20;
  std::uint64_t seed = 1;
  double t_min = 0.0;  // 0: grid spacing
  double t_max = 0.0;  // 0: 2L
  std::size_t t_count = 64;

  KernelSpec kernel_spec() const;
  TGrid tgrid() const;
};

std::vector<RatioReport> run_study(const StudyConfig& config);

struct StabilityRow {
  std::string quantity;
  std::string variant;
  double base = 0.0;
  double refined = 0.0;
  double drift = 0.0;  // |refined - base| / |base|, 0 when both vanish
  bool flagged = false;  // only max ratios are judged; medians are informational
};

struct StabilityReport {
  double threshold = 0.25;
  std::vector<StabilityRow> rows;
  std::vector<std::string> omitted;

  bool pass() const;
};

/// Relative drift of a quantity between two runs.
double relative_drift(double base, double refined);

/// Variants: "N->2N", "L->2L" (h fixed), "t_min/2", "t_max*2". Variants whose
/// grid exceeds max_points samples are omitted and listed.
StabilityReport refinement_study(const StudyConfig& base,
                                 const std::vector<std::string>& variants,
                                 double threshold = 0.25,
                                 std::size_t max_points = std::size_t{1} << 22);

void write_stability_csv(std::ostream& out, const StabilityReport& report);

struct LpSanityRow {
  std::string instance;
  double scale = 1.0;
  double strong_ratio = 0.0;  // |F|_p / prod |f_i|_{p_i}
  double weak_ratio = 0.0;    // |F|_{1/m, inf} / prod |f_i|_1
  bool excluded = false;
};

struct LpSanityReport {
  OperatorKind kind = OperatorKind::g;
  std::vector<double> p_inputs;
  double p = 0.0;
  std::vector<LpSanityRow> rows;
  double strong_drift = 0.0;  // worst max/min - 1 across scales, per tuple
  double weak_drift = 0.0;
  double threshold = 0.25;
  bool endpoint = false;  // every p_i == 1: only the weak ratio is judged

  bool pass() const {
    return weak_drift <= threshold && (endpoint || strong_drift <= threshold);
  }
};

/// p = 0 derives p from 1/p = sum 1/p_i; otherwise it must match. Each
/// tuple is evaluated at every dilation scale.
LpSanityReport lp_sanity(OperatorKind kind, const KernelSpec& k,
                         const std::vector<InputTuple>& tuples, const std::vector<double>& p_i,
                         double p = 0.0, double lambda = 0.0,
                         const std::vector<double>& scales = {0.5, 1.0, 2.0},
                         std::size_t t_count = 64);

void write_lp_sanity_csv(std::ostream& out, const LpSanityReport& report);

/// |g f|_2^2 / |f|_2^2 for f(x) = exp(-|x|^2 / 2) cos(4 x_0) with the
/// mexican-hat kernel; the continuum value is 1/8.
double plancherel_ratio(int n, std::size_t N, double L, double t_min, double t_max,
                        std::size_t t_count = 64);

/// Seed for slot (a, b) derived from a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mlp
