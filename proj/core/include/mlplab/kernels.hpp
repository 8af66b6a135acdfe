#pragma once

// Multilinear Littlewood-Paley kernels: construction, dilation, and numerical
// certification of the vanishing, size and smoothness conditions.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mlp {

enum class KernelForm { convolution, non_convolution, tensor };

/// Where the size and smoothness envelopes are centred. Convolution kernels
/// always use the origin; non-convolution kernels default to `at_x`, i.e.
/// (1 + sum |x - y_j|).
enum class SizeCentering { origin, at_x };

struct KernelConstants {
  double c_size = 1.0;
  double delta = 1.0;
  double c_smooth = 1.0;
  double gamma = 1.0;
  /// Gradient bound |grad_{y_i} K| <= c_gradient (1 + sum|y_j|)^{-(mn+delta+1)};
  /// 0 means not declared and not checked.
  double c_gradient = 0.0;
};

/// y holds the m kernel arguments back to back (m * n doubles).
using ConvolutionRule = std::function<double(std::span<const double> y)>;
using NonConvolutionRule =
    std::function<double(std::span<const double> x, std::span<const double> y)>;
/// A one-variable factor on R^n.
using Profile = std::function<double(std::span<const double> y)>;

struct KernelSpec {
  std::string id;
  int m = 1;
  int n = 1;
  KernelForm form = KernelForm::convolution;
  ConvolutionRule convolution;
  NonConvolutionRule non_convolution;
  std::vector<Profile> factors;
  KernelConstants constants;
  /// Per-axis radius beyond which |K| (or each tensor factor) is below
  /// roughly 1e-16 of its peak.
  double support_radius_hint = 1.0;
  SizeCentering centering = SizeCentering::origin;

  /// Undilated kernel. `x` is ignored for convolution and tensor forms.
  double operator()(std::span<const double> x, std::span<const double> y) const;
  bool is_tensor() const { return form == KernelForm::tensor; }
};

/// Builds a tensor kernel, checking that every factor integrates to zero
/// within 1e-10 over [-hint, hint]^n.
KernelSpec make_tensor_kernel(std::string id, int n, std::vector<Profile> factors,
                              KernelConstants constants, double support_radius_hint);

/// K'(x, y_1..y_m) := K(x - y_1, ..., x - y_m) for a convolution or tensor K.
KernelSpec as_non_convolution(const KernelSpec& k);

struct KernelParams {
  int m = 1;
  int n = 1;
  std::map<std::string, double> extra;
};

/// Names: mexican-hat, odd-gaussian, tensor-odd-gaussian, gaussian-no-vanish,
/// shifted-nonconv. Throws std::invalid_argument for unknown names or
/// out-of-range parameters.
KernelSpec builtin_kernel(const std::string& name, const KernelParams& params = {});

/// Parses "<name>[:k=v,k=v]" where m and n may appear among the parameters.
KernelSpec parse_kernel(const std::string& text, int default_m, int default_n);

std::vector<std::string> builtin_kernel_names();

/// t^{-mn} K(x/t, y/t) (x ignored for convolution forms). Throws for t <= 0.
double eval_dilated(const KernelSpec& k, double t, std::span<const double> x,
                    std::span<const double> y);

/// Upper bound, from the declared size condition, on the mass of |K| outside
/// the cube max_j |y_j|_inf <= radius (dilation invariant when radius scales
/// with t).
double size_tail_bound(const KernelSpec& k, double radius);

struct ProbePlan {
  double extent = 8.0;          // half-width of each vanishing quadrature slice
  double quad_spacing = 0.02;   // midpoint spacing for the slices
  std::size_t slices = 16;      // per variable
  double probe_extent = 6.0;    // region sampled by size/smoothness probes
  std::size_t size_probes = 20000;
  std::size_t smooth_probes = 20000;
  double displacement = 0.05;   // base displacement h; magnitudes {h, 2h, 4h}
  double fd_step = 1e-5;
  std::uint64_t seed = 1;
  double vanishing_tol = 1e-6;  // absolute, per unit c_size
  double ratio_tol = 1e-3;
};

struct ConditionResult {
  std::string name;
  double value = 0.0;            // defect (vanishing) or max ratio
  std::size_t probes = 0;
  std::size_t discarded = 0;
  bool pass = false;
  double fitted_constant = 0.0;  // smallest constant passing on these probes
};

struct KernelValidationReport {
  std::string kernel_id;
  std::vector<double> vanishing_defects;  // per variable, per unit c_size
  double vanishing_truncation_bound = 0.0;
  std::vector<ConditionResult> conditions;

  bool pass() const;
  const ConditionResult* find(const std::string& name) const;
};

/// Throws std::invalid_argument if plan.extent < support_radius_hint.
KernelValidationReport validate_kernel(const KernelSpec& k, const ProbePlan& plan = {});

/// One row per condition: condition,value,probes,discarded,pass,fitted_constant
void write_validation_csv(std::ostream& out, const KernelValidationReport& report);

}  // namespace mlp
