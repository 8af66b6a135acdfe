#pragma once

// Multilinear square functions on grids: G_t, g, the area integral S and
// g*_lambda, for convolution, tensor and non-convolution kernels.

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlplab/grid.hpp"
#include "mlplab/kernels.hpp"

namespace mlp {

/// Log-midpoint nodes on [t_min, t_max]; sum_k F(t_k) w_k approximates
/// the integral of F(t) dt / t.
struct TGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t count = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Throws std::invalid_argument unless 0 < t_min < t_max and count >= 8.
  static TGrid log_spaced(double t_min, double t_max, std::size_t count);
  /// t_min = h, t_max = 2L (L the box half width), 64 nodes.
  static TGrid defaults(const GridFunction& grid, std::size_t count = 64);
};

struct ConeSpec {
  double aperture = 1.0;
  double weight_eps = 1e-8;

  /// Radius beyond which (t / (t + r))^{lambda n} < weight_eps, never less
  /// than the cone radius t.
  double truncation_radius(double t, double lambda, int n) const;
};

/// g, S, g*_lambda and their non-convolution counterparts g', S', g**_lambda.
enum class OperatorKind { g, S, gstar, g_prime, S_prime, gstarstar };

std::string to_string(OperatorKind kind);
/// Accepts g, S, gstar (g*), g', S', gstarstar (g**).
OperatorKind parse_operator_kind(const std::string& text);
bool needs_lambda(OperatorKind kind);
bool is_non_convolution_kind(OperatorKind kind);

enum class GtPath { automatic, direct, fast };

std::string to_string(GtPath path);

struct OperatorMeta {
  std::string kernel_id;
  OperatorKind kind = OperatorKind::g;
  TGrid tgrid;
  double lambda = 0.0;
  /// Size-condition bound on the kernel mass dropped by the y truncation.
  double tail_bound = 0.0;
  std::string path;
  std::vector<std::string> warnings;
};

struct OperatorField {
  GridFunction values;
  OperatorMeta meta;
};

/// Direct quadrature of G_t at every node. Each y_i ranges over lattice
/// offsets |x - y_i|_inf <= floor(t * support_radius_hint / h) * h, read
/// through the extension policy outside the box.
GridFunction gt_field(const KernelSpec& k, std::span<const GridFunction> f, double t);

/// Same sum for tensor kernels, computed as a product of per-factor
/// convolutions. Throws std::invalid_argument for other forms.
GridFunction tensor_fast_gt(const KernelSpec& k, std::span<const GridFunction> f, double t);

/// G_{t_k} for every node of the t-grid, computed once and shared by g, S
/// and g*_lambda.
struct GtStack {
  GridFunction grid;  // geometry of the inputs
  TGrid tgrid;
  std::vector<std::vector<double>> fields;
  GtPath path = GtPath::direct;
  std::string kernel_id;
};

GtStack compute_gt_stack(const KernelSpec& k, std::span<const GridFunction> f, const TGrid& tg,
                         GtPath path = GtPath::automatic);

OperatorField g_function(const KernelSpec& k, const GtStack& stack);
OperatorField area_integral(const KernelSpec& k, const GtStack& stack);
/// Throws std::invalid_argument for lambda <= 1; records a warning when
/// lambda <= 2m or lambda <= 3m + (2 delta + 2 gamma) / n.
OperatorField g_star_lambda(const KernelSpec& k, const GtStack& stack, double lambda,
                            const ConeSpec& cone = {});

OperatorField g_function(const KernelSpec& k, std::span<const GridFunction> f, const TGrid& tg,
                         GtPath path = GtPath::automatic);
OperatorField area_integral(const KernelSpec& k, std::span<const GridFunction> f,
                            const TGrid& tg, GtPath path = GtPath::automatic);
OperatorField g_star_lambda(const KernelSpec& k, std::span<const GridFunction> f,
                            const TGrid& tg, double lambda, GtPath path = GtPath::automatic,
                            const ConeSpec& cone = {});

/// Dispatches on `kind`; primed kinds require a non-convolution kernel and
/// unprimed kinds a convolution or tensor kernel.
OperatorField evaluate_operator(OperatorKind kind, const KernelSpec& k, const GtStack& stack,
                                double lambda = 0.0, const ConeSpec& cone = {});

/// (g_0, g_inf): t-nodes with t_k <= r and t_k > r. Requires
/// t_min < r <= t_max.
std::pair<OperatorField, OperatorField> split_g(const KernelSpec& k, const GtStack& stack,
                                                double r);

/// Writes the field through save_grid and a `<path>.meta` key=value sidecar.
void save_operator_field(const std::filesystem::path& path, const OperatorField& field);

}  // namespace mlp
