#pragma once

// Uniform cell-centred grids over boxes in R^n (n = 1 or 2).
//
// Samples live at cell centres, so no node ever sits on the box centre for
// even point counts. Evaluation is piecewise constant: a point reads the
// sample of the cell it falls in, and points outside the box are resolved by
// the grid function's extension policy.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mlp {

inline constexpr int kMaxDim = 2;

struct Box {
  std::vector<double> center;
  std::vector<double> half_width;

  static Box cube(int dim, double half_width, double center = 0.0);

  int dim() const { return static_cast<int>(center.size()); }
  double lower(int axis) const { return center[axis] - half_width[axis]; }
  double upper(int axis) const { return center[axis] + half_width[axis]; }
  double volume() const;
  bool contains(std::span<const double> x) const;

  /// Throws std::invalid_argument unless the box is 1- or 2-dimensional with
  /// positive, equal half widths.
  void validate() const;
};

enum class ExtensionKind { periodic, edge_hold, zero, analytic_tail };

/// Closed-form continuation of a generator outside the sampled box.
///
/// The only tag currently defined is "log": params = {coef, a_0[, a_1]} and
/// the tail value is coef * log|x - a|.
struct AnalyticTail {
  std::string tag;
  std::vector<double> params;

  double operator()(std::span<const double> x) const;
  void validate(int dim) const;

  bool operator==(const AnalyticTail& other) const = default;
};

struct Extension {
  ExtensionKind kind = ExtensionKind::zero;
  AnalyticTail tail;

  static Extension periodic() { return {ExtensionKind::periodic, {}}; }
  static Extension edge_hold() { return {ExtensionKind::edge_hold, {}}; }
  static Extension zero() { return {ExtensionKind::zero, {}}; }
  static Extension log_tail(double coef, std::span<const double> singularity);

  /// "periodic", "edge-hold", "zero" or "analytic-tail:<tag>:<p0>:<p1>..."
  std::string to_string() const;
  static Extension parse(const std::string& text);

  bool operator==(const Extension& other) const = default;
};

using PointRule = std::function<double(std::span<const double>)>;

class GridFunction {
 public:
  GridFunction() = default;
  /// Adopts existing samples. Checks the size invariant and that every
  /// sample is finite.
  GridFunction(Box box, std::size_t points_per_axis, std::vector<double> samples,
               Extension extension);

  const Box& box() const { return box_; }
  int dim() const { return box_.dim(); }
  std::size_t points_per_axis() const { return points_; }
  std::size_t size() const { return samples_.size(); }
  double spacing() const { return spacing_; }
  double cell_volume() const;
  const Extension& extension() const { return extension_; }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Coordinate along `axis` of lattice index `i` (may lie outside [0, N)).
  double lattice_coordinate(long long i, int axis) const {
    return box_.lower(axis) + (static_cast<double>(i) + 0.5) * spacing_;
  }
  /// Cell-centre coordinates of sample `flat` (row-major, axis 0 slowest).
  std::vector<double> node(std::size_t flat) const;
  std::size_t flat_index(std::span<const long long> idx) const;

  /// Value of the extended function at lattice index `idx` (any integers).
  double lattice_value(std::span<const long long> idx) const;

  /// Same geometry and extension, different samples.
  GridFunction with_samples(std::vector<double> samples) const;
  GridFunction with_extension(Extension extension) const;

  bool same_grid(const GridFunction& other) const;

 private:
  Box box_;
  std::size_t points_ = 0;
  double spacing_ = 0.0;
  std::vector<double> samples_;
  Extension extension_;
};

struct QuadratureRule {
  std::string kind = "midpoint";
  double weight = 0.0;
  std::size_t count = 0;

  double total() const { return weight * static_cast<double>(count); }
};

QuadratureRule quadrature_rule(const GridFunction& gf);

/// Samples `rule` at the cell centres of a (points_per_axis)^n grid.
/// Throws std::domain_error naming the node if the rule returns NaN or inf.
GridFunction make_grid_function(const Box& box, std::size_t points_per_axis,
                                const PointRule& rule, Extension extension);

double evaluate_extended(const GridFunction& gf, std::span<const double> x);

/// Midpoint rule: sum of samples times h^n.
double integrate(const GridFunction& gf);

}  // namespace mlp
