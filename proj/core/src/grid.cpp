#include "mlplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mlplab/numerics.hpp"

namespace mlp {

Box Box::cube(int dim, double half_width, double center) {
  Box b;
  b.center.assign(static_cast<std::size_t>(dim), center);
  b.half_width.assign(static_cast<std::size_t>(dim), half_width);
  return b;
}

double Box::volume() const {
  double v = 1.0;
  for (double w : half_width) v *= 2.0 * w;
  return v;
}

bool Box::contains(std::span<const double> x) const {
  for (int a = 0; a < dim(); ++a) {
    if (!(x[a] >= lower(a) && x[a] <= upper(a))) return false;
  }
  return true;
}

void Box::validate() const {
  if (center.empty() || center.size() > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument("box dimension must be 1 or 2");
  }
  if (half_width.size() != center.size()) {
    throw std::invalid_argument("box center and half_width differ in dimension");
  }
  for (std::size_t a = 0; a < half_width.size(); ++a) {
    if (!(half_width[a] > 0.0) || !std::isfinite(half_width[a]) || !std::isfinite(center[a])) {
      throw std::invalid_argument("box half_width must be positive and finite");
    }
    if (half_width[a] != half_width[0]) {
      throw std::invalid_argument("box half widths must agree on every axis");
    }
  }
}

// ---------------------------------------------------------------------------

double AnalyticTail::operator()(std::span<const double> x) const {
  // tag == "log" is the only registered formula (checked in validate()).
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - params[1 + a];
    r2 += d * d;
  }
  return params[0] * 0.5 * std::log(r2);
}

void AnalyticTail::validate(int dim) const {
  if (tag != "log") {
    throw std::invalid_argument("unknown analytic tail '" + tag + "'");
  }
  if (params.size() != static_cast<std::size_t>(1 + dim)) {
    throw std::invalid_argument("analytic-tail:log expects coef plus one coordinate per axis");
  }
}

Extension Extension::log_tail(double coef, std::span<const double> singularity) {
  Extension e;
  e.kind = ExtensionKind::analytic_tail;
  e.tail.tag = "log";
  e.tail.params.push_back(coef);
  e.tail.params.insert(e.tail.params.end(), singularity.begin(), singularity.end());
  return e;
}

std::string Extension::to_string() const {
  switch (kind) {
    case ExtensionKind::periodic:
      return "periodic";
    case ExtensionKind::edge_hold:
      return "edge-hold";
    case ExtensionKind::zero:
      return "zero";
    case ExtensionKind::analytic_tail: {
      std::string out = "analytic-tail:" + tail.tag;
      for (double p : tail.params) out += ":" + format_double(p);
      return out;
    }
  }
  return "zero";
}

Extension Extension::parse(const std::string& text) {
  if (text == "periodic") return periodic();
  if (text == "edge-hold") return edge_hold();
  if (text == "zero") return zero();
  const std::string prefix = "analytic-tail:";
  if (text.rfind(prefix, 0) == 0) {
    Extension e;
    e.kind = ExtensionKind::analytic_tail;
    std::stringstream ss(text.substr(prefix.size()));
    std::string part;
    std::getline(ss, e.tail.tag, ':');
    while (std::getline(ss, part, ':')) e.tail.params.push_back(parse_double(part));
    return e;
  }
  throw std::invalid_argument("unknown extension policy '" + text + "'");
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(Box box, std::size_t points_per_axis, std::vector<double> samples,
                           Extension extension)
    : box_(std::move(box)),
      points_(points_per_axis),
      samples_(std::move(samples)),
      extension_(std::move(extension)) {
  box_.validate();
  if (points_ < 1) throw std::invalid_argument("points_per_axis must be positive");
  std::size_t expected = 1;
  for (int a = 0; a < box_.dim(); ++a) expected *= points_;
  if (samples_.size() != expected) {
    throw std::invalid_argument("sample count " + std::to_string(samples_.size()) +
                                " does not equal points_per_axis^n = " + std::to_string(expected));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw std::domain_error("non-finite sample at flat index " + std::to_string(i));
    }
  }
  if (extension_.kind == ExtensionKind::analytic_tail) extension_.tail.validate(box_.dim());
  spacing_ = 2.0 * box_.half_width[0] / static_cast<double>(points_);
}

double GridFunction::cell_volume() const { return std::pow(spacing_, dim()); }

std::vector<double> GridFunction::node(std::size_t flat) const {
  std::vector<double> x(static_cast<std::size_t>(dim()));
  for (int a = dim() - 1; a >= 0; --a) {
    x[a] = lattice_coordinate(static_cast<long long>(flat % points_), a);
    flat /= points_;
  }
  return x;
}

std::size_t GridFunction::flat_index(std::span<const long long> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * points_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

double GridFunction::lattice_value(std::span<const long long> idx) const {
  const auto n = static_cast<long long>(points_);
  bool inside = true;
  for (int a = 0; a < dim(); ++a) inside = inside && idx[a] >= 0 && idx[a] < n;
  if (inside) return samples_[flat_index(idx)];

  long long mapped[kMaxDim] = {0, 0};
  switch (extension_.kind) {
    case ExtensionKind::zero:
      return 0.0;
    case ExtensionKind::periodic:
      for (int a = 0; a < dim(); ++a) mapped[a] = ((idx[a] % n) + n) % n;
      return samples_[flat_index({mapped, static_cast<std::size_t>(dim())})];
    case ExtensionKind::edge_hold:
      for (int a = 0; a < dim(); ++a) mapped[a] = std::clamp(idx[a], 0LL, n - 1);
      return samples_[flat_index({mapped, static_cast<std::size_t>(dim())})];
    case ExtensionKind::analytic_tail: {
      double x[kMaxDim] = {0.0, 0.0};
      for (int a = 0; a < dim(); ++a) x[a] = lattice_coordinate(idx[a], a);
      return extension_.tail({x, static_cast<std::size_t>(dim())});
    }
  }
  return 0.0;
}

GridFunction GridFunction::with_samples(std::vector<double> samples) const {
  return GridFunction(box_, points_, std::move(samples), extension_);
}

GridFunction GridFunction::with_extension(Extension extension) const {
  return GridFunction(box_, points_, samples_, std::move(extension));
}

bool GridFunction::same_grid(const GridFunction& other) const {
  return points_ == other.points_ && box_.center == other.box_.center &&
         box_.half_width == other.box_.half_width;
}

// ---------------------------------------------------------------------------

QuadratureRule quadrature_rule(const GridFunction& gf) {
  return QuadratureRule{"midpoint", gf.cell_volume(), gf.size()};
}

GridFunction make_grid_function(const Box& box, std::size_t points_per_axis,
                                const PointRule& rule, Extension extension) {
  box.validate();
  if (points_per_axis < 4) throw std::invalid_argument("points_per_axis must be at least 4");
  const int dim = box.dim();
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= points_per_axis;

  const double h = 2.0 * box.half_width[0] / static_cast<double>(points_per_axis);
  std::vector<double> samples(total);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = box.lower(a) + (static_cast<double>(rest % points_per_axis) + 0.5) * h;
      rest /= points_per_axis;
    }
    const double v = rule(x);
    if (!std::isfinite(v)) {
      std::string where = "(";
      for (int a = 0; a < dim; ++a) where += (a ? ", " : "") + format_double(x[a]);
      throw std::domain_error("non-finite sample at node " + where +
                              "); offset the grid or the singularity");
    }
    samples[flat] = v;
  }
  return GridFunction(box, points_per_axis, std::move(samples), std::move(extension));
}

double evaluate_extended(const GridFunction& gf, std::span<const double> x) {
  long long idx[kMaxDim] = {0, 0};
  const auto n = static_cast<long long>(gf.points_per_axis());
  const bool inside = gf.box().contains(x);
  if (!inside && gf.extension().kind == ExtensionKind::analytic_tail) return gf.extension().tail(x);
  for (int a = 0; a < gf.dim(); ++a) {
    const double u = (x[a] - gf.box().lower(a)) / gf.spacing();
    idx[a] = static_cast<long long>(std::floor(u));
    // The closed upper face belongs to the last cell.
    if (inside) idx[a] = std::clamp(idx[a], 0LL, n - 1);
  }
  return gf.lattice_value({idx, static_cast<std::size_t>(gf.dim())});
}

double integrate(const GridFunction& gf) {
  NeumaierSum acc;
  for (double v : gf.samples()) acc.add(v);
  return acc.value() * gf.cell_volume();
}

}  // namespace mlp
