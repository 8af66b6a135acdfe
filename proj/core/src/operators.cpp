#include "mlplab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "convolution.hpp"
#include "mlplab/grid_io.hpp"
#include "mlplab/numerics.hpp"

namespace mlp {
namespace {

constexpr std::size_t kStencilCap = std::size_t{1} << 22;

void check_inputs(const KernelSpec& k, std::span<const GridFunction> f) {
  if (f.size() != static_cast<std::size_t>(k.m)) {
    throw std::invalid_argument("kernel " + k.id + " takes " + std::to_string(k.m) +
                                " inputs, got " + std::to_string(f.size()));
  }
  for (const auto& fi : f) {
    if (!fi.same_grid(f[0])) throw std::invalid_argument("inputs live on different grids");
  }
  if (f[0].dim() != k.n) {
    throw std::invalid_argument("kernel dimension " + std::to_string(k.n) +
                                " does not match grid dimension " + std::to_string(f[0].dim()));
  }
}

void check_scale(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("scale t must be > 0");
}

// Half-width in lattice offsets of the y truncation cube. Offsets beyond
// N - 1 only reach zeros under the zero extension.
std::size_t truncation_offsets(const KernelSpec& k, const GridFunction& g, double t) {
  const double p = std::floor(t * k.support_radius_hint / g.spacing());
  auto P = static_cast<std::size_t>(std::max(0.0, p));
  return P;
}

std::size_t effective_offsets(std::size_t P, const GridFunction& g) {
  if (g.extension().kind == ExtensionKind::zero) return std::min(P, g.points_per_axis() - 1);
  return P;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// f extended to lattice indices [-P, N + P)^n, row-major.
std::vector<double> padded(const GridFunction& g, std::size_t P) {
  const auto N = static_cast<long long>(g.points_per_axis());
  const auto p = static_cast<long long>(P);
  const long long W = N + 2 * p;
  std::vector<double> out(ipow(static_cast<std::size_t>(W), g.dim()));
  long long idx[2] = {0, 0};
  if (g.dim() == 1) {
    for (long long i = 0; i < W; ++i) {
      idx[0] = i - p;
      out[static_cast<std::size_t>(i)] = g.lattice_value({idx, 1});
    }
  } else {
    for (long long i = 0; i < W; ++i) {
      for (long long j = 0; j < W; ++j) {
        idx[0] = i - p;
        idx[1] = j - p;
        out[static_cast<std::size_t>(i * W + j)] = g.lattice_value({idx, 2});
      }
    }
  }
  return out;
}

// Direct evaluation of sum_{s_1..s_m} K_t(x, y(s)) prod_i E_i[x + 2P - s_i] h^{mn}.
class DirectSum {
 public:
  DirectSum(const KernelSpec& k, std::span<const GridFunction> f, double t)
      : k_(k), grid_(f[0]), t_(t), n_(k.n), m_(k.m) {
    N_ = grid_.points_per_axis();
    h_ = grid_.spacing();
    P_ = effective_offsets(truncation_offsets(k, grid_, t), grid_);
    S_ = 2 * P_ + 1;
    W_ = N_ + 2 * P_;
    Sn_ = ipow(S_, n_);
    ext_.reserve(f.size());
    for (const auto& fi : f) ext_.push_back(padded(fi, P_));
    cell_ = std::pow(h_, m_ * n_);
    const bool conv = k.form != KernelForm::non_convolution;
    if (conv && std::pow(static_cast<double>(Sn_), m_) <= static_cast<double>(kStencilCap)) {
      build_stencil();
    }
    values_.assign(static_cast<std::size_t>(m_), std::vector<double>(Sn_));
    nonzero_.assign(static_cast<std::size_t>(m_), {});
  }

  std::vector<double> run() {
    const std::size_t total = ipow(N_, n_);
    std::vector<double> out(total);
    for (std::size_t flat = 0; flat < total; ++flat) out[flat] = at(flat);
    return out;
  }

 private:
  void build_stencil() {
    const std::size_t count = ipow(Sn_, m_);
    stencil_.resize(count);
    double u[6] = {};
    const auto mn = static_cast<std::size_t>(m_ * n_);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      for (int i = m_ - 1; i >= 0; --i) {
        std::size_t o = rest % Sn_;
        rest /= Sn_;
        for (int a = n_ - 1; a >= 0; --a) {
          const auto s = static_cast<long long>(o % S_);
          o /= S_;
          u[i * n_ + a] = static_cast<double>(s - static_cast<long long>(P_)) * h_;
        }
      }
      stencil_[idx] = eval_dilated(k_, t_, {}, {u, mn}) * cell_;
    }
  }

  double at(std::size_t flat) {
    long long x[2] = {0, 0};
    std::size_t rest = flat;
    for (int a = n_ - 1; a >= 0; --a) {
      x[a] = static_cast<long long>(rest % N_);
      rest /= N_;
    }
    for (int a = 0; a < n_; ++a) xc_[a] = grid_.lattice_coordinate(x[a], a);
    for (int i = 0; i < m_; ++i) {
      auto& vals = values_[static_cast<std::size_t>(i)];
      auto& nz = nonzero_[static_cast<std::size_t>(i)];
      nz.clear();
      const auto& e = ext_[static_cast<std::size_t>(i)];
      for (std::size_t o = 0; o < Sn_; ++o) {
        std::size_t pos = 0;
        std::size_t r = o;
        std::size_t off[2] = {0, 0};
        for (int a = n_ - 1; a >= 0; --a) {
          off[a] = r % S_;
          r /= S_;
        }
        for (int a = 0; a < n_; ++a) {
          pos = pos * W_ + static_cast<std::size_t>(x[a]) + 2 * P_ - off[a];
        }
        vals[o] = e[pos];
        if (vals[o] != 0.0) nz.push_back(o);
      }
    }
    x_ = x;
    return recurse(0, 0, 1.0);
  }

  double recurse(int i, std::size_t sidx, double prod) {
    const auto& vals = values_[static_cast<std::size_t>(i)];
    const auto& nz = nonzero_[static_cast<std::size_t>(i)];
    double acc = 0.0;
    if (i + 1 == m_) {
      if (!stencil_.empty()) {
        const double* st = stencil_.data() + sidx * Sn_;
        for (std::size_t o : nz) acc += st[o] * vals[o];
        return acc * prod;
      }
      for (std::size_t o : nz) {
        set_args(i, o);
        acc += leaf() * vals[o];
      }
      return acc * prod * cell_;
    }
    for (std::size_t o : nz) {
      if (stencil_.empty()) set_args(i, o);
      acc += recurse(i + 1, sidx * Sn_ + o, prod * vals[o]);
    }
    return acc;
  }

  void set_args(int i, std::size_t o) {
    std::size_t off[2] = {0, 0};
    for (int a = n_ - 1; a >= 0; --a) {
      off[a] = o % S_;
      o /= S_;
    }
    for (int a = 0; a < n_; ++a) {
      const long long d = static_cast<long long>(off[a]) - static_cast<long long>(P_);
      if (k_.form == KernelForm::non_convolution) {
        args_[i * n_ + a] = grid_.lattice_coordinate(x_[a] - d, a);
      } else {
        args_[i * n_ + a] = static_cast<double>(d) * h_;
      }
    }
  }

  double leaf() const {
    const auto mn = static_cast<std::size_t>(m_ * n_);
    return eval_dilated(k_, t_, {xc_, static_cast<std::size_t>(n_)}, {args_, mn});
  }

  const KernelSpec& k_;
  const GridFunction& grid_;
  double t_;
  int n_;
  int m_;
  std::size_t N_ = 0;
  double h_ = 0.0;
  std::size_t P_ = 0;
  std::size_t S_ = 0;
  std::size_t W_ = 0;
  std::size_t Sn_ = 0;
  double cell_ = 1.0;
  std::vector<std::vector<double>> ext_;
  std::vector<double> stencil_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::size_t>> nonzero_;
  const long long* x_ = nullptr;
  double xc_[2] = {0.0, 0.0};
  double args_[6] = {};
};

GridFunction output_grid(const GridFunction& like, std::vector<double> values) {
  return GridFunction(like.box(), like.points_per_axis(), std::move(values), Extension::zero());
}

OperatorMeta base_meta(const KernelSpec& k, const GtStack& stack, OperatorKind kind) {
  OperatorMeta meta;
  meta.kernel_id = k.id;
  meta.kind = kind;
  meta.tgrid = stack.tgrid;
  meta.tail_bound = size_tail_bound(k, k.support_radius_hint);
  meta.path = to_string(stack.path);
  return meta;
}

void check_stack(const KernelSpec& k, const GtStack& stack) {
  if (stack.fields.size() != stack.tgrid.nodes.size()) {
    throw std::invalid_argument("G_t stack does not match its t-grid");
  }
  if (!stack.kernel_id.empty() && stack.kernel_id != k.id) {
    throw std::invalid_argument("G_t stack was computed for kernel " + stack.kernel_id +
                                ", not " + k.id);
  }
}

// Integer offsets (row-major over [-R, R]^n) with their lengths |dz| h.
struct OffsetTable {
  std::vector<long long> dz;  // n entries per offset
  std::vector<double> dist;
};

OffsetTable offsets_within(int n, long long R, double h, double radius, bool strict) {
  OffsetTable table;
  auto keep = [&](double d) { return strict ? d < radius : d <= radius; };
  if (n == 1) {
    for (long long i = -R; i <= R; ++i) {
      const double d = std::fabs(static_cast<double>(i)) * h;
      if (keep(d)) {
        table.dz.push_back(i);
        table.dist.push_back(d);
      }
    }
  } else {
    for (long long i = -R; i <= R; ++i) {
      for (long long j = -R; j <= R; ++j) {
        const double d = std::sqrt(static_cast<double>(i * i + j * j)) * h;
        if (keep(d)) {
          table.dz.push_back(i);
          table.dz.push_back(j);
          table.dist.push_back(d);
        }
      }
    }
  }
  return table;
}

// sum over t-nodes and in-box offsets of weight(k, offset) |G_k(x + dz)|^2 c_k.
template <typename Weight>
std::vector<double> cone_sum(const GtStack& stack, const std::vector<OffsetTable>& tables,
                             Weight weight) {
  const GridFunction& g = stack.grid;
  const int n = g.dim();
  const auto N = static_cast<long long>(g.points_per_axis());
  const std::size_t total = g.size();
  const double cell = g.cell_volume();
  std::vector<NeumaierSum> acc(total);
  for (std::size_t k = 0; k < stack.fields.size(); ++k) {
    const double t = stack.tgrid.nodes[k];
    const double c = cell * stack.tgrid.weights[k] / std::pow(t, n);
    const auto& G = stack.fields[k];
    const auto& tab = tables[k];
    std::vector<double> sq(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) sq[i] = G[i] * G[i];
    const std::size_t count = tab.dist.size();
    std::vector<double> w(count);
    for (std::size_t o = 0; o < count; ++o) w[o] = weight(k, tab.dist[o]) * c;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < static_cast<long long>(total); ++flat) {
      double local = 0.0;
      if (n == 1) {
        for (std::size_t o = 0; o < count; ++o) {
          const long long z = flat + tab.dz[o];
          if (z < 0 || z >= N) continue;
          local += w[o] * sq[static_cast<std::size_t>(z)];
        }
      } else {
        const long long x0 = flat / N;
        const long long x1 = flat % N;
        for (std::size_t o = 0; o < count; ++o) {
          const long long z0 = x0 + tab.dz[2 * o];
          const long long z1 = x1 + tab.dz[2 * o + 1];
          if (z0 < 0 || z0 >= N || z1 < 0 || z1 >= N) continue;
          local += w[o] * sq[static_cast<std::size_t>(z0 * N + z1)];
        }
      }
      acc[static_cast<std::size_t>(flat)].add(local);
    }
  }
  std::vector<double> out(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = std::sqrt(std::max(0.0, acc[i].value()));
  return out;
}

std::vector<double> g_values(const GtStack& stack, double r_lo, double r_hi) {
  const std::size_t total = stack.grid.size();
  std::vector<NeumaierSum> acc(total);
  for (std::size_t k = 0; k < stack.fields.size(); ++k) {
    const double t = stack.tgrid.nodes[k];
    if (!(t > r_lo && t <= r_hi)) continue;
    const double w = stack.tgrid.weights[k];
    const auto& G = stack.fields[k];
    for (std::size_t i = 0; i < total; ++i) acc[i].add(G[i] * G[i] * w);
  }
  std::vector<double> out(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = std::sqrt(std::max(0.0, acc[i].value()));
  return out;
}

void check_kind_against_kernel(OperatorKind kind, const KernelSpec& k) {
  const bool nonconv = k.form == KernelForm::non_convolution;
  if (is_non_convolution_kind(kind) && !nonconv) {
    throw std::invalid_argument(to_string(kind) + " requires a non-convolution kernel");
  }
  if (!is_non_convolution_kind(kind) && nonconv) {
    throw std::invalid_argument(to_string(kind) + " requires a convolution or tensor kernel");
  }
}

}  // namespace

TGrid TGrid::log_spaced(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max)) {
    throw std::invalid_argument("t-grid needs 0 < t_min < t_max");
  }
  if (count < 8) throw std::invalid_argument("t-grid needs at least 8 nodes");
  TGrid tg;
  tg.t_min = t_min;
  tg.t_max = t_max;
  tg.count = count;
  const double span = std::log(t_max / t_min);
  const double delta = span / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    tg.nodes.push_back(t_min * std::exp((static_cast<double>(k) + 0.5) * delta));
    tg.weights.push_back(delta);
  }
  return tg;
}

TGrid TGrid::defaults(const GridFunction& grid, std::size_t count) {
  return log_spaced(grid.spacing(), 2.0 * grid.box().half_width[0], count);
}

double ConeSpec::truncation_radius(double t, double lambda, int n) const {
  if (!(weight_eps > 0.0 && weight_eps < 1.0)) {
    throw std::invalid_argument("weight_eps must lie in (0, 1)");
  }
  const double r = t * (std::pow(weight_eps, -1.0 / (lambda * n)) - 1.0);
  return std::max(t, r);
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::g:
      return "g";
    case OperatorKind::S:
      return "S";
    case OperatorKind::gstar:
      return "gstar";
    case OperatorKind::g_prime:
      return "g'";
    case OperatorKind::S_prime:
      return "S'";
    case OperatorKind::gstarstar:
      return "gstarstar";
  }
  return "g";
}

OperatorKind parse_operator_kind(const std::string& text) {
  if (text == "g") return OperatorKind::g;
  if (text == "S") return OperatorKind::S;
  if (text == "gstar" || text == "g*") return OperatorKind::gstar;
  if (text == "g'" || text == "gprime") return OperatorKind::g_prime;
  if (text == "S'" || text == "Sprime") return OperatorKind::S_prime;
  if (text == "gstarstar" || text == "g**") return OperatorKind::gstarstar;
  throw std::invalid_argument("unknown operator '" + text + "'");
}

bool needs_lambda(OperatorKind kind) {
  return kind == OperatorKind::gstar || kind == OperatorKind::gstarstar;
}

bool is_non_convolution_kind(OperatorKind kind) {
  return kind == OperatorKind::g_prime || kind == OperatorKind::S_prime ||
         kind == OperatorKind::gstarstar;
}

std::string to_string(GtPath path) {
  switch (path) {
    case GtPath::automatic:
      return "automatic";
    case GtPath::direct:
      return "direct";
    case GtPath::fast:
      return "fast";
  }
  return "direct";
}

GridFunction gt_field(const KernelSpec& k, std::span<const GridFunction> f, double t) {
  check_inputs(k, f);
  check_scale(t);
  DirectSum sum(k, f, t);
  return output_grid(f[0], sum.run());
}

GridFunction tensor_fast_gt(const KernelSpec& k, std::span<const GridFunction> f, double t) {
  if (k.form != KernelForm::tensor) {
    throw std::invalid_argument("tensor_fast_gt needs a tensor kernel, got " + k.id);
  }
  check_inputs(k, f);
  check_scale(t);
  const GridFunction& g = f[0];
  const int n = k.n;
  const double h = g.spacing();
  const std::size_t N = g.points_per_axis();
  const std::size_t P = effective_offsets(truncation_offsets(k, g, t), g);
  const std::size_t S = 2 * P + 1;
  const double cell = std::pow(h, n);
  const double scale = std::pow(t, -n);
  std::vector<double> product(ipow(N, n), 1.0);
  for (int i = 0; i < k.m; ++i) {
    const Profile& psi = k.factors[static_cast<std::size_t>(i)];
    std::vector<double> stencil(ipow(S, n));
    double u[2] = {0.0, 0.0};
    for (std::size_t o = 0; o < stencil.size(); ++o) {
      std::size_t r = o;
      for (int a = n - 1; a >= 0; --a) {
        const auto s = static_cast<long long>(r % S);
        r /= S;
        u[a] = static_cast<double>(s - static_cast<long long>(P)) * h / t;
      }
      stencil[o] = scale * psi({u, static_cast<std::size_t>(n)}) * cell;
    }
    const auto ext = padded(f[static_cast<std::size_t>(i)], P);
    const auto conv = detail::padded_convolution(ext, stencil, N, P, n);
    for (std::size_t x = 0; x < product.size(); ++x) product[x] *= conv[x];
  }
  return output_grid(g, std::move(product));
}

GtStack compute_gt_stack(const KernelSpec& k, std::span<const GridFunction> f, const TGrid& tg,
                         GtPath path) {
  check_inputs(k, f);
  if (path == GtPath::automatic) path = k.is_tensor() ? GtPath::fast : GtPath::direct;
  if (path == GtPath::fast && !k.is_tensor()) {
    throw std::invalid_argument("fast path needs a tensor kernel, got " + k.id);
  }
  GtStack stack;
  stack.grid = f[0];
  stack.tgrid = tg;
  stack.path = path;
  stack.kernel_id = k.id;
  stack.fields.resize(tg.nodes.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(tg.nodes.size()); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double t = tg.nodes[idx];
    GridFunction G = path == GtPath::fast ? tensor_fast_gt(k, f, t) : gt_field(k, f, t);
    stack.fields[idx].assign(G.samples().begin(), G.samples().end());
  }
  return stack;
}

OperatorField g_function(const KernelSpec& k, const GtStack& stack) {
  check_stack(k, stack);
  OperatorMeta meta = base_meta(k, stack, k.form == KernelForm::non_convolution
                                              ? OperatorKind::g_prime
                                              : OperatorKind::g);
  return {output_grid(stack.grid, g_values(stack, 0.0, INFINITY)), std::move(meta)};
}

OperatorField area_integral(const KernelSpec& k, const GtStack& stack) {
  check_stack(k, stack);
  const GridFunction& g = stack.grid;
  const double h = g.spacing();
  const auto N = static_cast<long long>(g.points_per_axis());
  std::vector<OffsetTable> tables;
  for (double t : stack.tgrid.nodes) {
    const long long R = std::min<long long>(N - 1, static_cast<long long>(std::ceil(t / h)));
    tables.push_back(offsets_within(g.dim(), R, h, t, true));
  }
  OperatorMeta meta = base_meta(k, stack, k.form == KernelForm::non_convolution
                                              ? OperatorKind::S_prime
                                              : OperatorKind::S);
  auto values = cone_sum(stack, tables, [](std::size_t, double) { return 1.0; });
  return {output_grid(g, std::move(values)), std::move(meta)};
}

OperatorField g_star_lambda(const KernelSpec& k, const GtStack& stack, double lambda,
                            const ConeSpec& cone) {
  check_stack(k, stack);
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("g*_lambda requires lambda > 1, got " + format_double(lambda));
  }
  const GridFunction& g = stack.grid;
  const int n = g.dim();
  const double h = g.spacing();
  const auto N = static_cast<long long>(g.points_per_axis());
  std::vector<OffsetTable> tables;
  for (double t : stack.tgrid.nodes) {
    const double radius = cone.truncation_radius(t, lambda, n);
    const long long R = std::min<long long>(N - 1, static_cast<long long>(std::ceil(radius / h)));
    tables.push_back(offsets_within(n, R, h, radius, false));
  }
  OperatorMeta meta = base_meta(k, stack, k.form == KernelForm::non_convolution
                                              ? OperatorKind::gstarstar
                                              : OperatorKind::gstar);
  meta.lambda = lambda;
  const double m = k.m;
  if (lambda <= 2.0 * m) {
    meta.warnings.push_back("lambda <= 2m: outside the L^p regime");
  }
  const double blo_threshold = 3.0 * m + (2.0 * k.constants.delta + 2.0 * k.constants.gamma) / n;
  if (lambda <= blo_threshold) {
    meta.warnings.push_back("lambda <= 3m + (2 delta + 2 gamma) / n = " +
                            format_double(blo_threshold) + ": outside the BMO->BLO regime");
  }
  const double power = lambda * n;
  const auto& nodes = stack.tgrid.nodes;
  auto values = cone_sum(stack, tables, [&](std::size_t kk, double dist) {
    const double t = nodes[kk];
    return std::pow(t / (t + dist), power);
  });
  return {output_grid(g, std::move(values)), std::move(meta)};
}

OperatorField g_function(const KernelSpec& k, std::span<const GridFunction> f, const TGrid& tg,
                         GtPath path) {
  return g_function(k, compute_gt_stack(k, f, tg, path));
}

OperatorField area_integral(const KernelSpec& k, std::span<const GridFunction> f,
                            const TGrid& tg, GtPath path) {
  return area_integral(k, compute_gt_stack(k, f, tg, path));
}

OperatorField g_star_lambda(const KernelSpec& k, std::span<const GridFunction> f,
                            const TGrid& tg, double lambda, GtPath path, const ConeSpec& cone) {
  if (!(lambda > 1.0)) {
    throw std::invalid_argument("g*_lambda requires lambda > 1, got " + format_double(lambda));
  }
  return g_star_lambda(k, compute_gt_stack(k, f, tg, path), lambda, cone);
}

OperatorField evaluate_operator(OperatorKind kind, const KernelSpec& k, const GtStack& stack,
                                double lambda, const ConeSpec& cone) {
  check_kind_against_kernel(kind, k);
  switch (kind) {
    case OperatorKind::g:
    case OperatorKind::g_prime:
      return g_function(k, stack);
    case OperatorKind::S:
    case OperatorKind::S_prime:
      return area_integral(k, stack);
    case OperatorKind::gstar:
    case OperatorKind::gstarstar:
      return g_star_lambda(k, stack, lambda, cone);
  }
  throw std::invalid_argument("unknown operator kind");
}

std::pair<OperatorField, OperatorField> split_g(const KernelSpec& k, const GtStack& stack,
                                                double r) {
  check_stack(k, stack);
  const TGrid& tg = stack.tgrid;
  if (!(r > tg.t_min && r <= tg.t_max)) {
    throw std::invalid_argument("split radius " + format_double(r) + " outside (" +
                                format_double(tg.t_min) + ", " + format_double(tg.t_max) + "]");
  }
  const OperatorKind kind =
      k.form == KernelForm::non_convolution ? OperatorKind::g_prime : OperatorKind::g;
  OperatorField low{output_grid(stack.grid, g_values(stack, 0.0, r)), base_meta(k, stack, kind)};
  OperatorField high{output_grid(stack.grid, g_values(stack, r, INFINITY)),
                     base_meta(k, stack, kind)};
  return {std::move(low), std::move(high)};
}

void save_operator_field(const std::filesystem::path& path, const OperatorField& field) {
  save_grid(path, field.values);
  Metadata meta;
  meta["kernel"] = field.meta.kernel_id;
  meta["operator"] = to_string(field.meta.kind);
  meta["t_min"] = format_double(field.meta.tgrid.t_min);
  meta["t_max"] = format_double(field.meta.tgrid.t_max);
  meta["t_count"] = std::to_string(field.meta.tgrid.count);
  meta["lambda"] = format_double(field.meta.lambda);
  meta["tail_bound"] = format_double(field.meta.tail_bound);
  meta["path"] = field.meta.path;
  std::string warnings;
  for (const auto& w : field.meta.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
  meta["warnings"] = warnings;
  write_metadata(path.string() + ".meta", meta);
}

}  // namespace mlp
