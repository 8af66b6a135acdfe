#include "mlplab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mlplab/grid_io.hpp"
#include "mlplab/numerics.hpp"

namespace mlp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from 53 random bits; portable across standard libraries.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : state_(seed) {}
  double operator()() {
    state_ = splitmix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double symmetric(double spread) { return spread * (2.0 * (*this)() - 1.0); }

 private:
  std::uint64_t state_;
};

double bump_profile(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - r));
  const double b = std::exp(-1.0 / (r - 0.5));
  return a / (a + b);
}

bool on_lattice(double coord, double lower, double h) {
  const double q = (coord - lower) / h - 0.5;
  return std::fabs(q - std::round(q)) < 1e-9;
}

Instance make_instance(const TestFamily& fam, const GridSpec& g, std::uint64_t seed,
                       std::string id) {
  const Box box = g.box();
  const double h = g.spacing();
  Uniform rng(seed);
  Instance inst;
  inst.id = std::move(id);
  switch (fam.kind) {
    case FamilyKind::log_singularity: {
      std::vector<double> a(static_cast<std::size_t>(g.n));
      bool on_node = true;
      for (int ax = 0; ax < g.n; ++ax) {
        a[ax] = rng.symmetric(fam.spread);
        on_node = on_node && on_lattice(a[ax], box.lower(ax), h);
      }
      if (on_node) {
        for (double& c : a) c += 0.25 * h;
        inst.note = "singularity shifted by h/4";
      }
      const Extension ext = Extension::log_tail(fam.sign * fam.scale, a);
      const AnalyticTail tail = ext.tail;
      inst.rule = [tail](std::span<const double> x) { return tail(x); };
      inst.f = make_grid_function(box, g.N, inst.rule, ext);
      return inst;
    }
    case FamilyKind::dyadic_martingale: {
      const int depth = fam.depth;
      const double sigma = fam.sigma;
      const double E = fam.extent;
      const int n = g.n;
      inst.rule = [depth, sigma, E, n, seed](std::span<const double> x) {
        double u[2] = {0.0, 0.0};
        for (int ax = 0; ax < n; ++ax) {
          u[ax] = std::fmod(x[ax] + E, 2.0 * E);
          if (u[ax] < 0.0) u[ax] += 2.0 * E;
        }
        double v = 0.0;
        for (int j = 1; j <= depth; ++j) {
          const double width = 2.0 * E / std::ldexp(1.0, j);
          std::uint64_t cell = 0;
          for (int ax = 0; ax < n; ++ax) {
            const auto c = static_cast<std::uint64_t>(std::floor(u[ax] / width));
            cell = (cell << 32) | c;
          }
          v += (derive_seed(seed, static_cast<std::uint64_t>(j), cell) & 1U) ? sigma : -sigma;
        }
        return v;
      };
      inst.f = make_grid_function(box, g.N, inst.rule, Extension::periodic());
      return inst;
    }
    case FamilyKind::smooth_bump: {
      double c[2] = {0.0, 0.0};
      for (int ax = 0; ax < g.n; ++ax) c[ax] = rng.symmetric(fam.spread);
      const double w = fam.width;
      const double height = fam.height;
      const int n = g.n;
      inst.rule = [c0 = c[0], c1 = c[1], w, height, n](std::span<const double> x) {
        double r2 = (x[0] - c0) * (x[0] - c0);
        if (n == 2) r2 += (x[1] - c1) * (x[1] - c1);
        return height * bump_profile(std::sqrt(r2) / w);
      };
      inst.f = make_grid_function(box, g.N, inst.rule, Extension::zero());
      return inst;
    }
    case FamilyKind::half_indicator: {
      const double c = rng.symmetric(fam.spread);
      const double height = fam.height;
      inst.rule = [c, height](std::span<const double> x) { return x[0] > c ? height : 0.0; };
      inst.f = make_grid_function(box, g.N, inst.rule, Extension::edge_hold());
      return inst;
    }
    case FamilyKind::indicator: {
      double shift[2] = {0.0, 0.0};
      for (int ax = 0; ax < g.n; ++ax) shift[ax] = rng.symmetric(fam.spread);
      const double lo = fam.lo;
      const double hi = fam.hi;
      const double height = fam.height;
      const int n = g.n;
      inst.rule = [lo, hi, height, n, s0 = shift[0], s1 = shift[1]](std::span<const double> x) {
        const double shifts[2] = {s0, s1};
        for (int ax = 0; ax < n; ++ax) {
          const double y = x[ax] - shifts[ax];
          if (!(y >= lo && y <= hi)) return 0.0;
        }
        return height;
      };
      inst.f = make_grid_function(box, g.N, inst.rule, Extension::zero());
      return inst;
    }
    case FamilyKind::custom_file: {
      inst.f = load_grid(fam.path);
      if (inst.f.dim() != g.n || inst.f.points_per_axis() != g.N ||
          std::fabs(inst.f.box().half_width[0] - g.L) > 1e-12 * g.L) {
        throw std::invalid_argument("custom file " + fam.path.string() +
                                    " does not match the requested grid");
      }
      return inst;
    }
  }
  throw std::invalid_argument("unknown family kind");
}

double max_abs(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.samples()) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction squared(const GridFunction& f) {
  std::vector<double> s(f.samples().begin(), f.samples().end());
  for (double& v : s) v *= v;
  return f.with_samples(std::move(s));
}

std::string center_text(const std::vector<double>& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? " " : "") + format_double(c[i]);
  return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

double spread_drift(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi == 0.0) return 0.0;
  if (*lo <= 0.0) return INFINITY;
  return *hi / *lo - 1.0;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0x9e3779b97f4a7c15ULL + 1));
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::log_singularity:
      return "log-singularity";
    case FamilyKind::dyadic_martingale:
      return "dyadic-martingale";
    case FamilyKind::smooth_bump:
      return "smooth-bump";
    case FamilyKind::half_indicator:
      return "half-indicator";
    case FamilyKind::indicator:
      return "indicator";
    case FamilyKind::custom_file:
      return "custom-file";
  }
  return "smooth-bump";
}

FamilyKind parse_family_kind(const std::string& text) {
  for (FamilyKind k : {FamilyKind::log_singularity, FamilyKind::dyadic_martingale,
                       FamilyKind::smooth_bump, FamilyKind::half_indicator, FamilyKind::indicator,
                       FamilyKind::custom_file}) {
    if (to_string(k) == text) return k;
  }
  if (text == "log") return FamilyKind::log_singularity;
  if (text == "martingale") return FamilyKind::dyadic_martingale;
  if (text == "bump") return FamilyKind::smooth_bump;
  throw std::invalid_argument("unknown test family '" + text + "'");
}

TestFamily TestFamily::parse(const std::string& text) {
  const auto colon = text.find(':');
  TestFamily fam;
  fam.kind = parse_family_kind(text.substr(0, colon));
  std::stringstream ss(colon == std::string::npos ? std::string() : text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("family parameter without '=': " + item);
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "path") {
      fam.path = value;
      continue;
    }
    const double v = parse_double(value);
    if (key == "count") {
      if (v < 1) throw std::invalid_argument("family count must be >= 1");
      fam.count = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      fam.seed = static_cast<std::uint64_t>(v);
    } else if (key == "sign") {
      if (v != 1.0 && v != -1.0) throw std::invalid_argument("sign must be +1 or -1");
      fam.sign = v;
    } else if (key == "scale") {
      fam.scale = v;
    } else if (key == "depth") {
      if (v < 1 || v > 30) throw std::invalid_argument("depth must lie in [1, 30]");
      fam.depth = static_cast<int>(v);
    } else if (key == "sigma") {
      if (v < 0) throw std::invalid_argument("sigma must be >= 0");
      fam.sigma = v;
    } else if (key == "extent") {
      if (!(v > 0)) throw std::invalid_argument("extent must be > 0");
      fam.extent = v;
    } else if (key == "spread") {
      if (v < 0) throw std::invalid_argument("spread must be >= 0");
      fam.spread = v;
    } else if (key == "width") {
      if (!(v > 0)) throw std::invalid_argument("width must be > 0");
      fam.width = v;
    } else if (key == "height") {
      fam.height = v;
    } else if (key == "lo") {
      fam.lo = v;
    } else if (key == "hi") {
      fam.hi = v;
    } else {
      throw std::invalid_argument("unknown family parameter '" + key + "'");
    }
  }
  if (fam.kind == FamilyKind::indicator && !(fam.lo < fam.hi)) {
    throw std::invalid_argument("indicator needs lo < hi");
  }
  if (fam.kind == FamilyKind::custom_file && fam.path.empty()) {
    throw std::invalid_argument("custom-file needs path=<file>");
  }
  return fam;
}

std::string TestFamily::to_string() const {
  std::string out = mlp::to_string(kind) + ":count=" + std::to_string(count) +
                    ",seed=" + std::to_string(seed);
  auto add = [&](const char* key, double v) { out += std::string(",") + key + "=" + format_double(v); };
  switch (kind) {
    case FamilyKind::log_singularity:
      add("sign", sign);
      add("scale", scale);
      add("spread", spread);
      break;
    case FamilyKind::dyadic_martingale:
      add("depth", depth);
      add("sigma", sigma);
      add("extent", extent);
      break;
    case FamilyKind::smooth_bump:
      add("spread", spread);
      add("width", width);
      add("height", height);
      break;
    case FamilyKind::half_indicator:
      add("spread", spread);
      add("height", height);
      break;
    case FamilyKind::indicator:
      add("spread", spread);
      add("lo", lo);
      add("hi", hi);
      add("height", height);
      break;
    case FamilyKind::custom_file:
      out += ",path=" + path.string();
      break;
  }
  return out;
}

std::vector<Instance> generate(const TestFamily& family, const GridSpec& grid) {
  if (grid.n < 1 || grid.n > 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (family.kind == FamilyKind::dyadic_martingale &&
      std::ldexp(1.0, family.depth) > static_cast<double>(grid.N)) {
    throw std::invalid_argument("martingale depth exceeds the grid resolution");
  }
  std::vector<Instance> out;
  for (std::size_t j = 0; j < family.count; ++j) {
    const std::uint64_t seed = family.count == 1 ? family.seed : derive_seed(family.seed, j);
    out.push_back(make_instance(family, grid, seed,
                                mlp::to_string(family.kind) + "#" + std::to_string(j)));
  }
  return out;
}

GridFunction dilate(const GridFunction& f, double s, const PointRule& rule) {
  if (!(s > 0.0)) throw std::invalid_argument("dilation factor must be > 0");
  std::vector<double> out(f.size());
  std::vector<double> y(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = f.node(i);
    for (int a = 0; a < f.dim(); ++a) y[a] = x[a] / s;
    out[i] = rule ? rule(y) : evaluate_extended(f, y);
  }
  return f.with_samples(std::move(out));
}

std::vector<InputTuple> draw_tuples(const std::vector<TestFamily>& families,
                                    const GridSpec& grid, int m, std::size_t count,
                                    std::uint64_t seed) {
  if (families.empty()) throw std::invalid_argument("no test families given");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  std::vector<InputTuple> tuples;
  for (std::size_t j = 0; j < count; ++j) {
    InputTuple tuple;
    for (int i = 0; i < m; ++i) {
      TestFamily fam = families[(j * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)) %
                                families.size()];
      fam.count = 1;
      fam.seed = derive_seed(seed, j, static_cast<std::uint64_t>(i));
      auto inst = generate(fam, grid).front();
      tuple.ids.push_back(mlp::to_string(fam.kind) + "@" + std::to_string(j) + "." +
                          std::to_string(i));
      tuple.inputs.push_back(std::move(inst.f));
      tuple.rules.push_back(std::move(inst.rule));
    }
    tuples.push_back(std::move(tuple));
  }
  return tuples;
}

double RatioReport::max_ratio() const {
  double best = 0.0;
  for (const auto& r : rows) {
    if (!r.excluded) best = std::max(best, r.ratio);
  }
  return best;
}

double RatioReport::median_ratio() const {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (!r.excluded) v.push_back(r.ratio);
  }
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

bool RatioReport::square_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const RatioRow& r) { return r.square_ok; });
}

bool RatioReport::consistency_ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const RatioRow& r) { return r.consistency_ok; });
}

std::vector<RatioReport> ratio_study(Denominator den, const std::vector<OperatorKind>& kinds,
                                     const KernelSpec& k, const std::vector<InputTuple>& tuples,
                                     const TGrid& tg, double lambda, GtPath path) {
  if (den == Denominator::linf) {
    for (const auto& tuple : tuples) {
      for (const auto& f : tuple.inputs) {
        if (f.extension().kind == ExtensionKind::analytic_tail) {
          throw std::invalid_argument("L^inf study needs bounded inputs; got an analytic tail");
        }
      }
    }
  }
  std::vector<RatioReport> reports(kinds.size());
  for (std::size_t q = 0; q < kinds.size(); ++q) {
    reports[q].study = den == Denominator::bmo ? "bmo-blo" : "linf-blo";
    reports[q].kind = kinds[q];
    reports[q].kernel_id = k.id;
    reports[q].lambda = needs_lambda(kinds[q]) ? lambda : 0.0;
    reports[q].requested = tuples.size();
  }
  if (tuples.empty()) return reports;
  const BallFamily fam = BallFamily::dyadic(tuples.front().inputs.front());

  for (std::size_t j = 0; j < tuples.size(); ++j) {
    const auto& tuple = tuples[j];
    double prod_bmo = 1.0;
    double prod_linf = 1.0;
    double prod_4linf = 1.0;
    bool excluded = false;
    for (const auto& f : tuple.inputs) {
      const double linf = max_abs(f);
      const double bmo = bmo_seminorm(f, fam).value;
      prod_linf *= linf * linf;
      prod_4linf *= (4.0 * linf) * (4.0 * linf);
      prod_bmo *= bmo * bmo;
      if (den == Denominator::bmo) {
        excluded = excluded || bmo <= 1e-12 * std::max(1.0, linf);
      } else {
        excluded = excluded || linf == 0.0;
      }
    }
    const double denominator = den == Denominator::bmo ? prod_bmo : prod_linf;
    std::optional<GtStack> stack;
    if (!excluded) stack = compute_gt_stack(k, tuple.inputs, tg, path);
    for (std::size_t q = 0; q < kinds.size(); ++q) {
      RatioRow row;
      row.instance = std::to_string(j);
      row.inputs = tuple.ids;
      row.denominator = denominator;
      row.excluded = excluded;
      if (den == Denominator::linf) row.consistency_ok = prod_bmo <= prod_4linf;
      if (!excluded) {
        const OperatorField F = evaluate_operator(kinds[q], k, *stack, lambda);
        for (const auto& w : F.meta.warnings) {
          if (std::find(reports[q].warnings.begin(), reports[q].warnings.end(), w) ==
              reports[q].warnings.end()) {
            reports[q].warnings.push_back(w);
          }
        }
        const Supremum num = blo_constant(squared(F.values), fam);
        const double blo_f = blo_constant(F.values, fam).value;
        row.numerator = num.value;
        row.ratio = num.value / denominator;
        row.witness = fam.ball(num.witness);
        row.square_gap = blo_f * blo_f - num.value;
        row.square_ok = blo_f * blo_f <= num.value + 1e-12 * std::max(1.0, num.value);
      } else {
        ++reports[q].excluded;
      }
      reports[q].rows.push_back(std::move(row));
    }
  }
  return reports;
}

RatioReport bmo_blo_ratio_study(OperatorKind kind, const KernelSpec& k,
                                const std::vector<InputTuple>& tuples, const TGrid& tg,
                                double lambda) {
  return ratio_study(Denominator::bmo, {kind}, k, tuples, tg, lambda).front();
}

RatioReport linf_blo_ratio_study(OperatorKind kind, const KernelSpec& k,
                                 const std::vector<InputTuple>& tuples, const TGrid& tg,
                                 double lambda) {
  return ratio_study(Denominator::linf, {kind}, k, tuples, tg, lambda).front();
}

void write_ratio_csv(std::ostream& out, const RatioReport& report) {
  out << "instance,inputs,numerator,denominator,ratio,excluded,square_gap,witness_center,"
         "witness_radius\n";
  for (const auto& r : report.rows) {
    out << r.instance << ',' << join(r.inputs, " ") << ',' << format_double(r.numerator) << ','
        << format_double(r.denominator) << ',' << format_double(r.ratio) << ','
        << (r.excluded ? 1 : 0) << ',' << format_double(r.square_gap) << ','
        << center_text(r.witness.center) << ',' << format_double(r.witness.radius) << '\n';
  }
}

void write_ratio_summary(std::ostream& out, const RatioReport& report) {
  out << "study: " << report.study << '\n'
      << "operator: " << to_string(report.kind) << '\n'
      << "kernel: " << report.kernel_id << '\n';
  if (report.lambda > 0.0) out << "lambda: " << format_double(report.lambda) << '\n';
  out << "requested: " << report.requested << '\n'
      << "reported: " << report.reported() << '\n'
      << "excluded: " << report.excluded << '\n'
      << "max_ratio: " << format_double(report.max_ratio()) << '\n'
      << "median_ratio: " << format_double(report.median_ratio()) << '\n'
      << "square_inequality: " << (report.square_ok() ? "ok" : "VIOLATED") << '\n';
  if (report.study == "linf-blo") {
    out << "bmo_linf_consistency: " << (report.consistency_ok() ? "ok" : "VIOLATED") << '\n';
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

void write_ratio_svg(std::ostream& out, const RatioReport& report) {
  const double width = 640.0;
  const double height = 400.0;
  const double pad = 48.0;
  const double top = std::max(report.max_ratio(), 1e-300);
  const std::size_t count = std::max<std::size_t>(report.rows.size(), 1);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad
      << "\" y2=\"" << height - pad << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
      << height - pad << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << pad << "\" y=\"" << pad - 12 << "\" font-size=\"12\">"
      << report.study << ' ' << to_string(report.kind) << ", max "
      << format_double(report.max_ratio()) << "</text>\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (r.excluded) continue;
    const double x = pad + (width - 2 * pad) * (static_cast<double>(i) + 0.5) /
                               static_cast<double>(count);
    const double y = height - pad - (height - 2 * pad) * r.ratio / top;
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  out << "</svg>\n";
}

KernelSpec StudyConfig::kernel_spec() const { return parse_kernel(kernel, m, grid.n); }

TGrid StudyConfig::tgrid() const {
  const double lo = t_min > 0.0 ? t_min : grid.spacing();
  const double hi = t_max > 0.0 ? t_max : 2.0 * grid.L;
  return TGrid::log_spaced(lo, hi, t_count);
}

std::vector<RatioReport> run_study(const StudyConfig& config) {
  const KernelSpec k = config.kernel_spec();
  const auto tuples = draw_tuples(config.families, config.grid, config.m, config.tuples,
                                  config.seed);
  return ratio_study(config.denominator, config.kinds, k, tuples, config.tgrid(),
                     config.lambda);
}

double relative_drift(double base, double refined) {
  if (base == refined) return 0.0;
  if (base == 0.0) return INFINITY;
  return std::fabs(refined - base) / std::fabs(base);
}

bool StabilityReport::pass() const {
  return std::none_of(rows.begin(), rows.end(), [](const StabilityRow& r) { return r.flagged; });
}

StabilityReport refinement_study(const StudyConfig& base, const std::vector<std::string>& variants,
                                 double threshold, std::size_t max_points) {
  StabilityReport report;
  report.threshold = threshold;
  const auto base_reports = run_study(base);
  const double base_t_min = base.t_min > 0.0 ? base.t_min : base.grid.spacing();
  const double base_t_max = base.t_max > 0.0 ? base.t_max : 2.0 * base.grid.L;
  for (const auto& variant : variants) {
    StudyConfig cfg = base;
    if (variant == "N->2N") {
      cfg.grid.N *= 2;
    } else if (variant == "L->2L") {
      cfg.grid.L *= 2.0;
      cfg.grid.N *= 2;
    } else if (variant == "t_min/2") {
      cfg.t_min = 0.5 * base_t_min;
    } else if (variant == "t_max*2") {
      cfg.t_max = 2.0 * base_t_max;
    } else {
      throw std::invalid_argument("unknown refinement variant '" + variant + "'");
    }
    const double points = std::pow(static_cast<double>(cfg.grid.N), cfg.grid.n);
    if (points > static_cast<double>(max_points)) {
      report.omitted.push_back(variant + ": " + format_double(points) +
                               " samples exceed the limit of " + std::to_string(max_points));
      continue;
    }
    const auto refined = run_study(cfg);
    for (std::size_t q = 0; q < refined.size(); ++q) {
      const std::string tag = base_reports[q].study + "[" + to_string(refined[q].kind) + "]";
      const std::pair<const char*, std::pair<double, double>> quantities[] = {
          {"max_ratio", {base_reports[q].max_ratio(), refined[q].max_ratio()}},
          {"median_ratio", {base_reports[q].median_ratio(), refined[q].median_ratio()}},
      };
      for (const auto& [name, values] : quantities) {
        StabilityRow row;
        row.quantity = std::string(name) + " " + tag;
        row.variant = variant;
        row.base = values.first;
        row.refined = values.second;
        row.drift = relative_drift(values.first, values.second);
        row.flagged = row.quantity.rfind("max_ratio", 0) == 0 && !(row.drift <= threshold);
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

void write_stability_csv(std::ostream& out, const StabilityReport& report) {
  out << "quantity,variant,base,refined,drift,flagged\n";
  for (const auto& r : report.rows) {
    out << r.quantity << ',' << r.variant << ',' << format_double(r.base) << ','
        << format_double(r.refined) << ',' << format_double(r.drift) << ','
        << (r.flagged ? 1 : 0) << '\n';
  }
  for (const auto& o : report.omitted) out << "# omitted: " << o << '\n';
}

LpSanityReport lp_sanity(OperatorKind kind, const KernelSpec& k,
                         const std::vector<InputTuple>& tuples, const std::vector<double>& p_i,
                         double p, double lambda, const std::vector<double>& scales,
                         std::size_t t_count) {
  if (p_i.size() != static_cast<std::size_t>(k.m)) {
    throw std::invalid_argument("need one exponent per input");
  }
  double inv = 0.0;
  bool endpoint = true;
  for (double q : p_i) {
    if (!(q >= 1.0)) throw std::invalid_argument("input exponents must be >= 1");
    inv += 1.0 / q;
    endpoint = endpoint && q == 1.0;
  }
  const double derived = 1.0 / inv;
  if (p > 0.0 && std::fabs(p - derived) > 1e-12 * derived) {
    throw std::invalid_argument("Hoelder exponents inconsistent: 1/p != sum 1/p_i");
  }
  LpSanityReport report;
  report.kind = kind;
  report.p_inputs = p_i;
  report.p = derived;
  report.endpoint = endpoint;
  const double weak_p = 1.0 / static_cast<double>(k.m);
  for (std::size_t j = 0; j < tuples.size(); ++j) {
    const auto& tuple = tuples[j];
    const TGrid tg = TGrid::defaults(tuple.inputs.front(), t_count);
    std::vector<double> strong;
    std::vector<double> weak;
    for (double s : scales) {
      std::vector<GridFunction> inputs;
      double prod_p = 1.0;
      double prod_1 = 1.0;
      for (std::size_t i = 0; i < tuple.inputs.size(); ++i) {
        const PointRule rule = i < tuple.rules.size() ? tuple.rules[i] : PointRule{};
        inputs.push_back(dilate(tuple.inputs[i], s, rule));
        prod_p *= lebesgue_norms(inputs.back(), p_i[i]).lp;
        prod_1 *= lebesgue_norms(inputs.back(), 1.0).lp;
      }
      LpSanityRow row;
      row.instance = std::to_string(j);
      row.scale = s;
      if (prod_p == 0.0 || prod_1 == 0.0) {
        row.excluded = true;
        report.rows.push_back(row);
        continue;
      }
      const GtStack stack = compute_gt_stack(k, inputs, tg);
      const OperatorField F = evaluate_operator(kind, k, stack, lambda);
      row.strong_ratio = lebesgue_norms(F.values, derived).lp / prod_p;
      row.weak_ratio = lebesgue_norms(F.values, weak_p).weak_lp / prod_1;
      strong.push_back(row.strong_ratio);
      weak.push_back(row.weak_ratio);
      report.rows.push_back(row);
    }
    report.strong_drift = std::max(report.strong_drift, spread_drift(strong));
    report.weak_drift = std::max(report.weak_drift, spread_drift(weak));
  }
  return report;
}

void write_lp_sanity_csv(std::ostream& out, const LpSanityReport& report) {
  out << "instance,scale,strong_ratio,weak_ratio,excluded\n";
  for (const auto& r : report.rows) {
    out << r.instance << ',' << format_double(r.scale) << ',' << format_double(r.strong_ratio)
        << ',' << format_double(r.weak_ratio) << ',' << (r.excluded ? 1 : 0) << '\n';
  }
}

double plancherel_ratio(int n, std::size_t N, double L, double t_min, double t_max,
                        std::size_t t_count) {
  const Box box = Box::cube(n, L);
  const GridFunction f = make_grid_function(
      box, N,
      [](std::span<const double> x) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        return std::exp(-0.5 * r2) * std::cos(4.0 * x[0]);
      },
      Extension::zero());
  KernelParams params;
  params.m = 1;
  params.n = n;
  const KernelSpec k = builtin_kernel("mexican-hat", params);
  const TGrid tg = TGrid::log_spaced(t_min, t_max, t_count);
  const std::vector<GridFunction> inputs = {f};
  const OperatorField g = g_function(k, inputs, tg);
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num.add(g.values[i] * g.values[i]);
    den.add(f[i] * f[i]);
  }
  return num.value() / den.value();
}

}  // namespace mlp
