#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mlplab/grid_io.hpp"
#include "mlplab/numerics.hpp"

namespace mlp::cli {
namespace fs = std::filesystem;
namespace {

class Artifacts {
 public:
  Artifacts(fs::path dir, RunResult& result) : dir_(std::move(dir)), result_(result) {}

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    result_.artifacts.push_back(name);
    return out;
  }
  fs::path path(const std::string& name) {
    result_.artifacts.push_back(name);
    return dir_ / name;
  }

 private:
  fs::path dir_;
  RunResult& result_;
};

void fail(RunResult& r, std::string check, std::string detail) {
  r.failures.push_back({std::move(check), std::move(detail)});
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::vector<GridFunction> load_inputs(const RunConfig& c) {
  std::vector<GridFunction> out;
  for (const auto& p : c.inputs) out.push_back(load_grid(p));
  return out;
}

TGrid tgrid_for(const RunConfig& c, const GridFunction& g) {
  const double lo = c.t_min > 0.0 ? c.t_min : g.spacing();
  const double hi = c.t_max > 0.0 ? c.t_max : 2.0 * g.box().half_width[0];
  return TGrid::log_spaced(lo, hi, c.t_count);
}

void cmd_validate(const RunConfig& c, Artifacts& art, RunResult& r, std::ostream& log) {
  const KernelSpec k = parse_kernel(c.kernel, c.m, c.n);
  ProbePlan plan;
  plan.extent = std::max(plan.extent, k.support_radius_hint + 0.5);
  plan.seed = c.seed;
  plan.vanishing_tol = c.vanishing_tol;
  plan.ratio_tol = c.ratio_tol;
  const auto report = validate_kernel(k, plan);
  auto out = art.open("validation.csv");
  write_validation_csv(out, report);
  for (const auto& cond : report.conditions) {
    log << cond.name << ": " << format_double(cond.value) << (cond.pass ? " ok" : " FAIL") << '\n';
    if (!cond.pass) fail(r, "kernel:" + cond.name, k.id + " value " + format_double(cond.value));
  }
}

void cmd_compute(const RunConfig& c, Artifacts& art, RunResult& r, std::ostream& log) {
  const KernelSpec k = parse_kernel(c.kernel, c.m, c.n);
  std::vector<GridFunction> inputs = load_inputs(c);
  std::vector<std::string> ids = c.inputs;
  if (inputs.empty()) {
    auto tuples = draw_tuples(c.family_specs(), c.grid(), k.m, 1, c.seed);
    inputs = std::move(tuples.front().inputs);
    ids = tuples.front().ids;
  }
  const TGrid tg = tgrid_for(c, inputs.front());
  const GtStack stack = compute_gt_stack(k, inputs, tg, c.path);
  const OperatorField F = evaluate_operator(c.op, k, stack, c.lambda);
  save_operator_field(art.path("field.csv"), F);
  art.path("field.csv.meta");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    save_grid(art.path("input" + std::to_string(i) + ".csv"), inputs[i]);
  }
  double lo = INFINITY;
  double hi = 0.0;
  for (double v : F.values.samples()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo >= 0.0)) fail(r, "nonnegativity", "minimum " + format_double(lo));
  log << to_string(c.op) << " over " << inputs.size() << " inputs: max " << format_double(hi)
      << ", tail bound " << format_double(F.meta.tail_bound) << ", path " << F.meta.path << '\n';
  for (const auto& w : F.meta.warnings) log << "warning: " << w << '\n';
  auto summary = art.open("summary.txt");
  summary << "operator: " << to_string(c.op) << "\nkernel: " << k.id << "\ninputs:";
  for (const auto& id : ids) summary << ' ' << id;
  summary << "\nmax: " << format_double(hi) << "\nmin: " << format_double(lo)
          << "\ntail_bound: " << format_double(F.meta.tail_bound) << '\n';
  for (const auto& w : F.meta.warnings) summary << "warning: " << w << '\n';
}

struct NormChecks {
  RunResult& r;
  std::ostream& csv;

  void record(const std::string& check, const std::string& id, double lhs, double rhs,
              bool pass) {
    csv << check << ',' << csv_field(id) << ',' << format_double(lhs) << ','
        << format_double(rhs) << ',' << (pass ? 1 : 0) << '\n';
    if (!pass) {
      fail(r, check, id + ": " + format_double(lhs) + " > " + format_double(rhs));
    }
  }
};

void cmd_norms(const RunConfig& c, Artifacts& art, RunResult& r, std::ostream& log) {
  std::vector<std::pair<std::string, GridFunction>> fns;
  for (const auto& p : c.inputs) fns.emplace_back(p, load_grid(p));
  if (fns.empty()) {
    for (const auto& fam : c.family_specs()) {
      for (auto& inst : generate(fam, c.grid())) fns.emplace_back(inst.id, std::move(inst.f));
    }
  }
  auto out = art.open("norms.csv");
  write_norm_csv_header(out);
  for (const auto& [id, f] : fns) {
    const BallFamily fam = BallFamily::dyadic(f);
    const NormReport rep = compute_norms(f, fam, c.p, id);
    write_norm_csv_row(out, rep);
    if (!(rep.blo <= 2.0 * rep.linf)) fail(r, "blo<=2linf", id);
    if (!(rep.bmo <= 2.0 * rep.blo)) fail(r, "bmo<=2blo", id);
    if (!(rep.weak_lp <= rep.lp * (1.0 + 1e-12))) fail(r, "weak<=strong", id);
  }
  log << fns.size() << " functions measured\n";
}

std::vector<TestFamily> verify_families(const RunConfig& c) {
  if (!c.families.empty()) return c.family_specs();
  return {TestFamily::parse("log-singularity:spread=2"),
          TestFamily::parse("log-singularity:spread=2,sign=-1"),
          TestFamily::parse("dyadic-martingale:depth=5,sigma=1,extent=" + format_double(c.L)),
          TestFamily::parse("smooth-bump:spread=4,width=2,height=3"),
          TestFamily::parse("half-indicator:spread=4"),
          TestFamily::parse("indicator:spread=2,lo=-1,hi=1")};
}

void cmd_verify(const RunConfig& c, Artifacts& art, RunResult& r, std::ostream& log) {
  auto csv = art.open("verify.csv");
  csv << "check,instance,lhs,rhs,pass\n";
  NormChecks checks{r, csv};
  const auto families = verify_families(c);
  const GridSpec grid = c.grid();
  std::size_t count = 0;
  std::optional<BallFamily> balls;
  for (std::size_t j = 0; j < c.verify_count; ++j) {
    TestFamily fam = families[j % families.size()];
    fam.count = 1;
    fam.seed = derive_seed(c.seed, j);
    const Instance inst = generate(fam, grid).front();
    const GridFunction& f = inst.f;
    if (!balls) balls = BallFamily::dyadic(f);
    const std::string id = inst.id + "@" + std::to_string(j);
    const double linf = lebesgue_norms(f, c.p).linf;
    const double bmo = bmo_seminorm(f, *balls).value;
    const double blo = blo_constant(f, *balls).value;
    checks.record("blo<=2linf", id, blo, 2.0 * linf, blo <= 2.0 * linf);
    checks.record("bmo<=2blo", id, bmo, 2.0 * blo, bmo <= 2.0 * blo);
    const LebesgueNorms ln = lebesgue_norms(f, c.p);
    checks.record("weak<=strong", id, ln.weak_lp, ln.lp, ln.weak_lp <= ln.lp * (1.0 + 1e-12));
    std::vector<double> abs_s(f.samples().begin(), f.samples().end());
    for (double& v : abs_s) v = std::fabs(v);
    const GridFunction F = f.with_samples(abs_s);
    for (double& v : abs_s) v *= v;
    const double blo_F = blo_constant(F, *balls).value;
    const double blo_F2 = blo_constant(f.with_samples(abs_s), *balls).value;
    checks.record("square-blo", id, blo_F * blo_F, blo_F2 + 1e-12 * std::max(1.0, blo_F2),
                  blo_F * blo_F <= blo_F2 + 1e-12 * std::max(1.0, blo_F2));
    const double v = essinf_esssup_violation(f, *balls);
    checks.record("essinf-esssup", id, v, 0.0, v <= 0.0);
    ++count;
  }

  // Operator-level invariants on a handful of tuples.
  const KernelSpec k = parse_kernel(c.kernel, c.m, c.n);
  const double lambda = c.lambda > 1.0 ? c.lambda : 8.0;
  const std::size_t op_tuples = std::min<std::size_t>(4, std::max<std::size_t>(1, c.verify_count / 50));
  const auto tuples = draw_tuples(families, grid, k.m, op_tuples, derive_seed(c.seed, 1u << 20));
  const TGrid tg = tgrid_for(c, tuples.front().inputs.front());
  const double cone = std::pow(2.0, lambda * k.n / 2.0);
  for (std::size_t j = 0; j < tuples.size(); ++j) {
    const std::string id = "tuple@" + std::to_string(j);
    const GtStack stack = compute_gt_stack(k, tuples[j].inputs, tg, c.path);
    const OperatorField g = g_function(k, stack);
    const OperatorField S = area_integral(k, stack);
    const OperatorField gs = g_star_lambda(k, stack, lambda);
    const OperatorField gs2 = g_star_lambda(k, stack, lambda + 1.0);
    double worst_cone = 0.0;
    double worst_mono = 0.0;
    bool cone_ok = true;
    bool mono_ok = true;
    for (std::size_t i = 0; i < S.values.size(); ++i) {
      cone_ok = cone_ok && S.values[i] <= cone * gs.values[i];
      worst_cone = std::max(worst_cone, S.values[i] - cone * gs.values[i]);
      mono_ok = mono_ok && gs2.values[i] <= gs.values[i] * (1.0 + 1e-12);
      worst_mono = std::max(worst_mono, gs2.values[i] - gs.values[i]);
    }
    checks.record("cone-domination", id, worst_cone, 0.0, cone_ok);
    checks.record("lambda-monotone", id, worst_mono, 0.0, mono_ok);
    for (const OperatorField* F : {&g, &S, &gs}) {
      const auto s = F->values.samples();
      const double lo = *std::min_element(s.begin(), s.end());
      checks.record("nonnegative[" + to_string(F->meta.kind) + "]", id, -lo, 0.0, lo >= 0.0);
      const BallFamily fam = BallFamily::dyadic(F->values);
      std::vector<double> sq(s.begin(), s.end());
      for (double& v : sq) v *= v;
      const double b = blo_constant(F->values, fam).value;
      const double b2 = blo_constant(F->values.with_samples(sq), fam).value;
      const double rhs = b2 + 1e-12 * std::max(1.0, b2);
      checks.record("square-blo[" + to_string(F->meta.kind) + "]", id, b * b, rhs, b * b <= rhs);
    }
  }
  log << count << " functions and " << tuples.size() << " operator tuples checked, "
      << r.failures.size() << " failures\n";
}

void emit_ratio(const RatioReport& rep, const std::string& stem, Artifacts& art, RunResult& r,
                std::ostream& summary) {
  {
    auto out = art.open(stem + ".csv");
    write_ratio_csv(out, rep);
  }
  {
    auto out = art.open(stem + ".svg");
    write_ratio_svg(out, rep);
  }
  write_ratio_summary(summary, rep);
  summary << '\n';
  if (!rep.square_ok()) fail(r, "square-blo", stem);
  if (!rep.consistency_ok()) fail(r, "bmo-linf-consistency", stem);
  if (!std::isfinite(rep.max_ratio())) fail(r, "finite-ratio", stem);
  if (rep.reported() == 0) fail(r, "no-instances", stem + ": every tuple was excluded");
}

void cmd_sweep(const RunConfig& c, Artifacts& art, RunResult& r, std::ostream& log) {
  const OperatorKind kind = needs_lambda(c.op) ? c.op : OperatorKind::gstar;
  const KernelSpec k = parse_kernel(c.kernel, c.m, c.n);
  const StudyConfig study = c.study();
  const auto tuples = draw_tuples(study.families, study.grid, k.m, study.tuples, study.seed);
  const TGrid tg = study.tgrid();
  auto summary = art.open("summary.txt");
  for (double lambda : c.lambdas) {
    const auto rep = ratio_study(c.denominator, {kind}, k, tuples, tg, lambda, c.path).front();
    const std::string stem = "sweep_lambda_" + format_double(lambda);
    emit_ratio(rep, stem, art, r, summary);
    log << "lambda " << format_double(lambda) << ": max ratio " << format_double(rep.max_ratio())
        << '\n';
  }
}

void cmd_refine(const RunConfig& c, Artifacts& art, RunResult& r, std::ostream& log) {
  const StabilityReport rep = refinement_study(c.study(), c.variants, c.threshold);
  auto out = art.open("stability.csv");
  write_stability_csv(out, rep);
  for (const auto& row : rep.rows) {
    log << row.quantity << ' ' << row.variant << ": drift " << format_double(row.drift)
        << (row.flagged ? " FLAGGED" : "") << '\n';
    if (row.flagged) {
      fail(r, "drift", row.quantity + " " + row.variant + " " + format_double(row.drift));
    }
  }
  for (const auto& o : rep.omitted) log << "omitted: " << o << '\n';
}

}  // namespace

RunResult run(const RunConfig& config, const std::string& source, std::ostream& log) {
  if (config.out.empty()) throw std::invalid_argument("--out <dir> is required");
  fs::create_directories(config.out);
  RunResult result;
  Artifacts art(config.out, result);
  {
    auto echo = art.open("config.txt");
    echo << source;
  }
  {
    auto resolved = art.open("resolved_config.txt");
    resolved << render(config);
  }
  switch (config.command) {
    case Command::validate_kernel:
      cmd_validate(config, art, result, log);
      break;
    case Command::compute:
      cmd_compute(config, art, result, log);
      break;
    case Command::norms:
      cmd_norms(config, art, result, log);
      break;
    case Command::verify:
      cmd_verify(config, art, result, log);
      break;
    case Command::sweep:
      cmd_sweep(config, art, result, log);
      break;
    case Command::refine:
      cmd_refine(config, art, result, log);
      break;
  }
  {
    auto out = art.open("failures.csv");
    out << "check,detail\n";
    for (const auto& f : result.failures) out << csv_field(f.check) << ',' << csv_field(f.detail) << '\n';
  }
  result.exit_code = result.failures.empty() ? kPass : kChecksFailed;
  return result;
}

}  // namespace mlp::cli
