#include "config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mlplab/numerics.hpp"

namespace mlp::cli {
namespace {

const KeyValues& defaults() {
  static const KeyValues d = {
      {"command", ""},
      {"kernel", "tensor-odd-gaussian"},
      {"m", "2"},
      {"n", "1"},
      {"N", "512"},
      {"L", "8"},
      {"t_min", "0"},
      {"t_max", "0"},
      {"t_count", "64"},
      {"lambda", "8"},
      {"op", "g"},
      {"path", "automatic"},
      {"families", ""},
      {"inputs", ""},
      {"tuples", "20"},
      {"denominator", "bmo"},
      {"p", "2"},
      {"lambdas", "3,5,8,12"},
      {"variants", "N->2N,L->2L"},
      {"threshold", "0.25"},
      {"verify_count", "200"},
      {"seed", "1"},
      {"vanishing_tol", "1e-6"},
      {"ratio_tol", "1e-3"},
      {"out", ""},
  };
  return d;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double number(const KeyValues& kv, const std::string& key) {
  try {
    return parse_double(kv.at(key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(key + ": not a number: '" + kv.at(key) + "'");
  }
}

std::size_t count(const KeyValues& kv, const std::string& key, double lo, double hi) {
  const double v = number(kv, key);
  if (v != std::floor(v) || v < lo || v > hi) {
    throw std::invalid_argument(key + " must be an integer in [" + format_double(lo) + ", " +
                                format_double(hi) + "]");
  }
  return static_cast<std::size_t>(v);
}

Command parse_command(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("command required");
  for (Command c : {Command::validate_kernel, Command::compute, Command::norms, Command::verify,
                    Command::sweep, Command::refine}) {
    if (to_string(c) == text) return c;
  }
  throw std::invalid_argument("command: unknown command '" + text + "'");
}

GtPath parse_path(const std::string& text) {
  if (text == "automatic") return GtPath::automatic;
  if (text == "direct") return GtPath::direct;
  if (text == "fast") return GtPath::fast;
  throw std::invalid_argument("path: expected automatic, direct or fast");
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::validate_kernel:
      return "validate-kernel";
    case Command::compute:
      return "compute";
    case Command::norms:
      return "norms";
    case Command::verify:
      return "verify";
    case Command::sweep:
      return "sweep";
    case Command::refine:
      return "refine";
  }
  return "verify";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "command", "kernel",   "m",           "n",         "N",         "L",
      "t_min",   "t_max",    "t_count",     "lambda",    "op",        "path",
      "families", "inputs",  "tuples",      "denominator", "p",       "lambdas",
      "variants", "threshold", "verify_count", "seed",   "vanishing_tol", "ratio_tol",
      "out"};
  return keys;
}

KeyValues parse_tokens(const std::string& text) {
  KeyValues kv;
  std::stringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::stringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key=value, got '" +
                                    token + "'");
      }
      const std::string key = token.substr(0, eq);
      if (!defaults().count(key)) throw std::invalid_argument("unknown key '" + key + "'");
      if (kv.count(key)) throw std::invalid_argument("key '" + key + "' given twice");
      kv[key] = token.substr(eq + 1);
    }
  }
  return kv;
}

RunConfig resolve(const KeyValues& given) {
  KeyValues kv = defaults();
  for (const auto& [key, value] : given) {
    if (!kv.count(key)) throw std::invalid_argument("unknown key '" + key + "'");
    kv[key] = value;
  }
  RunConfig c;
  c.command = parse_command(kv["command"]);
  c.kernel = kv["kernel"];
  c.m = static_cast<int>(count(kv, "m", 1, 3));
  c.n = static_cast<int>(count(kv, "n", 1, 2));
  c.N = count(kv, "N", 4, 1 << 20);
  c.L = number(kv, "L");
  if (!(c.L > 0.0)) throw std::invalid_argument("L must be > 0");
  c.t_min = number(kv, "t_min");
  c.t_max = number(kv, "t_max");
  if (c.t_min < 0.0 || c.t_max < 0.0) throw std::invalid_argument("t_min and t_max must be >= 0");
  c.t_count = count(kv, "t_count", 8, 1 << 16);
  c.lambda = number(kv, "lambda");
  c.op = parse_operator_kind(kv["op"]);
  if (needs_lambda(c.op) && !(c.lambda > 1.0)) {
    throw std::invalid_argument("lambda must be > 1 for " + to_string(c.op) + ", got " +
                                kv["lambda"]);
  }
  c.path = parse_path(kv["path"]);
  c.families = split(kv["families"], ';');
  for (const auto& f : c.families) TestFamily::parse(f);
  c.inputs = split(kv["inputs"], ',');
  c.tuples = count(kv, "tuples", 1, 1e6);
  if (kv["denominator"] == "bmo") {
    c.denominator = Denominator::bmo;
  } else if (kv["denominator"] == "linf") {
    c.denominator = Denominator::linf;
  } else {
    throw std::invalid_argument("denominator: expected bmo or linf");
  }
  c.p = number(kv, "p");
  if (!(c.p > 0.0)) throw std::invalid_argument("p must be > 0");
  c.lambdas.clear();
  for (const auto& s : split(kv["lambdas"], ',')) {
    const double v = parse_double(s);
    if (!(v > 1.0)) throw std::invalid_argument("lambdas: every lambda must be > 1");
    c.lambdas.push_back(v);
  }
  c.variants = split(kv["variants"], ',');
  for (const auto& v : c.variants) {
    if (v != "N->2N" && v != "L->2L" && v != "t_min/2" && v != "t_max*2") {
      throw std::invalid_argument("variants: unknown variant '" + v + "'");
    }
  }
  c.threshold = number(kv, "threshold");
  if (!(c.threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  c.verify_count = count(kv, "verify_count", 1, 1e6);
  c.seed = count(kv, "seed", 0, 9007199254740992.0);
  c.vanishing_tol = number(kv, "vanishing_tol");
  c.ratio_tol = number(kv, "ratio_tol");
  if (!(c.vanishing_tol > 0.0) || !(c.ratio_tol >= 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  c.out = kv["out"];
  c.resolved = kv;
  return c;
}

RunConfig parse_config(const std::string& text) { return resolve(parse_tokens(text)); }

std::string render(const RunConfig& config) {
  std::string out;
  for (const auto& key : config_keys()) {
    const auto it = config.resolved.find(key);
    const std::string value = it == config.resolved.end() ? "" : it->second;
    if (value.empty()) {
      out += "# " + key + "= (unset)\n";
    } else {
      out += key + "=" + value + "\n";
    }
  }
  return out;
}

std::vector<TestFamily> RunConfig::family_specs() const {
  std::vector<TestFamily> out;
  for (const auto& f : families) out.push_back(TestFamily::parse(f));
  if (!out.empty()) return out;
  if (denominator == Denominator::linf) {
    out.push_back(TestFamily::parse("smooth-bump:spread=4"));
    out.push_back(TestFamily::parse("half-indicator:spread=4"));
  } else {
    out.push_back(TestFamily::parse("log-singularity:spread=2"));
    out.push_back(TestFamily::parse("dyadic-martingale:depth=5,sigma=1,extent=" + format_double(L)));
  }
  return out;
}

StudyConfig RunConfig::study() const {
  StudyConfig s;
  s.grid = grid();
  s.kernel = kernel;
  s.m = m;
  s.kinds = {op};
  s.denominator = denominator;
  s.lambda = lambda;
  s.families = family_specs();
  s.tuples = tuples;
  s.seed = seed;
  s.t_min = t_min;
  s.t_max = t_max;
  s.t_count = t_count;
  return s;
}

}  // namespace mlp::cli
