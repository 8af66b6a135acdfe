#include "mlplab/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mlplab/numerics.hpp"

namespace mlp {
namespace {

constexpr const char* kCsvHeader = "# box_center, box_half_width, n, points_per_axis, extension";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_vector(const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(field);
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(tok));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_double(v[i]);
  return out;
}

void put_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

double get_f64(std::istream& in) {
  char buf[8];
  if (!in.read(buf, 8)) throw std::runtime_error("truncated binary grid file");
  std::uint64_t bits = 0;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

double kind_code(ExtensionKind k) {
  switch (k) {
    case ExtensionKind::periodic: return 0.0;
    case ExtensionKind::edge_hold: return 1.0;
    case ExtensionKind::zero: return 2.0;
    case ExtensionKind::analytic_tail: return 3.0;
  }
  return 2.0;
}

ExtensionKind kind_from_code(double c) {
  if (c == 0.0) return ExtensionKind::periodic;
  if (c == 1.0) return ExtensionKind::edge_hold;
  if (c == 2.0) return ExtensionKind::zero;
  if (c == 3.0) return ExtensionKind::analytic_tail;
  throw std::runtime_error("bad extension code in binary grid file");
}

std::size_t checked_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) {
    throw std::runtime_error(std::string("bad ") + what + " in binary grid file");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_grid_csv(std::ostream& out, const GridFunction& gf) {
  out << kCsvHeader << '\n';
  out << "# " << join(gf.box().center) << ", " << join(gf.box().half_width) << ", " << gf.dim()
      << ", " << gf.points_per_axis() << ", " << gf.extension().to_string() << '\n';
  for (double v : gf.samples()) out << format_double(v) << '\n';
}

GridFunction read_grid_csv(std::istream& in) {
  std::string header;
  std::string meta;
  if (!std::getline(in, header) || trim(header) != kCsvHeader) {
    throw std::runtime_error("grid CSV: missing header line");
  }
  if (!std::getline(in, meta) || meta.empty() || meta[0] != '#') {
    throw std::runtime_error("grid CSV: missing metadata line");
  }
  std::vector<std::string> fields;
  {
    std::stringstream ss(meta.substr(1));
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
  }
  if (fields.size() != 5) throw std::runtime_error("grid CSV: metadata needs 5 fields");
  Box box{parse_vector(fields[0]), parse_vector(fields[1])};
  const auto n = static_cast<int>(parse_double(fields[2]));
  const auto points = static_cast<std::size_t>(parse_double(fields[3]));
  if (box.dim() != n) throw std::runtime_error("grid CSV: n disagrees with box_center");
  Extension ext = Extension::parse(fields[4]);

  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    samples.push_back(parse_double(line));
  }
  return GridFunction(std::move(box), points, std::move(samples), std::move(ext));
}

void write_grid_binary(std::ostream& out, const GridFunction& gf) {
  out.write(kGridMagic.data(), kGridMagic.size());
  std::vector<double> block;
  block.push_back(gf.dim());
  block.push_back(static_cast<double>(gf.points_per_axis()));
  block.insert(block.end(), gf.box().center.begin(), gf.box().center.end());
  block.insert(block.end(), gf.box().half_width.begin(), gf.box().half_width.end());
  const Extension& ext = gf.extension();
  block.push_back(kind_code(ext.kind));
  block.push_back(ext.kind == ExtensionKind::analytic_tail ? 0.0 : -1.0);  // 0 = "log"
  block.push_back(static_cast<double>(ext.tail.params.size()));
  block.insert(block.end(), ext.tail.params.begin(), ext.tail.params.end());

  put_f64(out, static_cast<double>(block.size()));
  for (double v : block) put_f64(out, v);
  for (double v : gf.samples()) put_f64(out, v);
}

GridFunction read_grid_binary(std::istream& in) {
  std::array<char, 16> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kGridMagic) {
    throw std::runtime_error("binary grid file: bad magic");
  }
  const std::size_t len = checked_count(get_f64(in), "block length");
  std::vector<double> block(len);
  for (auto& v : block) v = get_f64(in);
  std::size_t pos = 0;
  auto next = [&]() {
    if (pos >= block.size()) throw std::runtime_error("binary grid file: short metadata block");
    return block[pos++];
  };
  const std::size_t n = checked_count(next(), "dimension");
  if (n < 1 || n > static_cast<std::size_t>(kMaxDim)) {
    throw std::runtime_error("binary grid file: bad dimension");
  }
  const std::size_t points = checked_count(next(), "points_per_axis");
  Box box;
  for (std::size_t a = 0; a < n; ++a) box.center.push_back(next());
  for (std::size_t a = 0; a < n; ++a) box.half_width.push_back(next());
  Extension ext;
  ext.kind = kind_from_code(next());
  const double tag = next();
  const std::size_t k = checked_count(next(), "parameter count");
  for (std::size_t i = 0; i < k; ++i) ext.tail.params.push_back(next());
  if (ext.kind == ExtensionKind::analytic_tail) {
    if (tag != 0.0) throw std::runtime_error("binary grid file: unknown analytic tail tag");
    ext.tail.tag = "log";
  }
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) total *= points;
  std::vector<double> samples(total);
  for (auto& v : samples) v = get_f64(in);
  return GridFunction(std::move(box), points, std::move(samples), std::move(ext));
}

void save_grid(const std::filesystem::path& path, const GridFunction& gf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (path.extension() == ".csv") {
    write_grid_csv(out, gf);
  } else {
    write_grid_binary(out, gf);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GridFunction load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 16> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 16 && head == kGridMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_grid_binary(in) : read_grid_csv(in);
}

void write_metadata(const std::filesystem::path& path, const Metadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
}

Metadata read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("metadata line without '=': " + line);
    meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return meta;
}

}  // namespace mlp
