#include "helmmg/problem.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "helmmg/rng.hpp"

namespace helmmg {

namespace {

constexpr double kMaxKh = 0.625;
constexpr double kKhSlack = 1e-12;
constexpr int kLatticeSize = 5;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error("config: value of '" + key + "' is not a number: " + text);
  }
}

}  // namespace

std::string ShiftSpec::to_string() const {
  switch (mode) {
    case Mode::zero:
      return "zero";
    case Mode::inverse_k:
      return "inv-k";
    case Mode::fixed: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, beta);
      return std::string(buf, res.ptr);
    }
  }
  return {};
}

ShiftSpec ShiftSpec::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "zero") return zero();
  if (t == "inv-k" || t == "inverse-k") return inverse_k();
  const double beta = parse_double("shift", t);
  if (beta < 0.0) throw Error("shift must be non-negative, got " + t);
  return fixed(beta);
}

ProblemSpec ProblemSpec::constant(double k, int nodes_per_dim, ShiftSpec shift) {
  ProblemSpec s;
  s.kind = WavenumberKind::constant;
  s.k = k;
  s.nodes_per_dim = nodes_per_dim;
  s.shift = shift;
  return s;
}

ProblemSpec ProblemSpec::variable(double k_min, double k_max, Profile profile,
                                  std::uint64_t seed, int nodes_per_dim,
                                  ShiftSpec shift) {
  ProblemSpec s;
  s.kind = WavenumberKind::variable;
  s.k_min = k_min;
  s.k_max = k_max;
  s.k = k_max;
  s.profile = profile;
  s.seed = seed;
  s.nodes_per_dim = nodes_per_dim;
  s.shift = shift;
  return s;
}

void ProblemSpec::validate() const {
  if (nodes_per_dim < 3 || nodes_per_dim % 2 == 0)
    throw Error("nodes_per_dim must be odd and at least 3, got " +
                std::to_string(nodes_per_dim));
  if (kind == WavenumberKind::constant) {
    if (!(k > 0.0)) throw Error("wavenumber k must be positive");
  } else {
    if (!(k_min > 0.0) || !(k_min <= k_max))
      throw Error("variable wavenumber requires 0 < k_min <= k_max");
  }
  if (k_peak() * h() > kMaxKh + kKhSlack) {
    std::ostringstream os;
    os << "grid too coarse: k*h = " << k_peak() * h() << " exceeds " << kMaxKh
       << " (use at least " << nodes_for_wavenumber(k_peak()) << " nodes per dimension)";
    throw Error(os.str());
  }
  if (shift.mode == ShiftSpec::Mode::fixed && shift.beta < 0.0)
    throw Error("complex shift must be non-negative");
}

WavenumberField::WavenumberField(int nodes_per_dim, std::vector<double> values)
    : n_(nodes_per_dim), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(n_) * n_)
    throw Error("wavenumber field size does not match the grid");
}

double WavenumberField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double WavenumberField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

WavenumberField build_wavenumber_field(const ProblemSpec& spec) {
  spec.validate();
  const int n = spec.nodes_per_dim;
  std::vector<double> k(static_cast<std::size_t>(n) * n);
  if (spec.kind == WavenumberKind::constant) {
    std::fill(k.begin(), k.end(), spec.k);
    return WavenumberField(n, std::move(k));
  }

  SplitMix64 rng(spec.seed);
  const double span = spec.k_max - spec.k_min;
  if (spec.profile == Profile::sharp) {
    for (auto& v : k) v = spec.k_min + span * rng.uniform();
    return WavenumberField(n, std::move(k));
  }

  // Smooth: bilinear interpolation of a coarse random lattice, then an affine
  // map so the node values span [k_min, k_max] exactly.
  std::array<double, kLatticeSize * kLatticeSize> lattice{};
  for (auto& v : lattice) v = rng.uniform();
  const double cells = kLatticeSize - 1;
  std::vector<double> chi(k.size());
  for (int j = 0; j < n; ++j) {
    const double y = static_cast<double>(j) / (n - 1) * cells;
    const int cy = std::min(static_cast<int>(y), kLatticeSize - 2);
    const double ty = y - cy;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) / (n - 1) * cells;
      const int cx = std::min(static_cast<int>(x), kLatticeSize - 2);
      const double tx = x - cx;
      auto l = [&](int a, int b) { return lattice[b * kLatticeSize + a]; };
      chi[node_index(i, j, n)] =
          (1 - tx) * (1 - ty) * l(cx, cy) + tx * (1 - ty) * l(cx + 1, cy) +
          (1 - tx) * ty * l(cx, cy + 1) + tx * ty * l(cx + 1, cy + 1);
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(chi.begin(), chi.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  for (std::size_t p = 0; p < k.size(); ++p) {
    const double t = hi > lo ? (chi[p] - lo) / (hi - lo) : 0.0;
    k[p] = spec.k_min + span * t;
  }
  // Pin the extremes so min/max equal the bounds without rounding drift.
  k[static_cast<std::size_t>(lo_it - chi.begin())] = spec.k_min;
  if (hi > lo) k[static_cast<std::size_t>(hi_it - chi.begin())] = spec.k_max;
  return WavenumberField(n, std::move(k));
}

double resolve_shift(const ProblemSpec& spec, const WavenumberField& field) {
  switch (spec.shift.mode) {
    case ShiftSpec::Mode::zero:
      return 0.0;
    case ShiftSpec::Mode::inverse_k:
      return 1.0 / field.max();
    case ShiftSpec::Mode::fixed:
      if (spec.shift.beta < 0.0) throw Error("complex shift must be non-negative");
      return spec.shift.beta;
  }
  return 0.0;
}

CsrMatrix assemble_helmholtz(const ProblemSpec& spec, const WavenumberField& field,
                             bool shift_on) {
  spec.validate();
  const int n = spec.nodes_per_dim;
  if (field.nodes_per_dim() != n)
    throw Error("wavenumber field grid does not match the problem grid");
  const double h = spec.h();
  const double inv_h2 = 1.0 / (h * h);
  const Complex scale =
      shift_on ? Complex(1.0, -resolve_shift(spec, field)) : Complex(1.0, 0.0);
  const Complex imag(0.0, 1.0);

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(5) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index row = node_index(i, j, n);
      const double kn = field.at(i, j);
      Complex diag = 4.0 * inv_h2 - scale * kn * kn;
      // Neighbor weights; an outward ghost folds onto the opposite neighbor
      // via u_ghost = u_inner - 2 i h k u_node.
      double w_left = 1.0, w_right = 1.0, w_down = 1.0, w_up = 1.0;
      int outward = 0;
      if (i == 0) { w_right += 1.0; w_left = 0.0; ++outward; }
      if (i == n - 1) { w_left += 1.0; w_right = 0.0; ++outward; }
      if (j == 0) { w_up += 1.0; w_down = 0.0; ++outward; }
      if (j == n - 1) { w_down += 1.0; w_up = 0.0; ++outward; }
      diag += static_cast<double>(outward) * 2.0 * imag * kn / h;

      const double row_scale = (spec.boundary_rows == BoundaryRows::symmetric)
                                   ? std::ldexp(1.0, -outward)
                                   : 1.0;
      auto push = [&](int ii, int jj, Complex v) {
        t.push_back({row, node_index(ii, jj, n), row_scale * v});
      };
      if (w_down != 0.0) push(i, j - 1, -w_down * inv_h2);
      if (w_left != 0.0) push(i - 1, j, -w_left * inv_h2);
      push(i, j, diag);
      if (w_right != 0.0) push(i + 1, j, -w_right * inv_h2);
      if (w_up != 0.0) push(i, j + 1, -w_up * inv_h2);
    }
  }
  return CsrMatrix::from_triplets(spec.unknowns(), spec.unknowns(), std::move(t));
}

ComplexVector assemble_rhs(const ProblemSpec& spec) {
  spec.validate();
  const int n = spec.nodes_per_dim;
  ComplexVector b = ComplexVector::Zero(spec.unknowns());
  const double h = spec.h();
  b[node_index(n / 2, n / 2, n)] = 1.0 / (h * h);
  return b;
}

int nodes_for_wavenumber(double k, double kh) {
  if (!(k > 0.0) || !(kh > 0.0))
    throw Error("nodes_for_wavenumber: k and kh must be positive");
  // Guard against k/kh landing a hair above an integer through rounding.
  const double intervals = std::ceil(k / kh - 1e-9);
  int n = static_cast<int>(intervals) + 1;
  if (n < 3) n = 3;
  if (n % 2 == 0) ++n;
  return n;
}

std::string to_string(WavenumberKind kind) {
  return kind == WavenumberKind::constant ? "constant" : "variable";
}

std::string to_string(Profile profile) {
  return profile == Profile::smooth ? "smooth" : "sharp";
}

Profile parse_profile(const std::string& text) {
  const std::string t = trim(text);
  if (t == "smooth") return Profile::smooth;
  if (t == "sharp") return Profile::sharp;
  throw Error("unknown profile '" + t + "' (expected smooth or sharp)");
}

std::string problem_config_text(const ProblemSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "kind = " << to_string(spec.kind) << '\n';
  os << "k = " << spec.k << '\n';
  os << "k_min = " << spec.k_min << '\n';
  os << "k_max = " << spec.k_max << '\n';
  os << "profile = " << to_string(spec.profile) << '\n';
  os << "seed = " << spec.seed << '\n';
  os << "nodes_per_dim = " << spec.nodes_per_dim << '\n';
  os << "shift = " << spec.shift.to_string() << '\n';
  os << "boundary_rows = "
     << (spec.boundary_rows == BoundaryRows::symmetric ? "symmetric" : "raw") << '\n';
  return os.str();
}

ProblemSpec parse_problem_config(const std::string& text, ProblemSpec base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "kind") {
      if (value == "constant") base.kind = WavenumberKind::constant;
      else if (value == "variable") base.kind = WavenumberKind::variable;
      else throw Error("config: unknown kind '" + value + "'");
    } else if (key == "k") {
      base.k = parse_double(key, value);
    } else if (key == "k_min") {
      base.k_min = parse_double(key, value);
    } else if (key == "k_max") {
      base.k_max = parse_double(key, value);
    } else if (key == "profile") {
      base.profile = parse_profile(value);
    } else if (key == "seed") {
      try {
        base.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw Error("config: seed is not an unsigned integer: " + value);
      }
    } else if (key == "nodes_per_dim") {
      base.nodes_per_dim = static_cast<int>(parse_double(key, value));
    } else if (key == "shift") {
      base.shift = ShiftSpec::parse(value);
    } else if (key == "boundary_rows") {
      if (value == "symmetric") base.boundary_rows = BoundaryRows::symmetric;
      else if (value == "raw") base.boundary_rows = BoundaryRows::raw;
      else throw Error("config: unknown boundary_rows '" + value + "'");
    } else {
      throw Error("config line " + std::to_string(line_no) + ": unknown key '" +
                  key + "'");
    }
  }
  return base;
}

void write_field_csv(std::ostream& out, const WavenumberField& field) {
  const int n = field.nodes_per_dim();
  const double h = 1.0 / (n - 1);
  out << "x,y,k\n" << std::setprecision(17);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out << i * h << ',' << j * h << ',' << field.at(i, j) << '\n';
}

}  // namespace helmmg
