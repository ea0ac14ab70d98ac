#pragma once

// Model Helmholtz problems on the unit square:
//
//   -lap u - k(x,y)^2 u = delta(x - 1/2, y - 1/2)
//
// with a first-order Sommerfeld condition, discretized with the 5-point
// stencil on a uniform grid. Every grid node, including the boundary, is an
// unknown; the boundary condition is folded into boundary rows by eliminating
// the ghost node u_ghost = u_inner - 2 i h k u_node.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "helmmg/linalg.hpp"

namespace helmmg {

enum class WavenumberKind { constant, variable };
enum class Profile { smooth, sharp };

/// Complex shift beta applied as k^2 -> (1 - i beta) k^2 in the shifted operator.
struct ShiftSpec {
  enum class Mode { fixed, inverse_k, zero };
  Mode mode = Mode::fixed;
  double beta = 0.7;

  static ShiftSpec fixed(double beta) { return {Mode::fixed, beta}; }
  static ShiftSpec inverse_k() { return {Mode::inverse_k, 0.0}; }
  static ShiftSpec zero() { return {Mode::zero, 0.0}; }

  std::string to_string() const;
  /// Parses "<float>", "inv-k" or "zero".
  static ShiftSpec parse(const std::string& text);
};

/// How boundary rows are scaled after ghost-node elimination.
///
/// `symmetric` halves edge rows and quarters corner rows so the assembled
/// matrix is complex symmetric; `raw` keeps the eliminated stencil as is.
/// Both describe the same discrete solution.
enum class BoundaryRows { symmetric, raw };

struct ProblemSpec {
  WavenumberKind kind = WavenumberKind::constant;
  double k = 1.0;
  double k_min = 0.0;
  double k_max = 0.0;
  Profile profile = Profile::smooth;
  std::uint64_t seed = 1;
  int nodes_per_dim = 3;
  ShiftSpec shift;
  BoundaryRows boundary_rows = BoundaryRows::symmetric;

  static ProblemSpec constant(double k, int nodes_per_dim,
                              ShiftSpec shift = ShiftSpec::fixed(0.7));
  static ProblemSpec variable(double k_min, double k_max, Profile profile,
                              std::uint64_t seed, int nodes_per_dim,
                              ShiftSpec shift = ShiftSpec::inverse_k());

  double h() const { return 1.0 / static_cast<double>(nodes_per_dim - 1); }
  Index unknowns() const {
    return static_cast<Index>(nodes_per_dim) * nodes_per_dim;
  }
  /// Largest wavenumber in the problem.
  double k_peak() const { return kind == WavenumberKind::constant ? k : k_max; }

  /// Throws Error when an invariant is violated (odd node count >= 3,
  /// k_peak * h <= 0.625, 0 < k_min <= k_max, ...).
  void validate() const;
};

/// Node-wise wavenumber k(x_i, y_j), x index fastest.
class WavenumberField {
 public:
  WavenumberField(int nodes_per_dim, std::vector<double> values);

  int nodes_per_dim() const { return n_; }
  double at(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * n_ + i];
  }
  const std::vector<double>& values() const { return values_; }
  double min() const;
  double max() const;

 private:
  int n_;
  std::vector<double> values_;
};

WavenumberField build_wavenumber_field(const ProblemSpec& spec);

/// Resolves the shift to a concrete beta (inverse_k -> 1 / max k of the field).
double resolve_shift(const ProblemSpec& spec, const WavenumberField& field);

/// Helmholtz operator A (shift_on = false) or shifted Laplacian C (true).
CsrMatrix assemble_helmholtz(const ProblemSpec& spec, const WavenumberField& field,
                             bool shift_on);

/// Discrete point source: 1/h^2 at the center node, zero elsewhere.
ComplexVector assemble_rhs(const ProblemSpec& spec);

/// Smallest odd node count n with k / (n - 1) <= kh.
int nodes_for_wavenumber(double k, double kh = 0.625);

/// Lexicographic index of node (i, j).
inline Index node_index(int i, int j, int nodes_per_dim) {
  return static_cast<Index>(j) * nodes_per_dim + i;
}

/// "key = value" lines; round-trips through parse_problem_config.
std::string problem_config_text(const ProblemSpec& spec);
/// Applies recognized keys on top of `base`; unknown keys are an error.
ProblemSpec parse_problem_config(const std::string& text,
                                 ProblemSpec base = ProblemSpec{});

/// CSV with header "x,y,k", one row per node in lexicographic order.
void write_field_csv(std::ostream& out, const WavenumberField& field);

std::string to_string(WavenumberKind kind);
std::string to_string(Profile profile);
Profile parse_profile(const std::string& text);

}  // namespace helmmg
