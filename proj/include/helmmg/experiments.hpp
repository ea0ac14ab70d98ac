#pragma once

// Named experiment presets, the bench runner and regression against the
// bundled reference cycle counts.

#include <optional>
#include <string>
#include <vector>

#include "helmmg/multigrid.hpp"
#include "helmmg/problem.hpp"
#include "helmmg/transfer.hpp"

namespace helmmg {

struct ExperimentCase {
  ProblemSpec spec;
  TransferScheme scheme = TransferScheme::bezier;
  CoarsenOn coarsen_on = CoarsenOn::csl;
  CycleConfig cycle;
  /// Grid chosen explicitly rather than by the kh rule.
  bool explicit_grid = false;

  /// "50" or "10-75".
  std::string k_label() const;
  /// "jacobi" or "gmres3".
  std::string smoother_label() const;
};

struct ToleranceBand {
  double relative = 0.25;
  int absolute = 3;

  /// max(relative * expected, absolute).
  double width(int expected) const;
  bool contains(int expected, int actual) const;
};

struct ExperimentPreset {
  std::string name;
  std::string description;
  std::vector<ExperimentCase> cases;
  ToleranceBand band;
};

/// Jacobi (omega = 4.5) or GMRES(3) cycles with nu post-smoothing steps.
CycleConfig jacobi_cycle(int nu, int gamma);
CycleConfig gmres_cycle(int nu, int gamma);

/// Bezier transfer, CSL coarsening, grid from solver_nodes_for_wavenumber.
ExperimentCase constant_case(double k, ShiftSpec shift, CycleConfig cycle);
ExperimentCase variable_case(double k_min, double k_max, Profile profile,
                             ShiftSpec shift, CycleConfig cycle, std::uint64_t seed = 1);

/// Grid for a wavenumber peak: the kh rule, bumped to the next count whose
/// hierarchy halves cleanly.
int solver_nodes_for_wavenumber(double k_peak, double kh = 0.625);

const std::vector<ExperimentPreset>& experiment_presets();
/// Throws Error listing the known names.
const ExperimentPreset& find_preset(const std::string& name);

struct BenchRow {
  ExperimentCase config;
  int cycles = 0;
  double wall_ms = 0.0;
  SolveStatus status = SolveStatus::max_cycles;
  double final_relative_residual = 0.0;

  bool converged() const { return status == SolveStatus::converged; }
};

BenchRow run_case(const ExperimentCase& c);

/// Runs every case on up to `jobs` worker threads (0 = hardware
/// concurrency). Rows come back in case order.
std::vector<BenchRow> run_cases(const std::vector<ExperimentCase>& cases, int jobs);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

struct ReferenceEntry {
  std::string preset;
  std::string k_label;
  int nu = 0;
  int gamma = 1;
  int nodes = 0;  ///< 0: grid follows the kh rule
  int cycles = 0;
  std::string source;
};

/// Parses the reference CSV. Lines starting with '#' are comments. Throws
/// on malformed lines and on entries without a source tag.
std::vector<ReferenceEntry> parse_reference_table(const std::string& text);

/// The table compiled into the library.
const std::vector<ReferenceEntry>& bundled_reference();

struct RegressionCheck {
  const BenchRow* row = nullptr;
  std::optional<ReferenceEntry> expected;
  bool pass = false;
  std::string message;
};

/// Compares each row with its reference entry. Rows without an entry pass
/// and are reported as unchecked.
std::vector<RegressionCheck> regress(const std::vector<BenchRow>& rows,
                                     const std::string& preset,
                                     const ToleranceBand& band,
                                     const std::vector<ReferenceEntry>& reference);

}  // namespace helmmg
