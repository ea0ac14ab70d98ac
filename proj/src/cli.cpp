#include "helmmg/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "helmmg/certificate.hpp"
#include "helmmg/experiments.hpp"
#include "helmmg/matrix_market.hpp"
#include "helmmg/multigrid.hpp"
#include "helmmg/problem.hpp"

namespace helmmg {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemFlags {
  double k = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  std::string profile = "constant";
  std::uint64_t seed = 1;
  double ppw = 0.625;
  int nodes = 0;
  std::string shift = "0.7";
  std::string boundary_rows = "symmetric";
};

struct SolverFlags {
  std::string transfer = "bezier";
  std::string coarsen_on = "csl";
  std::string smoother = "jacobi";
  double omega = 4.5;
  int nu = 1;
  int nu_pre = 0;
  std::string cycle = "v";
  double tol = 1e-5;
  int max_cycles = 1000;
};

void add_problem_flags(CLI::App* app, ProblemFlags& f) {
  auto* k = app->add_option("--k", f.k, "constant wavenumber");
  auto* kmin = app->add_option("--k-min", f.k_min, "smallest wavenumber (variable k)");
  auto* kmax = app->add_option("--k-max", f.k_max, "largest wavenumber (variable k)");
  k->excludes(kmin)->excludes(kmax);
  app->add_option("--profile", f.profile, "wavenumber profile")
      ->check(CLI::IsMember({"constant", "smooth", "sharp"}))
      ->capture_default_str();
  app->add_option("--seed", f.seed, "seed of the variable wavenumber field")
      ->capture_default_str();
  app->add_option("--ppw", f.ppw, "resolution rule as k*h")->capture_default_str();
  app->add_option("--nodes", f.nodes, "nodes per dimension (overrides --ppw)");
  app->add_option("--shift", f.shift, "complex shift beta: <float>, inv-k or zero")
      ->capture_default_str();
  app->add_option("--boundary-rows", f.boundary_rows, "boundary row scaling")
      ->check(CLI::IsMember({"symmetric", "raw"}))
      ->capture_default_str();
}

void add_transfer_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--transfer", f.transfer, "interpolation stencil")
      ->check(CLI::IsMember({"linear", "bezier"}))
      ->capture_default_str();
  app->add_option("--coarsen-on", f.coarsen_on, "operator feeding the Galerkin chain")
      ->check(CLI::IsMember({"csl", "original"}))
      ->capture_default_str();
  app->add_option("--omega", f.omega, "Jacobi parameter in X = omega diag(A)")
      ->capture_default_str();
  app->add_option("--nu", f.nu, "post-smoothing steps")->capture_default_str();
}

void add_cycle_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--smoother", f.smoother, "jacobi or gmres<m> (e.g. gmres3)")
      ->capture_default_str();
  app->add_option("--nu-pre", f.nu_pre, "pre-smoothing steps")->capture_default_str();
  app->add_option("--cycle", f.cycle, "v or w")
      ->check(CLI::IsMember({"v", "w"}))
      ->capture_default_str();
  app->add_option("--tol", f.tol, "relative residual tolerance")->capture_default_str();
  app->add_option("--max-cycles", f.max_cycles, "cycle limit")->capture_default_str();
}

// Builds and validates the problem. `hierarchy` picks grids that coarsen
// cleanly when the node count comes from the resolution rule.
ProblemSpec make_spec(const ProblemFlags& f, bool hierarchy) {
  try {
    const ShiftSpec shift = ShiftSpec::parse(f.shift);
    ProblemSpec spec;
    if (f.profile == "constant") {
      if (!(f.k > 0.0)) throw UsageError("--profile constant needs --k > 0");
      if (f.k_min != 0.0 || f.k_max != 0.0)
        throw UsageError("--k-min/--k-max need --profile smooth or sharp");
      spec = ProblemSpec::constant(f.k, 3, shift);
    } else {
      if (f.k != 0.0) throw UsageError("--k cannot be combined with a variable profile");
      if (!(f.k_min > 0.0) || !(f.k_max > 0.0))
        throw UsageError("--profile " + f.profile + " needs --k-min and --k-max");
      spec = ProblemSpec::variable(f.k_min, f.k_max, parse_profile(f.profile), f.seed, 3, shift);
    }
    spec.boundary_rows =
        f.boundary_rows == "raw" ? BoundaryRows::raw : BoundaryRows::symmetric;
    if (!(f.ppw > 0.0)) throw UsageError("--ppw must be positive");
    if (f.nodes > 0) {
      spec.nodes_per_dim = f.nodes;
    } else {
      const int n = nodes_for_wavenumber(spec.k_peak(), f.ppw);
      spec.nodes_per_dim = hierarchy ? hierarchy_compatible_nodes(n) : n;
    }
    spec.validate();
    return spec;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

SmootherConfig make_smoother(const SolverFlags& f) {
  SmootherConfig s;
  if (f.smoother == "jacobi") {
    s.kind = SmootherKind::jacobi;
  } else if (f.smoother.rfind("gmres", 0) == 0) {
    s.kind = SmootherKind::gmres;
    const std::string m = f.smoother.substr(5);
    try {
      std::size_t used = 0;
      s.restart = m.empty() ? 3 : std::stoi(m, &used);
      if (!m.empty() && used != m.size()) throw std::invalid_argument(m);
    } catch (const std::exception&) {
      throw UsageError("--smoother: bad Krylov dimension in '" + f.smoother + "'");
    }
  } else {
    throw UsageError("--smoother must be jacobi or gmres<m>, got '" + f.smoother + "'");
  }
  s.omega = f.omega;
  s.steps = f.nu;
  s.pre_steps = f.nu_pre;
  try {
    s.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return s;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

void print_levels(std::ostream& out, const Hierarchy& h) {
  out << "levels";
  for (int n : h.level_sizes()) out << ' ' << n;
  out << "\n";
}

int cmd_solve(const ProblemFlags& pf, const SolverFlags& sf, const std::string& out_path,
              const std::string& field_path, const std::string& export_dir, std::ostream& out,
              std::ostream& err) {
  const ProblemSpec spec = make_spec(pf, true);
  CycleConfig cycle;
  cycle.gamma = sf.cycle == "w" ? 2 : 1;
  cycle.smoother = make_smoother(sf);
  cycle.tol = sf.tol;
  cycle.max_cycles = sf.max_cycles;
  try {
    cycle.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (spec.nodes_per_dim < 11)
    throw UsageError("solve needs at least 11 nodes per dimension; raise --k or --nodes");
  if (!coarsens_cleanly(spec.nodes_per_dim))
    throw UsageError("--nodes " + std::to_string(spec.nodes_per_dim) +
                     " does not halve cleanly; try " +
                     std::to_string(hierarchy_compatible_nodes(spec.nodes_per_dim)));

  const Hierarchy h = build_hierarchy(spec, parse_transfer_scheme(sf.transfer),
                                      parse_coarsen_on(sf.coarsen_on));
  if (!export_dir.empty()) {
    std::filesystem::create_directories(export_dir);
    for (std::size_t l = 0; l < h.size(); ++l) {
      const std::string tag = std::to_string(l);
      write_matrix_market(export_dir + "/L" + tag + ".mtx", h.level(l).op);
      if (h.level(l).transfer) {
        write_matrix_market(export_dir + "/P" + tag + ".mtx", h.level(l).transfer->prolongation);
        write_matrix_market(export_dir + "/R" + tag + ".mtx", h.level(l).transfer->restriction);
      }
    }
  }
  const SolveResult result = solve(h, assemble_rhs(spec), cycle);

  out << "grid " << spec.nodes_per_dim << " x " << spec.nodes_per_dim << " ("
      << spec.unknowns() << " unknowns), h = " << spec.h() << "\n";
  print_levels(out, h);
  out << "smoother " << cycle.smoother.describe() << ", "
      << (cycle.gamma == 2 ? "W" : "V") << "-cycle, shift " << spec.shift.to_string() << "\n";
  out << "cycles " << result.cycles << "\n"
      << "status " << to_string(result.status) << "\n"
      << "final relative residual " << std::scientific << std::setprecision(3)
      << result.final_relative_residual() << std::defaultfloat << "\n";

  if (!out_path.empty()) {
    std::ofstream os = open_output(out_path);
    os << "cycle,relres\n" << std::setprecision(17);
    for (std::size_t c = 0; c < result.residual_history.size(); ++c)
      os << c + 1 << ',' << result.residual_history[c] << "\n";
  }
  if (!field_path.empty()) {
    std::ofstream os = open_output(field_path);
    os << "x,y,re,im\n" << std::setprecision(17);
    const int n = spec.nodes_per_dim;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Complex v = result.u[node_index(i, j, n)];
        os << i * spec.h() << ',' << j * spec.h() << ',' << v.real() << ',' << v.imag() << "\n";
      }
  }
  if (result.status == SolveStatus::diverged) {
    err << "error: iteration diverged after " << result.cycles
        << " cycles (relative residual " << result.final_relative_residual() << ")\n";
    return kExitDivergence;
  }
  return kExitSuccess;
}

void write_conv1(const std::vector<ConvergenceTableCell>& cells, std::ostream& text,
                 std::ostream* csv) {
  if (csv)
    *csv << "k,linear_A_hpd,linear_A_norm,linear_C_hpd,linear_C_norm,"
            "bezier_A_hpd,bezier_A_norm,bezier_C_hpd,bezier_C_norm\n";
  text << "  k   linear/A      linear/C      bezier/A      bezier/C\n";
  for (std::size_t i = 0; i < cells.size(); i += 4) {
    text << std::setw(3) << cells[i].k;
    if (csv) *csv << cells[i].k;
    for (std::size_t j = i; j < i + 4 && j < cells.size(); ++j) {
      const auto& r = cells[j].report;
      text << "   " << (r.hpd_gamma_tilde.hpd ? "+ " : "x ") << std::fixed
           << std::setprecision(3) << std::setw(7) << r.spectral_norm_t0.value
           << std::defaultfloat << "  ";
      if (csv)
        *csv << ',' << (r.hpd_gamma_tilde.hpd ? 1 : 0) << ',' << std::setprecision(10)
             << r.spectral_norm_t0.value;
    }
    text << "\n";
    if (csv) *csv << "\n";
  }
  text << "(+ Gamma~ HPD, x not HPD; value is ||T0||_2)\n";
  for (const auto& c : cells)
    for (const auto& f : c.report.findings)
      text << "finding (k=" << c.k << ", " << to_string(c.scheme) << "/"
           << to_string(c.coarsen_on) << "): " << f << "\n";
}

void write_opt1(const std::vector<OmegaSweepCell>& cells, const std::vector<double>& omegas,
                const std::vector<int>& nus, std::ostream& text, std::ostream* csv) {
  const std::size_t width = omegas.size() * nus.size();
  if (csv) {
    *csv << 'k';
    for (double w : omegas)
      for (int nu : nus) *csv << ",omega" << w << "_nu" << nu;
    *csv << "\n";
  }
  text << "  k";
  for (double w : omegas)
    for (int nu : nus) {
      std::ostringstream label;
      label << 'w' << w << '/' << nu;
      text << std::setw(9) << label.str();
    }
  text << "\n";
  for (std::size_t i = 0; i < cells.size(); i += width) {
    text << std::setw(3) << cells[i].k;
    if (csv) *csv << cells[i].k;
    for (std::size_t j = i; j < i + width; ++j) {
      text << std::setw(9) << std::fixed << std::setprecision(3) << cells[j].ratio
           << std::defaultfloat;
      if (csv) *csv << ',' << std::setprecision(10) << cells[j].ratio;
    }
    text << "\n";
    if (csv) *csv << "\n";
  }
  text << "(||Gamma~||_1 / kappa_1(Gamma~), Bezier transfer, CSL beta = 0.7)\n";
}

int cmd_certify(const ProblemFlags& pf, const SolverFlags& sf, const std::string& table,
                double dense_limit, const std::string& out_path, std::ostream& out) {
  std::optional<std::ofstream> csv;
  if (!out_path.empty()) csv = open_output(out_path);
  std::ostream* csv_ptr = csv ? &*csv : nullptr;

  if (table == "conv1") {
    ProblemSpec base;
    base.shift = ShiftSpec::parse(pf.shift);
    write_conv1(convergence_table({5, 10, 20, 30}, sf.omega, base), out, csv_ptr);
    return kExitSuccess;
  }
  if (table == "opt1") {
    const std::vector<double> omegas = {1.5, 2, 2.5, 4.5, 7};
    const std::vector<int> nus = {1, 2};
    ProblemSpec base;
    base.shift = ShiftSpec::parse(pf.shift);
    write_opt1(omega_sweep({5, 10, 20, 30}, omegas, nus, base), omegas, nus, out, csv_ptr);
    return kExitSuccess;
  }

  const ProblemSpec spec = make_spec(pf, false);
  if (sf.nu < 0 || !(sf.omega > 0.0)) throw UsageError("certify needs --nu >= 0 and --omega > 0");
  TwoGridConfig cfg = make_two_grid_config(spec, parse_transfer_scheme(sf.transfer),
                                           parse_coarsen_on(sf.coarsen_on), sf.omega, sf.nu);
  cfg.dense_limit = dense_limit;
  const CertificateReport report = certify(cfg);
  out << "grid " << spec.nodes_per_dim << " x " << spec.nodes_per_dim << ", "
      << sf.transfer << " transfer, coarsening on " << sf.coarsen_on << ", shift "
      << spec.shift.to_string() << "\n";
  write_certificate_text(out, report);
  if (csv_ptr) *csv_ptr << certificate_csv_header() << "\n" << certificate_csv_row(report) << "\n";
  return kExitSuccess;
}

int cmd_bench(const std::string& preset_name, bool list, bool do_regress, int jobs,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  if (list) {
    for (const auto& p : experiment_presets())
      out << std::left << std::setw(24) << p.name << std::right << p.cases.size()
          << " runs  " << p.description << "\n";
    return kExitSuccess;
  }
  if (preset_name.empty()) throw UsageError("bench needs a preset name (see --list)");
  const ExperimentPreset* preset = nullptr;
  try {
    preset = &find_preset(preset_name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (jobs < 0) throw UsageError("--jobs must be >= 0");

  const std::vector<BenchRow> rows = run_cases(preset->cases, jobs);
  std::optional<std::ofstream> file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& csv = file ? *file : out;
  csv << bench_csv_header() << "\n";
  for (const auto& r : rows) csv << bench_csv_row(r) << "\n";

  if (!do_regress) return kExitSuccess;
  const auto checks = regress(rows, preset->name, preset->band, bundled_reference());
  int failures = 0;
  for (const auto& c : checks) {
    (c.pass ? out : err) << (c.pass ? "ok   " : "FAIL ") << c.message << "\n";
    if (!c.pass) ++failures;
  }
  out << preset->name << ": " << checks.size() - failures << "/" << checks.size()
      << " within band\n";
  return failures == 0 ? kExitSuccess : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multigrid solver and convergence certificates for the 2D Helmholtz equation",
               "helmmg"};
  app.require_subcommand(1);
  // Subcommand configs are not read by CLI11; the file is parsed at the top
  // level with one [section] per subcommand.
  app.fallthrough();
  app.set_config("--config", "", "configuration file ([solve], [certify] or [bench] section)");

  ProblemFlags pf;
  SolverFlags sf;
  std::string out_path, field_path, export_dir, table, preset;
  double dense_limit = kDefaultDenseLimit;
  bool dump = false, regress_flag = false, list = false;
  int jobs = 0;

  auto* solve_cmd = app.add_subcommand("solve", "run the multigrid iteration");
  add_problem_flags(solve_cmd, pf);
  add_transfer_flags(solve_cmd, sf);
  add_cycle_flags(solve_cmd, sf);
  solve_cmd->add_option("--out", out_path, "residual history CSV");
  solve_cmd->add_option("--field-dump", field_path, "solution CSV (x,y,re,im)");
  solve_cmd->add_option("--export-mtx", export_dir,
                        "write level operators L<l>.mtx and transfers P<l>.mtx, R<l>.mtx here");

  auto* certify_cmd = app.add_subcommand("certify", "two-grid convergence certificate");
  add_problem_flags(certify_cmd, pf);
  add_transfer_flags(certify_cmd, sf);
  certify_cmd->add_option("--table", table, "full certificate table")
      ->check(CLI::IsMember({"conv1", "opt1"}));
  certify_cmd->add_option("--dense-limit", dense_limit, "largest dense matrix (entries)")
      ->capture_default_str();
  certify_cmd->add_option("--out", out_path, "CSV output");

  auto* bench_cmd = app.add_subcommand("bench", "run an experiment preset");
  bench_cmd->add_option("preset", preset, "preset name");
  bench_cmd->add_flag("--list", list, "list presets");
  bench_cmd->add_flag("--regress", regress_flag, "compare with the bundled reference counts");
  bench_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)")->capture_default_str();
  bench_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  for (auto* sub : {solve_cmd, certify_cmd, bench_cmd}) {
    sub->add_flag("--dump-config", dump, "print the resolved configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    for (auto* sub : {solve_cmd, certify_cmd, bench_cmd}) {
      if (!sub->parsed()) continue;
      if (dump) {
        std::istringstream lines(sub->config_to_str(true, false));
        out << '[' << sub->get_name() << "]\n";
        for (std::string line; std::getline(lines, line);)
          if (line.rfind("dump-config", 0) != 0 && !line.ends_with("=\"\""))
            out << line << '\n';
        return kExitSuccess;
      }
    }
    if (solve_cmd->parsed()) return cmd_solve(pf, sf, out_path, field_path, export_dir, out, err);
    if (certify_cmd->parsed()) return cmd_certify(pf, sf, table, dense_limit, out_path, out);
    return cmd_bench(preset, list, regress_flag, jobs, out_path, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DenseLimitError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace helmmg
