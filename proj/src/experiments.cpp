#include "helmmg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "helmmg/reference_data.hpp"

namespace helmmg {

namespace {

std::string number_label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

const std::vector<double> kConstantKs = {50, 100, 150, 200, 250};
const std::vector<std::pair<double, double>> kRanges = {{10, 50}, {10, 75}};

std::vector<ExperimentPreset> build_presets() {
  std::vector<ExperimentPreset> presets;
  const ToleranceBand jacobi_band{0.25, 3};
  const ToleranceBand gmres_band{0.30, 3};

  {
    ExperimentPreset p{"h-independence",
                       "Jacobi V-cycles for k = 15, 30 on h = 2^-5 .. 2^-9, nu = 1, 2, 4",
                       {},
                       jacobi_band};
    for (double k : {15.0, 30.0}) {
      for (int power = 5; power <= 9; ++power) {
        const int n = (1 << power) + 1;
        if (k / (n - 1) > 0.625 + 1e-12) continue;
        for (int nu : {1, 2, 4}) {
          ExperimentCase c;
          c.spec = ProblemSpec::constant(k, n, ShiftSpec::fixed(0.7));
          c.cycle = jacobi_cycle(nu, 1);
          c.explicit_grid = true;
          p.cases.push_back(c);
        }
      }
    }
    presets.push_back(std::move(p));
  }
  {
    ExperimentPreset p{"constant-jacobi",
                       "constant k = 50 .. 250, Jacobi omega = 4.5, beta = 0.7, nu = 4 .. 8",
                       {},
                       jacobi_band};
    for (int nu = 4; nu <= 8; ++nu)
      for (double k : kConstantKs)
        for (int gamma : {1, 2})
          p.cases.push_back(constant_case(k, ShiftSpec::fixed(0.7), jacobi_cycle(nu, gamma)));
    presets.push_back(std::move(p));
  }
  {
    ExperimentPreset p{"constant-gmres-shift07",
                       "constant k = 50 .. 250, GMRES(3), beta = 0.7, nu = 1 .. 5",
                       {},
                       gmres_band};
    for (int nu = 1; nu <= 5; ++nu)
      for (double k : kConstantKs)
        for (int gamma : {1, 2})
          p.cases.push_back(constant_case(k, ShiftSpec::fixed(0.7), gmres_cycle(nu, gamma)));
    presets.push_back(std::move(p));
  }
  {
    ExperimentPreset p{"constant-gmres-invk",
                       "constant k = 50 .. 250, GMRES(3), beta = 1/k, nu = 1 .. 5",
                       {},
                       gmres_band};
    for (int nu = 1; nu <= 5; ++nu)
      for (double k : kConstantKs)
        for (int gamma : {1, 2})
          p.cases.push_back(constant_case(k, ShiftSpec::inverse_k(), gmres_cycle(nu, gamma)));
    presets.push_back(std::move(p));
  }
  {
    ExperimentPreset p{"hetero-smooth-jacobi",
                       "smooth k(x,y) in (10,50) and (10,75), Jacobi, beta = 0.7, nu = 4 .. 8",
                       {},
                       jacobi_band};
    for (int nu = 4; nu <= 8; ++nu)
      for (const auto& [lo, hi] : kRanges)
        for (int gamma : {1, 2})
          p.cases.push_back(variable_case(lo, hi, Profile::smooth, ShiftSpec::fixed(0.7),
                                          jacobi_cycle(nu, gamma)));
    presets.push_back(std::move(p));
  }
  {
    ExperimentPreset p{"hetero-sharp-jacobi",
                       "random k(x,y) in (10,50) and (10,75), Jacobi, beta = 0.7, nu = 4 .. 8",
                       {},
                       jacobi_band};
    for (int nu = 4; nu <= 8; ++nu)
      for (const auto& [lo, hi] : kRanges)
        for (int gamma : {1, 2})
          p.cases.push_back(variable_case(lo, hi, Profile::sharp, ShiftSpec::fixed(0.7),
                                          jacobi_cycle(nu, gamma)));
    presets.push_back(std::move(p));
  }
  {
    ExperimentPreset p{"hetero-sharp-gmres",
                       "random k(x,y) in (10,50) and (10,75), GMRES(3), beta = 1/k_max, nu = 1 .. 5",
                       {},
                       gmres_band};
    for (int nu = 1; nu <= 5; ++nu)
      for (const auto& [lo, hi] : kRanges)
        for (int gamma : {1, 2})
          p.cases.push_back(variable_case(lo, hi, Profile::sharp, ShiftSpec::inverse_k(),
                                          gmres_cycle(nu, gamma)));
    presets.push_back(std::move(p));
  }
  return presets;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int parse_int(const std::string& text, const std::string& what, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error("reference table line " + std::to_string(line) + ": bad " + what +
                " '" + text + "'");
  }
}

}  // namespace

CycleConfig jacobi_cycle(int nu, int gamma) {
  CycleConfig c;
  c.gamma = gamma;
  c.smoother.kind = SmootherKind::jacobi;
  c.smoother.omega = 4.5;
  c.smoother.steps = nu;
  return c;
}

CycleConfig gmres_cycle(int nu, int gamma) {
  CycleConfig c;
  c.gamma = gamma;
  c.smoother.kind = SmootherKind::gmres;
  c.smoother.restart = 3;
  c.smoother.steps = nu;
  return c;
}

ExperimentCase constant_case(double k, ShiftSpec shift, CycleConfig cycle) {
  ExperimentCase c;
  c.spec = ProblemSpec::constant(k, solver_nodes_for_wavenumber(k), shift);
  c.cycle = cycle;
  return c;
}

ExperimentCase variable_case(double k_min, double k_max, Profile profile,
                             ShiftSpec shift, CycleConfig cycle, std::uint64_t seed) {
  ExperimentCase c;
  c.spec = ProblemSpec::variable(k_min, k_max, profile, seed,
                                 solver_nodes_for_wavenumber(k_max), shift);
  c.cycle = cycle;
  return c;
}


std::string ExperimentCase::k_label() const {
  if (spec.kind == WavenumberKind::constant) return number_label(spec.k);
  return number_label(spec.k_min) + "-" + number_label(spec.k_max);
}

std::string ExperimentCase::smoother_label() const {
  if (cycle.smoother.kind == SmootherKind::jacobi) return "jacobi";
  return "gmres" + std::to_string(cycle.smoother.restart);
}

double ToleranceBand::width(int expected) const {
  return std::max(relative * static_cast<double>(expected), static_cast<double>(absolute));
}

bool ToleranceBand::contains(int expected, int actual) const {
  return std::abs(static_cast<double>(actual - expected)) <= width(expected);
}

int solver_nodes_for_wavenumber(double k_peak, double kh) {
  return hierarchy_compatible_nodes(nodes_for_wavenumber(k_peak, kh));
}

const std::vector<ExperimentPreset>& experiment_presets() {
  static const std::vector<ExperimentPreset> presets = build_presets();
  return presets;
}

const ExperimentPreset& find_preset(const std::string& name) {
  for (const auto& p : experiment_presets())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : experiment_presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw Error("unknown preset '" + name + "' (known: " + known + ")");
}

BenchRow run_case(const ExperimentCase& c) {
  BenchRow row;
  row.config = c;
  const auto start = std::chrono::steady_clock::now();
  const Hierarchy h = build_hierarchy(c.spec, c.scheme, c.coarsen_on);
  const SolveResult result = solve(h, assemble_rhs(c.spec), c.cycle);
  row.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  row.cycles = result.cycles;
  row.status = result.status;
  row.final_relative_residual = result.final_relative_residual();
  return row;
}

std::vector<BenchRow> run_cases(const std::vector<ExperimentCase>& cases, int jobs) {
  std::vector<BenchRow> rows(cases.size());
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(cases.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      try {
        rows[i] = run_case(cases[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cases.size();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string bench_csv_header() {
  return "k,nu,gamma,smoother,shift,cycles,wall_ms,converged,nodes";
}

std::string bench_csv_row(const BenchRow& row) {
  const ExperimentCase& c = row.config;
  std::ostringstream os;
  os << c.k_label() << ',' << c.cycle.smoother.steps << ',' << c.cycle.gamma << ','
     << c.smoother_label() << ',' << c.spec.shift.to_string() << ',' << row.cycles << ','
     << std::fixed << std::setprecision(1) << row.wall_ms << ','
     << (row.converged() ? 1 : 0) << ',' << c.spec.nodes_per_dim;
  return os.str();
}

std::vector<ReferenceEntry> parse_reference_table(const std::string& text) {
  std::vector<ReferenceEntry> out;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "preset,k,nu,gamma,nodes,cycles,source")
        throw Error("reference table: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 7)
      throw Error("reference table line " + std::to_string(number) + ": expected 7 fields, got " +
                  std::to_string(cells.size()));
    ReferenceEntry e;
    e.preset = cells[0];
    e.k_label = cells[1];
    e.nu = parse_int(cells[2], "nu", number);
    e.gamma = parse_int(cells[3], "gamma", number);
    e.nodes = cells[4].empty() ? 0 : parse_int(cells[4], "nodes", number);
    e.cycles = parse_int(cells[5], "cycles", number);
    e.source = cells[6];
    if (e.source.find_first_not_of(" \t") == std::string::npos)
      throw Error("reference table line " + std::to_string(number) +
                  ": entry has no source tag");
    out.push_back(std::move(e));
  }
  return out;
}

const std::vector<ReferenceEntry>& bundled_reference() {
  static const std::vector<ReferenceEntry> table = parse_reference_table(kReferenceCountsCsv);
  return table;
}

std::vector<RegressionCheck> regress(const std::vector<BenchRow>& rows,
                                     const std::string& preset, const ToleranceBand& band,
                                     const std::vector<ReferenceEntry>& reference) {
  std::vector<RegressionCheck> checks;
  for (const auto& row : rows) {
    const ExperimentCase& c = row.config;
    const int nodes = c.explicit_grid ? c.spec.nodes_per_dim : 0;
    RegressionCheck check;
    check.row = &row;
    for (const auto& e : reference) {
      if (e.preset == preset && e.k_label == c.k_label() && e.nu == c.cycle.smoother.steps &&
          e.gamma == c.cycle.gamma && e.nodes == nodes) {
        check.expected = e;
        break;
      }
    }
    std::ostringstream os;
    os << "k=" << c.k_label() << " nu=" << c.cycle.smoother.steps
       << " gamma=" << c.cycle.gamma << " n=" << c.spec.nodes_per_dim << ": " << row.cycles
       << " cycles" << (row.converged() ? "" : " (" + to_string(row.status) + ")");
    if (!check.expected) {
      check.pass = true;
      os << ", no reference";
    } else {
      const int expected = check.expected->cycles;
      check.pass = row.converged() && band.contains(expected, row.cycles);
      os << ", expected " << expected << " +- " << band.width(expected) << " ["
         << check.expected->source << "]";
    }
    check.message = os.str();
    checks.push_back(std::move(check));
  }
  return checks;
}

}  // namespace helmmg
