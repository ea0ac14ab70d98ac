#include <doctest.h>

#include <set>

#include "helmmg/experiments.hpp"

using namespace helmmg;

TEST_SUITE("experiments") {
  TEST_CASE("solver grids coarsen cleanly and respect the kh rule") {
    CHECK(solver_nodes_for_wavenumber(50.0) == 81);
    CHECK(solver_nodes_for_wavenumber(150.0) == 257);
    CHECK(solver_nodes_for_wavenumber(250.0) == 449);
    CHECK(solver_nodes_for_wavenumber(75.0) == 129);
    for (double k = 10.0; k <= 250.0; k += 10.0) {
      const int n = solver_nodes_for_wavenumber(k);
      CHECK(coarsens_cleanly(n));
      CHECK(k / (n - 1) <= 0.625 + 1e-12);
    }
  }

  TEST_CASE("tolerance band") {
    const ToleranceBand band{0.25, 3};
    CHECK(band.width(8) == 3.0);
    CHECK(band.width(40) == 10.0);
    CHECK(band.contains(40, 50));
    CHECK_FALSE(band.contains(40, 51));
    CHECK(band.contains(8, 5));
    CHECK_FALSE(band.contains(8, 4));
  }

  TEST_CASE("presets are well formed") {
    std::set<std::string> names;
    for (const auto& p : experiment_presets()) {
      CHECK(names.insert(p.name).second);
      CHECK_FALSE(p.cases.empty());
      for (const auto& c : p.cases) {
        CHECK_NOTHROW(c.spec.validate());
        CHECK_NOTHROW(c.cycle.validate());
        CHECK(coarsens_cleanly(c.spec.nodes_per_dim));
      }
    }
    CHECK(names.count("constant-jacobi") == 1);
    CHECK(names.count("h-independence") == 1);
    CHECK_THROWS_WITH_AS(find_preset("nope"), doctest::Contains("constant-jacobi"), Error);
  }

  TEST_CASE("labels") {
    ExperimentCase c;
    c.spec = ProblemSpec::variable(10.0, 75.0, Profile::sharp, 1, 129);
    CHECK(c.k_label() == "10-75");
    c.spec = ProblemSpec::constant(50.0, 81);
    CHECK(c.k_label() == "50");
    c.cycle.smoother.kind = SmootherKind::gmres;
    c.cycle.smoother.restart = 3;
    CHECK(c.smoother_label() == "gmres3");
  }

  TEST_CASE("bundled reference table loads and every entry is tagged") {
    const auto& ref = bundled_reference();
    CHECK(ref.size() > 100);
    std::set<std::string> presets;
    for (const auto& p : experiment_presets()) presets.insert(p.name);
    for (const auto& e : ref) {
      CHECK_FALSE(e.source.empty());
      CHECK(e.cycles > 0);
      CHECK(presets.count(e.preset) == 1);
    }
  }

  TEST_CASE("every preset case has a reference entry") {
    for (const auto& p : experiment_presets()) {
      std::vector<BenchRow> rows;
      for (const auto& c : p.cases) rows.push_back(BenchRow{c, 1, 0.0, SolveStatus::converged, 0.0});
      for (const auto& check : regress(rows, p.name, p.band, bundled_reference()))
        CHECK_MESSAGE(check.expected.has_value(), check.message);
    }
  }

  TEST_CASE("reference parsing refuses untagged or malformed entries") {
    const std::string header = "preset,k,nu,gamma,nodes,cycles,source\n";
    CHECK(parse_reference_table("# c\n" + header + "p,50,4,1,,12,table:x\n").size() == 1);
    CHECK_THROWS_WITH_AS(parse_reference_table(header + "p,50,4,1,,12,\n"), doctest::Contains("source"), Error);
    CHECK_THROWS_AS(parse_reference_table(header + "p,50,4,1,,twelve,t\n"), Error);
    CHECK_THROWS_AS(parse_reference_table(header + "p,50,4,1,12,t\n"), Error);
    CHECK_THROWS_AS(parse_reference_table("k,cycles\n50,12\n"), Error);
  }

  TEST_CASE("regression verdicts") {
    const auto& preset = find_preset("constant-jacobi");
    const ExperimentCase& c = preset.cases.front();
    std::vector<ReferenceEntry> ref = {{preset.name, c.k_label(), c.cycle.smoother.steps, c.cycle.gamma, 0, 40, "t"}};
    std::vector<BenchRow> rows = {{c, 45, 1.0, SolveStatus::converged, 1e-6},
                                  {c, 60, 1.0, SolveStatus::converged, 1e-6},
                                  {c, 45, 1.0, SolveStatus::max_cycles, 1e-3}};
    const auto checks = regress(rows, preset.name, preset.band, ref);
    CHECK(checks[0].pass);
    CHECK_FALSE(checks[1].pass);
    CHECK_FALSE(checks[2].pass);
    const auto unchecked = regress(rows, "other", preset.band, ref);
    CHECK(unchecked[0].pass);
    CHECK_FALSE(unchecked[0].expected.has_value());
  }

  TEST_CASE("bench rows are deterministic apart from timing") {
    ExperimentCase c;
    c.spec = ProblemSpec::constant(10.0, 33);
    c.cycle.smoother.kind = SmootherKind::gmres;
    c.cycle.smoother.steps = 2;
    const auto rows1 = run_cases({c, c}, 2);
    const auto rows2 = run_cases({c}, 1);
    CHECK(rows1[0].cycles == rows2[0].cycles);
    CHECK(rows1[1].cycles == rows2[0].cycles);
    CHECK(rows1[0].final_relative_residual == rows2[0].final_relative_residual);
    BenchRow a = rows1[0], b = rows2[0];
    a.wall_ms = b.wall_ms = 0.0;
    CHECK(bench_csv_row(a) == bench_csv_row(b));
    CHECK(bench_csv_header() == "k,nu,gamma,smoother,shift,cycles,wall_ms,converged,nodes");
  }
}
