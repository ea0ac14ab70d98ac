#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "helmmg/certificate.hpp"
#include "helmmg/experiments.hpp"
#include "helmmg/multigrid.hpp"
#include "helmmg/problem.hpp"
#include "helmmg/transfer.hpp"

namespace py = pybind11;
using namespace helmmg;

namespace {

ProblemSpec make_spec(double k, double k_min, double k_max, const std::string& profile,
                      std::uint64_t seed, int nodes, const std::string& shift, bool hierarchy) {
  const ShiftSpec s = ShiftSpec::parse(shift);
  ProblemSpec spec = profile == "constant"
                         ? ProblemSpec::constant(k, 3, s)
                         : ProblemSpec::variable(k_min, k_max, parse_profile(profile), seed, 3, s);
  if (nodes > 0) {
    spec.nodes_per_dim = nodes;
  } else {
    const int n = nodes_for_wavenumber(spec.k_peak());
    spec.nodes_per_dim = hierarchy ? hierarchy_compatible_nodes(n) : n;
  }
  spec.validate();
  return spec;
}

template <typename T>
py::array_t<T> to_array(std::span<const T> s) {
  py::array_t<T> a(static_cast<py::ssize_t>(s.size()));
  std::copy(s.begin(), s.end(), a.mutable_data());
  return a;
}

py::tuple csr_tuple(const CsrMatrix& m) {
  return py::make_tuple(to_array(m.row_ptr()), to_array(m.col_idx()), to_array(m.values()),
                        py::make_tuple(m.rows(), m.cols()));
}

#define HELMMG_PROBLEM_ARGS                                                             \
  py::arg("k") = 0.0, py::arg("k_min") = 0.0, py::arg("k_max") = 0.0,                  \
  py::arg("profile") = "constant", py::arg("seed") = 1, py::arg("nodes") = 0,          \
  py::arg("shift") = "0.7"

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multigrid solver and two-grid certificates for the 2D Helmholtz equation";

  py::register_exception<Error>(m, "HelmmgError", PyExc_RuntimeError);

  m.def("nodes_for_wavenumber", &nodes_for_wavenumber, py::arg("k"), py::arg("kh") = 0.625);
  m.def("solver_nodes_for_wavenumber", &solver_nodes_for_wavenumber, py::arg("k"),
        py::arg("kh") = 0.625);

  m.def(
      "assemble",
      [](double k, double k_min, double k_max, const std::string& profile, std::uint64_t seed,
         int nodes, const std::string& shift, bool shift_on) {
        const auto spec = make_spec(k, k_min, k_max, profile, seed, nodes, shift, false);
        return csr_tuple(assemble_helmholtz(spec, build_wavenumber_field(spec), shift_on));
      },
      HELMMG_PROBLEM_ARGS, py::arg("shift_on") = false,
      "CSR arrays (indptr, indices, data, shape) of A, or of C with shift_on.");

  m.def(
      "rhs",
      [](double k, double k_min, double k_max, const std::string& profile, std::uint64_t seed,
         int nodes, const std::string& shift) {
        return ComplexVector(assemble_rhs(make_spec(k, k_min, k_max, profile, seed, nodes, shift, false)));
      },
      HELMMG_PROBLEM_ARGS);

  m.def(
      "wavenumber_field",
      [](double k, double k_min, double k_max, const std::string& profile, std::uint64_t seed,
         int nodes, const std::string& shift) {
        const auto spec = make_spec(k, k_min, k_max, profile, seed, nodes, shift, false);
        const auto f = build_wavenumber_field(spec);
        const int n = spec.nodes_per_dim;
        Eigen::MatrixXd out(n, n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) out(j, i) = f.at(i, j);
        return out;
      },
      HELMMG_PROBLEM_ARGS, "Node values indexed [y, x].");

  m.def(
      "prolongation_1d",
      [](int fine_nodes, const std::string& scheme) {
        return Eigen::MatrixXd(build_prolongation_1d(fine_nodes, parse_transfer_scheme(scheme)).to_dense().real());
      },
      py::arg("fine_nodes"), py::arg("scheme") = "bezier");

  m.def(
      "solve",
      [](double k, double k_min, double k_max, const std::string& profile, std::uint64_t seed,
         int nodes, const std::string& shift, const std::string& transfer,
         const std::string& coarsen_on, const std::string& smoother, int nu, int nu_pre,
         double omega, int gamma, double tol, int max_cycles) {
        const auto spec = make_spec(k, k_min, k_max, profile, seed, nodes, shift, true);
        CycleConfig cfg;
        cfg.gamma = gamma;
        cfg.tol = tol;
        cfg.max_cycles = max_cycles;
        cfg.smoother.steps = nu;
        cfg.smoother.pre_steps = nu_pre;
        cfg.smoother.omega = omega;
        if (smoother == "jacobi") {
          cfg.smoother.kind = SmootherKind::jacobi;
        } else if (smoother.rfind("gmres", 0) == 0) {
          cfg.smoother.kind = SmootherKind::gmres;
          cfg.smoother.restart = smoother.size() > 5 ? std::stoi(smoother.substr(5)) : 3;
        } else {
          throw Error("unknown smoother '" + smoother + "'");
        }
        cfg.validate();
        SolveResult res;
        std::vector<int> sizes;
        {
          py::gil_scoped_release release;
          const auto h = build_hierarchy(spec, parse_transfer_scheme(transfer),
                                         parse_coarsen_on(coarsen_on));
          sizes = h.level_sizes();
          res = solve(h, assemble_rhs(spec), cfg);
        }
        const int n = spec.nodes_per_dim;
        Eigen::MatrixXcd u(n, n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) u(j, i) = res.u[node_index(i, j, n)];
        py::dict out;
        out["u"] = u;
        out["cycles"] = res.cycles;
        out["status"] = to_string(res.status);
        out["residual_history"] = res.residual_history;
        out["levels"] = sizes;
        return out;
      },
      HELMMG_PROBLEM_ARGS, py::arg("transfer") = "bezier", py::arg("coarsen_on") = "csl",
      py::arg("smoother") = "jacobi", py::arg("nu") = 1, py::arg("nu_pre") = 0,
      py::arg("omega") = 4.5, py::arg("gamma") = 1, py::arg("tol") = 1e-5,
      py::arg("max_cycles") = 1000,
      "Multigrid iteration from u = 0 on the point-source problem. u is indexed [y, x].");

  m.def(
      "certify",
      [](double k, double k_min, double k_max, const std::string& profile, std::uint64_t seed,
         int nodes, const std::string& shift, const std::string& transfer,
         const std::string& coarsen_on, double omega, int nu, double dense_limit) {
        const auto spec = make_spec(k, k_min, k_max, profile, seed, nodes, shift, false);
        auto cfg = make_two_grid_config(spec, parse_transfer_scheme(transfer),
                                        parse_coarsen_on(coarsen_on), omega, nu);
        cfg.dense_limit = dense_limit;
        CertificateReport r;
        {
          py::gil_scoped_release release;
          r = certify(cfg);
        }
        py::dict out;
        out["unknowns"] = r.unknowns;
        out["gamma_hpd"] = r.hpd_gamma.hpd;
        out["gamma_tilde_hpd"] = r.hpd_gamma_tilde.hpd;
        out["quick_screen_pass"] = r.quick_screen.pass;
        out["norm_t0"] = r.spectral_norm_t0.value;
        out["sigma_max_da"] = r.sigma_max_da.value;
        out["lambda_min_gamma"] = r.hpd_gamma.hpd ? py::cast(r.lambda_min_gamma.value) : py::none();
        out["ratio"] = r.ratio_table_value;
        out["bound"] = r.bound_value;
        out["findings"] = r.findings;
        return out;
      },
      HELMMG_PROBLEM_ARGS, py::arg("transfer") = "bezier", py::arg("coarsen_on") = "csl",
      py::arg("omega") = 4.5, py::arg("nu") = 1, py::arg("dense_limit") = kDefaultDenseLimit);

  m.def("presets", [] {
    std::vector<std::string> names;
    for (const auto& p : experiment_presets()) names.push_back(p.name);
    return names;
  });
}
