#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "mdcert/engine.hpp"
#include "mdcert/verify.hpp"
#include "mdcert/version.hpp"

namespace py = pybind11;
using namespace mdcert;

namespace {

ProblemClass make_class(double mu_f, double L_f, double mu_phi, double L_phi,
                        const std::string& mode) {
  return ProblemClass(SectorBounds(mu_f, L_f), SectorBounds(mu_phi, L_phi),
                      mode == "convex" ? Mode::Convex : Mode::StronglyConvex);
}

py::dict centralized_dict(const CentralizedCertificate& c) {
  py::dict d;
  d["rho"] = c.rho;
  d["eta"] = c.eta;
  d["sigma_f"] = c.sigma_f;
  d["sigma_phi"] = c.sigma_phi;
  d["residual"] = c.residual;
  return d;
}

py::dict distributed_dict(const DistributedCertificate& c) {
  py::dict d;
  d["rho"] = c.rho;
  d["eta1"] = c.eta1;
  d["P"] = Eigen::MatrixXd(c.P);
  d["Sigma_eq"] = Eigen::MatrixXd(c.Sigma_eq);
  d["sigma_f"] = c.sigma_f;
  d["sigma_phi"] = c.sigma_phi;
  d["sigma_lambda"] = c.sigma_lambda;
  d["residuals"] = std::vector<double>{c.residuals[0], c.residuals[1]};
  d["lambda"] = c.lambda;
  return d;
}

}  // namespace

PYBIND11_MODULE(mdcert, m) {
  m.doc() = "quadratic-constraint convergence certification for mirror descent";
  m.attr("__version__") = kVersion;

  m.def("sector_qc_kernel",
        [](double mu, double L) {
          return Eigen::MatrixXd(sector_qc_kernel(SectorBounds(mu, L)).mat());
        },
        py::arg("mu"), py::arg("L"));

  m.def("analytic_certificate",
        [](double mu_f, double L_f, double mu_phi, double L_phi) {
          return centralized_dict(
              analytic_certificate(make_class(mu_f, L_f, mu_phi, L_phi, "sc")));
        },
        py::arg("mu_f"), py::arg("L_f"), py::arg("mu_phi"), py::arg("L_phi"));

  m.def("min_rho_centralized",
        [](double mu_f, double L_f, double mu_phi, double L_phi,
           std::optional<double> eta) {
          return centralized_dict(
              min_rho_centralized(make_class(mu_f, L_f, mu_phi, L_phi, "sc"), eta));
        },
        py::arg("mu_f"), py::arg("L_f"), py::arg("mu_phi"), py::arg("L_phi"),
        py::arg("eta") = std::nullopt);

  m.def("max_eps_centralized",
        [](double L_f, double mu_phi, double L_phi) {
          const auto c =
              max_eps_centralized(make_class(0.0, L_f, mu_phi, L_phi, "convex"), {});
          py::dict d;
          d["eps"] = c.eps;
          d["eta"] = c.eta;
          d["sigma_f"] = c.sigma_f;
          d["sigma_phi"] = c.sigma_phi;
          d["residual"] = c.residual;
          return d;
        },
        py::arg("L_f"), py::arg("mu_phi"), py::arg("L_phi"));

  m.def("min_rho_distributed",
        [](double mu_f, double L_f, double mu_phi, double L_phi, double lambda,
           int grid_points, int jobs) {
          const auto pc = make_class(mu_f, L_f, mu_phi, L_phi, "sc");
          EngineOptions opts;
          opts.jobs = jobs;
          return distributed_dict(
              min_rho_distributed(pc, lambda, default_eta1_grid(pc, grid_points), opts));
        },
        py::arg("mu_f"), py::arg("L_f"), py::arg("mu_phi"), py::arg("L_phi"),
        py::arg("lambda"), py::arg("grid_points") = 64, py::arg("jobs") = 1);

  m.def("ring_lambda",
        [](int n) { return build_network(ring_graph(n)).lambda; }, py::arg("n"));

  m.def("laplacian",
        [](const std::string& kind, int n) {
          Graph g;
          if (kind == "ring") g = ring_graph(n);
          else if (kind == "path") g = path_graph(n);
          else if (kind == "star") g = star_graph(n);
          else if (kind == "complete") g = complete_graph(n);
          else throw std::invalid_argument("unknown graph kind: " + kind);
          return Eigen::MatrixXd(laplacian_of(g).mat());
        },
        py::arg("kind"), py::arg("n"));

  m.def("simulate_centralized",
        [](double mu_f, double L_f, double mu_phi, double L_phi, double eta, int d,
           int iters, std::uint64_t seed, const std::string& dgf_kind,
           const std::string& obj_kind) {
          const auto pc = make_class(mu_f, L_f, mu_phi, L_phi,
                                     mu_f == 0.0 ? "convex" : "sc");
          const auto dgf = make_dgf(dgf_kind_from_string(dgf_kind), pc.phi, d, seed);
          const auto obj = make_objective(objective_kind_from_string(obj_kind), pc.f,
                                          1, d, seed + 1);
          std::mt19937_64 rng(seed + 2);
          std::normal_distribution<double> gauss(0.0, 1.0);
          Eigen::VectorXd x0(d);
          for (int i = 0; i < d; ++i) x0[i] = gauss(rng);
          const auto traj = run_centralized(*dgf, *obj, eta, x0, iters);
          py::dict out;
          out["bregman"] = traj.bregman;
          out["dist_sq"] = traj.dist_sq;
          out["fgap"] = traj.fgap_inst;
          return out;
        },
        py::arg("mu_f"), py::arg("L_f"), py::arg("mu_phi"), py::arg("L_phi"),
        py::arg("eta"), py::arg("d"), py::arg("iters"), py::arg("seed") = 0,
        py::arg("dgf") = "diag_quadratic", py::arg("objective") = "quadratic");

  m.def("empirical_rate", &empirical_rate, py::arg("values"),
        py::arg("window_frac") = 0.5);

  py::register_exception<NoCertificateError>(m, "NoCertificateError");
}
