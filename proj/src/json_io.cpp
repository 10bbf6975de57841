#include "mdcert/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mdcert {

using nlohmann::json;

json to_json(const Eigen::Matrix2d& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

Eigen::Matrix2d matrix2d_from_json(const json& j) {
  Eigen::Matrix2d m;
  m << j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>(),
      j.at(1).at(0).get<double>(), j.at(1).at(1).get<double>();
  return m;
}

json to_json(const ProblemClass& pc) {
  return {{"mu_f", pc.f.mu},
          {"L_f", pc.f.L},
          {"mu_phi", pc.phi.mu},
          {"L_phi", pc.phi.L},
          {"mode", to_string(pc.mode)}};
}

ProblemClass problem_class_from_json(const json& j) {
  const std::string mode = j.at("mode").get<std::string>();
  return ProblemClass(SectorBounds(j.at("mu_f").get<double>(), j.at("L_f").get<double>()),
                      SectorBounds(j.at("mu_phi").get<double>(), j.at("L_phi").get<double>()),
                      mode == "convex" ? Mode::Convex : Mode::StronglyConvex);
}

json to_json(const Tolerances& tol) {
  return {{"delta", tol.delta},
          {"delta_P", tol.delta_P},
          {"rho_width", tol.rho_width},
          {"eps_width", tol.eps_width}};
}

json to_json(const CentralizedCertificate& c) {
  return {{"rho", c.rho},
          {"eta", c.eta},
          {"sigma_f", c.sigma_f},
          {"sigma_phi", c.sigma_phi},
          {"residual", c.residual},
          {"sigma_phi_limit_undefined", c.sigma_phi_limit_undefined}};
}

json to_json(const ConvexCentralizedCertificate& c) {
  return {{"eps", c.eps},
          {"eta", c.eta},
          {"sigma_f", c.sigma_f},
          {"sigma_phi", c.sigma_phi},
          {"residual", c.residual}};
}

json to_json(const DistributedCertificate& c) {
  return {{"rho", c.rho},
          {"eta1", c.eta1},
          {"P", to_json(c.P)},
          {"Sigma_eq", to_json(c.Sigma_eq)},
          {"sigma_f", c.sigma_f},
          {"sigma_phi", c.sigma_phi},
          {"sigma_lambda", c.sigma_lambda},
          {"residuals", json::array({c.residuals[0], c.residuals[1]})},
          {"lambda", c.lambda}};
}

json to_json(const ConvexDistributedCertificate& c) {
  return {{"eps", c.eps},
          {"eta1", c.eta1},
          {"P", to_json(c.P)},
          {"Sigma_eq", to_json(c.Sigma_eq)},
          {"sigma_f", c.sigma_f},
          {"sigma_phi", c.sigma_phi},
          {"sigma_lambda", c.sigma_lambda},
          {"residuals", json::array({c.residuals[0], c.residuals[1]})},
          {"lambda", c.lambda}};
}

json to_json(const BoundReport& rep) {
  return {{"kind", rep.kind},
          {"max_violation", rep.max_violation},
          {"first_violation_k", rep.first_violation_k},
          {"empirical_rate", rep.empirical_rate},
          {"certified_value", rep.certified_value},
          {"seeds", rep.seeds}};
}

CertificateFile load_certificate(const std::string& path) {
  CertificateFile cf;
  cf.raw = read_json_file(path);
  try {
    cf.distributed = cf.raw.at("kind").get<std::string>() == "distributed";
    cf.mode = cf.raw.at("mode").get<std::string>() == "convex" ? Mode::Convex
                                                               : Mode::StronglyConvex;
    cf.pc = problem_class_from_json(cf.raw.at("problem_class"));
    cf.graph = cf.raw.value("graph", json());
    const json& c = cf.raw.at("certificate");
    if (!cf.distributed && cf.mode == Mode::StronglyConvex) {
      CentralizedCertificate cert;
      cert.rho = c.at("rho").get<double>();
      cert.eta = c.at("eta").get<double>();
      cert.sigma_f = c.at("sigma_f").get<double>();
      cert.sigma_phi = c.at("sigma_phi").get<double>();
      cert.residual = c.at("residual").get<double>();
      cert.sigma_phi_limit_undefined = c.value("sigma_phi_limit_undefined", false);
      cf.centralized = cert;
    } else if (!cf.distributed) {
      ConvexCentralizedCertificate cert;
      cert.eps = c.at("eps").get<double>();
      cert.eta = c.at("eta").get<double>();
      cert.sigma_f = c.at("sigma_f").get<double>();
      cert.sigma_phi = c.at("sigma_phi").get<double>();
      cert.residual = c.at("residual").get<double>();
      cf.convex_centralized = cert;
    } else if (cf.mode == Mode::StronglyConvex) {
      DistributedCertificate cert;
      cert.rho = c.at("rho").get<double>();
      cert.eta1 = c.at("eta1").get<double>();
      cert.P = matrix2d_from_json(c.at("P"));
      cert.Sigma_eq = matrix2d_from_json(c.at("Sigma_eq"));
      cert.sigma_f = c.at("sigma_f").get<double>();
      cert.sigma_phi = c.at("sigma_phi").get<double>();
      cert.sigma_lambda = c.at("sigma_lambda").get<double>();
      cert.residuals = {c.at("residuals").at(0).get<double>(),
                        c.at("residuals").at(1).get<double>()};
      cert.lambda = c.at("lambda").get<double>();
      cf.dist = cert;
    } else {
      ConvexDistributedCertificate cert;
      cert.eps = c.at("eps").get<double>();
      cert.eta1 = c.at("eta1").get<double>();
      cert.P = matrix2d_from_json(c.at("P"));
      cert.Sigma_eq = matrix2d_from_json(c.at("Sigma_eq"));
      cert.sigma_f = c.at("sigma_f").get<double>();
      cert.sigma_phi = c.at("sigma_phi").get<double>();
      cert.sigma_lambda = c.at("sigma_lambda").get<double>();
      cert.residuals = {c.at("residuals").at(0).get<double>(),
                        c.at("residuals").at(1).get<double>()};
      cert.lambda = c.at("lambda").get<double>();
      cf.convex_dist = cert;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed certificate file " + path + ": " + e.what());
  }
  return cf;
}

namespace {

const json* find_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::vector<double> number_array(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty())
    throw ConfigError(pointer, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError(pointer + "/" + std::to_string(i), "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace

SweepConfig parse_sweep_config(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config root must be an object");
  SweepConfig cfg;

  const json* mode = find_field(j, "mode");
  if (!mode) throw ConfigError("/mode", "missing");
  if (!mode->is_string() || (*mode != "sc" && *mode != "convex"))
    throw ConfigError("/mode", "expected \"sc\" or \"convex\"");
  cfg.mode = *mode == "convex" ? Mode::Convex : Mode::StronglyConvex;

  if (const json* v = find_field(j, "mu_f")) {
    if (!v->is_number() || !(v->get<double>() > 0.0))
      throw ConfigError("/mu_f", "expected a positive number");
    cfg.mu_f = v->get<double>();
  }
  if (const json* v = find_field(j, "mu_phi")) {
    if (!v->is_number() || !(v->get<double>() > 0.0))
      throw ConfigError("/mu_phi", "expected a positive number");
    cfg.mu_phi = v->get<double>();
  }

  const json* kf = find_field(j, "kappa_f");
  if (!kf) throw ConfigError("/kappa_f", "missing");
  cfg.kappa_f = number_array(*kf, "/kappa_f");
  const json* kp = find_field(j, "kappa_phi");
  if (!kp) throw ConfigError("/kappa_phi", "missing");
  cfg.kappa_phi = number_array(*kp, "/kappa_phi");
  const json* lam = find_field(j, "lambda");
  if (!lam) throw ConfigError("/lambda", "missing");
  cfg.lambda = number_array(*lam, "/lambda");
  for (size_t i = 0; i < cfg.lambda.size(); ++i)
    if (!(cfg.lambda[i] >= 0.0 && cfg.lambda[i] < 1.0))
      throw ConfigError("/lambda/" + std::to_string(i), "expected a value in [0, 1)");

  const json* eta1 = find_field(j, "eta1");
  if (!eta1) throw ConfigError("/eta1", "missing");
  if (eta1->is_array()) {
    cfg.eta1 = number_array(*eta1, "/eta1");
  } else if (eta1->is_object()) {
    const json* lo = find_field(*eta1, "lo");
    const json* hi = find_field(*eta1, "hi");
    const json* steps = find_field(*eta1, "steps");
    if (!lo || !lo->is_number() || !(lo->get<double>() > 0.0))
      throw ConfigError("/eta1/lo", "expected a positive number");
    if (!hi || !hi->is_number() || !(hi->get<double>() > lo->get<double>()))
      throw ConfigError("/eta1/hi", "expected a number > lo");
    if (!steps || !steps->is_number_integer() || steps->get<int>() < 1)
      throw ConfigError("/eta1/steps", "expected an integer >= 1");
    const double l = std::log10(lo->get<double>()), h = std::log10(hi->get<double>());
    const int nsteps = steps->get<int>();
    for (int i = 0; i < nsteps; ++i)
      cfg.eta1.push_back(nsteps == 1
                             ? lo->get<double>()
                             : std::pow(10.0, l + (h - l) * i / double(nsteps - 1)));
  } else {
    throw ConfigError("/eta1", "expected an array or {lo, hi, steps}");
  }
  return cfg;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid spec must look like lo:hi:steps, got " + spec);
  double lo = 0, hi = 0;
  int steps = 0;
  try {
    lo = std::stod(spec.substr(0, c1));
    hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    steps = std::stoi(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("grid spec must look like lo:hi:steps, got " + spec);
  }
  if (!(lo > 0.0) || !(hi > lo) || steps < 1)
    throw std::invalid_argument("grid spec requires 0 < lo < hi and steps >= 1");
  std::vector<double> g;
  const double l = std::log10(lo), h = std::log10(hi);
  for (int i = 0; i < steps; ++i)
    g.push_back(steps == 1 ? lo : std::pow(10.0, l + (h - l) * i / double(steps - 1)));
  return g;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

namespace {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

std::string certificate_identity_hash(const CertificateFile& cf) {
  json id = {{"kind", cf.distributed ? "distributed" : "centralized"},
             {"mode", to_string(cf.mode)},
             {"problem_class", to_json(cf.pc)}};
  if (cf.dist) id["P"] = to_json(cf.dist->P);
  if (cf.convex_dist) id["P"] = to_json(cf.convex_dist->P);
  return fnv1a_hex(id.dump());
}

}  // namespace mdcert
