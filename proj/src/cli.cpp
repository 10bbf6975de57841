#include "mdcert/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include "mdcert/json_io.hpp"
#include "mdcert/version.hpp"

namespace mdcert {

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MIRROR_CERT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("MIRROR_CERT_SEED must be an unsigned integer");
    }
  }
  return 0;
}

json repro_header(const std::string& command, const json& config,
                  const std::vector<std::uint64_t>& seeds) {
  return {{"tool_version", kVersion}, {"command", command}, {"config", config},
          {"seeds", seeds}};
}

struct ClassFlags {
  double mu_f = 0.0, L_f = 0.0, mu_phi = 0.0, L_phi = 0.0;
  std::string mode = "sc";

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu-f", mu_f, "objective strong-convexity constant")->required();
    cmd->add_option("--L-f", L_f, "objective smoothness constant")->required();
    cmd->add_option("--mu-phi", mu_phi, "DGF strong-convexity constant")->required();
    cmd->add_option("--L-phi", L_phi, "DGF smoothness constant")->required();
    cmd->add_option("--mode", mode, "problem class: sc or convex")
        ->check(CLI::IsMember({"sc", "convex"}));
  }

  ProblemClass build() const {
    const Mode m = (mode == "convex") ? Mode::Convex : Mode::StronglyConvex;
    if (m == Mode::Convex && mu_f != 0.0)
      throw std::invalid_argument("convex mode requires --mu-f 0");
    return ProblemClass(SectorBounds(mu_f, L_f), SectorBounds(mu_phi, L_phi), m);
  }

  json to_config() const {
    return {{"mu_f", mu_f}, {"L_f", L_f}, {"mu_phi", mu_phi}, {"L_phi", L_phi},
            {"mode", mode}};
  }
};

struct GraphFlags {
  double lambda = -1.0;
  std::string kind;
  int n = 0;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::string eta2 = "auto";
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "mixing spectral norm in [0,1) (skip the graph)");
    cmd->add_option("--graph", kind, "graph generator: ring|path|star|complete|er");
    cmd->add_option("--n", n, "agent count for --graph");
    cmd->add_option("--p", p, "edge probability for --graph er");
    cmd->add_option("--graph-seed", seed, "seed for --graph er");
    cmd->add_option("--eta2", eta2, "consensus step-size, a number or 'auto'");
    cmd->add_option("--graph-file", file, "edge-list file: 'n m' then 'i j' lines");
  }

  bool has_graph() const { return !kind.empty() || !file.empty(); }

  Graph build_graph() const {
    if (!file.empty()) return load_edge_list(file);
    if (kind == "ring") return ring_graph(n);
    if (kind == "path") return path_graph(n);
    if (kind == "star") return star_graph(n);
    if (kind == "complete") return complete_graph(n);
    if (kind == "er") return erdos_renyi_graph(n, p, seed);
    throw std::invalid_argument("unknown graph kind: " + kind);
  }

  NetworkSpec build_network_spec() const {
    std::optional<double> e2;
    if (eta2 != "auto") {
      try {
        e2 = std::stod(eta2);
      } catch (const std::exception&) {
        throw std::invalid_argument("--eta2 must be a number or 'auto'");
      }
    }
    return build_network(build_graph(), e2);
  }

  json metadata(const NetworkSpec& net) const {
    json g = {{"eta2", net.eta2}, {"lambda", net.lambda}, {"n", net.graph.n}};
    if (!file.empty()) {
      g["source"] = "file";
      g["edges"] = to_edge_list(net.graph);
    } else {
      g["source"] = "generator";
      g["kind"] = kind;
      if (kind == "er") {
        g["p"] = p;
        g["seed"] = seed;
      }
    }
    return g;
  }
};

NetworkSpec network_from_metadata(const json& g) {
  const std::string source = g.at("source").get<std::string>();
  if (source == "lambda-only")
    throw std::invalid_argument(
        "certificate carries no graph; pass --graph/--graph-file to simulate");
  const double eta2 = g.at("eta2").get<double>();
  if (source == "file") {
    std::istringstream is(g.at("edges").get<std::string>());
    return build_network(parse_edge_list(is), eta2);
  }
  const std::string kind = g.at("kind").get<std::string>();
  const int n = g.at("n").get<int>();
  Graph graph;
  if (kind == "ring") graph = ring_graph(n);
  else if (kind == "path") graph = path_graph(n);
  else if (kind == "star") graph = star_graph(n);
  else if (kind == "complete") graph = complete_graph(n);
  else if (kind == "er")
    graph = erdos_renyi_graph(n, g.at("p").get<double>(),
                              g.at("seed").get<std::uint64_t>());
  else throw std::invalid_argument("unknown graph kind in certificate: " + kind);
  return build_network(graph, eta2);
}

void write_rate_csv(const std::string& path, const RateTable& table,
                    const json& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "# tool_version: " << kVersion << "\n";
  out << "# config: " << header.dump() << "\n";
  out << "kappa_f,kappa_phi,lambda,eta1,rate,status\n";
  char buf[512];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", row.kappa_f,
                  row.kappa_phi, row.lambda, row.eta1, row.rate, row.status.c_str());
    out << buf;
  }
}

// ---- certify-centralized ----------------------------------------------------

struct CertifyCentralizedArgs {
  ClassFlags cls;
  double eta = 0.0;
  bool optimize_eta = false;
  std::string out;
  int budget = 40000;
};

int cmd_certify_centralized(const CertifyCentralizedArgs& a) {
  const ProblemClass pc = a.cls.build();
  EngineOptions opts;
  opts.budget = a.budget;

  json config = a.cls.to_config();
  config["optimize_eta"] = a.optimize_eta;
  if (!a.optimize_eta) config["eta"] = a.eta;
  config["budget"] = a.budget;

  json doc = repro_header("certify-centralized", config, {});
  doc["kind"] = "centralized";
  doc["mode"] = a.cls.mode;
  doc["problem_class"] = to_json(pc);
  doc["tolerances"] = to_json(opts.tol);

  if (pc.mode == Mode::StronglyConvex) {
    const auto cert = a.optimize_eta
                          ? min_rho_centralized(pc, std::nullopt, opts)
                          : min_rho_centralized(pc, a.eta, opts);
    doc["certificate"] = to_json(cert);
    doc["analytic_rho"] = analytic_certificate(pc).rho;
  } else {
    const std::vector<double> grid =
        a.optimize_eta ? default_eta_grid_convex(pc) : std::vector<double>{a.eta};
    const auto cert = max_eps_centralized(pc, grid, opts);
    doc["certificate"] = to_json(cert);
  }
  write_json_file(a.out, doc);
  return 0;
}

// ---- certify-distributed ----------------------------------------------------

struct CertifyDistributedArgs {
  ClassFlags cls;
  GraphFlags graph;
  std::string eta1_grid;
  std::string out;
  int budget = 40000;
  int jobs = 1;
};

int cmd_certify_distributed(const CertifyDistributedArgs& a) {
  const ProblemClass pc = a.cls.build();
  EngineOptions opts;
  opts.budget = a.budget;
  opts.jobs = a.jobs;

  double lambda = a.graph.lambda;
  json graph_meta = {{"source", "lambda-only"}};
  if (a.graph.has_graph()) {
    const NetworkSpec net = a.graph.build_network_spec();
    lambda = net.lambda;
    graph_meta = a.graph.metadata(net);
    if (net.lambda_warn)
      std::fprintf(stderr, "warning: ||DeltaW|| = %.6f >= 1; no rate is certifiable\n",
                   net.lambda);
  } else if (!(lambda >= 0.0)) {
    throw std::invalid_argument("pass either --lambda or a --graph/--graph-file spec");
  }

  const std::vector<double> grid = a.eta1_grid.empty()
                                       ? default_eta1_grid(pc)
                                       : parse_grid_spec(a.eta1_grid);

  json config = a.cls.to_config();
  config["eta1_grid"] = a.eta1_grid.empty() ? "default" : a.eta1_grid;
  config["lambda"] = lambda;
  config["budget"] = a.budget;

  json doc = repro_header("certify-distributed", config, {});
  doc["kind"] = "distributed";
  doc["mode"] = a.cls.mode;
  doc["problem_class"] = to_json(pc);
  doc["tolerances"] = to_json(opts.tol);
  doc["graph"] = graph_meta;

  if (pc.mode == Mode::StronglyConvex)
    doc["certificate"] = to_json(min_rho_distributed(pc, lambda, grid, opts));
  else
    doc["certificate"] = to_json(max_eps_distributed(pc, lambda, grid, opts));
  write_json_file(a.out, doc);
  return 0;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string cert;
  std::string problem_file;
  std::string objective = "quadratic";
  std::string dgf = "diag_quadratic";
  int d = 0;
  int iters = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double x0_scale = 1.0;
  GraphFlags graph;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a0) {
  SimulateArgs a = a0;
  if (!a.problem_file.empty()) {
    const json p = read_json_file(a.problem_file);
    a.objective = p.value("objective", a.objective);
    a.dgf = p.value("dgf", a.dgf);
    a.d = p.value("d", a.d);
    if (p.contains("seed")) {
      a.seed = p.at("seed").get<std::uint64_t>();
      a.seed_given = true;
    }
  }
  if (a.d < 1) throw std::invalid_argument("problem dimension --d must be >= 1");
  if (a.iters < 0) throw std::invalid_argument("--iters must be >= 0");
  const std::uint64_t seed = a.seed_given ? a.seed : default_seed();

  const CertificateFile cf = load_certificate(a.cert);
  const auto dgf = make_dgf(dgf_kind_from_string(a.dgf), cf.pc.phi, a.d, seed);
  std::mt19937_64 rng(seed + 2);
  std::normal_distribution<double> gauss(0.0, 1.0);

  TrajectoryRecord traj;
  json meta_extra;
  if (!cf.distributed) {
    const auto obj =
        make_objective(objective_kind_from_string(a.objective), cf.pc.f, 1, a.d, seed + 1);
    const double eta = cf.centralized ? cf.centralized->eta : cf.convex_centralized->eta;
    Eigen::VectorXd x0(a.d);
    for (int j = 0; j < a.d; ++j) x0[j] = a.x0_scale * gauss(rng);
    traj = run_centralized(*dgf, *obj, eta, x0, a.iters);
  } else {
    NetworkSpec net = (cf.graph.is_object() &&
                       cf.graph.value("source", "") != "lambda-only")
                          ? network_from_metadata(cf.graph)
                          : (a.graph.has_graph()
                                 ? a.graph.build_network_spec()
                                 : network_from_metadata(cf.graph));
    const double cert_lambda = cf.dist ? cf.dist->lambda : cf.convex_dist->lambda;
    if (net.lambda > cert_lambda + 1e-9)
      throw std::invalid_argument(
          "network mixing norm exceeds the certificate's lambda");
    const auto obj = make_objective(objective_kind_from_string(a.objective), cf.pc.f,
                                    net.graph.n, a.d, seed + 1);
    const double eta1 = cf.dist ? cf.dist->eta1 : cf.convex_dist->eta1;
    const Eigen::Matrix2d P = cf.dist ? cf.dist->P : cf.convex_dist->P;
    Eigen::VectorXd x0(net.graph.n * a.d);
    for (int j = 0; j < x0.size(); ++j) x0[j] = a.x0_scale * gauss(rng);
    traj = run_distributed(*dgf, *obj, net, eta1, x0, a.iters, &P);
    meta_extra["n"] = net.graph.n;
    meta_extra["network_lambda"] = net.lambda;
  }

  json config = {{"cert", a.cert},       {"objective", a.objective},
                 {"dgf", a.dgf},         {"d", a.d},
                 {"iters", a.iters},     {"x0_scale", a.x0_scale}};
  json meta = repro_header("simulate", config, {seed});
  meta["cert_hash"] = certificate_identity_hash(cf);
  meta["distributed"] = traj.distributed;
  meta["convex_mode"] = traj.convex_mode;
  meta["problem_class"] = to_json(cf.pc);
  meta["d"] = a.d;
  meta["n"] = traj.n;
  meta["P"] = to_json(traj.P_used);
  meta.update(meta_extra);

  std::vector<std::string> comments = {
      std::string("tool_version: ") + kVersion,
      "config: " + config.dump(),
      "seeds: [" + std::to_string(seed) + "]",
  };
  write_trajectory_csv(traj, a.out, comments);
  write_json_file(a.out + ".meta.json", meta);
  return 0;
}

// ---- verify -------------------------------------------------------------------

struct VerifyArgs {
  std::string cert;
  std::string traj;
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  const CertificateFile cf = load_certificate(a.cert);
  const json meta = read_json_file(a.traj + ".meta.json");
  if (meta.value("cert_hash", "") != certificate_identity_hash(cf))
    throw std::invalid_argument(
        "trajectory metadata does not match the certificate file");

  const TrajectoryColumns cols = read_trajectory_csv(a.traj);
  if (cols.k.empty()) throw std::invalid_argument("trajectory has no data rows");

  TrajectoryRecord traj;
  traj.distributed = meta.at("distributed").get<bool>();
  traj.convex_mode = meta.at("convex_mode").get<bool>();
  traj.n = meta.value("n", 1);
  traj.d = meta.at("d").get<int>();
  traj.iters = static_cast<int>(cols.k.size()) - 1;
  traj.bregman = cols.bregman;
  traj.dist_sq = cols.dist_sq;
  traj.pnorm_sq = cols.pnorm_sq;
  if (traj.convex_mode) traj.fgap_erg = cols.fgap;
  else traj.fgap_inst = cols.fgap;
  if (meta.contains("P")) {
    traj.P_used = matrix2d_from_json(meta.at("P"));
    traj.P_is_identity_fallback = false;
  }

  const std::uint64_t seed =
      meta.value("seeds", std::vector<std::uint64_t>{0}).at(0);
  const auto dgf = make_dgf(
      dgf_kind_from_string(meta.at("config").at("dgf").get<std::string>()), cf.pc.phi,
      traj.d, seed);

  BoundReport rep;
  if (!cf.distributed && cf.mode == Mode::StronglyConvex)
    rep = check_thm1_bound(traj, *cf.centralized, *dgf);
  else if (!cf.distributed)
    rep = check_thm2_bound(traj, *cf.convex_centralized, *dgf);
  else if (cf.mode == Mode::StronglyConvex)
    rep = check_thm3_bound(traj, *cf.dist);
  else {
    const auto obj = make_objective(
        objective_kind_from_string(meta.at("config").at("objective").get<std::string>()),
        cf.pc.f, traj.n, traj.d, seed + 1);
    rep = check_thm4_bound(traj, *cf.convex_dist, *obj);
  }
  rep.seeds = {seed};

  json config = {{"cert", a.cert}, {"traj", a.traj}};
  json doc = repro_header("verify", config, {seed});
  doc["report"] = to_json(rep);
  write_json_file(a.out, doc);
  return rep.ok() ? 0 : 3;
}

// ---- sweep ---------------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::string out;
  int jobs = 0;
  int budget = 40000;
};

int cmd_sweep(const SweepArgs& a) {
  const json cfg_json = read_json_file(a.config);
  const SweepConfig cfg = parse_sweep_config(cfg_json);
  EngineOptions opts;
  opts.budget = a.budget;
  opts.jobs = a.jobs > 0 ? a.jobs
                         : static_cast<int>(std::thread::hardware_concurrency());
  const RateTable table = sweep(cfg, opts);
  write_rate_csv(a.out, table, cfg_json);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"quadratic-constraint certification toolkit for mirror descent"};
  app.require_subcommand(1);

  CertifyCentralizedArgs cc;
  auto* cmd_cc = app.add_subcommand("certify-centralized",
                                    "certify a centralized convergence rate");
  cc.cls.attach(cmd_cc);
  auto* eta_opt = cmd_cc->add_option("--eta", cc.eta, "fixed step-size");
  auto* opt_eta = cmd_cc->add_flag("--optimize-eta", cc.optimize_eta,
                                   "search over the step-size");
  eta_opt->excludes(opt_eta);
  cmd_cc->add_option("--out", cc.out, "certificate JSON path")->required();
  cmd_cc->add_option("--budget", cc.budget, "solver iteration budget");

  CertifyDistributedArgs cd;
  auto* cmd_cd = app.add_subcommand("certify-distributed",
                                    "certify a distributed convergence rate");
  cd.cls.attach(cmd_cd);
  cd.graph.attach(cmd_cd);
  cmd_cd->add_option("--eta1-grid", cd.eta1_grid, "step-size grid lo:hi:steps");
  cmd_cd->add_option("--out", cd.out, "certificate JSON path")->required();
  cmd_cd->add_option("--budget", cd.budget, "solver iteration budget");
  cmd_cd->add_option("--jobs", cd.jobs, "parallel grid cells");

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "run mirror descent under a certificate");
  cmd_sim->add_option("--cert", sim.cert, "certificate JSON")->required();
  cmd_sim->add_option("--problem", sim.problem_file, "problem JSON file");
  cmd_sim->add_option("--objective", sim.objective, "quadratic|logistic_l2");
  cmd_sim->add_option("--dgf", sim.dgf, "euclidean|diag_quadratic|separable_smooth");
  cmd_sim->add_option("--d", sim.d, "decision dimension");
  cmd_sim->add_option("--iters", sim.iters, "iteration count")->required();
  auto* seed_opt = cmd_sim->add_option("--seed", sim.seed, "instance seed");
  cmd_sim->add_option("--x0-scale", sim.x0_scale, "initial point scale");
  sim.graph.attach(cmd_sim);
  cmd_sim->add_option("--out", sim.out, "trajectory CSV path")->required();

  VerifyArgs ver;
  auto* cmd_ver = app.add_subcommand("verify", "check theorem bounds on a trajectory");
  cmd_ver->add_option("--cert", ver.cert, "certificate JSON")->required();
  cmd_ver->add_option("--traj", ver.traj, "trajectory CSV")->required();
  cmd_ver->add_option("--out", ver.out, "report JSON path")->required();

  SweepArgs sw;
  auto* cmd_sw = app.add_subcommand("sweep", "rate table over parameter grids");
  cmd_sw->add_option("--config", sw.config, "sweep config JSON")->required();
  cmd_sw->add_option("--out", sw.out, "rates CSV path")->required();
  cmd_sw->add_option("--jobs", sw.jobs, "parallel cells (default: hardware)");
  cmd_sw->add_option("--budget", sw.budget, "solver iteration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_cc->parsed()) {
      if (!cc.optimize_eta && eta_opt->count() == 0)
        throw std::invalid_argument("pass either --eta <v> or --optimize-eta");
      return cmd_certify_centralized(cc);
    }
    if (cmd_cd->parsed()) return cmd_certify_distributed(cd);
    if (cmd_sim->parsed()) {
      sim.seed_given = seed_opt->count() > 0;
      return cmd_simulate(sim);
    }
    if (cmd_ver->parsed()) return cmd_verify(ver);
    if (cmd_sw->parsed()) return cmd_sweep(sw);
  } catch (const NoCertificateError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error at %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("mdcert");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mdcert
