#include "mdcert/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mdcert {

namespace {

Eigen::VectorXd solve_minimizer(const DGF&, const Objective& obj) {
  if (auto x = obj.analytic_minimizer()) return *x;
  // Gradient descent polish; linear convergence for mu_f > 0.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(obj.dim());
  const double step = 1.0 / obj.bounds().L;
  for (long it = 0; it < 2000000; ++it) {
    const Eigen::VectorXd g = obj.grad(x);
    if (g.norm() <= 1e-12) return x;
    x -= step * g;
  }
  throw std::runtime_error("fixed-point solver did not reach gradient norm 1e-12");
}

void ensure_finite(double v, int k, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("non-finite ") + what + " at iteration " +
                             std::to_string(k));
}

}  // namespace

FixedPoint fixed_point(const DGF& dgf, const Objective& obj, const NetworkSpec* net) {
  const int d = obj.dim();
  const int n = obj.n();
  if (net && net->graph.n != n)
    throw std::invalid_argument("network size does not match the objective agent count");

  FixedPoint fp;
  fp.x_star = solve_minimizer(dgf, obj);
  fp.f_star = obj.f(fp.x_star);

  fp.x_star_stack.resize(n * d);
  fp.z_star.resize(n * d);
  fp.y_star.resize(n * d);
  fp.u_star.resize(n * d);
  const Eigen::VectorXd zs = dgf.grad(fp.x_star);
  for (int i = 0; i < n; ++i) {
    fp.x_star_stack.segment(i * d, d) = fp.x_star;
    fp.z_star.segment(i * d, d) = zs;
    const Eigen::VectorXd gi = obj.grad_i(i, fp.x_star);
    fp.u_star.segment(i * d, d) = gi;
    fp.y_star.segment(i * d, d) = -gi;
  }
  fp.v_star = Eigen::VectorXd::Zero(n * d);
  return fp;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> distributed_step(
    const DGF& dgf, const Objective& obj, const NetworkSpec& net, double eta1,
    const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  const int n = obj.n();
  const int d = obj.dim();
  if (z.size() != static_cast<Eigen::Index>(n) * d || y.size() != z.size())
    throw std::invalid_argument("state dimension mismatch");
  const Eigen::MatrixXd& dW = net.deltaW.mat();

  Eigen::VectorXd x(n * d), u(n * d), v = Eigen::VectorXd::Zero(n * d);
  for (int i = 0; i < n; ++i) x.segment(i * d, d) = dgf.conj_grad(z.segment(i * d, d));
  for (int i = 0; i < n; ++i) u.segment(i * d, d) = obj.grad_i(i, x.segment(i * d, d));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dW(i, j) != 0.0) v.segment(i * d, d) += dW(i, j) * z.segment(j * d, d);

  Eigen::VectorXd zmean = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) zmean += z.segment(i * d, d);
  zmean /= double(n);

  Eigen::VectorXd znext(n * d), ynext(n * d);
  for (int i = 0; i < n; ++i) {
    znext.segment(i * d, d) = zmean;
    ynext.segment(i * d, d) = z.segment(i * d, d) - zmean;
  }
  znext += v - eta1 * (u + y);
  ynext += y - v;
  return {znext, ynext};
}

Eigen::VectorXd TrajectoryRecord::error_vector(int k) const {
  if (!has_states) throw std::logic_error("state history was not recorded");
  if (k < 0 || k > iters) throw std::out_of_range("iteration index out of range");
  const int nd = n * d;
  if (distributed) {
    Eigen::VectorXd e(5 * nd);
    e.segment(0 * nd, nd) = z[k] - star.z_star;
    e.segment(1 * nd, nd) = y[k] - star.y_star;
    e.segment(2 * nd, nd) = x[k] - star.x_star_stack;
    e.segment(3 * nd, nd) = u[k] - star.u_star;
    e.segment(4 * nd, nd) = v[k] - star.v_star;
    return e;
  }
  Eigen::VectorXd e(3 * d);
  e.segment(0, d) = z[k] - star.z_star;
  e.segment(d, d) = x[k] - star.x_star;
  e.segment(2 * d, d) = u[k] - star.u_star;
  return e;
}

TrajectoryRecord run_centralized(const DGF& dgf, const Objective& obj, double eta,
                                 const Eigen::VectorXd& x0, int iters) {
  if (obj.n() != 1) throw std::invalid_argument("centralized run requires n = 1");
  if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
  if (x0.size() != obj.dim()) throw std::invalid_argument("x0 dimension mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");

  const int d = obj.dim();
  TrajectoryRecord rec;
  rec.distributed = false;
  rec.convex_mode = obj.bounds().mu == 0.0;
  rec.n = 1;
  rec.d = d;
  rec.iters = iters;
  rec.star = fixed_point(dgf, obj);
  rec.has_states = iters <= 10000 && d <= 1000;

  Eigen::VectorXd x = x0;
  Eigen::VectorXd zv = dgf.grad(x0);
  Eigen::VectorXd xbar_sum = Eigen::VectorXd::Zero(d);

  const auto record = [&](int k, const Eigen::VectorXd& uk) {
    const double breg = dgf.conj_bregman(zv, rec.star.z_star);
    const double dsq = (x - rec.star.x_star).squaredNorm();
    const double fg = obj.f(x) - rec.star.f_star;
    ensure_finite(breg, k, "Lyapunov value");
    ensure_finite(dsq, k, "distance");
    ensure_finite(fg, k, "objective gap");
    rec.bregman.push_back(breg);
    rec.dist_sq.push_back(dsq);
    rec.pnorm_sq.push_back(0.0);
    rec.fgap_inst.push_back(fg);
    if (k == 0) {
      rec.fgap_erg.push_back(fg);
    } else {
      xbar_sum += x;  // iterates 1..k
      rec.fgap_erg.push_back(obj.f(xbar_sum / double(k)) - rec.star.f_star);
    }
    if (rec.has_states) {
      rec.z.push_back(zv);
      rec.x.push_back(x);
      rec.u.push_back(uk);
    }
  };

  Eigen::VectorXd u = obj.grad(x);
  record(0, u);
  for (int k = 1; k <= iters; ++k) {
    zv -= eta * u;
    x = dgf.conj_grad(zv);
    u = obj.grad(x);
    record(k, u);
  }
  return rec;
}

TrajectoryRecord run_distributed(const DGF& dgf, const Objective& obj,
                                 const NetworkSpec& net, double eta1,
                                 const Eigen::VectorXd& x0_stack, int iters,
                                 const Eigen::Matrix2d* P) {
  const int n = obj.n();
  const int d = obj.dim();
  if (net.graph.n != n)
    throw std::invalid_argument("network size does not match the objective agent count");
  if (x0_stack.size() != static_cast<Eigen::Index>(n) * d)
    throw std::invalid_argument("x0 stack dimension mismatch");
  if (!(eta1 >= 0.0)) throw std::invalid_argument("eta1 must be >= 0");
  if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");

  const int nd = n * d;
  TrajectoryRecord rec;
  rec.distributed = true;
  rec.convex_mode = obj.bounds().mu == 0.0;
  rec.n = n;
  rec.d = d;
  rec.iters = iters;
  rec.star = fixed_point(dgf, obj, &net);
  rec.has_states = iters <= 10000 && nd <= 1000;
  if (P) {
    rec.P_used = *P;
    rec.P_is_identity_fallback = false;
  }

  // Stacked recursion state.
  Eigen::VectorXd zs(nd), ys = Eigen::VectorXd::Zero(nd), xs = x0_stack;
  for (int i = 0; i < n; ++i)
    zs.segment(i * d, d) = dgf.grad(x0_stack.segment(i * d, d));
  // Per-agent recursion state (kept separately for the consistency check).
  Eigen::VectorXd za = zs, ya = ys, xa = xs;

  Eigen::VectorXd erg_sum = Eigen::VectorXd::Zero(nd);  // iterates 0..k-1
  const Eigen::MatrixXd& dW = net.deltaW.mat();
  const Eigen::MatrixXd& L = net.laplacian.mat();

  auto apply_rowmix = [&](const Eigen::MatrixXd& M, const Eigen::VectorXd& s) {
    // (M kron I_d) s for an n x n mixing matrix M.
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nd);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (M(i, j) != 0.0) out.segment(i * d, d) += M(i, j) * s.segment(j * d, d);
    return out;
  };

  auto grads = [&](const Eigen::VectorXd& xstack) {
    Eigen::VectorXd g(nd);
    for (int i = 0; i < n; ++i)
      g.segment(i * d, d) = obj.grad_i(i, xstack.segment(i * d, d));
    return g;
  };

  const auto record = [&](int k, const Eigen::VectorXd& uk, const Eigen::VectorXd& vk) {
    double breg = 0.0;
    for (int i = 0; i < n; ++i)
      breg += dgf.conj_bregman(zs.segment(i * d, d), rec.star.z_star.segment(i * d, d));
    const double dsq = (xs - rec.star.x_star_stack).squaredNorm();
    const Eigen::VectorXd ez = zs - rec.star.z_star;
    const Eigen::VectorXd ey = ys - rec.star.y_star;
    const double pn = rec.P_used(0, 0) * ez.squaredNorm() +
                      2.0 * rec.P_used(0, 1) * ez.dot(ey) +
                      rec.P_used(1, 1) * ey.squaredNorm();
    double fg = 0.0;
    for (int i = 0; i < n; ++i)
      fg += obj.f(xs.segment(i * d, d)) - rec.star.f_star;
    ensure_finite(breg, k, "Lyapunov value");
    ensure_finite(dsq, k, "distance");
    ensure_finite(pn, k, "weighted norm");
    ensure_finite(fg, k, "objective gap");
    rec.bregman.push_back(breg);
    rec.dist_sq.push_back(dsq);
    rec.pnorm_sq.push_back(pn);
    rec.fgap_inst.push_back(fg);
    if (k == 0) {
      rec.fgap_erg.push_back(fg);
    } else {
      double fe = 0.0;  // per-agent average of iterates 0..k-1
      for (int i = 0; i < n; ++i)
        fe += obj.f(erg_sum.segment(i * d, d) / double(k)) - rec.star.f_star;
      rec.fgap_erg.push_back(fe);
    }
    if (rec.has_states) {
      rec.z.push_back(zs);
      rec.y.push_back(ys);
      rec.x.push_back(xs);
      rec.u.push_back(uk);
      rec.v.push_back(vk);
    }
  };

  Eigen::VectorXd u = grads(xs);
  Eigen::VectorXd v = apply_rowmix(dW, zs);
  record(0, u, v);

  for (int k = 1; k <= iters; ++k) {
    erg_sum += xs;

    // Stacked form: z+ = (J2)z - eta1(u + y) + v, y+ = y + (J1)z - v.
    auto [znext, ynext] = distributed_step(dgf, obj, net, eta1, zs, ys);

    // Per-agent form: z_i+ = z_i - eta1(grad f_i + y_i) - eta2 * (L z)_i.
    const Eigen::VectorXd lz = apply_rowmix(L, za);
    const Eigen::VectorXd ua = grads(xa);
    const Eigen::VectorXd zanext = za - eta1 * (ua + ya) - net.eta2 * lz;
    const Eigen::VectorXd yanext = ya + net.eta2 * lz;

    const double agree = (znext - zanext).cwiseAbs().maxCoeff() +
                         (ynext - yanext).cwiseAbs().maxCoeff();
    if (!(agree <= 1e-10 * (1.0 + znext.cwiseAbs().maxCoeff())))
      throw std::runtime_error("per-agent and stacked recursions disagree at iteration " +
                               std::to_string(k));

    zs = znext;
    ys = ynext;
    za = zanext;
    ya = yanext;
    for (int i = 0; i < n; ++i) {
      xs.segment(i * d, d) = dgf.conj_grad(zs.segment(i * d, d));
      xa.segment(i * d, d) = dgf.conj_grad(za.segment(i * d, d));
    }

    Eigen::VectorXd ysum = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i) ysum += ys.segment(i * d, d);
    if (!(ysum.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ys.cwiseAbs().maxCoeff())))
      throw std::runtime_error("tracking-variable conservation failed at iteration " +
                               std::to_string(k));

    u = grads(xs);
    v = apply_rowmix(dW, zs);
    record(k, u, v);
  }
  return rec;
}

Eigen::VectorXd ergodic_average(const TrajectoryRecord& traj, int K) {
  if (!traj.has_states) throw std::logic_error("state history was not recorded");
  if (K < 1 || K > traj.iters) throw std::out_of_range("ergodic horizon out of range");
  const Eigen::Index len = traj.x[0].size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(len);
  if (traj.distributed) {
    for (int k = 0; k < K; ++k) acc += traj.x[k];
  } else {
    for (int k = 1; k <= K; ++k) acc += traj.x[k];
  }
  return acc / double(K);
}

void write_trajectory_csv(const TrajectoryRecord& traj, const std::string& path,
                          const std::vector<std::string>& comment_lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << "k,bregman,dist_sq,pnorm_sq,fgap\n";
  if (traj.iters == 0) return;
  char buf[512];
  const std::vector<double>& fgap = traj.convex_mode ? traj.fgap_erg : traj.fgap_inst;
  for (int k = 0; k <= traj.iters; ++k) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", k, traj.bregman[k],
                  traj.dist_sq[k], traj.pnorm_sq[k], fgap[k]);
    out << buf;
  }
}

TrajectoryColumns read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  TrajectoryColumns cols;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "k,bregman,dist_sq,pnorm_sq,fgap")
        throw std::runtime_error("unexpected trajectory header at line " +
                                 std::to_string(lineno));
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    double vals[5];
    char comma;
    ss >> vals[0];
    for (int i = 1; i < 5; ++i) ss >> comma >> vals[i];
    if (!ss)
      throw std::runtime_error("malformed trajectory row at line " + std::to_string(lineno));
    cols.k.push_back(vals[0]);
    cols.bregman.push_back(vals[1]);
    cols.dist_sq.push_back(vals[2]);
    cols.pnorm_sq.push_back(vals[3]);
    cols.fgap.push_back(vals[4]);
  }
  if (!header_seen) throw std::runtime_error("trajectory file has no header: " + path);
  return cols;
}

}  // namespace mdcert
