#include "tlp/solvers.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace tlp {

namespace {

std::atomic<uint64_t> g_solver_calls{0};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest augmenting paths with node potentials on the bipartite
// transportation graph (forward arcs uncapacitated, backward arcs carry the
// current flow). Each augmentation zeroes a source or sink residual, or
// empties a flow arc, so the loop terminates after O(n+k) rounds in practice.
Matrix transport_flow(const Matrix& C, const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size());
  const int k = static_cast<int>(b.size());
  const int V = n + k;
  const double kResidualZero = 1e-14;

  Vector resA = a, resB = b;
  Matrix flow = Matrix::Zero(n, k);
  std::vector<double> pot(V, 0.0);
  std::vector<double> dist(V);
  std::vector<int> parent(V);
  std::vector<char> done(V);

  double remain = a.sum();
  long guard = 0;
  const long guardMax = 40L * V + 1000;
  while (remain > kResidualZero) {
    if (++guard > guardMax)
      throw Error(ErrorKind::SolverFailure, "transport LP failed to terminate");
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < n; ++i)
      if (resA[i] > kResidualZero) dist[i] = 0.0;

    int target = -1;
    for (;;) {
      int u = -1;
      double du = kInf;
      for (int v = 0; v < V; ++v)
        if (!done[v] && dist[v] < du) { du = dist[v]; u = v; }
      if (u < 0) break;
      done[u] = 1;
      if (u >= n && resB[u - n] > kResidualZero) { target = u; break; }
      if (u < n) {
        for (int j = 0; j < k; ++j) {
          double rc = C(u, j) + pot[u] - pot[n + j];
          if (rc < 0) rc = 0;  // roundoff guard; slack is zero on tight arcs
          double nd = du + rc;
          if (nd < dist[n + j]) { dist[n + j] = nd; parent[n + j] = u; }
        }
      } else {
        const int j = u - n;
        for (int i = 0; i < n; ++i) {
          if (flow(i, j) <= 0) continue;
          double rc = -C(i, j) + pot[u] - pot[i];
          if (rc < 0) rc = 0;
          double nd = du + rc;
          if (nd < dist[i]) { dist[i] = nd; parent[i] = u; }
        }
      }
    }
    if (target < 0)
      throw Error(ErrorKind::MassMismatch, "no augmenting path; marginals infeasible");

    const double dt = dist[target];
    for (int v = 0; v < V; ++v) pot[v] += std::min(dist[v], dt);

    // bottleneck along the path
    double delta = resB[target - n];
    int root = target;
    for (int v = target; parent[v] >= 0; v = parent[v]) {
      int pu = parent[v];
      if (pu >= n && v < n) delta = std::min(delta, flow(v, pu - n));
      root = pu;
    }
    delta = std::min(delta, resA[root]);

    for (int v = target; parent[v] >= 0; v = parent[v]) {
      int pu = parent[v];
      if (pu < n && v >= n)
        flow(pu, v - n) += delta;
      else
        flow(v, pu - n) = std::max(0.0, flow(v, pu - n) - delta);
    }
    resA[root] = std::max(0.0, resA[root] - delta);
    resB[target - n] = std::max(0.0, resB[target - n] - delta);
    remain -= delta;
  }
  return flow;
}

void check_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& C) {
  mu.validate();
  nu.validate();
  if (C.entries.rows() != mu.size() || C.entries.cols() != nu.size())
    throw Error(ErrorKind::ShapeMismatch, "cost matrix shape does not match supports");
  if (std::abs(mu.weights.sum() - nu.weights.sum()) > 1e-9)
    throw Error(ErrorKind::MassMismatch, "marginal masses differ");
}

double plan_cost(const Matrix& C, const Matrix& pi) {
  return (C.array() * pi.array()).sum();
}

double logsumexp_row(const Matrix& M, int i) {
  double c = M.row(i).maxCoeff();
  if (!std::isfinite(c)) return c;
  double s = 0.0;
  for (Eigen::Index j = 0; j < M.cols(); ++j) s += std::exp(M(i, j) - c);
  return c + std::log(s);
}

}  // namespace

void SinkhornConfig::validate() const {
  // epsilon <= 0 means "relative default", resolved at solve time
  if (maxIterations < 1)
    throw Error(ErrorKind::InvalidParams, "maxIterations must be >= 1");
  if (!(tolerance > 0)) throw Error(ErrorKind::InvalidParams, "tolerance must be positive");
  if (annealStages < 1) throw Error(ErrorKind::InvalidParams, "annealStages must be >= 1");
}

CostMatrix cost_matrix(const Matrix& source, const Matrix& target, double p) {
  if (source.cols() != target.cols())
    throw Error(ErrorKind::DimMismatch, "source/target dimensions differ");
  if (!(p >= 1)) throw Error(ErrorKind::InvalidParams, "exponent p must be >= 1");
  const int n = static_cast<int>(source.rows());
  const int k = static_cast<int>(target.rows());
  CostMatrix out;
  out.exponent = p;
  out.entries.resize(n, k);
  if (p == 2.0) {
    // |x-y|_2^2 expands to squared norms minus twice the Gram term
    Vector sn = source.rowwise().squaredNorm();
    Vector tn = target.rowwise().squaredNorm();
    out.entries = (-2.0 * source * target.transpose());
    out.entries.colwise() += sn;
    out.entries.rowwise() += tn.transpose();
    out.entries = out.entries.cwiseMax(0.0);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < source.cols(); ++c)
          s += std::pow(std::abs(source(i, c) - target(j, c)), p);
        out.entries(i, j) = s;
      }
  }
  return out;
}

std::vector<int> assignment_lowest_cost(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  if (C.cols() != n) throw Error(ErrorKind::ShapeMismatch, "assignment needs a square cost");
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = C(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
        if (minv[j] < delta) { delta = minv[j]; j1 = j; }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do { int j1 = way[j0]; p[j0] = p[j1]; j0 = j1; } while (j0);
  }
  std::vector<int> perm(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) perm[p[j] - 1] = j - 1;
  return perm;
}

TransportPlan solve_exact_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const CostMatrix& C) {
  check_inputs(mu, nu, C);
  const int n = mu.size();
  if (nu.size() != n || !mu.isUniform() || !nu.isUniform())
    throw Error(ErrorKind::InvalidParams, "assignment route needs uniform equal-size supports");
  std::vector<int> perm = assignment_lowest_cost(C.entries);
  TransportPlan plan;
  plan.coupling = Matrix::Zero(n, n);
  const double w = 1.0 / n;
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    plan.coupling(i, perm[i]) = w;
    cost += w * C.entries(i, perm[i]);
  }
  plan.sourceWeights = mu.weights;
  plan.targetWeights = nu.weights;
  plan.cost = cost;
  return plan;
}

TransportPlan solve_exact_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const CostMatrix& C) {
  check_inputs(mu, nu, C);
  TransportPlan plan;
  plan.coupling = transport_flow(C.entries, mu.weights, nu.weights);
  plan.sourceWeights = mu.weights;
  plan.targetWeights = nu.weights;
  plan.cost = plan_cost(C.entries, plan.coupling);
  return plan;
}

TransportPlan solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostMatrix& C) {
  g_solver_calls.fetch_add(1, std::memory_order_relaxed);
  if (mu.size() == nu.size() && mu.isUniform() && nu.isUniform())
    return solve_exact_assignment(mu, nu, C);
  return solve_exact_lp(mu, nu, C);
}

TransportPlan sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const CostMatrix& C, const SinkhornConfig& cfg) {
  g_solver_calls.fetch_add(1, std::memory_order_relaxed);
  cfg.validate();
  check_inputs(mu, nu, C);
  const int n = mu.size();
  const int k = nu.size();
  const Vector& p = mu.weights;
  const Vector& q = nu.weights;
  const double maxC = C.entries.size() > 0 ? C.entries.maxCoeff() : 0.0;
  const double epsTarget = cfg.epsilon > 0 ? cfg.epsilon : 0.01 * (maxC > 0 ? maxC : 1.0);

  std::vector<double> stages;
  if (cfg.annealStages > 1 && 0.1 * maxC > epsTarget) {
    const double e0 = 0.1 * maxC;
    const int S = cfg.annealStages;
    const double ratio = std::pow(epsTarget / e0, 1.0 / (S - 1));
    for (int s = 0; s < S; ++s) stages.push_back(e0 * std::pow(ratio, s));
  } else {
    stages.push_back(epsTarget);
  }

  // potentials carried across stages: u = exp(f/eps), v = exp(g/eps)
  Vector f = Vector::Zero(n), g = Vector::Zero(k);
  bool converged = false;
  int itersLeft = cfg.maxIterations;
  TransportPlan plan;
  plan.sourceWeights = p;
  plan.targetWeights = q;
  plan.epsilonUsed = epsTarget;

  Vector logp = p.array().max(1e-300).log();
  Vector logq = q.array().max(1e-300).log();

  for (std::size_t s = 0; s < stages.size(); ++s) {
    const double eps = stages[s];
    const bool finalStage = (s + 1 == stages.size());
    // early stages only warm the potentials up
    int stageBudget = finalStage ? itersLeft : std::min(itersLeft, 50);
    const double stageTol = finalStage ? cfg.tolerance : std::max(cfg.tolerance, 1e-3);

    if (!cfg.logDomain) {
      Matrix K = (-C.entries / eps).array().exp();
      Vector u = (f / eps).array().exp();
      Vector v = (g / eps).array().exp();
      if (!u.allFinite() || !v.allFinite())
        throw Error(ErrorKind::SuggestsLogDomain, "potential overflow entering stage");
      Vector Kv = K * v;
      int it = 0;
      for (; it < stageBudget; ++it) {
        if (it > 0) {
          double err = (u.cwiseProduct(Kv) - p).cwiseAbs().maxCoeff();
          if (err < stageTol) { if (finalStage) converged = true; break; }
        }
        u = p.cwiseQuotient(Kv);
        Vector KTu = K.transpose() * u;
        v = q.cwiseQuotient(KTu);
        Kv = K * v;
        if (!u.allFinite() || !v.allFinite() || !Kv.allFinite() || (Kv.array() <= 0).any())
          throw Error(ErrorKind::SuggestsLogDomain,
                      "numerical overflow in scaling iteration; use logDomain");
      }
      itersLeft -= it;
      f = eps * u.array().max(1e-300).log();
      g = eps * v.array().max(1e-300).log();
      if (finalStage) {
        plan.coupling = u.asDiagonal() * K * v.asDiagonal();
      }
    } else {
      // stabilized updates on the dual potentials with log-sum-exp
      Matrix M(n, k);
      int it = 0;
      auto refreshRows = [&](Matrix& R) {  // R(i,j) = (g_j - C_ij)/eps
        R = ((-C.entries).rowwise() + g.transpose()) / eps;
      };
      refreshRows(M);
      for (; it < stageBudget; ++it) {
        if (it > 0) {
          // row sums of current plan: exp(f_i/eps + LSE_j((g_j - C_ij)/eps))
          double err = 0.0;
          for (int i = 0; i < n; ++i) {
            double rs = std::exp(f[i] / eps + logsumexp_row(M, i));
            err = std::max(err, std::abs(rs - p[i]));
          }
          if (err < stageTol) { if (finalStage) converged = true; break; }
        }
        for (int i = 0; i < n; ++i) f[i] = eps * (logp[i] - logsumexp_row(M, i));
        Matrix Mc = ((-C.entries).colwise() + f) / eps;  // (f_i - C_ij)/eps
        for (int j = 0; j < k; ++j) {
          double c = Mc.col(j).maxCoeff();
          double ssum = 0.0;
          for (int i = 0; i < n; ++i) ssum += std::exp(Mc(i, j) - c);
          g[j] = eps * (logq[j] - (c + std::log(ssum)));
        }
        refreshRows(M);
      }
      itersLeft -= it;
      if (finalStage) {
        plan.coupling.resize(n, k);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k; ++j)
            plan.coupling(i, j) = std::exp((f[i] + g[j] - C.entries(i, j)) / eps);
      }
    }
    if (itersLeft <= 0 && !finalStage) {
      // budget exhausted before the target epsilon: finish at current stage
      const double eps2 = stages[s];
      plan.epsilonUsed = eps2;
      if (!cfg.logDomain) {
        Matrix K = (-C.entries / eps2).array().exp();
        Vector u = (f / eps2).array().exp();
        Vector v = (g / eps2).array().exp();
        plan.coupling = u.asDiagonal() * K * v.asDiagonal();
      } else {
        plan.coupling.resize(n, k);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k; ++j)
            plan.coupling(i, j) = std::exp((f[i] + g[j] - C.entries(i, j)) / eps2);
      }
      break;
    }
  }

  plan.converged = converged;
  plan.cost = plan_cost(C.entries, plan.coupling);
  return plan;
}

TransportMap barycentric_map(const TransportPlan& plan, const Matrix& targetPoints) {
  if (targetPoints.rows() != plan.coupling.cols())
    throw Error(ErrorKind::ShapeMismatch, "target point count differs from plan columns");
  const int n = static_cast<int>(plan.coupling.rows());
  TransportMap map;
  map.images.resize(n, targetPoints.cols());
  bool permutation = true;
  std::vector<int> assign(n, -1);
  for (int i = 0; i < n; ++i) {
    double rowMass = plan.coupling.row(i).sum();
    if (rowMass <= 0)
      throw Error(ErrorKind::DegenerateRow, "plan row has zero mass");
    map.images.row(i) = (plan.coupling.row(i) * targetPoints) / rowMass;
    int nnz = 0, last = -1;
    for (Eigen::Index j = 0; j < plan.coupling.cols(); ++j)
      if (plan.coupling(i, j) != 0.0) { ++nnz; last = static_cast<int>(j); }
    if (nnz == 1) assign[i] = last;
    else permutation = false;
  }
  if (permutation) map.assignment = std::move(assign);
  return map;
}

uint64_t solver_call_count() { return g_solver_calls.load(std::memory_order_relaxed); }
void reset_solver_call_count() { g_solver_calls.store(0, std::memory_order_relaxed); }

}  // namespace tlp
