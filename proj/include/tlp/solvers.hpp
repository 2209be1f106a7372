#pragma once

#include <cstdint>
#include <vector>

#include "tlp/measure.hpp"

namespace tlp {

// Entropic regularization settings. epsilon <= 0 selects a relative default
// of 0.01 * max(C) at solve time (the paper does not pin a value; whatever is
// used ends up in TransportPlan::epsilonUsed and in run manifests).
struct SinkhornConfig {
  double epsilon = 0.0;
  int maxIterations = 10000;
  double tolerance = 1e-6;
  bool logDomain = false;
  // Geometric annealing from 0.1*max(C) down to the target epsilon; entropy
  // methods are unstable when started cold at small epsilon. 1 disables.
  int annealStages = 5;

  void validate() const;
};

// entries(i,j) = sum_k |source(i,k) - target(j,k)|^p  (p-th power, no root)
CostMatrix cost_matrix(const Matrix& source, const Matrix& target, double p);

// Minimum-cost coupling. Uniform equal-size inputs route to the assignment
// solver (Monge == Kantorovich for point masses); anything else goes through
// the min-cost-flow LP. Intended for n*k up to ~1e6.
TransportPlan solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostMatrix& C);

// The two routes behind solve_exact, exposed so tests can cross-check them.
TransportPlan solve_exact_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const CostMatrix& C);
TransportPlan solve_exact_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const CostMatrix& C);

// Permutation minimizing sum_i C(i, perm[i]) for square C (ties resolved
// toward lower target index by scan order).
std::vector<int> assignment_lowest_cost(const Matrix& C);

// diag(u) K diag(v) scaling iterations, K = exp(-C/eps). Returns the best
// plan with converged=false instead of throwing when the iteration cap is
// hit. Non-log mode throws SuggestsLogDomain on numerical overflow.
TransportPlan sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const CostMatrix& C, const SinkhornConfig& cfg);

// Row-wise means of the plan's conditional distributions over target points.
TransportMap barycentric_map(const TransportPlan& plan, const Matrix& targetPoints);

// Instrumentation: number of solve_exact/sinkhorn calls since last reset.
uint64_t solver_call_count();
void reset_solver_call_count();

}  // namespace tlp
