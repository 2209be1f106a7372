#pragma once

#include "tlp/solvers.hpp"

namespace tlp {

enum class Solver { Auto, Exact, Sinkhorn };

// Auto picks the exact solver while the larger support stays at or below
// exactThreshold points and falls back to Sinkhorn beyond that.
struct SolveOptions {
  Solver solver = Solver::Auto;
  SinkhornConfig sink{};
  int exactThreshold = 600;
};

TransportPlan solve_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const CostMatrix& C, const SolveOptions& opts);

// p-th root of the optimal Kantorovich cost with ground cost |x-y|_p^p.
double wasserstein_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double p, const SolveOptions& opts = {});

// Map pushing mu toward nu: exact permutation images when available,
// barycentric projection of the plan otherwise.
TransportMap transport_map(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double p, const SolveOptions& opts = {});

// d_TLp((mu,f),(nu,g)) computed as the Wp distance between lifted measures.
double tlp_distance(const TLpSignal& a, const TLpSignal& b, double p,
                    const SolveOptions& opts = {}, double channelScale = 1.0);

// Lifted-space map (T(x), g(T(x))) from signal a to signal b.
TransportMap tlp_map(const TLpSignal& a, const TLpSignal& b, double p,
                     const SolveOptions& opts = {}, double channelScale = 1.0);

}  // namespace tlp
