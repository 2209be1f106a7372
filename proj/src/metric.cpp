#include "tlp/metric.hpp"

#include <cmath>

namespace tlp {

namespace {

TransportMap map_from_plan(const TransportPlan& plan, const Matrix& targetPoints) {
  // exact permutation plans keep exact images; everything else is projected
  TransportMap map = barycentric_map(plan, targetPoints);
  if (map.hasAssignment()) {
    for (int i = 0; i < map.images.rows(); ++i)
      map.images.row(i) = targetPoints.row(map.assignment[i]);
  }
  return map;
}

}  // namespace

TransportPlan solve_plan(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const CostMatrix& C, const SolveOptions& opts) {
  switch (opts.solver) {
    case Solver::Exact:
      return solve_exact(mu, nu, C);
    case Solver::Sinkhorn:
      return sinkhorn(mu, nu, C, opts.sink);
    case Solver::Auto:
    default: {
      const int maxSide = std::max(mu.size(), nu.size());
      if (maxSide <= opts.exactThreshold) return solve_exact(mu, nu, C);
      return sinkhorn(mu, nu, C, opts.sink);
    }
  }
}

double wasserstein_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double p, const SolveOptions& opts) {
  if (mu.dim() != nu.dim())
    throw Error(ErrorKind::DimMismatch, "measures live in different dimensions");
  CostMatrix C = cost_matrix(mu.points, nu.points, p);
  TransportPlan plan = solve_plan(mu, nu, C, opts);
  return std::pow(std::max(0.0, plan.cost), 1.0 / p);
}

TransportMap transport_map(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double p, const SolveOptions& opts) {
  if (mu.dim() != nu.dim())
    throw Error(ErrorKind::DimMismatch, "measures live in different dimensions");
  CostMatrix C = cost_matrix(mu.points, nu.points, p);
  TransportPlan plan = solve_plan(mu, nu, C, opts);
  return map_from_plan(plan, nu.points);
}

double tlp_distance(const TLpSignal& a, const TLpSignal& b, double p,
                    const SolveOptions& opts, double channelScale) {
  if (a.channels() != b.channels())
    throw Error(ErrorKind::ChannelMismatch, "signals have different channel counts");
  LiftedMeasure la = lift(a, channelScale);
  LiftedMeasure lb = lift(b, channelScale);
  return wasserstein_distance(la.base, lb.base, p, opts);
}

TransportMap tlp_map(const TLpSignal& a, const TLpSignal& b, double p,
                     const SolveOptions& opts, double channelScale) {
  if (a.channels() != b.channels())
    throw Error(ErrorKind::ChannelMismatch, "signals have different channel counts");
  LiftedMeasure la = lift(a, channelScale);
  LiftedMeasure lb = lift(b, channelScale);
  CostMatrix C = cost_matrix(la.base.points, lb.base.points, p);
  TransportPlan plan = solve_plan(la.base, lb.base, C, opts);
  return map_from_plan(plan, lb.base.points);
}

}  // namespace tlp
