#include "tlp/embedding.hpp"

#include <cmath>

namespace tlp {

namespace {

void require_common_grid(const std::vector<TLpSignal>& signals) {
  const Matrix& g = signals.front().measure.points;
  for (const auto& s : signals) {
    if (s.measure.points.rows() != g.rows() || s.measure.points.cols() != g.cols() ||
        (s.measure.points - g).cwiseAbs().maxCoeff() > 1e-12)
      throw Error(ErrorKind::GridMismatch, "signals live on differing grids; resample first");
  }
}

}  // namespace

double lp_norm(const Vector& v, double p) {
  if (p == 2.0) return v.norm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

ReferenceSignal build_reference(const std::vector<TLpSignal>& signals, ReferenceKind kind) {
  if (signals.empty()) throw Error(ErrorKind::EmptySupport, "no signals to average");
  for (const auto& s : signals) s.validate();
  require_common_grid(signals);

  ReferenceSignal ref;
  ref.kind = kind;
  ref.measure.points = signals.front().measure.points;
  const int n = static_cast<int>(ref.measure.points.rows());

  Vector w = Vector::Zero(n);
  for (const auto& s : signals) w += s.measure.weights;
  w /= w.sum();
  ref.measure.weights = w;

  if (kind == ReferenceKind::WP) {
    ref.values.resize(n, 0);
    return ref;
  }

  const int m = signals.front().channels();
  for (const auto& s : signals)
    if (s.channels() != m)
      throw Error(ErrorKind::ChannelMismatch, "signals have differing channel counts");
  Matrix h = Matrix::Zero(n, m);
  for (const auto& s : signals) h += s.values;
  h /= static_cast<double>(signals.size());
  ref.values = h;
  return ref;
}

EmbeddingVector embed(const TLpSignal& signal, const ReferenceSignal& ref, double p,
                      const SolveOptions& opts, double channelScale) {
  ref.measure.validate();
  signal.validate();
  if (signal.measure.dim() != ref.measure.dim())
    throw Error(ErrorKind::DimMismatch, "signal dimension differs from reference");

  const int n = ref.measure.size();
  const int d = ref.measure.dim();
  EmbeddingVector out;
  out.exponent = p;
  out.weights = ref.measure.weights;
  Vector rhoRoot = ref.measure.weights.array().pow(1.0 / p).matrix();

  if (ref.kind == ReferenceKind::WP) {
    CostMatrix C = cost_matrix(ref.measure.points, signal.measure.points, p);
    TransportPlan plan = solve_plan(ref.measure, signal.measure, C, opts);
    out.converged = plan.converged;
    TransportMap map = barycentric_map(plan, signal.measure.points);
    if (map.hasAssignment())
      for (int i = 0; i < n; ++i) map.images.row(i) = signal.measure.points.row(map.assignment[i]);
    out.spatial = (map.images - ref.measure.points).array().colwise() * rhoRoot.array();
    out.channel.resize(n, 0);
    return out;
  }

  const int m = ref.values.cols();
  if (signal.channels() != m)
    throw Error(ErrorKind::ChannelMismatch, "signal channel count differs from reference");
  LiftedMeasure lref = lift(ref.asSignal(), channelScale);
  LiftedMeasure lsig = lift(TLpSignal{signal.measure, signal.values}, channelScale);
  CostMatrix C = cost_matrix(lref.base.points, lsig.base.points, p);
  TransportPlan plan = solve_plan(lref.base, lsig.base, C, opts);
  out.converged = plan.converged;
  TransportMap map = barycentric_map(plan, lsig.base.points);
  if (map.hasAssignment())
    for (int i = 0; i < n; ++i) map.images.row(i) = lsig.base.points.row(map.assignment[i]);

  out.spatial = (map.images.leftCols(d) - ref.measure.points).array().colwise() * rhoRoot.array();
  out.channel =
      (map.images.rightCols(m) - channelScale * ref.values).array().colwise() * rhoRoot.array();
  return out;
}

DistanceMatrix pairwise_linear_distances(const std::vector<EmbeddingVector>& embeddings) {
  const int N = static_cast<int>(embeddings.size());
  if (N == 0) throw Error(ErrorKind::EmptySupport, "no embeddings");
  const double p = embeddings.front().exponent;
  const Eigen::Index len = embeddings.front().flat().size();

  std::vector<Vector> flats(N);
  for (int i = 0; i < N; ++i) {
    flats[i] = embeddings[i].flat();
    if (flats[i].size() != len || embeddings[i].exponent != p)
      throw Error(ErrorKind::ShapeMismatch, "embeddings disagree in shape or exponent");
  }

  DistanceMatrix D;
  D.method = embeddings.front().channel.cols() > 0 ? DistanceMethod::LTLP : DistanceMethod::LWP;
  D.entries = Matrix::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      double dij = lp_norm(flats[i] - flats[j], p);
      D.entries(i, j) = dij;
      D.entries(j, i) = dij;
    }
  return D;
}

}  // namespace tlp
