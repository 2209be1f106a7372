#include "tlp/interpolate.hpp"

#include <cmath>
#include <map>

namespace tlp {

TLpSignal interpolate(const ReferenceSignal& ref, const TransportMap& map, double t) {
  if (t < 0.0 || t > 1.0) throw Error(ErrorKind::OutOfRange, "t must lie in [0,1]");
  const int n = ref.measure.size();
  const int d = ref.measure.dim();
  const int m = static_cast<int>(ref.values.cols());
  if (map.images.rows() != n || map.images.cols() != d + m)
    throw Error(ErrorKind::ShapeMismatch, "map not defined on the reference support");

  TLpSignal out;
  out.measure.points = (1.0 - t) * ref.measure.points + t * map.images.leftCols(d);
  out.measure.weights = ref.measure.weights;
  out.values = (1.0 - t) * ref.values + t * map.images.rightCols(m);
  return out;
}

TLpSignal invert_embedding(const EmbeddingVector& v, const ReferenceSignal& ref,
                           double channelScale) {
  const int n = ref.measure.size();
  const int d = ref.measure.dim();
  const int m = static_cast<int>(ref.values.cols());
  if (v.spatial.rows() != n || v.spatial.cols() != d || v.channel.cols() != m)
    throw Error(ErrorKind::ShapeMismatch, "embedding shape does not fit the reference");

  const double p = v.exponent;
  Matrix lifted(n, d + m);
  for (int i = 0; i < n; ++i) {
    const double rhoRoot = std::pow(ref.measure.weights[i], 1.0 / p);
    lifted.block(i, 0, 1, d) =
        v.spatial.row(i) / rhoRoot + ref.measure.points.row(i);
    if (m > 0)
      lifted.block(i, d, 1, m) =
          v.channel.row(i) / rhoRoot + channelScale * ref.values.row(i);
  }

  // fibre grouping by rounded spatial coordinates
  const double tol = 1e-9;
  std::map<std::vector<long long>, int> groups;
  std::vector<int> groupOf(n);
  int nGroups = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<long long> key(d);
    for (int c = 0; c < d; ++c) key[c] = std::llround(lifted(i, c) / tol);
    auto [it, inserted] = groups.emplace(std::move(key), nGroups);
    if (inserted) ++nGroups;
    groupOf[i] = it->second;
  }

  TLpSignal out;
  out.measure.points = Matrix::Zero(nGroups, d);
  out.measure.weights = Vector::Zero(nGroups);
  out.values = Matrix::Zero(nGroups, m);
  for (int i = 0; i < n; ++i) {
    const int g = groupOf[i];
    const double w = ref.measure.weights[i];
    out.measure.weights[g] += w;
    out.measure.points.row(g) += w * lifted.row(i).head(d);
    if (m > 0) out.values.row(g) += w * lifted.row(i).tail(m);
  }
  for (int g = 0; g < nGroups; ++g) {
    const double w = out.measure.weights[g];
    out.measure.points.row(g) /= w;
    if (m > 0) out.values.row(g) /= w * channelScale;
  }
  return out;
}

std::vector<TLpSignal> mode_sweep(const std::vector<EmbeddingVector>& embeddings,
                                  int componentIndex, const std::vector<double>& stddevs,
                                  const ReferenceSignal& ref, double channelScale) {
  if (embeddings.empty()) throw Error(ErrorKind::EmptySupport, "no embeddings");
  const int N = static_cast<int>(embeddings.size());
  const Eigen::Index len = embeddings.front().flat().size();
  Matrix X(N, len);
  for (int i = 0; i < N; ++i) X.row(i) = embeddings[i].flat().transpose();

  PCAResult full = pca(X, 0);  // rank probe only
  if (componentIndex < 0 || componentIndex >= full.rank)
    throw Error(ErrorKind::NoSuchComponent, "component index is at or beyond the data rank");
  PCAResult res = pca(X, componentIndex + 1);

  const int n = ref.measure.size();
  const int d = ref.measure.dim();
  const int m = static_cast<int>(ref.values.cols());
  const double scale = std::sqrt(std::max(0.0, res.eigenvalues[componentIndex]));

  std::vector<TLpSignal> out;
  out.reserve(stddevs.size());
  for (double s : stddevs) {
    Vector w = res.mean + s * scale * res.components.row(componentIndex).transpose();
    EmbeddingVector ev;
    ev.exponent = embeddings.front().exponent;
    ev.weights = ref.measure.weights;
    ev.spatial.resize(n, d);
    ev.channel.resize(n, m);
    Eigen::Index pos = 0;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) ev.spatial(i, c) = w[pos++];
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < m; ++c) ev.channel(i, c) = w[pos++];
    out.push_back(invert_embedding(ev, ref, channelScale));
  }
  return out;
}

}  // namespace tlp
