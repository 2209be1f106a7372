#include "tlp/measure.hpp"

#include <cmath>

namespace tlp {

bool DiscreteMeasure::isUniform(double tol) const {
  const int n = size();
  if (n == 0) return false;
  const double w = 1.0 / n;
  return (weights.array() - w).abs().maxCoeff() <= tol;
}

void DiscreteMeasure::validate() const {
  if (points.rows() < 1) throw Error(ErrorKind::EmptySupport, "measure has no support points");
  if (weights.size() != points.rows())
    throw Error(ErrorKind::ShapeMismatch, "weights length differs from support size");
  if (!points.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite support point");
  if (!weights.allFinite() || (weights.array() < 0).any())
    throw Error(ErrorKind::InvalidInput, "weights must be finite and nonnegative");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw Error(ErrorKind::MassMismatch, "weights must sum to 1 within 1e-12");
}

DiscreteMeasure make_uniform(const Matrix& points) {
  if (points.rows() == 0) throw Error(ErrorKind::EmptySupport, "empty point list");
  if (!points.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite coordinate");
  DiscreteMeasure m;
  m.points = points;
  m.weights = Vector::Constant(points.rows(), 1.0 / points.rows());
  return m;
}

void TLpSignal::validate() const {
  measure.validate();
  if (values.rows() != measure.points.rows())
    throw Error(ErrorKind::ShapeMismatch, "values length differs from support size");
  if (!values.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite channel value");
}

LiftedMeasure lift(const TLpSignal& signal, double channelScale) {
  if (!(channelScale > 0))
    throw Error(ErrorKind::InvalidScale, "channelScale must be positive");
  signal.validate();
  const int n = signal.measure.size();
  const int d = signal.measure.dim();
  const int m = signal.channels();
  LiftedMeasure out;
  out.spatialDim = d;
  out.channelDim = m;
  out.base.points.resize(n, d + m);
  out.base.points.leftCols(d) = signal.measure.points;
  out.base.points.rightCols(m) = channelScale * signal.values;
  out.base.weights = signal.measure.weights;
  return out;
}

void TransportPlan::validateMarginals(double tol) const {
  if (coupling.rows() != sourceWeights.size() || coupling.cols() != targetWeights.size())
    throw Error(ErrorKind::ShapeMismatch, "coupling shape does not match marginals");
  if ((coupling.array() < 0).any())
    throw Error(ErrorKind::InvalidInput, "negative coupling entry");
  double rowErr = (coupling.rowwise().sum() - sourceWeights).cwiseAbs().maxCoeff();
  double colErr = (coupling.colwise().sum().transpose() - targetWeights).cwiseAbs().maxCoeff();
  if (rowErr > tol || colErr > tol)
    throw Error(ErrorKind::MassMismatch, "coupling marginals violate prescribed weights");
}

Vector EmbeddingVector::flat() const {
  const Eigen::Index ns = spatial.size(), nc = channel.size();
  Vector out(ns + nc);
  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < spatial.rows(); ++i)
    for (Eigen::Index j = 0; j < spatial.cols(); ++j) out[pos++] = spatial(i, j);
  for (Eigen::Index i = 0; i < channel.rows(); ++i)
    for (Eigen::Index j = 0; j < channel.cols(); ++j) out[pos++] = channel(i, j);
  return out;
}

const char* to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::LP: return "lp";
    case DistanceMethod::WP: return "wp";
    case DistanceMethod::TLP: return "tlp";
    case DistanceMethod::LWP: return "lwp";
    case DistanceMethod::LTLP: return "ltlp";
    case DistanceMethod::COR: return "cor";
  }
  return "?";
}

void DistanceMatrix::validate(double tol) const {
  if (entries.rows() != entries.cols())
    throw Error(ErrorKind::ShapeMismatch, "distance matrix must be square");
  if ((entries.array() < -tol).any())
    throw Error(ErrorKind::InvalidInput, "negative distance entry");
  if (entries.diagonal().cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorKind::InvalidInput, "nonzero diagonal");
  if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorKind::InvalidInput, "asymmetric distance matrix");
}

}  // namespace tlp
