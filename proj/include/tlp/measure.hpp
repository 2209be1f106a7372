#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tlp/error.hpp"

namespace tlp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Weighted support points in R^d. Weights sum to 1, all entries finite.
// Immutable by convention once validated; safe to share across workers.
struct DiscreteMeasure {
  Matrix points;   // n x d
  Vector weights;  // n

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  bool isUniform(double tol = 1e-12) const;
  void validate() const;
};

DiscreteMeasure make_uniform(const Matrix& points);

// The pair (measure, per-point channel values in R^m).
struct TLpSignal {
  DiscreteMeasure measure;
  Matrix values;  // n x m

  int channels() const { return static_cast<int>(values.cols()); }
  void validate() const;
};

// Pushforward of a signal onto the graph of its values: atoms (x_i, s*f(x_i)).
struct LiftedMeasure {
  DiscreteMeasure base;  // n x (d+m)
  int spatialDim = 0;
  int channelDim = 0;
};

LiftedMeasure lift(const TLpSignal& signal, double channelScale = 1.0);

// Pairwise p-th power ground costs between two support sets.
struct CostMatrix {
  Matrix entries;  // n x k, nonnegative
  double exponent = 2.0;
};

// Coupling with prescribed marginals; cost carries the p-th power value.
struct TransportPlan {
  Matrix coupling;  // n x k
  Vector sourceWeights;
  Vector targetWeights;
  double cost = 0.0;
  bool converged = true;     // false when an iterative solver hit its cap
  double epsilonUsed = 0.0;  // entropic regularization actually applied (0 = exact)

  void validateMarginals(double tol = 1e-9) const;
};

// Deterministic images per source point; `assignment` is set only when the
// plan is a permutation (uniform equal-size case).
struct TransportMap {
  Matrix images;                // n x D
  std::vector<int> assignment;  // empty unless bijective

  bool hasAssignment() const { return !assignment.empty(); }
};

// The (P_d, Q_d) coordinates against a reference, with rho_j^(1/p) baked in
// so plain l^p distances between stored vectors reproduce the weighted form.
struct EmbeddingVector {
  Matrix spatial;  // n x d
  Matrix channel;  // n x m (zero columns for a measure-only embedding)
  Vector weights;  // rho_j
  double exponent = 2.0;
  bool converged = true;

  Vector flat() const;  // spatial entries row-major, then channel entries
};

enum class DistanceMethod { LP, WP, TLP, LWP, LTLP, COR };

const char* to_string(DistanceMethod m);

struct DistanceMatrix {
  Matrix entries;  // N x N
  DistanceMethod method = DistanceMethod::LP;

  void validate(double tol = 1e-9) const;  // symmetry, zero diagonal, >= 0
};

}  // namespace tlp
