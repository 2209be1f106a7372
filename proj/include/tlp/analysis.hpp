#pragma once

#include <random>
#include <vector>

#include "tlp/measure.hpp"

namespace tlp {

// Majority label among the k nearest rows by Euclidean distance.
// Distance ties break toward the lower train index, vote ties toward the
// smallest label id.
std::vector<int> knn_classify(const Matrix& trainX, const std::vector<int>& trainY,
                              const Matrix& testX, int k);

// Unweighted mean of per-class F1; classes absent from both arguments are
// excluded and zero-denominator F1 counts as 0.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth);

struct CVResult {
  std::vector<double> scores;  // one pooled macro-F1 per repeat
  bool stratifyWarning = false;
};

// Stratified-by-label random folds per repeat; falls back to unstratified
// (with the warning flag set) when a class has fewer members than folds.
CVResult cross_validate(const Matrix& X, const std::vector<int>& Y, int folds,
                        int repeats, uint64_t seed, int k = 1);

// k-means++ seeding plus Lloyd iterations until the assignment is fixed.
// inertiaTrace, when given, receives the objective after every update step.
std::vector<int> kmeans(const Matrix& X, int K, std::mt19937_64& rng, int maxIter = 300,
                        std::vector<double>* inertiaTrace = nullptr);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

struct PCAResult {
  Vector mean;
  Matrix components;   // nComponents x dim, rows are unit vectors
  Vector eigenvalues;  // descending
  Matrix projections;  // N x nComponents
  int rank = 0;
};

// Eigendecomposition of the sample covariance (Gram trick when dim > N).
// Component signs are fixed by making each one's largest-magnitude
// coordinate positive.
PCAResult pca(const Matrix& X, int nComponents);

}  // namespace tlp
