#include "tlp/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tlp/rng.hpp"

namespace tlp {

std::vector<int> knn_classify(const Matrix& trainX, const std::vector<int>& trainY,
                              const Matrix& testX, int k) {
  const int n = static_cast<int>(trainX.rows());
  if (n == 0) throw Error(ErrorKind::EmptyTrain, "empty training set");
  if (static_cast<int>(trainY.size()) != n)
    throw Error(ErrorKind::ShapeMismatch, "train labels length mismatch");
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidParams, "k must be in [1, |train|]");

  std::vector<int> out(testX.rows());
  std::vector<std::pair<double, int>> dist(n);
  for (int t = 0; t < testX.rows(); ++t) {
    for (int i = 0; i < n; ++i)
      dist[i] = {(trainX.row(i) - testX.row(t)).squaredNorm(), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[trainY[dist[i].second]];
    int best = votes.begin()->first, bestCount = votes.begin()->second;
    for (const auto& [label, count] : votes)
      if (count > bestCount) { best = label; bestCount = count; }
    out[t] = best;  // std::map iterates labels ascending, so ties keep the smallest id
  }
  return out;
}

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw Error(ErrorKind::ShapeMismatch, "prediction/truth length mismatch");
  std::map<int, std::array<long, 3>> counts;  // label -> {tp, fp, fn}
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == truth[i]) {
      counts[pred[i]][0]++;
    } else {
      counts[pred[i]][1]++;
      counts[truth[i]][2]++;
    }
  }
  if (counts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [label, c] : counts) {
    const double denom = 2.0 * c[0] + c[1] + c[2];
    sum += denom > 0 ? 2.0 * c[0] / denom : 0.0;
  }
  return sum / counts.size();
}

CVResult cross_validate(const Matrix& X, const std::vector<int>& Y, int folds,
                        int repeats, uint64_t seed, int k) {
  const int n = static_cast<int>(X.rows());
  if (folds < 2) throw Error(ErrorKind::InvalidParams, "folds must be >= 2");
  if (n < folds) throw Error(ErrorKind::InvalidParams, "need at least `folds` samples");
  if (static_cast<int>(Y.size()) != n)
    throw Error(ErrorKind::ShapeMismatch, "label length mismatch");

  std::map<int, std::vector<int>> byLabel;
  for (int i = 0; i < n; ++i) byLabel[Y[i]].push_back(i);
  bool canStratify = true;
  for (const auto& [label, members] : byLabel)
    if (static_cast<int>(members.size()) < folds) canStratify = false;

  CVResult result;
  result.stratifyWarning = !canStratify;
  result.scores.resize(repeats);

  for (int r = 0; r < repeats; ++r) {
    std::mt19937_64 rng = substream(seed, static_cast<uint64_t>(r));
    std::vector<int> fold(n);
    if (canStratify) {
      for (auto& [label, members] : byLabel) {
        std::vector<int> idx = members;
        std::shuffle(idx.begin(), idx.end(), rng);
        int start = static_cast<int>(rng() % folds);
        for (std::size_t j = 0; j < idx.size(); ++j)
          fold[idx[j]] = static_cast<int>((start + j) % folds);
      }
    } else {
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      for (int j = 0; j < n; ++j) fold[idx[j]] = j % folds;
    }

    std::vector<int> pooled(n);
    for (int f = 0; f < folds; ++f) {
      std::vector<int> trainIdx, testIdx;
      for (int i = 0; i < n; ++i) (fold[i] == f ? testIdx : trainIdx).push_back(i);
      if (testIdx.empty()) continue;
      Matrix trainX(trainIdx.size(), X.cols()), testX(testIdx.size(), X.cols());
      std::vector<int> trainY(trainIdx.size());
      for (std::size_t i = 0; i < trainIdx.size(); ++i) {
        trainX.row(i) = X.row(trainIdx[i]);
        trainY[i] = Y[trainIdx[i]];
      }
      for (std::size_t i = 0; i < testIdx.size(); ++i) testX.row(i) = X.row(testIdx[i]);
      std::vector<int> pred = knn_classify(trainX, trainY, testX,
                                           std::min<int>(k, trainIdx.size()));
      for (std::size_t i = 0; i < testIdx.size(); ++i) pooled[testIdx[i]] = pred[i];
    }
    result.scores[r] = macro_f1(pooled, Y);
  }
  return result;
}

std::vector<int> kmeans(const Matrix& X, int K, std::mt19937_64& rng, int maxIter,
                        std::vector<double>* inertiaTrace) {
  const int n = static_cast<int>(X.rows());
  if (K < 1 || K > n) throw Error(ErrorKind::InvalidParams, "K must be in [1, |X|]");

  // k-means++ seeding
  Matrix centers(K, X.cols());
  std::vector<double> d2(n);
  {
    int first = static_cast<int>(rng() % n);
    centers.row(0) = X.row(first);
    for (int c = 1; c < K; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        double best = (X.row(i) - centers.row(0)).squaredNorm();
        for (int cc = 1; cc < c; ++cc)
          best = std::min(best, (X.row(i) - centers.row(cc)).squaredNorm());
        d2[i] = best;
        total += best;
      }
      int pick = 0;
      if (total > 0) {
        double r = std::uniform_real_distribution<double>(0.0, total)(rng);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc >= r) { pick = i; break; }
        }
      } else {
        pick = static_cast<int>(rng() % n);
      }
      centers.row(c) = X.row(pick);
    }
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < maxIter; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bestD = (X.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < K; ++c) {
        double d = (X.row(i) - centers.row(c)).squaredNorm();
        if (d < bestD) { bestD = d; best = c; }
      }
      if (assign[i] != best) { assign[i] = best; changed = true; }
      inertia += bestD;
    }
    if (inertiaTrace) inertiaTrace->push_back(inertia);
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(K, X.cols());
    std::vector<int> sizes(K, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[i]) += X.row(i);
      sizes[assign[i]]++;
    }
    for (int c = 0; c < K; ++c) {
      if (sizes[c] > 0) {
        centers.row(c) = sums.row(c) / sizes[c];
      } else {
        // revive an empty cluster with the point farthest from its center
        int far = 0;
        double farD = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = (X.row(i) - centers.row(assign[i])).squaredNorm();
          if (d > farD) { farD = d; far = i; }
        }
        centers.row(c) = X.row(far);
      }
    }
  }
  return assign;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::ShapeMismatch, "partition length mismatch");
  const long n = static_cast<long>(a.size());
  auto comb2 = [](long x) { return 0.5 * x * (x - 1); };

  std::map<std::pair<int, int>, long> cells;
  std::map<int, long> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}]++;
    rows[a[i]]++;
    cols[b[i]]++;
  }
  double index = 0.0, sumA = 0.0, sumB = 0.0;
  for (const auto& [key, c] : cells) index += comb2(c);
  for (const auto& [key, c] : rows) sumA += comb2(c);
  for (const auto& [key, c] : cols) sumB += comb2(c);
  const double total = comb2(n);
  const double expected = total > 0 ? sumA * sumB / total : 0.0;
  const double maxIndex = 0.5 * (sumA + sumB);
  if (maxIndex == expected) return 1.0;  // both partitions trivial
  return (index - expected) / (maxIndex - expected);
}

PCAResult pca(const Matrix& X, int nComponents) {
  const int N = static_cast<int>(X.rows());
  const int dim = static_cast<int>(X.cols());
  if (N < 1) throw Error(ErrorKind::EmptySupport, "pca needs data");

  PCAResult res;
  res.mean = X.colwise().mean();
  Matrix centered = X.rowwise() - res.mean.transpose();
  const double denom = N > 1 ? N - 1.0 : 1.0;

  Vector evals;
  Matrix evecs;  // columns
  if (dim <= N) {
    Matrix cov = centered.transpose() * centered / denom;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    evals = eig.eigenvalues().reverse();
    evecs = eig.eigenvectors().rowwise().reverse();
  } else {
    // Gram trick: eigenvectors of (X Xt)/denom lift to covariance eigenvectors
    Matrix gram = centered * centered.transpose() / denom;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    Vector ge = eig.eigenvalues().reverse();
    Matrix gu = eig.eigenvectors().rowwise().reverse();
    evals = ge;
    evecs.resize(dim, N);
    for (int c = 0; c < N; ++c) {
      Vector dir = centered.transpose() * gu.col(c);
      double norm = dir.norm();
      evecs.col(c) = norm > 0 ? Vector(dir / norm) : Vector::Zero(dim);
    }
  }

  const double lmax = evals.size() > 0 ? std::max(evals[0], 0.0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals[i] > std::max(1e-12 * lmax, 1e-300)) ++rank;
  res.rank = rank;
  if (nComponents > rank)
    throw Error(ErrorKind::RankError, "nComponents exceeds data rank");

  res.eigenvalues = evals.head(nComponents);
  res.components.resize(nComponents, dim);
  for (int c = 0; c < nComponents; ++c) {
    Vector v = evecs.col(c);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) v = -v;
    res.components.row(c) = v.transpose();
  }
  res.projections = centered * res.components.transpose();
  return res;
}

}  // namespace tlp
