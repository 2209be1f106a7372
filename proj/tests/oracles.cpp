#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

double brute_force_uniform_cost(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) cost += C(i, perm[i]);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

double monotone_1d_cost(const Vector& xs, const Vector& xw, const Vector& ys,
                        const Vector& yw, double p) {
  const int n = static_cast<int>(xs.size());
  const int k = static_cast<int>(ys.size());
  std::vector<int> xi(n), yi(k);
  std::iota(xi.begin(), xi.end(), 0);
  std::iota(yi.begin(), yi.end(), 0);
  std::sort(xi.begin(), xi.end(), [&](int a, int b) { return xs[a] < xs[b]; });
  std::sort(yi.begin(), yi.end(), [&](int a, int b) { return ys[a] < ys[b]; });

  double cost = 0.0;
  int i = 0, j = 0;
  double a = xw[xi[0]], b = yw[yi[0]];
  while (i < n && j < k) {
    const double move = std::min(a, b);
    cost += move * std::pow(std::abs(xs[xi[i]] - ys[yi[j]]), p);
    a -= move;
    b -= move;
    if (a <= 1e-15) { ++i; if (i < n) a = xw[xi[i]]; }
    if (b <= 1e-15) { ++j; if (j < k) b = yw[yi[j]]; }
  }
  return cost;
}

double sorted_matching_cost(const Vector& xs, const Vector& ys, double p) {
  std::vector<double> a(xs.data(), xs.data() + xs.size());
  std::vector<double> b(ys.data(), ys.data() + ys.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double cost = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cost += std::pow(std::abs(a[i] - b[i]), p);
  return cost / a.size();
}

Matrix random_points(int n, int d, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix out(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) out(i, c) = u(rng);
  return out;
}

Vector random_weights(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = u(rng);
  return w / w.sum();
}

}  // namespace oracle
