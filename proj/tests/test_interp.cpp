#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "tlp/interpolate.hpp"
#include "tlp/rng.hpp"

using namespace tlp;

namespace {

SolveOptions exact_opts() {
  SolveOptions o;
  o.solver = Solver::Exact;
  return o;
}

// sorted multiset comparison of lifted atoms
bool same_lifted_multiset(const TLpSignal& a, const TLpSignal& b, double tol) {
  if (a.measure.size() != b.measure.size()) return false;
  auto rows = [](const TLpSignal& s) {
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < s.measure.size(); ++i)
      out.push_back({s.measure.points(i, 0), s.values(i, 0)});
    std::sort(out.begin(), out.end());
    return out;
  };
  auto ra = rows(a), rb = rows(b);
  for (std::size_t i = 0; i < ra.size(); ++i)
    if (std::abs(ra[i].first - rb[i].first) > tol ||
        std::abs(ra[i].second - rb[i].second) > tol)
      return false;
  return true;
}

}  // namespace

TEST_CASE("interpolation endpoints") {
  std::mt19937_64 rng = substream(61, 0);
  const int n = 6;
  TLpSignal refSig{make_uniform(oracle::random_points(n, 1, rng)),
                   oracle::random_points(n, 1, rng, -1, 1)};
  ReferenceSignal ref{refSig.measure, refSig.values, ReferenceKind::TLP};
  TLpSignal target{make_uniform(oracle::random_points(n, 1, rng)),
                   oracle::random_points(n, 1, rng, -1, 1)};
  TransportMap map = tlp_map(refSig, target, 2.0, exact_opts());

  TLpSignal at0 = interpolate(ref, map, 0.0);
  CHECK((at0.measure.points - ref.measure.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((at0.values - ref.values).cwiseAbs().maxCoeff() == 0.0);

  TLpSignal at1 = interpolate(ref, map, 1.0);
  CHECK(same_lifted_multiset(at1, target, 1e-12));
}

TEST_CASE("interpolation preserves mass for every t") {
  std::mt19937_64 rng = substream(62, 0);
  TLpSignal refSig{make_uniform(oracle::random_points(5, 1, rng)),
                   oracle::random_points(5, 1, rng)};
  ReferenceSignal ref{refSig.measure, refSig.values, ReferenceKind::TLP};
  TLpSignal target{make_uniform(oracle::random_points(5, 1, rng)),
                   oracle::random_points(5, 1, rng)};
  TransportMap map = tlp_map(refSig, target, 2.0, exact_opts());
  for (double t : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    TLpSignal s = interpolate(ref, map, t);
    CHECK(s.measure.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.measure.size() == 5);
  }
}

TEST_CASE("interpolation midpoint of the swap instance stacks both values at 1/2") {
  Matrix p(2, 1), vf(2, 1), vg(2, 1);
  p << 0.0, 1.0;
  vf << 0.0, 10.0;
  vg << 10.0, 0.0;
  TLpSignal f{make_uniform(p), vf};
  TLpSignal g{make_uniform(p), vg};
  ReferenceSignal ref{f.measure, f.values, ReferenceKind::TLP};
  TransportMap map = tlp_map(f, g, 2.0, exact_opts());
  TLpSignal mid = interpolate(ref, map, 0.5);
  REQUIRE(mid.measure.size() == 2);
  CHECK(mid.measure.points(0, 0) == doctest::Approx(0.5));
  CHECK(mid.measure.points(1, 0) == doctest::Approx(0.5));
  std::vector<double> vals{mid.values(0, 0), mid.values(1, 0)};
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(0.0));
  CHECK(vals[1] == doctest::Approx(10.0));
}

TEST_CASE("interpolation rejects t outside [0,1]") {
  Matrix p(1, 1), v(1, 1);
  p << 0.0;
  v << 0.0;
  ReferenceSignal ref{make_uniform(p), v, ReferenceKind::TLP};
  TransportMap map;
  map.images = Matrix::Zero(1, 2);
  try {
    interpolate(ref, map, 1.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRange);
  }
}

TEST_CASE("lifted interpolant sits on the Wasserstein geodesic") {
  std::mt19937_64 rng = substream(63, 0);
  const double p = 2.0;
  for (int trial = 0; trial < 5; ++trial) {
    int n = 4 + static_cast<int>(rng() % 5);
    TLpSignal refSig{make_uniform(oracle::random_points(n, 1, rng)),
                     oracle::random_points(n, 1, rng, -1, 1)};
    ReferenceSignal ref{refSig.measure, refSig.values, ReferenceKind::TLP};
    TLpSignal target{make_uniform(oracle::random_points(n, 1, rng)),
                     oracle::random_points(n, 1, rng, -1, 1)};
    TransportMap map = tlp_map(refSig, target, p, exact_opts());
    double full = tlp_distance(refSig, target, p, exact_opts());
    for (double t : {0.25, 0.5, 0.75}) {
      TLpSignal mid = interpolate(ref, map, t);
      double dt = tlp_distance(refSig, mid, p, exact_opts());
      CHECK(std::abs(dt - t * full) <= 1e-6);
    }
  }
}

TEST_CASE("invert(embed(s)) round-trips when images are distinct") {
  std::mt19937_64 rng = substream(64, 0);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3 + static_cast<int>(rng() % 6);
    TLpSignal refSig{make_uniform(oracle::random_points(n, 1, rng)),
                     oracle::random_points(n, 1, rng, -1, 1)};
    ReferenceSignal ref{refSig.measure, refSig.values, ReferenceKind::TLP};
    TLpSignal sig{make_uniform(oracle::random_points(n, 1, rng)),
                  oracle::random_points(n, 1, rng, -1, 1)};
    EmbeddingVector v = embed(sig, ref, 2.0, exact_opts());
    TLpSignal back = invert_embedding(v, ref);
    CHECK(same_lifted_multiset(back, sig, 1e-9));
  }
}

TEST_CASE("inverting the zero vector returns the reference") {
  std::mt19937_64 rng = substream(65, 0);
  const int n = 5;
  ReferenceSignal ref{make_uniform(oracle::random_points(n, 1, rng)),
                      oracle::random_points(n, 1, rng), ReferenceKind::TLP};
  EmbeddingVector zero;
  zero.spatial = Matrix::Zero(n, 1);
  zero.channel = Matrix::Zero(n, 1);
  zero.weights = ref.measure.weights;
  zero.exponent = 2.0;
  TLpSignal back = invert_embedding(zero, ref);
  CHECK(same_lifted_multiset(back, ref.asSignal(), 1e-12));
}

TEST_CASE("fibre mean merges coinciding spatial images") {
  // two atoms both mapped to x=0.5 with values 0 and 10 and equal weights
  Matrix p(2, 1), h(2, 1);
  p << 0.0, 1.0;
  h << 0.0, 0.0;
  ReferenceSignal ref{make_uniform(p), h, ReferenceKind::TLP};
  EmbeddingVector v;
  v.exponent = 2.0;
  v.weights = ref.measure.weights;
  const double rhoRoot = std::sqrt(0.5);
  v.spatial = Matrix(2, 1);
  v.spatial << 0.5 * rhoRoot, -0.5 * rhoRoot;  // both land at 0.5
  v.channel = Matrix(2, 1);
  v.channel << 0.0 * rhoRoot, 10.0 * rhoRoot;  // values 0 and 10
  TLpSignal back = invert_embedding(v, ref);
  REQUIRE(back.measure.size() == 1);
  CHECK(back.measure.points(0, 0) == doctest::Approx(0.5));
  CHECK(back.measure.weights[0] == doctest::Approx(1.0));
  CHECK(back.values(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("mode sweep") {
  std::mt19937_64 rng = substream(66, 0);
  const int n = 4;
  ReferenceSignal ref{make_uniform(oracle::random_points(n, 1, rng)),
                      oracle::random_points(n, 1, rng), ReferenceKind::TLP};
  std::vector<EmbeddingVector> embs;
  for (int i = 0; i < 2; ++i) {
    EmbeddingVector v;
    v.spatial = oracle::random_points(n, 1, rng, -0.1, 0.1);
    v.channel = oracle::random_points(n, 1, rng, -0.1, 0.1);
    v.weights = ref.measure.weights;
    v.exponent = 2.0;
    embs.push_back(v);
  }

  // count matches stddevs
  std::vector<TLpSignal> sweep = mode_sweep(embs, 0, {-1.0, 0.0, 1.0}, ref);
  CHECK(sweep.size() == 3);

  // two-point PCA: sweeping component 0 moves along the joining line
  Vector f0 = embs[0].flat(), f1 = embs[1].flat();
  Vector dir = (f1 - f0).normalized();
  Vector mean = 0.5 * (f0 + f1);
  // reconstruct swept embeddings via inversion-free algebra: s=+-1 lands at
  // mean +- sqrt(lambda) dir, and ||f1-f0||/sqrt(2) is sqrt(lambda)
  double lam = (f1 - f0).squaredNorm() / 2.0;
  PCAResult pcares = pca([&] {
    Matrix X(2, f0.size());
    X.row(0) = f0.transpose();
    X.row(1) = f1.transpose();
    return X;
  }(), 1);
  CHECK(pcares.eigenvalues[0] == doctest::Approx(lam).epsilon(1e-10));
  double align = std::abs(pcares.components.row(0).dot(dir.transpose()));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-10));

  // s = 0 inverts the mean embedding
  std::vector<TLpSignal> center = mode_sweep(embs, 0, {0.0}, ref);
  EmbeddingVector meanVec;
  meanVec.exponent = 2.0;
  meanVec.weights = ref.measure.weights;
  meanVec.spatial = 0.5 * (embs[0].spatial + embs[1].spatial);
  meanVec.channel = 0.5 * (embs[0].channel + embs[1].channel);
  TLpSignal direct = invert_embedding(meanVec, ref);
  CHECK((center[0].measure.points - direct.measure.points).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mode sweep rejects components beyond the rank") {
  std::mt19937_64 rng = substream(67, 0);
  ReferenceSignal ref{make_uniform(oracle::random_points(3, 1, rng)),
                      oracle::random_points(3, 1, rng), ReferenceKind::TLP};
  std::vector<EmbeddingVector> embs;
  for (int i = 0; i < 2; ++i) {
    EmbeddingVector v;
    v.spatial = oracle::random_points(3, 1, rng);
    v.channel = oracle::random_points(3, 1, rng);
    v.weights = ref.measure.weights;
    v.exponent = 2.0;
    embs.push_back(v);
  }
  try {
    mode_sweep(embs, 1, {0.0}, ref);  // rank is 1 for two points
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoSuchComponent);
  }
}
