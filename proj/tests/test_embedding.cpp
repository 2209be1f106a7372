#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tlp/embedding.hpp"
#include "tlp/rng.hpp"
#include "tlp/synth.hpp"

using namespace tlp;

namespace {

SolveOptions exact_opts() {
  SolveOptions o;
  o.solver = Solver::Exact;
  return o;
}

}  // namespace

TEST_CASE("build_reference basics") {
  Matrix grid(4, 1);
  grid << 0.0, 0.25, 0.5, 0.75;
  TLpSignal s1{make_uniform(grid), Matrix::Zero(4, 1)};
  TLpSignal s2{make_uniform(grid), Matrix::Constant(4, 1, 2.0)};

  ReferenceSignal same = build_reference({s1, s1}, ReferenceKind::TLP);
  CHECK((same.values - s1.values).cwiseAbs().maxCoeff() == 0.0);

  ReferenceSignal mean = build_reference({s1, s2}, ReferenceKind::TLP);
  CHECK((mean.values.array() - 1.0).abs().maxCoeff() == 0.0);

  ReferenceSignal wp = build_reference({s1, s2}, ReferenceKind::WP);
  CHECK(wp.values.cols() == 0);
  CHECK(wp.measure.isUniform());
}

TEST_CASE("build_reference averages the integral linearly") {
  Synth1dConfig cfg;
  cfg.seed = 99;
  LabeledSignals data = gen_dataset_1d(cfg);
  ReferenceSignal ref = build_reference(data.signals, ReferenceKind::TLP);
  // trapezoid integral of h == mean of the signal integrals
  auto trap = [](const TLpSignal& s) {
    double acc = 0.0;
    const int n = s.measure.size();
    for (int i = 0; i + 1 < n; ++i) {
      double hstep = s.measure.points(i + 1, 0) - s.measure.points(i, 0);
      acc += 0.5 * hstep * (s.values(i, 0) + s.values(i + 1, 0));
    }
    return acc;
  };
  double meanIntegral = 0.0;
  for (const auto& s : data.signals) meanIntegral += trap(s);
  meanIntegral /= data.signals.size();
  CHECK(trap(ref.asSignal()) == doctest::Approx(meanIntegral).epsilon(1e-10));
}

TEST_CASE("build_reference rejects differing grids") {
  Matrix g1(2, 1), g2(2, 1);
  g1 << 0.0, 1.0;
  g2 << 0.0, 0.5;
  TLpSignal a{make_uniform(g1), Matrix::Zero(2, 1)};
  TLpSignal b{make_uniform(g2), Matrix::Zero(2, 1)};
  try {
    build_reference({a, b}, ReferenceKind::TLP);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridMismatch);
  }
}

TEST_CASE("embedding of the reference against itself is zero") {
  std::mt19937_64 rng = substream(51, 0);
  TLpSignal refSig{make_uniform(oracle::random_points(8, 1, rng)),
                   oracle::random_points(8, 1, rng, -1, 1)};
  ReferenceSignal ref{refSig.measure, refSig.values, ReferenceKind::TLP};
  EmbeddingVector v = embed(refSig, ref, 2.0, exact_opts());
  CHECK(v.flat().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single-atom embedding example") {
  Matrix p0(1, 1), p1(1, 1);
  p0 << 0.0;
  p1 << 1.0;
  ReferenceSignal ref{make_uniform(p0), Matrix(1, 0), ReferenceKind::WP};
  TLpSignal sig{make_uniform(p1), Matrix(1, 0)};
  EmbeddingVector v = embed(sig, ref, 2.0, exact_opts());
  CHECK(v.spatial(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("embedding norm equals the transport distance to the reference") {
  std::mt19937_64 rng = substream(52, 0);
  const double p = 2.0;
  for (int trial = 0; trial < 15; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    TLpSignal refSig{make_uniform(oracle::random_points(n, 1, rng)),
                     oracle::random_points(n, 1, rng, -1, 1)};
    ReferenceSignal ref{refSig.measure, refSig.values, ReferenceKind::TLP};
    TLpSignal sig{make_uniform(oracle::random_points(n, 1, rng)),
                  oracle::random_points(n, 1, rng, -1, 1)};
    EmbeddingVector v = embed(sig, ref, p, exact_opts());
    double viaEmbedding = lp_norm(v.flat(), p);
    double direct = tlp_distance(ref.asSignal(), sig, p, exact_opts());
    CHECK(std::abs(viaEmbedding - direct) <= 1e-9);
  }
}

TEST_CASE("LWp embedding norm equals the Wasserstein distance to the reference") {
  std::mt19937_64 rng = substream(53, 0);
  for (int trial = 0; trial < 15; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    DiscreteMeasure sigma = make_uniform(oracle::random_points(n, 2, rng));
    ReferenceSignal ref{sigma, Matrix(n, 0), ReferenceKind::WP};
    DiscreteMeasure muI = make_uniform(oracle::random_points(n, 2, rng));
    EmbeddingVector v = embed(TLpSignal{muI, Matrix(n, 0)}, ref, 2.0, exact_opts());
    double viaEmbedding = lp_norm(v.flat(), 2.0);
    double direct = wasserstein_distance(sigma, muI, 2.0, exact_opts());
    CHECK(std::abs(viaEmbedding - direct) <= 1e-9);
  }
}

TEST_CASE("pairwise linear distances") {
  EmbeddingVector a, b;
  a.spatial = Matrix::Zero(1, 1);
  a.channel = Matrix(1, 0);
  a.weights = Vector::Ones(1);
  a.exponent = 2.0;
  b = a;
  b.spatial(0, 0) = 3.0;
  DistanceMatrix D = pairwise_linear_distances({a, b});
  CHECK(D.entries(0, 0) == 0.0);
  CHECK(D.entries(1, 1) == 0.0);
  CHECK(D.entries(0, 1) == doctest::Approx(3.0));
  CHECK(D.entries(1, 0) == doctest::Approx(3.0));
  CHECK(D.method == DistanceMethod::LWP);
}

TEST_CASE("pairwise linear distances rejects mixed shapes") {
  EmbeddingVector a, b;
  a.spatial = Matrix::Zero(2, 1);
  a.channel = Matrix(2, 0);
  a.weights = Vector::Constant(2, 0.5);
  b.spatial = Matrix::Zero(3, 1);
  b.channel = Matrix(3, 0);
  b.weights = Vector::Constant(3, 1.0 / 3);
  try {
    pairwise_linear_distances({a, b});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
}

TEST_CASE("embedding a dataset costs one solver call per signal") {
  Synth1dConfig cfg;
  cfg.seed = 5;
  cfg.nHump = 6;
  cfg.nChirp = 6;
  LabeledSignals data = gen_dataset_1d(cfg);
  ReferenceSignal ref = build_reference(data.signals, ReferenceKind::TLP);
  reset_solver_call_count();
  std::vector<EmbeddingVector> embs;
  for (const auto& s : data.signals) embs.push_back(embed(s, ref, 2.0, exact_opts()));
  CHECK(solver_call_count() == data.signals.size());
  DistanceMatrix D = pairwise_linear_distances(embs);
  CHECK(solver_call_count() == data.signals.size());  // no extra solves
  CHECK(D.method == DistanceMethod::LTLP);
  CHECK_NOTHROW(D.validate(1e-9));
}

TEST_CASE("linear distance is a pseudometric: exact symmetry and triangle") {
  std::mt19937_64 rng = substream(54, 0);
  std::vector<EmbeddingVector> embs;
  for (int i = 0; i < 6; ++i) {
    EmbeddingVector v;
    v.spatial = oracle::random_points(4, 1, rng, -1, 1);
    v.channel = oracle::random_points(4, 1, rng, -1, 1);
    v.weights = Vector::Constant(4, 0.25);
    v.exponent = 2.0;
    embs.push_back(v);
  }
  DistanceMatrix D = pairwise_linear_distances(embs);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int l = 0; l < 6; ++l)
        CHECK(D.entries(i, l) + D.entries(l, j) - D.entries(i, j) >= -1e-12);
}
