#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tlp/rng.hpp"
#include "tlp/synth.hpp"

using namespace tlp;

namespace {

double trapezoid(const TLpSignal& s) {
  double acc = 0.0;
  for (int i = 0; i + 1 < s.measure.size(); ++i) {
    double h = s.measure.points(i + 1, 0) - s.measure.points(i, 0);
    acc += 0.5 * h * (s.values(i, 0) + s.values(i + 1, 0));
  }
  return acc;
}

}  // namespace

TEST_CASE("hump on an aligned grid") {
  // endpoints 0.1/0.3/0.6/0.8 are exact nodes of the 151-point grid
  std::mt19937_64 rng = substream(81, 0);
  TLpSignal s = gen_hump(0.1, 0.2, 0.3, 151, 0.0, rng);
  const double K1 = 2.5;
  CHECK(s.values.maxCoeff() == doctest::Approx(K1));
  CHECK(trapezoid(s) == doctest::Approx(1.0).epsilon(1e-12));
  // support sits inside [0.1,0.3) and [0.6,0.8)
  for (int i = 0; i < s.measure.size(); ++i) {
    double x = s.measure.points(i, 0);
    bool inside = (x >= 0.1 - 1e-12 && x < 0.3 - 1e-12) ||
                  (x >= 0.6 - 1e-12 && x < 0.8 - 1e-12);
    if (inside) CHECK(s.values(i, 0) == doctest::Approx(K1));
    else CHECK(s.values(i, 0) == doctest::Approx(0.0));
  }
}

TEST_CASE("noise-free generators integrate to one") {
  std::mt19937_64 rng = substream(82, 0);
  for (int n : {150, 151, 200, 321}) {
    TLpSignal h = gen_hump(0.2, 0.2, 0.3, n, 0.0, rng);
    CHECK(trapezoid(h) == doctest::Approx(1.0).epsilon(1e-10));
    TLpSignal c = gen_chirp(0.2, 0.2, 0.3, 0.04, n, 0.0, rng);
    CHECK(trapezoid(c) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("chirp teeth structure") {
  // grid with h = 1/200: tooth edges at multiples of 0.025 are exact nodes
  std::mt19937_64 rng = substream(83, 0);
  TLpSignal s = gen_chirp(0.1, 0.2, 0.3, 0.05, 201, 0.0, rng);
  const double K2 = 1.0 / 0.15;
  CHECK(s.values.maxCoeff() == doctest::Approx(K2));
  // 4 teeth of width gamma/2 = 0.025
  int plateau = 0;
  for (int i = 0; i < s.measure.size(); ++i)
    if (std::abs(s.values(i, 0) - K2) < 1e-12) ++plateau;
  CHECK(plateau == 4 * 5);  // 0.025 spans 5 nodes of h=1/200 (half-open)
  // tail at quarter height over [0.6, 0.8)
  int tail = 0;
  for (int i = 0; i < s.measure.size(); ++i)
    if (std::abs(s.values(i, 0) - 0.25 * K2) < 1e-12) ++tail;
  CHECK(tail == 40);
}

TEST_CASE("generator parameter validation") {
  std::mt19937_64 rng = substream(84, 0);
  try {
    gen_hump(0.8, 0.2, 0.3, 100, 0.0, rng);  // l + b + 2r > 1
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParams);
  }
  try {
    gen_chirp(0.1, 0.2, 0.3, 0.03, 100, 0.0, rng);  // 0.2/0.03 not integral
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidGamma);
  }
}

TEST_CASE("generators are deterministic under a fixed seed") {
  std::mt19937_64 a = substream(85, 3), b = substream(85, 3);
  TLpSignal s1 = gen_hump(0.2, 0.2, 0.3, 150, 1.0, a);
  TLpSignal s2 = gen_hump(0.2, 0.2, 0.3, 150, 1.0, b);
  CHECK((s1.values - s2.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("2d generator") {
  std::mt19937_64 rng = substream(86, 0);
  TLpSignal s = gen_2d(Class2d::M1, 16, 16, rng);
  CHECK(s.measure.size() == 256);
  CHECK(s.measure.dim() == 2);

  // impulse count lies in {10..20}
  std::mt19937_64 rng2 = substream(86, 1);
  int impulses = 0;
  TLpSignal m1 = gen_2d(Class2d::M1, 32, 32, rng2);
  for (int i = 0; i < m1.measure.size(); ++i)
    if (m1.values(i, 0) == -2.0) ++impulses;
  CHECK(impulses >= 10);
  CHECK(impulses <= 20);

  // M2 amplitude distribution: CLT check on the draw helper
  std::mt19937_64 rng3 = substream(86, 2);
  double mean = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) mean += gen_2d_alpha(Class2d::M2, rng3);
  mean /= draws;
  CHECK(std::abs(mean + 4.0) < 3.0 * 1.5 / std::sqrt(draws));

  // deterministic under seed
  std::mt19937_64 a = substream(86, 4), b = substream(86, 4);
  TLpSignal sa = gen_2d(Class2d::M2, 8, 8, a);
  TLpSignal sb = gen_2d(Class2d::M2, 8, 8, b);
  CHECK((sa.values - sb.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalize_for_wp") {
  Matrix p(3, 1), v(3, 1);
  p << 0.0, 0.5, 1.0;

  // positive field with chi = 0 keeps weights proportional to f
  v << 1.0, 2.0, 1.0;
  DiscreteMeasure m = normalize_for_wp(TLpSignal{make_uniform(p), v}, 0.0);
  CHECK(m.weights[0] == doctest::Approx(0.25));
  CHECK(m.weights[1] == doctest::Approx(0.5));

  // zero field with chi = 1 is uniform
  v.setZero();
  DiscreteMeasure u = normalize_for_wp(TLpSignal{make_uniform(p), v}, 1.0);
  CHECK(u.isUniform(1e-12));

  // nonpositive shifted field raises
  v << -2.0, 0.0, 1.0;
  try {
    normalize_for_wp(TLpSignal{make_uniform(p), v}, 1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeMass);
  }
}

TEST_CASE("normalize_for_wp on an M1 field with impulses") {
  std::mt19937_64 rng = substream(87, 0);
  TLpSignal s = gen_2d(Class2d::M1, 16, 16, rng);
  double chi = default_chi(s);
  CHECK(chi > 2.0);  // the -2 impulses force at least that much shift
  DiscreteMeasure m = normalize_for_wp(s, chi);
  CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((m.weights.array() > 0).all());
}

TEST_CASE("1d dataset") {
  Synth1dConfig cfg;
  cfg.seed = 7;
  LabeledSignals data = gen_dataset_1d(cfg);
  CHECK(data.signals.size() == 60);
  CHECK(data.labels.size() == 60);
  int humps = 0;
  for (int i = 0; i < 60; ++i)
    if (data.labels[i] == 0) ++humps;
  CHECK(humps == 30);
  for (const auto& s : data.signals) CHECK(s.measure.size() == 150);

  // chirp labels match the two gamma values
  for (int i = 30; i < 60; ++i) CHECK((data.labels[i] == 1 || data.labels[i] == 2));

  // byte-level determinism
  LabeledSignals again = gen_dataset_1d(cfg);
  for (int i = 0; i < 60; ++i)
    CHECK((data.signals[i].values - again.signals[i].values).cwiseAbs().maxCoeff() == 0.0);
}
