#include "tlp/synth.hpp"

#include <cmath>

#include "tlp/rng.hpp"

namespace tlp {

namespace {

// half-open [a,b) snapped to grid nodes; returns node index range [ia, ib)
struct SnappedInterval {
  int ia, ib;
  double length(double h) const { return (ib - ia) * h; }
};

SnappedInterval snap(double a, double b, int gridN) {
  const double h = 1.0 / (gridN - 1);
  int ia = static_cast<int>(std::lround(a / h));
  int ib = static_cast<int>(std::lround(b / h));
  ia = std::clamp(ia, 0, gridN - 1);
  ib = std::clamp(ib, 0, gridN - 1);
  return {ia, ib};
}

void check_intervals(double l, double r, double b) {
  if (!(r > 0) || !(b > 0)) throw Error(ErrorKind::InvalidParams, "r and b must be positive");
  if (l < 0 || l + b + 2 * r > 1 + 1e-12)
    throw Error(ErrorKind::InvalidParams, "intervals overflow [0,1]; need l in [0, 1-b-2r]");
}

void add_noise(Matrix& values, double noiseSigma, std::mt19937_64& rng) {
  if (noiseSigma <= 0) return;
  std::normal_distribution<double> gauss(0.0, noiseSigma);
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) values(i, j) += gauss(rng);
}

}  // namespace

Matrix grid_1d(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidParams, "grid needs at least 2 points");
  Matrix g(n, 1);
  for (int i = 0; i < n; ++i) g(i, 0) = static_cast<double>(i) / (n - 1);
  return g;
}

TLpSignal gen_hump(double l, double r, double b, int gridN, double noiseSigma,
                   std::mt19937_64& rng) {
  check_intervals(l, r, b);
  const double h = 1.0 / (gridN - 1);
  SnappedInterval i1 = snap(l, l + r, gridN);
  SnappedInterval i2 = snap(l + b + r, l + b + 2 * r, gridN);
  const double mass = i1.length(h) + i2.length(h);
  if (mass <= 0) throw Error(ErrorKind::InvalidParams, "intervals collapse on this grid");
  const double K1 = 1.0 / mass;

  TLpSignal s;
  s.measure = make_uniform(grid_1d(gridN));
  s.values = Matrix::Zero(gridN, 1);
  for (int i = i1.ia; i < i1.ib; ++i) s.values(i, 0) = K1;
  for (int i = i2.ia; i < i2.ib; ++i) s.values(i, 0) = K1;
  add_noise(s.values, noiseSigma, rng);
  return s;
}

TLpSignal gen_chirp(double l, double r, double b, double gamma, int gridN,
                    double noiseSigma, std::mt19937_64& rng) {
  check_intervals(l, r, b);
  if (!(gamma > 0)) throw Error(ErrorKind::InvalidGamma, "gamma must be positive");
  const double teethReal = r / gamma;
  const long teeth = std::lround(teethReal);
  if (teeth < 1 || std::abs(teethReal - teeth) > 1e-9)
    throw Error(ErrorKind::InvalidGamma, "gamma must divide r into an integer tooth count");

  const double h = 1.0 / (gridN - 1);
  double mass = 0.0;
  std::vector<SnappedInterval> toothIv(teeth);
  for (long j = 0; j < teeth; ++j) {
    toothIv[j] = snap(l + j * gamma, l + j * gamma + gamma / 2, gridN);
    mass += toothIv[j].length(h);
  }
  SnappedInterval tail = snap(l + b + r, l + b + 2 * r, gridN);
  mass += 0.25 * tail.length(h);
  if (mass <= 0) throw Error(ErrorKind::InvalidParams, "intervals collapse on this grid");
  const double K2 = 1.0 / mass;

  TLpSignal s;
  s.measure = make_uniform(grid_1d(gridN));
  s.values = Matrix::Zero(gridN, 1);
  for (const auto& iv : toothIv)
    for (int i = iv.ia; i < iv.ib; ++i) s.values(i, 0) = K2;
  for (int i = tail.ia; i < tail.ib; ++i) s.values(i, 0) += 0.25 * K2;
  add_noise(s.values, noiseSigma, rng);
  return s;
}

double gen_2d_alpha(Class2d cls, std::mt19937_64& rng) {
  if (cls == Class2d::M1) return std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::normal_distribution<double>(-4.0, 1.5)(rng);
}

TLpSignal gen_2d(Class2d cls, int nx, int ny, std::mt19937_64& rng) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidParams, "grid must be at least 2x2");
  const int n = nx * ny;
  Matrix points(n, 2);
  Matrix values(n, 1);
  const double alpha = gen_2d_alpha(cls, rng);
  std::normal_distribution<double> pixelNoise(0.0, 1.0);
  for (int ix = 0; ix < nx; ++ix) {
    const double x = static_cast<double>(ix) / (nx - 1);
    for (int iy = 0; iy < ny; ++iy) {
      const double y = static_cast<double>(iy) / (ny - 1);
      const int idx = ix * ny + iy;
      points(idx, 0) = x;
      points(idx, 1) = y;
      values(idx, 0) = alpha * x * std::exp(-x * x - y * y) + pixelNoise(rng);
    }
  }
  if (cls == Class2d::M1) {
    const int count = 10 + static_cast<int>(rng() % 11);  // uniform on {10..20}
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int j = 0; j < count; ++j) values(idx[j], 0) = -2.0;
  }
  TLpSignal s;
  s.measure = make_uniform(points);
  s.values = values;
  return s;
}

DiscreteMeasure normalize_for_wp(const TLpSignal& signal, double chi) {
  signal.validate();
  if (signal.channels() < 1)
    throw Error(ErrorKind::ChannelMismatch, "signal has no channels to normalize");
  Vector field = signal.values.rowwise().mean();
  field.array() += chi;
  if ((field.array() <= 0).any())
    throw Error(ErrorKind::NegativeMass, "f + chi must be positive everywhere");
  DiscreteMeasure m;
  m.points = signal.measure.points;
  m.weights = field / field.sum();
  return m;
}

double default_chi(const TLpSignal& signal) {
  return std::abs(signal.values.rowwise().mean().minCoeff()) + 0.01;
}

LabeledSignals gen_dataset_1d(const Synth1dConfig& cfg) {
  LabeledSignals out;
  const int total = cfg.nHump + cfg.nChirp;
  out.signals.reserve(total);
  out.labels.reserve(total);
  for (int i = 0; i < cfg.nHump; ++i) {
    std::mt19937_64 rng = substream(cfg.seed, static_cast<uint64_t>(i));
    out.signals.push_back(gen_hump(cfg.l, cfg.r, cfg.b, cfg.gridN, cfg.noiseSigma, rng));
    out.labels.push_back(0);
  }
  for (int i = 0; i < cfg.nChirp; ++i) {
    std::mt19937_64 rng = substream(cfg.seed, static_cast<uint64_t>(cfg.nHump + i));
    const bool first = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.r1;
    const double gamma = first ? cfg.gamma1 : cfg.gamma2;
    out.signals.push_back(gen_chirp(cfg.l, cfg.r, cfg.b, gamma, cfg.gridN, cfg.noiseSigma, rng));
    out.labels.push_back(first ? 1 : 2);
  }
  return out;
}

LabeledSignals gen_dataset_2d(const Synth2dConfig& cfg) {
  LabeledSignals out;
  out.signals.reserve(2 * cfg.nPerClass);
  out.labels.reserve(2 * cfg.nPerClass);
  for (int i = 0; i < 2 * cfg.nPerClass; ++i) {
    std::mt19937_64 rng = substream(cfg.seed, static_cast<uint64_t>(i));
    const Class2d cls = i < cfg.nPerClass ? Class2d::M1 : Class2d::M2;
    out.signals.push_back(gen_2d(cls, cfg.nx, cfg.ny, rng));
    out.labels.push_back(cls == Class2d::M1 ? 0 : 1);
  }
  return out;
}

}  // namespace tlp
