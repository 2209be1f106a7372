#pragma once

#include <random>
#include <vector>

#include "tlp/measure.hpp"

namespace tlp {

// Uniform grid x_i = i/(n-1) on [0,1] as an n x 1 point matrix.
Matrix grid_1d(int n);

// Double hump K1*(1_[l,l+r) + 1_[l+b+r,l+b+2r)) sampled on the grid, plus
// N(0, noiseSigma^2) per point. Interval endpoints snap to the nearest grid
// node and K1 comes from the snapped lengths, so the noise-free trapezoid
// integral is exactly 1.
TLpSignal gen_hump(double l, double r, double b, int gridN, double noiseSigma,
                   std::mt19937_64& rng);

// Chirp-hump: r/gamma teeth of width gamma/2 plus a quarter-height tail hump.
TLpSignal gen_chirp(double l, double r, double b, double gamma, int gridN,
                    double noiseSigma, std::mt19937_64& rng);

enum class Class2d { M1, M2 };

// Class-specific amplitude draw: N(0,1) for M1, N(-4,1.5) for M2.
double gen_2d_alpha(Class2d cls, std::mt19937_64& rng);

// f(x_i,y_j) = alpha * x_i * exp(-x_i^2 - y_j^2) + N(0,1) per pixel on a
// grid over [0,1]^2; M1 additionally gets f = -2 at 10..20 random cells.
TLpSignal gen_2d(Class2d cls, int nx, int ny, std::mt19937_64& rng);

// g = (mean_channels(f) + chi) / integral, as probability weights on the grid.
DiscreteMeasure normalize_for_wp(const TLpSignal& signal, double chi);

// The |min f| + 0.01 shift used when the caller does not pick chi.
double default_chi(const TLpSignal& signal);

struct Synth1dConfig {
  double l = 0.2;
  double r = 0.2;
  double b = 0.3;
  double gamma1 = 0.02;
  double gamma2 = 0.04;
  double noiseSigma = 1.0;
  int gridN = 150;
  int nHump = 30;
  int nChirp = 30;
  double r1 = 0.5;  // probability a chirp draws gamma1
  uint64_t seed = 0;
};

struct LabeledSignals {
  std::vector<TLpSignal> signals;
  std::vector<int> labels;  // 1d: 0 = hump, 1 = chirp-gamma1, 2 = chirp-gamma2
};

// 30 noisy humps + 30 noisy chirps with gamma sampled from {gamma1, gamma2}.
LabeledSignals gen_dataset_1d(const Synth1dConfig& cfg);

struct Synth2dConfig {
  int nPerClass = 25;
  int nx = 32;
  int ny = 32;
  uint64_t seed = 0;
};

// labels: 0 = M1, 1 = M2
LabeledSignals gen_dataset_2d(const Synth2dConfig& cfg);

}  // namespace tlp
