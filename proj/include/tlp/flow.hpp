#pragma once

#include <utility>
#include <vector>

#include "tlp/measure.hpp"

namespace tlp {

// Node-centered fields on a rectangular grid: value (i,j) sits at
// (i*hx, j*hy). Densities are strictly positive and integrate to 1 under the
// trapezoid rule; tx/ty hold the current map when present.
struct GridField {
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  Matrix mu, nu;              // nx x ny densities
  std::vector<Matrix> f, g;   // channel grids (same count on both sides)
  Matrix tx, ty;              // per-cell image coordinates (empty = unset)

  bool hasMap() const { return tx.size() > 0; }
  double domainX() const { return (nx - 1) * hx; }
  double domainY() const { return (ny - 1) * hy; }
  void validate() const;
};

// Normalizes a positive density grid to unit trapezoid integral.
Matrix normalize_density(const Matrix& density, double hx, double hy);

// Coordinatewise monotone CDF matching (x marginal first, then y
// conditional); returns (tx, ty) with T0_* mu = nu up to grid error.
std::pair<Matrix, Matrix> knothe_initial_map(const GridField& grid);

// Steepest-descent field Q = 2T + 2 sum_i g_i(T(x)) grad f_i(x); gradients by
// central differences (one-sided at the boundary), g sampled bilinearly.
std::pair<Matrix, Matrix> compute_Q(const GridField& grid);

// 5-point Laplacian solve of  lap(alpha) = rhs  with alpha = 0 on the
// boundary. Direct sparse factorization up to 256^2 nodes, conjugate
// gradients beyond.
Matrix poisson_dirichlet(const Matrix& rhs, double hx, double hy);

// epsilon(T) = int (|T(x)-x|^2 + |g(T(x))-f(x)|^2) mu(x) dx  (trapezoid)
double flow_energy(const GridField& grid);

// L1 distance between the bilinear splat of T-pushed mu-mass and nu.
double pushforward_l1_error(const GridField& grid);

struct FlowResult {
  Matrix tx, ty;
  std::vector<double> energies;  // energy after every accepted step, [0] = initial
  int steps = 0;
  int nonposJacobianCells = 0;  // cells where det(grad T) <= 0 at the final map
  double finalTau = 0.0;
};

// Gradient flow: Q -> alpha from  lap(alpha) = -div(Q_perp)  ->
// T <- T - (tau/mu) grad(T) perp(grad alpha), with backtracking halving of
// tau on energy increases (10 consecutive failures raise StepTooLarge).
FlowResult flow_minimize(GridField grid, double tau, int maxSteps, double energyTol);

}  // namespace tlp
