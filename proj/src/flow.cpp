#include "tlp/flow.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

namespace tlp {

namespace {

double trap_w(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

double trapezoid_integral(const Matrix& field, double hx, double hy) {
  double s = 0.0;
  const int nx = static_cast<int>(field.rows());
  const int ny = static_cast<int>(field.cols());
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) s += trap_w(i, nx) * trap_w(j, ny) * field(i, j);
  return s * hx * hy;
}

double bilinear(const Matrix& field, double x, double y, double hx, double hy) {
  const int nx = static_cast<int>(field.rows());
  const int ny = static_cast<int>(field.cols());
  double u = std::clamp(x / hx, 0.0, nx - 1.0);
  double v = std::clamp(y / hy, 0.0, ny - 1.0);
  int i0 = std::min(static_cast<int>(u), nx - 2);
  int j0 = std::min(static_cast<int>(v), ny - 2);
  double fu = u - i0, fv = v - j0;
  return (1 - fu) * (1 - fv) * field(i0, j0) + fu * (1 - fv) * field(i0 + 1, j0) +
         (1 - fu) * fv * field(i0, j0 + 1) + fu * fv * field(i0 + 1, j0 + 1);
}

// central differences interior, one-sided at the boundary
void gradient(const Matrix& field, double hx, double hy, Matrix& gx, Matrix& gy) {
  const int nx = static_cast<int>(field.rows());
  const int ny = static_cast<int>(field.cols());
  gx.resize(nx, ny);
  gy.resize(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (i == 0) gx(i, j) = (field(1, j) - field(0, j)) / hx;
      else if (i == nx - 1) gx(i, j) = (field(nx - 1, j) - field(nx - 2, j)) / hx;
      else gx(i, j) = (field(i + 1, j) - field(i - 1, j)) / (2 * hx);
      if (j == 0) gy(i, j) = (field(i, 1) - field(i, 0)) / hy;
      else if (j == ny - 1) gy(i, j) = (field(i, ny - 1) - field(i, ny - 2)) / hy;
      else gy(i, j) = (field(i, j + 1) - field(i, j - 1)) / (2 * hy);
    }
}

// 1D CDF from a positive density row via cumulative trapezoid, normalized
void cdf_1d(const Vector& density, double h, Vector& F) {
  const int n = static_cast<int>(density.size());
  F.resize(n);
  F[0] = 0.0;
  for (int i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * h * (density[i - 1] + density[i]);
  const double total = F[n - 1];
  if (!(total > 0)) throw Error(ErrorKind::DegenerateDensity, "zero marginal slice");
  F /= total;
}

// inverse CDF by linear interpolation on the node grid
double inv_cdf(const Vector& F, double h, double q) {
  const int n = static_cast<int>(F.size());
  q = std::clamp(q, 0.0, 1.0);
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (F[mid] <= q) lo = mid;
    else hi = mid;
  }
  const double span = F[hi] - F[lo];
  if (span <= 0) return lo * h;
  return (lo + (q - F[lo]) / span) * h;
}

struct PoissonSolver {
  int nx, ny;
  double hx, hy;
  bool direct;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  Eigen::SparseMatrix<double> A;

  PoissonSolver(int nx_, int ny_, double hx_, double hy_)
      : nx(nx_), ny(ny_), hx(hx_), hy(hy_) {
    const int mx = nx - 2, my = ny - 2;
    if (mx < 1 || my < 1)
      throw Error(ErrorKind::InvalidParams, "grid too small for an interior solve");
    const double cx = 1.0 / (hx * hx), cy = 1.0 / (hy * hy);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(5) * mx * my);
    auto id = [&](int i, int j) { return i * my + j; };
    for (int i = 0; i < mx; ++i)
      for (int j = 0; j < my; ++j) {
        trip.emplace_back(id(i, j), id(i, j), 2 * cx + 2 * cy);
        if (i > 0) trip.emplace_back(id(i, j), id(i - 1, j), -cx);
        if (i < mx - 1) trip.emplace_back(id(i, j), id(i + 1, j), -cx);
        if (j > 0) trip.emplace_back(id(i, j), id(i, j - 1), -cy);
        if (j < my - 1) trip.emplace_back(id(i, j), id(i, j + 1), -cy);
      }
    A.resize(mx * my, mx * my);
    A.setFromTriplets(trip.begin(), trip.end());
    direct = static_cast<long>(nx) * ny <= 256L * 256L;
    if (direct) {
      ldlt.compute(A);
      if (ldlt.info() != Eigen::Success)
        throw Error(ErrorKind::SolverFailure, "Poisson factorization failed");
    } else {
      cg.setTolerance(1e-12);
      cg.setMaxIterations(20000);
      cg.compute(A);
    }
  }

  // solves lap(alpha) = rhs, alpha = 0 on the boundary
  Matrix solve(const Matrix& rhs) const {
    const int mx = nx - 2, my = ny - 2;
    Vector bvec(mx * my);
    for (int i = 0; i < mx; ++i)
      for (int j = 0; j < my; ++j) bvec[i * my + j] = -rhs(i + 1, j + 1);
    Vector sol;
    if (direct) {
      sol = ldlt.solve(bvec);
    } else {
      sol = cg.solve(bvec);
      if (cg.info() != Eigen::Success && cg.info() != Eigen::NoConvergence)
        throw Error(ErrorKind::SolverFailure, "Poisson CG failed");
    }
    double resNorm = (A * sol - bvec).cwiseAbs().maxCoeff();
    double rhsNorm = bvec.cwiseAbs().maxCoeff();
    if (rhsNorm > 0 && resNorm > 1e-8 * rhsNorm)
      throw Error(ErrorKind::SolverFailure, "Poisson residual above tolerance");
    Matrix alpha = Matrix::Zero(nx, ny);
    for (int i = 0; i < mx; ++i)
      for (int j = 0; j < my; ++j) alpha(i + 1, j + 1) = sol[i * my + j];
    return alpha;
  }
};

}  // namespace

void GridField::validate() const {
  if (nx < 3 || ny < 3) throw Error(ErrorKind::InvalidParams, "grid must be at least 3x3");
  if (!(hx > 0) || !(hy > 0)) throw Error(ErrorKind::InvalidParams, "spacing must be positive");
  if (mu.rows() != nx || mu.cols() != ny || nu.rows() != nx || nu.cols() != ny)
    throw Error(ErrorKind::ShapeMismatch, "density shape mismatch");
  if ((mu.array() <= 0).any() || (nu.array() <= 0).any())
    throw Error(ErrorKind::DegenerateDensity, "densities must be strictly positive");
  if (std::abs(trapezoid_integral(mu, hx, hy) - 1.0) > 1e-6 ||
      std::abs(trapezoid_integral(nu, hx, hy) - 1.0) > 1e-6)
    throw Error(ErrorKind::MassMismatch, "densities must integrate to 1 (trapezoid)");
  if (f.size() != g.size())
    throw Error(ErrorKind::ChannelMismatch, "channel counts differ between f and g");
  for (const auto& ch : f)
    if (ch.rows() != nx || ch.cols() != ny)
      throw Error(ErrorKind::ShapeMismatch, "channel grid shape mismatch");
  for (const auto& ch : g)
    if (ch.rows() != nx || ch.cols() != ny)
      throw Error(ErrorKind::ShapeMismatch, "channel grid shape mismatch");
  if (hasMap()) {
    if (tx.rows() != nx || tx.cols() != ny || ty.rows() != nx || ty.cols() != ny)
      throw Error(ErrorKind::ShapeMismatch, "map shape mismatch");
    if (tx.minCoeff() < -1e-9 || tx.maxCoeff() > domainX() + 1e-9 ||
        ty.minCoeff() < -1e-9 || ty.maxCoeff() > domainY() + 1e-9)
      throw Error(ErrorKind::OutOfRange, "map images leave the closed domain");
  }
}

Matrix normalize_density(const Matrix& density, double hx, double hy) {
  double total = trapezoid_integral(density, hx, hy);
  if (!(total > 0)) throw Error(ErrorKind::DegenerateDensity, "nonpositive total mass");
  return density / total;
}

std::pair<Matrix, Matrix> knothe_initial_map(const GridField& grid) {
  const int nx = grid.nx, ny = grid.ny;
  const double hx = grid.hx, hy = grid.hy;

  // x marginals
  Vector muX(nx), nuX(nx);
  for (int i = 0; i < nx; ++i) {
    double mi = 0.0, vi = 0.0;
    for (int j = 0; j < ny; ++j) {
      mi += trap_w(j, ny) * grid.mu(i, j);
      vi += trap_w(j, ny) * grid.nu(i, j);
    }
    muX[i] = mi * hy;
    nuX[i] = vi * hy;
  }
  Vector Fmu, Fnu;
  cdf_1d(muX, hx, Fmu);
  cdf_1d(nuX, hx, Fnu);

  Matrix tx(nx, ny), ty(nx, ny);
  Vector rowDensity(ny), targetDensity(ny), Frow, Ftarget;
  for (int i = 0; i < nx; ++i) {
    const double t1 = inv_cdf(Fnu, hx, Fmu[i]);
    for (int j = 0; j < ny; ++j) rowDensity[j] = grid.mu(i, j);
    cdf_1d(rowDensity, hy, Frow);
    for (int j = 0; j < ny; ++j)
      targetDensity[j] = std::max(bilinear(grid.nu, t1, j * hy, hx, hy), 1e-300);
    cdf_1d(targetDensity, hy, Ftarget);
    for (int j = 0; j < ny; ++j) {
      tx(i, j) = t1;
      ty(i, j) = inv_cdf(Ftarget, hy, Frow[j]);
    }
  }
  return {tx, ty};
}

std::pair<Matrix, Matrix> compute_Q(const GridField& grid) {
  if (!grid.hasMap()) throw Error(ErrorKind::InvalidParams, "grid carries no map");
  const int nx = grid.nx, ny = grid.ny;
  Matrix Qx = 2.0 * grid.tx;
  Matrix Qy = 2.0 * grid.ty;
  Matrix gx, gy;
  for (std::size_t c = 0; c < grid.f.size(); ++c) {
    gradient(grid.f[c], grid.hx, grid.hy, gx, gy);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const double gT = bilinear(grid.g[c], grid.tx(i, j), grid.ty(i, j), grid.hx, grid.hy);
        Qx(i, j) += 2.0 * gT * gx(i, j);
        Qy(i, j) += 2.0 * gT * gy(i, j);
      }
  }
  return {Qx, Qy};
}

Matrix poisson_dirichlet(const Matrix& rhs, double hx, double hy) {
  PoissonSolver solver(static_cast<int>(rhs.rows()), static_cast<int>(rhs.cols()), hx, hy);
  return solver.solve(rhs);
}

double flow_energy(const GridField& grid) {
  if (!grid.hasMap()) throw Error(ErrorKind::InvalidParams, "grid carries no map");
  const int nx = grid.nx, ny = grid.ny;
  double e = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double x = i * grid.hx, y = j * grid.hy;
      double cell = (grid.tx(i, j) - x) * (grid.tx(i, j) - x) +
                    (grid.ty(i, j) - y) * (grid.ty(i, j) - y);
      for (std::size_t c = 0; c < grid.f.size(); ++c) {
        const double gT =
            bilinear(grid.g[c], grid.tx(i, j), grid.ty(i, j), grid.hx, grid.hy);
        const double diff = gT - grid.f[c](i, j);
        cell += diff * diff;
      }
      e += trap_w(i, nx) * trap_w(j, ny) * grid.mu(i, j) * cell;
    }
  return e * grid.hx * grid.hy;
}

double pushforward_l1_error(const GridField& grid) {
  if (!grid.hasMap()) throw Error(ErrorKind::InvalidParams, "grid carries no map");
  const int nx = grid.nx, ny = grid.ny;
  // supersample each cell so the histogram resolves the deformed grid
  const int sub = 4;
  Matrix splat = Matrix::Zero(nx, ny);
  const double subMass = grid.hx * grid.hy / (sub * sub);
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j)
      for (int si = 0; si < sub; ++si)
        for (int sj = 0; sj < sub; ++sj) {
          const double x = (i + (si + 0.5) / sub) * grid.hx;
          const double y = (j + (sj + 0.5) / sub) * grid.hy;
          const double mass = subMass * bilinear(grid.mu, x, y, grid.hx, grid.hy);
          const double txv = bilinear(grid.tx, x, y, grid.hx, grid.hy);
          const double tyv = bilinear(grid.ty, x, y, grid.hx, grid.hy);
          double u = std::clamp(txv / grid.hx, 0.0, nx - 1.0);
          double v = std::clamp(tyv / grid.hy, 0.0, ny - 1.0);
          int i0 = std::min(static_cast<int>(u), nx - 2);
          int j0 = std::min(static_cast<int>(v), ny - 2);
          double fu = u - i0, fv = v - j0;
          splat(i0, j0) += mass * (1 - fu) * (1 - fv);
          splat(i0 + 1, j0) += mass * fu * (1 - fv);
          splat(i0, j0 + 1) += mass * (1 - fu) * fv;
          splat(i0 + 1, j0 + 1) += mass * fu * fv;
        }
  // compare against the cell-averaged target mass on the same footing
  Matrix target = Matrix::Zero(nx, ny);
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j)
      for (int si = 0; si < sub; ++si)
        for (int sj = 0; sj < sub; ++sj) {
          const double x = (i + (si + 0.5) / sub) * grid.hx;
          const double y = (j + (sj + 0.5) / sub) * grid.hy;
          const double mass = subMass * bilinear(grid.nu, x, y, grid.hx, grid.hy);
          double u = x / grid.hx, v = y / grid.hy;
          int i0 = i, j0 = j;
          double fu = u - i0, fv = v - j0;
          target(i0, j0) += mass * (1 - fu) * (1 - fv);
          target(i0 + 1, j0) += mass * fu * (1 - fv);
          target(i0, j0 + 1) += mass * (1 - fu) * fv;
          target(i0 + 1, j0 + 1) += mass * fu * fv;
        }
  return (splat - target).cwiseAbs().sum();
}

FlowResult flow_minimize(GridField grid, double tau, int maxSteps, double energyTol) {
  if (!(tau > 0)) throw Error(ErrorKind::InvalidParams, "tau must be positive");
  grid.validate();
  if (!grid.hasMap()) {
    auto [tx, ty] = knothe_initial_map(grid);
    grid.tx = tx;
    grid.ty = ty;
  }
  const int nx = grid.nx, ny = grid.ny;
  const double muFloor = 1e-8 * grid.mu.maxCoeff();
  Matrix muSafe = grid.mu.cwiseMax(muFloor);
  PoissonSolver poisson(nx, ny, grid.hx, grid.hy);

  FlowResult result;
  double energy = flow_energy(grid);
  result.energies.push_back(energy);

  for (int step = 0; step < maxSteps; ++step) {
    if (energy <= energyTol) break;
    auto [Qx, Qy] = compute_Q(grid);
    // rhs = -div(Q_perp), Q_perp = (-Qy, Qx)
    Matrix px = -Qy, py = Qx;
    Matrix dpx_dx, dpx_dy, dpy_dx, dpy_dy;
    gradient(px, grid.hx, grid.hy, dpx_dx, dpx_dy);
    gradient(py, grid.hx, grid.hy, dpy_dx, dpy_dy);
    Matrix rhs = -(dpx_dx + dpy_dy);
    Matrix alpha = poisson.solve(rhs);

    Matrix ax, ay;
    gradient(alpha, grid.hx, grid.hy, ax, ay);
    Matrix vx = -ay, vy = ax;  // perp(grad alpha)

    Matrix txx, txy, tyx, tyy;
    gradient(grid.tx, grid.hx, grid.hy, txx, txy);
    gradient(grid.ty, grid.hx, grid.hy, tyx, tyy);

    bool accepted = false;
    int failures = 0;
    while (!accepted) {
      GridField trial = grid;
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          const double scale = tau / muSafe(i, j);
          trial.tx(i, j) = std::clamp(
              grid.tx(i, j) - scale * (txx(i, j) * vx(i, j) + txy(i, j) * vy(i, j)), 0.0,
              grid.domainX());
          trial.ty(i, j) = std::clamp(
              grid.ty(i, j) - scale * (tyx(i, j) * vx(i, j) + tyy(i, j) * vy(i, j)), 0.0,
              grid.domainY());
        }
      const double trialEnergy = flow_energy(trial);
      if (trialEnergy <= energy + 1e-10) {
        const double decrease = energy - trialEnergy;
        grid.tx.swap(trial.tx);
        grid.ty.swap(trial.ty);
        energy = trialEnergy;
        result.energies.push_back(energy);
        result.steps++;
        accepted = true;
        if (decrease < energyTol) {
          result.finalTau = tau;
          maxSteps = 0;  // converged
        }
      } else {
        if (++failures > 10)
          throw Error(ErrorKind::StepTooLarge,
                      "energy increased for 10 consecutive halvings; reduce tau");
        tau *= 0.5;
      }
    }
    if (maxSteps == 0) break;
  }

  result.finalTau = tau;
  result.tx = grid.tx;
  result.ty = grid.ty;

  // Jacobian proxy: cells where det(grad T) <= 0 flag a fold in the map
  Matrix txx, txy, tyx, tyy;
  gradient(grid.tx, grid.hx, grid.hy, txx, txy);
  gradient(grid.ty, grid.hx, grid.hy, tyx, tyy);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      if (txx(i, j) * tyy(i, j) - txy(i, j) * tyx(i, j) <= 0.0)
        result.nonposJacobianCells++;
  return result;
}

}  // namespace tlp
