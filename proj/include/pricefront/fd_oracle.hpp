#pragma once

// Finite-difference front tracking for the full coupled problem: a theta scheme on a uniform
// vertex grid with Neumann ghost nodes, the front lagged by one step.

#include <vector>

#include "pricefront/model.hpp"

namespace pricefront::fd {

struct FdConfig {
  int nx = 2001;
  double dt = 1e-6;
  /// 0 explicit, 0.5 Crank-Nicolson, 1 backward Euler.
  double theta = 0.5;
  /// 1 deposits on the nearest node, 2 splits linearly between the two neighbours.
  int delta_width = 2;
  /// Leading theta-steps replaced by two backward-Euler half steps each.
  int rannacher_steps = 1;
  /// Store every k-th step in the trajectory.
  int record_every = 1;

  void validate() const;
  /// Grid and step refined `levels` times (spacing and step halved per level).
  FdConfig refined(int levels) const;
};

struct FdGrid {
  double h = 0.0;
  std::vector<double> x;
  std::vector<double> f;

  /// Trapezoid weight of node i (h inside, h/2 at the walls); sum w_i f_i is the discrete mass.
  double weight(std::size_t i) const noexcept;
  double signed_mass() const noexcept;
};

FdGrid make_grid(const InitialData& initial, int nx);

/// Hat (or nearest-node) weights depositing `amount` of mass at y; {node, value increment}.
std::vector<std::pair<std::size_t, double>> deposit_weights(const FdGrid& grid, double y, double amount,
                                                            int delta_width);

/// One theta step of f_t = f_xx with +lambda dt deposited at p - aL and -lambda dt at p + aR.
void fd_step(FdGrid& grid, double p, double lambda, double dt, double theta, const ModelParams& params,
             int delta_width = 2);

struct FrontEstimate {
  double p = 0.0;
  double lambda = 0.0;
  /// |buyer-side minus vendor-side slope|.
  double lambda_gap = 0.0;
};

/// Sign change near `guess` by linear interpolation, polished on the local cubic; flux from
/// four-node one-sided cubics on both sides, averaged.
FrontEstimate locate_front(const FdGrid& grid, double guess);

struct FdSnapshot {
  double t = 0.0;
  std::vector<double> f;
};

struct FdTrajectory {
  std::vector<double> x;  // grid
  std::vector<double> t, p, lambda, lambda_gap, M_b, M_p, cumulative_flux;
  std::vector<FdSnapshot> snapshots;
  double h = 0.0;
  double dt = 0.0;
};

/// Solve to t_end; snapshots are taken at the step nearest each requested time.
FdTrajectory fd_solve(const InitialData& initial, const ModelParams& params, const FdConfig& config,
                      double t_end, const std::vector<double>& snapshot_times = {});

/// Buyer and vendor masses of the piecewise-linear grid function split at p.
std::pair<double, double> one_sided_masses(const FdGrid& grid, double p);

}  // namespace pricefront::fd
