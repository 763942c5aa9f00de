#pragma once

// Vendors as Brownian particles right of a prescribed front: absorbed at p(t), reinjected at
// p + aR one level up. Level bookkeeping recovers the cumulative flux.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "pricefront/model.hpp"

namespace pricefront::particles {

struct Transaction {
  double t = 0.0;
  std::uint64_t particle_id = 0;
  std::uint32_t level_from = 0;
  std::uint32_t level_to = 0;
  double reinjection_x = 0.0;
};

struct ParticleEnsemble {
  std::vector<double> positions;
  std::vector<std::uint32_t> levels;
  double particle_mass = 0.0;
  std::uint64_t rng_seed = 0;
  double t = 0.0;
  /// Front position at time t (the last one used).
  double p = -1.0;
  std::mt19937_64 rng;
  std::vector<Transaction> log;

  std::size_t size() const noexcept { return positions.size(); }
};

/// N level-0 particles drawn by inverse CDF from the piecewise-linear density (x, rho).
/// Total mass is the integral of rho.
ParticleEnsemble init_ensemble(std::span<const double> x, std::span<const double> rho, std::size_t n,
                               std::uint64_t seed);

/// Vendor density -f_I on [p_I, 1].
ParticleEnsemble init_from_initial(const InitialData& initial, std::size_t n, std::uint64_t seed);

/// Advance by dt with the front moving linearly from p_start to p_end.
void step_ensemble(ParticleEnsemble& ensemble, double p_start, double p_end, double dt, const ModelParams& params);

/// Step along the state's front trajectory until t_end with steps of at most dt.
void run_along(ParticleEnsemble& ensemble, const SolutionState& state, double t_end, double dt);

struct FoliationReport {
  double t = 0.0;
  std::vector<double> level_mass;  // M^(n)
  double total_mass = 0.0;
  double weighted_level_mass = 0.0;  // sum n M^(n)
  double cumulative_flux = 0.0;      // integral of lambda from the state
  double weighted_std_error = 0.0;
  double ase_gap = 0.0;              // |weighted_level_mass - cumulative_flux|
  double bse_l1 = 0.0;               // binned L1 distance between particle and PDE densities
  double M_p = 0.0;
  int bins = 0;
  /// Least-squares slope of log(level occupancy) against level; negative means decaying tail.
  double tail_log_slope = 0.0;
};

FoliationReport foliation_report(const ParticleEnsemble& ensemble, const SolutionState& state, int bins = 50);

void write_transactions_csv(std::ostream& out, const ParticleEnsemble& ensemble);

}  // namespace pricefront::particles
