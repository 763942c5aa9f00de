#include "pricefront/particle_foliation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pricefront/duhamel.hpp"
#include "pricefront/errors.hpp"

namespace pricefront::particles {

ParticleEnsemble init_ensemble(std::span<const double> x, std::span<const double> rho, std::size_t n,
                               std::uint64_t seed) {
  if (x.size() != rho.size() || x.size() < 2) throw DomainError("density needs matching x and rho of length >= 2");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < 0.0) throw DomainError("density must be non-negative");
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("density grid must increase strictly");
  }
  std::vector<double> cdf(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * (x[i] - x[i - 1]) * (rho[i] + rho[i - 1]);
  const double mass = cdf.back();
  ParticleEnsemble e;
  e.rng_seed = seed;
  e.rng.seed(seed);
  e.p = x.front();
  e.particle_mass = n == 0 ? 0.0 : mass / static_cast<double>(n);
  e.positions.reserve(n);
  e.levels.assign(n, 0);
  if (n > 0 && !(mass > 0.0)) throw DomainError("density has zero mass");
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = uni(e.rng) * mass;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    i = std::clamp<std::size_t>(i, 1, cdf.size() - 1);
    // Invert the quadratic cumulative mass of the linear density on cell [i-1, i].
    const double h = x[i] - x[i - 1];
    const double r0 = rho[i - 1];
    const double slope = (rho[i] - r0) / h;
    const double m = target - cdf[i - 1];
    double u;
    if (std::abs(slope) * h < 1e-12 * std::max(r0, 1e-300)) {
      u = r0 > 0.0 ? m / r0 : 0.5 * h;
    } else {
      const double disc = std::max(0.0, r0 * r0 + 2.0 * slope * m);
      u = 2.0 * m / (r0 + std::sqrt(disc));
    }
    e.positions.push_back(x[i - 1] + std::clamp(u, 0.0, h));
  }
  return e;
}

ParticleEnsemble init_from_initial(const InitialData& initial, std::size_t n, std::uint64_t seed) {
  const int m = 2001;
  std::vector<double> x(m), rho(m);
  for (int i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    x[u] = initial.p_I + (1.0 - initial.p_I) * i / (m - 1);
    rho[u] = std::max(0.0, -initial.spline(x[u], 0));
  }
  ParticleEnsemble e = init_ensemble(x, rho, n, seed);
  // Positions follow the sampled density; the total mass is M_p itself.
  if (n > 0) e.particle_mass = initial.M_p / static_cast<double>(n);
  e.p = initial.p_I;
  return e;
}

void step_ensemble(ParticleEnsemble& e, double p_start, double p_end, double dt, const ModelParams& params) {
  if (!(dt > 0.0)) throw DomainError("particle step must be positive");
  if (!(p_end >= -1.0 && p_end < 1.0)) throw DomainError("front outside [-1, 1)");
  const double sigma = std::sqrt(2.0 * dt);
  const double reinject = p_end + rescue_offsets(p_end, params.a, params.rescue_half_factor).right;
  const double t_end = e.t + dt;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < e.positions.size(); ++i) {
    const double x0 = e.positions[i];
    double x1 = x0 + sigma * normal(e.rng);
    while (x1 > 1.0 || x1 < -1.0) x1 = x1 > 1.0 ? 2.0 - x1 : -2.0 - x1;
    bool absorbed = x1 <= p_end;
    if (!absorbed) {
      // Crossing of the linearly moving barrier by the Brownian bridge between the endpoints.
      const double d0 = x0 - p_start, d1 = x1 - p_end;
      absorbed = d0 <= 0.0 || uni(e.rng) < std::exp(-d0 * d1 / dt);
    }
    if (absorbed) {
      const std::uint32_t from = e.levels[i];
      e.levels[i] = from + 1;
      e.positions[i] = reinject;
      e.log.push_back({t_end, i, from, from + 1, reinject});
    } else {
      e.positions[i] = x1;
    }
  }
  e.t = t_end;
  e.p = p_end;
}

void run_along(ParticleEnsemble& e, const SolutionState& state, double t_end, double dt) {
  if (t_end > state.t_current()) throw OutOfRange("particle run beyond the solved history");
  if (!(dt > 0.0)) throw DomainError("particle step must be positive");
  const long steps = static_cast<long>(std::ceil((t_end - e.t) / dt - 1e-9));
  const double t0 = e.t;
  for (long s = 0; s < steps; ++s) {
    const double ta = e.t;
    const double tb = s + 1 == steps ? t_end : t0 + (t_end - t0) * static_cast<double>(s + 1) / steps;
    step_ensemble(e, state.p_at(ta), state.p_at(tb), tb - ta, state.params());
    e.t = tb;
  }
}

FoliationReport foliation_report(const ParticleEnsemble& e, const SolutionState& state, int bins) {
  if (e.t > state.t_current()) throw DomainError("ensemble time lies beyond the state's history");
  const double p = state.p_at(e.t);
  if (std::abs(p - e.p) > 1e-9) throw DomainError("ensemble was driven by a different front trajectory");
  if (bins < 1) throw DomainError("need at least one bin");
  FoliationReport r;
  r.t = e.t;
  r.bins = bins;
  r.M_p = state.initial().M_p;
  std::uint32_t top = 0;
  for (auto l : e.levels) top = std::max(top, l);
  r.level_mass.assign(e.size() == 0 ? 1 : top + 1, 0.0);
  double s1 = 0.0, s2 = 0.0;
  for (auto l : e.levels) {
    r.level_mass[l] += e.particle_mass;
    s1 += l;
    s2 += static_cast<double>(l) * l;
  }
  const double n = static_cast<double>(e.size());
  for (std::size_t k = 0; k < r.level_mass.size(); ++k) {
    r.total_mass += r.level_mass[k];
    r.weighted_level_mass += static_cast<double>(k) * r.level_mass[k];
  }
  if (n > 1) {
    const double var = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1));
    r.weighted_std_error = e.particle_mass * std::sqrt(n * var);
  }
  r.cumulative_flux = state.cumulative_flux_at(e.t);
  r.ase_gap = std::abs(r.weighted_level_mass - r.cumulative_flux);

  // Binned densities on [p, 1].
  if (e.t > 0.0 || e.size() > 0) {
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    const double w = (1.0 - p) / bins;
    for (double x : e.positions) {
      auto b = static_cast<long>((x - p) / w);
      b = std::clamp<long>(b, 0, bins - 1);
      counts[static_cast<std::size_t>(b)] += e.particle_mass;
    }
    const duhamel::Slice slice = duhamel::make_slice(state, e.t);
    const int sub = 8;  // Simpson panels per bin
    for (int b = 0; b < bins; ++b) {
      const double a = p + b * w;
      double acc = 0.0;
      const double hh = w / (2 * sub);
      for (int j = 0; j <= 2 * sub; ++j) {
        const double x = std::min(1.0, a + j * hh);
        const double rho = std::max(0.0, -slice.eval(x, 0).f);
        const double c = (j == 0 || j == 2 * sub) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        acc += c * rho;
      }
      r.bse_l1 += std::abs(counts[static_cast<std::size_t>(b)] - acc * hh / 3.0);
    }
  }

  // Geometric tail fit over occupied levels >= 1.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = 1; k < r.level_mass.size(); ++k) {
    if (r.level_mass[k] <= 0.0) continue;
    const double xk = static_cast<double>(k), yk = std::log(r.level_mass[k]);
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
    ++m;
  }
  if (m >= 2) r.tail_log_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return r;
}

void write_transactions_csv(std::ostream& out, const ParticleEnsemble& e) {
  out << "t,particle_id,level_from,level_to,reinjection_x\n";
  out.precision(17);
  for (const Transaction& tr : e.log) {
    out << tr.t << ',' << tr.particle_id << ',' << tr.level_from << ',' << tr.level_to << ',' << tr.reinjection_x
        << '\n';
  }
}

}  // namespace pricefront::particles
