#include "pricefront/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "pricefront/duhamel.hpp"
#include "pricefront/errors.hpp"

namespace pricefront::diagnostics {

MassReport mass_report(const SolutionState& state, double t) {
  const InitialData& init = state.initial();
  MassReport m;
  m.t = t;
  if (t == 0.0) {
    m.M_b = init.M_b;
    m.M_p = init.M_p;
    return m;
  }
  const duhamel::Slice slice = duhamel::make_slice(state, t);
  const double p = state.p_at(t);
  m.M_b = slice.left_mass(p);
  m.M_p = m.M_b - slice.left_mass(1.0);
  m.dev_b = m.M_b - init.M_b;
  m.dev_p = m.M_p - init.M_p;
  return m;
}

double flux_integral(const SolutionState& state, double t) {
  if (t > state.t_current()) throw OutOfRange("flux integral beyond the solved history");
  return state.cumulative_flux_at(t);
}

StayawayReport stayaway_report(const SolutionState& state) {
  const ModelParams& prm = state.params();
  StayawayReport r;
  r.min_distance = 2.0;
  const auto ts = state.times();
  const auto ps = state.positions();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double d = std::min(1.0 - ps[i], 1.0 + ps[i]);
    if (d < r.min_distance) {
      r.min_distance = d;
      r.t_at_min = ts[i];
    }
    const RescueOffsets off = rescue_offsets(ps[i], prm.a, prm.rescue_half_factor);
    if (off.left < prm.a || off.right < prm.a) ++r.rescue_activations;
  }
  r.consistent = (r.rescue_activations > 0) == (r.min_distance * prm.rescue_half_factor < prm.a);
  return r;
}

BlowupPanel blowup_panel(const SolutionState& state, double t, const picard::BlowupThresholds& thr) {
  const InitialData& init = state.initial();
  BlowupPanel b;
  b.t = t;
  if (t == 0.0) {
    b.norm_inf = init.norm_inf;
    b.lambda = init.lambda_I;
    b.fxx_at_p = std::abs(init.spline(init.p_I, 2));
  } else {
    const duhamel::Slice slice = duhamel::make_slice(state, t);
    b.norm_inf = duhamel::sup_norm(slice).value;
    b.lambda = state.lambda_at(t);
    b.fxx_at_p = std::abs(slice.eval(state.p_at(t), 2).fxx);
  }
  b.norm_flag = b.norm_inf > thr.norm_factor * init.norm_inf;
  b.flux_flag = b.lambda < thr.flux_factor * init.lambda_I;
  b.curvature_flag = b.fxx_at_p > thr.curvature_max;
  return b;
}

std::vector<LedgerEntry> bound_suite(const SolutionState& state, std::size_t window_index, int samples,
                                     int x_points) {
  const auto& log = state.window_log();
  if (window_index >= log.size()) throw DomainError("window index beyond the solved windows");
  if (samples < 1 || x_points < 2) throw DomainError("bound suite needs samples >= 1 and x_points >= 2");
  const WindowRecord& w = log[window_index];
  const ModelParams& prm = state.params();
  const InitialData& init = state.initial();
  const double p0 = state.positions()[w.first_node];
  const double lam0 = state.fluxes()[w.first_node];
  const double norm0 = w.norm_start;
  const double l1 = init.norm_l1();
  const double xlo = std::max(-1.0, p0 - prm.a0), xhi = std::min(1.0, p0 + prm.a0);
  std::vector<LedgerEntry> out;
  for (int k = 1; k <= samples; ++k) {
    const double t = w.t_start + w.length * k / samples;
    const double tau = t - w.t_start;
    const duhamel::Slice slice = duhamel::make_slice(state, t);
    double fx_max = 0.0, ft_max = 0.0, slope_min = 1e300;
    for (int i = 0; i < x_points; ++i) {
      const double x = xlo + (xhi - xlo) * i / (x_points - 1);
      const duhamel::Values v = slice.eval(x, 2);
      const duhamel::Values d = slice.direct_since(x, w.t_start, 1);
      fx_max = std::max(fx_max, std::abs(v.fx));
      ft_max = std::max(ft_max, std::abs(v.fxx));
      slope_min = std::min(slope_min, -(v.fx - d.fx));
    }
    const double ceiling = 2.0 * norm0 / std::sqrt(tau);
    out.push_back({"fx_ceiling", t, w.t_start, fx_max, ceiling, fx_max <= ceiling, false});
    out.push_back({"ft_ceiling", t, w.t_start, ft_max, ceiling, ft_max <= ceiling, false});
    const double floor = 0.5 * lam0 * std::exp(-tau);
    out.push_back({"propagated_slope_floor", t, w.t_start, slope_min, floor, slope_min >= floor, false});
    const double drift = std::abs(state.p_at(t) - p0);
    const double track = 8.0 * norm0 / lam0 * std::sqrt(tau);
    out.push_back({"holder_track", t, w.t_start, drift, track, drift <= track, false});
    const duhamel::Values vp = slice.eval(state.p_at(t), 2);
    const double fx_l1 = 2.0 * l1 / (tau * tau);
    const double fxx_l1 = 2.0 * l1 / std::pow(tau, 2.5);
    out.push_back({"fx_l1_ceiling", t, w.t_start, std::abs(vp.fx), fx_l1, std::abs(vp.fx) <= fx_l1, true});
    out.push_back({"fxx_l1_ceiling", t, w.t_start, std::abs(vp.fxx), fxx_l1, std::abs(vp.fxx) <= fxx_l1, true});
  }
  return out;
}

TrackReport track_report(const SolutionState& state, std::size_t first_window, std::size_t last_window) {
  const auto& log = state.window_log();
  const auto ts = state.times();
  const auto ps = state.positions();
  const auto ls = state.fluxes();
  TrackReport r;
  r.min_flux_ratio = 1e300;
  last_window = std::min(last_window, log.size());
  for (std::size_t wi = first_window; wi < last_window; ++wi) {
    const WindowRecord& w = log[wi];
    const std::size_t i0 = w.first_node;
    const std::size_t i1 = wi + 1 < log.size() ? log[wi + 1].first_node : ts.size() - 1;
    const double p0 = ps[i0], l0 = ls[i0];
    for (std::size_t i = i0 + 1; i <= i1; ++i) {
      const double bound = 8.0 * w.norm_start / l0 * std::sqrt(ts[i] - w.t_start);
      const double drift = std::abs(ps[i] - p0);
      if (drift > bound) ++r.holder_violations;
      if (bound > 0.0) r.worst_holder_ratio = std::max(r.worst_holder_ratio, drift / bound);
      r.min_flux_ratio = std::min(r.min_flux_ratio, ls[i] / l0);
    }
    if (ls[i1] < 0.95 * 0.25 * l0) ++r.flux_floor_violations;
    ++r.windows;
  }
  if (r.windows == 0) r.min_flux_ratio = 1.0;
  return r;
}

void write_jsonl(std::ostream& out, const LedgerEntry& e) {
  nlohmann::json j = {{"monitor", e.monitor}, {"t", e.t},         {"window_start", e.window_start},
                      {"value", e.value},     {"bound", e.bound}, {"pass", e.pass},
                      {"report_only", e.report_only}};
  out << j.dump() << '\n';
}

void write_jsonl(std::ostream& out, const MassReport& m) {
  nlohmann::json j = {{"monitor", "mass"}, {"t", m.t},         {"M_b", m.M_b},
                      {"M_p", m.M_p},      {"dev_b", m.dev_b}, {"dev_p", m.dev_p}};
  out << j.dump() << '\n';
}

void write_jsonl(std::ostream& out, const BlowupPanel& b) {
  nlohmann::json j = {{"monitor", "blowup_panel"}, {"t", b.t},
                      {"norm_inf", b.norm_inf},    {"lambda", b.lambda},
                      {"fxx_at_p", b.fxx_at_p},    {"norm_flag", b.norm_flag},
                      {"flux_flag", b.flux_flag},  {"curvature_flag", b.curvature_flag}};
  out << j.dump() << '\n';
}

}  // namespace pricefront::diagnostics
