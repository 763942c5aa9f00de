#pragma once

// Observational monitors over a solution state. None of them alters or aborts a solve.

#include <iosfwd>
#include <string>
#include <vector>

#include "pricefront/model.hpp"
#include "pricefront/picard.hpp"

namespace pricefront::diagnostics {

struct MassReport {
  double t = 0.0;
  double M_b = 0.0;
  double M_p = 0.0;
  double dev_b = 0.0;  // M_b(t) - M_b(0)
  double dev_p = 0.0;
};

MassReport mass_report(const SolutionState& state, double t);

/// Trapezoid integral of the flux history over [0, t].
double flux_integral(const SolutionState& state, double t);

struct StayawayReport {
  double min_distance = 0.0;  // min over history of min(1 - p, 1 + p)
  double t_at_min = 0.0;
  std::size_t rescue_activations = 0;  // nodes where a clamped offset is below a
  /// Activations happened exactly when min distance * factor < a.
  bool consistent = true;
};

StayawayReport stayaway_report(const SolutionState& state);

struct BlowupPanel {
  double t = 0.0;
  double norm_inf = 0.0;
  double lambda = 0.0;
  double fxx_at_p = 0.0;  // absolute value
  bool norm_flag = false;
  bool flux_flag = false;
  bool curvature_flag = false;
};

BlowupPanel blowup_panel(const SolutionState& state, double t, const picard::BlowupThresholds& thresholds = {});

struct LedgerEntry {
  std::string monitor;
  double t = 0.0;
  double window_start = 0.0;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
  bool report_only = false;
};

/// Checks the window's derivative ceilings, Hölder track, slope floor of the propagated part
/// and (report only) the L1-based ceilings at `samples` equally spaced times in the window.
std::vector<LedgerEntry> bound_suite(const SolutionState& state, std::size_t window_index, int samples = 5,
                                     int x_points = 9);

/// Hölder track and flux floor at every stored node of every window (cheap; no evaluations).
struct TrackReport {
  std::size_t windows = 0;
  std::size_t holder_violations = 0;
  double worst_holder_ratio = 0.0;  // max |p - p_start| / bound
  std::size_t flux_floor_violations = 0;  // lambda_end < 0.95 lambda_start / 4
  double min_flux_ratio = 0.0;            // min lambda / lambda_start inside windows
};

/// Windows first_window .. last_window - 1 of the log.
TrackReport track_report(const SolutionState& state, std::size_t first_window = 0,
                         std::size_t last_window = static_cast<std::size_t>(-1));

void write_jsonl(std::ostream& out, const LedgerEntry& e);
void write_jsonl(std::ostream& out, const MassReport& m);
void write_jsonl(std::ostream& out, const BlowupPanel& b);

}  // namespace pricefront::diagnostics
