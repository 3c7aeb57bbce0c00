#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optokick/signal.hpp"

namespace optokick::counting {

struct DetectorModel {
  double efficiency = 1.0;    // quantum efficiency in [0, 1]
  double dark_rate_hz = 0.0;  // dark counts per second
  double window_s = 0.0;      // counting window per shot
  void check() const;
  double dark_per_shot() const { return dark_rate_hz * window_s; }
};

struct CountingCampaign {
  std::uint64_t seed = 0;
  std::uint64_t shots_per_bin = 0;
  std::uint64_t total_shots = 0;
  double repetition_rate_hz = 0.0;
  double schedule_s = 0.0;  // total_shots / repetition rate
  std::vector<double> thetas;
  std::vector<std::uint64_t> counts;  // summed detected counts per theta bin
  double amplitude = 0.0;             // first-harmonic sine projection of counts
  double amplitude_stderr = 0.0;      // plug-in Poisson standard error
  double z_score = 0.0;               // amplitude / stderr, fringe-detection significance
  double mean_counts_per_shot = 0.0;
  double expected_dark_total = 0.0;
};

// Per shot the detected counts are Poisson with mean
// efficiency * n2(theta) + dark_rate * window; a bin sums its shots, which is
// again Poisson. Bin b draws from a substream derived from (seed, b), so the
// campaign is reproducible and independent of evaluation order.
CountingCampaign simulate_campaign(const signal::FringeCurve& curve, const DetectorModel& det,
                                   std::uint64_t shots_per_bin, std::uint64_t seed,
                                   double repetition_rate_hz);

struct ShotsEstimate {
  std::uint64_t shots = 0;
  bool infinite = false;  // no visibility: no shot count can resolve a fringe
  std::string model;      // formula this estimate inverts
};

// Inverts the analytic significance of the sine projection,
// z = V * eta*N * sqrt(M / (2 (eta*N + d))), for the total shot count M.
// mean_counts_per_shot is the raw per-shot photon number N before efficiency.
ShotsEstimate required_shots(double visibility, double mean_counts_per_shot,
                             const DetectorModel& det, double target_z);

// wall-clock seconds for M shots at the given repetition rate
double campaign_schedule(std::uint64_t shots, double repetition_rate_hz);

// significance the model predicts for a finished campaign;
// signal_counts_per_shot is eta*N, dark_counts_per_shot is dark*window
double analytic_z(double visibility, double signal_counts_per_shot, double dark_counts_per_shot,
                  std::uint64_t total_shots);

// exposed for the statistical test suite
std::uint64_t poisson_sample(std::uint64_t& state, double mean);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace optokick::counting
