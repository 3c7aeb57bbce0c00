#include "optokick/counting.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace optokick::counting {

namespace {

constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

std::uint64_t next_u64(std::uint64_t& state) {
  state += golden;
  return splitmix64(state);
}

// uniform in [0, 1) with 53 random bits
double uniform(std::uint64_t& state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

std::uint64_t poisson_small(std::uint64_t& state, double mean) {
  // Knuth inversion; fine below mean ~30 where exp(-mean) stays normal
  const double target = uniform(state);
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (target > cdf && k < 2000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Hormann's transformed rejection (PTRS), valid for mean >= 10
std::uint64_t poisson_large(std::uint64_t& state, double mean) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform(state) - 0.5;
    const double v = uniform(state);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us) || v <= 0.0) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t poisson_sample(std::uint64_t& state, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("Poisson mean must be finite and nonnegative");
  if (mean == 0.0) return 0;
  return mean < 30.0 ? poisson_small(state, mean) : poisson_large(state, mean);
}

void DetectorModel::check() const {
  if (!(efficiency >= 0.0) || !(efficiency <= 1.0))
    throw std::invalid_argument("detector efficiency must lie in [0, 1]");
  if (!(dark_rate_hz >= 0.0)) throw std::invalid_argument("dark-count rate must be nonnegative");
  if (!(window_s >= 0.0)) throw std::invalid_argument("counting window must be nonnegative");
}

CountingCampaign simulate_campaign(const signal::FringeCurve& curve, const DetectorModel& det,
                                   std::uint64_t shots_per_bin, std::uint64_t seed,
                                   double repetition_rate_hz) {
  det.check();
  if (curve.points.empty()) throw std::invalid_argument("counting campaign needs a fringe curve");
  if (shots_per_bin < 1) throw std::invalid_argument("counting campaign needs at least one shot");

  CountingCampaign c;
  c.seed = seed;
  c.shots_per_bin = shots_per_bin;
  c.repetition_rate_hz = repetition_rate_hz;
  const size_t nb = curve.points.size();
  c.thetas.resize(nb);
  c.counts.resize(nb);
  c.total_shots = shots_per_bin * nb;

  const double dark = det.dark_per_shot();
  const double shots = static_cast<double>(shots_per_bin);
  for (size_t b = 0; b < nb; ++b) {
    c.thetas[b] = curve.points[b].theta;
    const double per_shot = det.efficiency * curve.points[b].n2 + dark;
    // substream per bin: scheduling-independent and reproducible
    std::uint64_t state = splitmix64(seed ^ splitmix64(golden * (b + 1)));
    c.counts[b] = poisson_sample(state, per_shot * shots);
  }

  // matched filter for a first-harmonic fringe: sine projection over the bins
  const double m_total = static_cast<double>(c.total_shots);
  double proj = 0.0, var = 0.0, total = 0.0;
  for (size_t b = 0; b < nb; ++b) {
    const double s = std::sin(c.thetas[b]);
    const double cb = static_cast<double>(c.counts[b]);
    proj += cb * s;
    var += cb * s * s;  // plug-in Poisson variance per bin
    total += cb;
  }
  c.amplitude = 2.0 * proj / m_total;
  c.amplitude_stderr = 2.0 * std::sqrt(var) / m_total;
  c.z_score = c.amplitude_stderr > 0.0 ? c.amplitude / c.amplitude_stderr : 0.0;
  c.mean_counts_per_shot = total / m_total;
  c.expected_dark_total = dark * m_total;
  c.schedule_s = repetition_rate_hz > 0.0 ? m_total / repetition_rate_hz
                                          : std::numeric_limits<double>::quiet_NaN();
  return c;
}

ShotsEstimate required_shots(double visibility, double mean_counts_per_shot,
                             const DetectorModel& det, double target_z) {
  det.check();
  if (!(target_z > 0.0)) throw std::invalid_argument("target significance must be positive");
  ShotsEstimate e;
  e.model =
      "M = 2 z^2 (eta N + d) / (V eta N)^2 with d = dark rate * window per shot; "
      "inverts z = V eta N sqrt(M / (2 (eta N + d)))";
  const double signal = det.efficiency * mean_counts_per_shot;
  if (!(visibility > 0.0) || !(signal > 0.0)) {
    e.infinite = true;
    e.shots = std::numeric_limits<std::uint64_t>::max();
    return e;
  }
  const double m = 2.0 * target_z * target_z * (signal + det.dark_per_shot()) /
                   (visibility * visibility * signal * signal);
  if (!(m < 1.8e19)) {
    e.infinite = true;
    e.shots = std::numeric_limits<std::uint64_t>::max();
    return e;
  }
  e.shots = static_cast<std::uint64_t>(std::ceil(m));
  return e;
}

double campaign_schedule(std::uint64_t shots, double repetition_rate_hz) {
  if (!(repetition_rate_hz > 0.0))
    throw std::invalid_argument("repetition rate must be positive");
  return static_cast<double>(shots) / repetition_rate_hz;
}

double analytic_z(double visibility, double signal_counts_per_shot, double dark_counts_per_shot,
                  std::uint64_t total_shots) {
  if (!(signal_counts_per_shot > 0.0)) return 0.0;
  const double m = static_cast<double>(total_shots);
  return visibility * signal_counts_per_shot *
         std::sqrt(m / (2.0 * (signal_counts_per_shot + dark_counts_per_shot)));
}

}  // namespace optokick::counting
