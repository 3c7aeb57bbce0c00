#pragma once

#include <optional>
#include <string>
#include <vector>

namespace optokick::params {

// All angular rates in rad/ns, times in ns. q = b + b^dagger is dimensionless,
// so the thermal position variance is 1 + 2*n_bar.
struct ProtocolParams {
  double kappa1 = 1.0;   // pump cavity half bandwidth
  double kappa2 = 1.0;   // probe cavity half bandwidth
  double Delta1 = 0.0;   // pump detuning (cavity minus laser)
  double Delta2 = 0.0;   // probe detuning
  double G1 = 0.0;       // single-photon coupling, pump pulse
  double G2 = 0.0;       // single-photon coupling, probe pulse
  double E1 = 0.0;       // pump drive strength
  double E2 = 0.0;       // probe drive strength
  double t1 = 5.0;       // pump pulse duration
  double t2 = 5.0;       // probe pulse duration
  double omega_m = 0.0;  // mechanical angular frequency
  double gamma_m = 0.0;  // mechanical damping (validity checks only)
  double n_bar = 0.0;    // mean thermal phonon occupation
  double tau = 0.0;      // inter-pulse delay (sweeps derive their own)

  double thermal_width() const { return 1.0 + 2.0 * n_bar; }
  // throws std::invalid_argument when an invariant is violated
  void check() const;
};

// Lab-frame inputs from which protocol rates are derived.
struct MaterialParams {
  std::optional<double> mass_kg;
  std::optional<double> force_per_photon_N;
  std::optional<double> input_power_W;
  std::optional<double> laser_omega_rad_s;
  std::optional<double> temperature_K;
  std::optional<double> g_om_rad_per_s_m;   // cavity frequency pull per displacement
  std::optional<double> n_eff;
  std::optional<double> dn_eff_dz_per_m;
};

enum class CheckStatus { pass, marginal, fail };

struct RegimeCheck {
  std::string name;
  double value = 0.0;          // the dimensionless ratio
  double pass_threshold = 0.0;
  double fail_threshold = 0.0;
  bool larger_is_better = true;
  CheckStatus status = CheckStatus::pass;
};

struct RegimeReport {
  std::vector<RegimeCheck> checks;   // exactly the six protocol assumptions
  double g1_over_kappa1 = 0.0;
  bool approx_first_order_valid = false;  // G1/kappa1 below approx_valid threshold
  bool any_fail = false;
  bool any_marginal = false;
};

// Thresholds are deliberate choices, overridable per call.
struct RegimeThresholds {
  double steady_state_pass = 10.0;  // kappa*t above this: cavity reaches steady state
  double steady_state_fail = 2.0;
  double frozen_pass = 0.1;         // omega_m*t below this: resonator frozen during pulse
  double frozen_fail = 0.5;
  double damping_pass = 0.1;        // gamma_m*tau below this: free evolution between pulses
  double damping_fail = 0.5;
  double quality_pass = 100.0;      // omega_m/gamma_m
  double quality_fail = 20.0;
  double approx_valid = 0.1;        // G1/kappa1 below this: second-order expansion trustworthy
};

const char* to_string(CheckStatus s);

// G = F / sqrt(2 hbar m omega_m); SI in, SI out (rad/s).
double coupling_from_force(double force_N, double mass_kg, double omega_m_rad_s);

// E = sqrt(2 P_in kappa / (hbar omega_L)); SI in, SI out (rad/s).
double drive_from_power(double power_W, double kappa_rad_s, double omega_L_rad_s);

// Bose-Einstein occupation; T = 0 gives 0.
double thermal_occupation(double temperature_K, double omega_m_rad_s);
// Inverse of the above; n_bar = 0 gives 0.
double temperature_from_occupation(double n_bar, double omega_m_rad_s);

// Mean momentum transferred by the pump pulse: p0 = 2 E1^2 G1 / kappa1^3.
double kick_momentum(const ProtocolParams& p);

struct MomentumVariance {
  double a1 = 0.0;                   // 2(1+2 n_bar) + 8 E1^2 G1^2 / kappa1^4
  double correction = 0.0;           // the kick-induced part
  double relative_correction = 0.0;  // correction / thermal part
};
MomentumVariance momentum_variance_coeff(const ProtocolParams& p);

// Photons in a rectangular pulse: N = E^2 t / (2 kappa).
double pulse_photon_count(double E, double kappa, double t);

// F = hbar * g_om for a photon trapped in a cavity.
double force_per_photon_cavity(double g_om_rad_per_s_m);
// F = (hbar omega0 / n_eff) * dn_eff/dz for a guided photon.
double force_per_photon_waveguide(double omega0_rad_s, double n_eff, double dn_eff_dz_per_m);

RegimeReport validate_regime(const ProtocolParams& p, const RegimeThresholds& th = {});

}  // namespace optokick::params
