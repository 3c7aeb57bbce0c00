#include "optokick/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "optokick/constants.hpp"

namespace optokick::params {

void ProtocolParams::check() const {
  auto bad = [](const char* what) { throw std::invalid_argument(std::string("params: ") + what); };
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) bad("kappa1 and kappa2 must be positive");
  if (!(omega_m > 0.0)) bad("omega_m must be positive");
  if (n_bar < 0.0) bad("n_bar must be nonnegative");
  if (t1 < 0.0 || t2 < 0.0 || tau < 0.0) bad("pulse durations and delay must be nonnegative");
  if (G1 < 0.0 || G2 < 0.0) bad("couplings G1 and G2 must be nonnegative");
  if (gamma_m < 0.0) bad("gamma_m must be nonnegative");
  if (!std::isfinite(kappa1) || !std::isfinite(kappa2) || !std::isfinite(Delta1) ||
      !std::isfinite(Delta2) || !std::isfinite(G1) || !std::isfinite(G2) ||
      !std::isfinite(E1) || !std::isfinite(E2) || !std::isfinite(n_bar))
    bad("parameters must be finite");
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::marginal: return "marginal";
    case CheckStatus::fail: return "fail";
  }
  return "?";
}

double coupling_from_force(double force_N, double mass_kg, double omega_m_rad_s) {
  if (!(force_N > 0.0) || !(mass_kg > 0.0) || !(omega_m_rad_s > 0.0))
    throw std::invalid_argument("coupling_from_force: arguments must be positive");
  return force_N / std::sqrt(2.0 * hbar_J_s * mass_kg * omega_m_rad_s);
}

double drive_from_power(double power_W, double kappa_rad_s, double omega_L_rad_s) {
  if (!(power_W > 0.0) || !(kappa_rad_s > 0.0) || !(omega_L_rad_s > 0.0))
    throw std::invalid_argument("drive_from_power: arguments must be positive");
  return std::sqrt(2.0 * power_W * kappa_rad_s / (hbar_J_s * omega_L_rad_s));
}

double thermal_occupation(double temperature_K, double omega_m_rad_s) {
  if (temperature_K < 0.0) throw std::invalid_argument("thermal_occupation: negative temperature");
  if (!(omega_m_rad_s > 0.0)) throw std::invalid_argument("thermal_occupation: omega_m must be positive");
  if (temperature_K == 0.0) return 0.0;
  const double x = hbar_J_s * omega_m_rad_s / (k_boltzmann_J_per_K * temperature_K);
  return 1.0 / std::expm1(x);
}

double temperature_from_occupation(double n_bar, double omega_m_rad_s) {
  if (n_bar < 0.0) throw std::invalid_argument("temperature_from_occupation: negative occupation");
  if (!(omega_m_rad_s > 0.0))
    throw std::invalid_argument("temperature_from_occupation: omega_m must be positive");
  if (n_bar == 0.0) return 0.0;
  return hbar_J_s * omega_m_rad_s / (k_boltzmann_J_per_K * std::log1p(1.0 / n_bar));
}

double kick_momentum(const ProtocolParams& p) {
  if (!(p.kappa1 > 0.0)) throw std::invalid_argument("kick_momentum: kappa1 must be positive");
  return 2.0 * p.E1 * p.E1 * p.G1 / (p.kappa1 * p.kappa1 * p.kappa1);
}

MomentumVariance momentum_variance_coeff(const ProtocolParams& p) {
  if (!(p.kappa1 > 0.0))
    throw std::invalid_argument("momentum_variance_coeff: kappa1 must be positive");
  MomentumVariance v;
  const double thermal = 2.0 * p.thermal_width();
  const double k2 = p.kappa1 * p.kappa1;
  v.correction = 8.0 * p.E1 * p.E1 * p.G1 * p.G1 / (k2 * k2);
  v.a1 = thermal + v.correction;
  v.relative_correction = v.correction / thermal;
  return v;
}

double pulse_photon_count(double E, double kappa, double t) {
  if (!(kappa > 0.0)) throw std::invalid_argument("pulse_photon_count: kappa must be positive");
  if (E < 0.0 || t < 0.0) throw std::invalid_argument("pulse_photon_count: negative argument");
  return E * E * t / (2.0 * kappa);
}

double force_per_photon_cavity(double g_om_rad_per_s_m) {
  if (g_om_rad_per_s_m < 0.0)
    throw std::invalid_argument("force_per_photon_cavity: negative frequency pull");
  return hbar_J_s * g_om_rad_per_s_m;
}

double force_per_photon_waveguide(double omega0_rad_s, double n_eff, double dn_eff_dz_per_m) {
  if (!(omega0_rad_s > 0.0) || !(n_eff > 0.0))
    throw std::invalid_argument("force_per_photon_waveguide: arguments must be positive");
  if (dn_eff_dz_per_m < 0.0)
    throw std::invalid_argument("force_per_photon_waveguide: negative index gradient");
  return hbar_J_s * omega0_rad_s / n_eff * dn_eff_dz_per_m;
}

namespace {

CheckStatus grade(double value, double pass_th, double fail_th, bool larger_is_better) {
  if (larger_is_better) {
    if (value > pass_th) return CheckStatus::pass;
    if (value < fail_th) return CheckStatus::fail;
  } else {
    if (value < pass_th) return CheckStatus::pass;
    if (value > fail_th) return CheckStatus::fail;
  }
  return CheckStatus::marginal;
}

RegimeCheck make_check(std::string name, double value, double pass_th, double fail_th,
                       bool larger_is_better) {
  RegimeCheck c;
  c.name = std::move(name);
  c.value = value;
  c.pass_threshold = pass_th;
  c.fail_threshold = fail_th;
  c.larger_is_better = larger_is_better;
  c.status = grade(value, pass_th, fail_th, larger_is_better);
  return c;
}

}  // namespace

RegimeReport validate_regime(const ProtocolParams& p, const RegimeThresholds& th) {
  RegimeReport r;
  const double quality =
      p.gamma_m > 0.0 ? p.omega_m / p.gamma_m : std::numeric_limits<double>::infinity();
  r.checks.push_back(make_check("cavity 1 steady state, kappa1*t1", p.kappa1 * p.t1,
                                th.steady_state_pass, th.steady_state_fail, true));
  r.checks.push_back(make_check("cavity 2 steady state, kappa2*t2", p.kappa2 * p.t2,
                                th.steady_state_pass, th.steady_state_fail, true));
  r.checks.push_back(make_check("resonator frozen in pulse 1, omega_m*t1", p.omega_m * p.t1,
                                th.frozen_pass, th.frozen_fail, false));
  r.checks.push_back(make_check("resonator frozen in pulse 2, omega_m*t2", p.omega_m * p.t2,
                                th.frozen_pass, th.frozen_fail, false));
  r.checks.push_back(make_check("free evolution between pulses, gamma_m*tau", p.gamma_m * p.tau,
                                th.damping_pass, th.damping_fail, false));
  r.checks.push_back(make_check("mechanical quality, omega_m/gamma_m", quality, th.quality_pass,
                                th.quality_fail, true));
  r.g1_over_kappa1 = p.G1 / p.kappa1;
  r.approx_first_order_valid = r.g1_over_kappa1 < th.approx_valid;
  for (const auto& c : r.checks) {
    r.any_fail = r.any_fail || c.status == CheckStatus::fail;
    r.any_marginal = r.any_marginal || c.status == CheckStatus::marginal;
  }
  return r;
}

}  // namespace optokick::params
