#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optokick/params.hpp"
#include "optokick/quadrature.hpp"

namespace optokick::signal {

enum class Method { exact, gaussian, doppler, lorentzian };

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct SignalPoint {
  double theta = 0.0;   // omega_m * tau, the sweep variable
  double tau_ns = 0.0;  // derived metadata; NaN when omega_m is not set
  double n2 = 0.0;      // mean probe photon number
  double err_estimate = 0.0;
  bool converged = true;
};

struct FringeCurve {
  Method method = Method::exact;
  params::ProtocolParams params;
  std::vector<SignalPoint> points;
  bool partial = false;  // true when any point failed to converge
  std::vector<std::string> warnings;
};

// n uniform points on [0, 2pi); n >= 1
std::vector<double> theta_grid(int n);

struct SignalOptions {
  quadrature::SignalIntegralSpec integral;  // exact-method engine settings
  double voigt_rel_tol = 1e-10;             // gaussian-method 1D quadrature
  int voigt_max_intervals = 2000;
  double voigt_range_sigmas = 10.0;
  bool parallel = true;  // evaluate theta points across threads
};

FringeCurve probe_signal_exact(const params::ProtocolParams& pr, const std::vector<double>& thetas,
                               const SignalOptions& opt = {});
FringeCurve probe_signal_gaussian(const params::ProtocolParams& pr,
                                  const std::vector<double>& thetas,
                                  const SignalOptions& opt = {});
FringeCurve probe_signal_doppler(const params::ProtocolParams& pr,
                                 const std::vector<double>& thetas,
                                 const SignalOptions& opt = {});
FringeCurve probe_signal_lorentzian(const params::ProtocolParams& pr,
                                    const std::vector<double>& thetas,
                                    const SignalOptions& opt = {});
FringeCurve probe_signal(Method m, const params::ProtocolParams& pr,
                         const std::vector<double>& thetas, const SignalOptions& opt = {});

struct VisibilityResult {
  double value = 0.0;
  bool zero_amplitude = false;  // flat curve, no fringe to measure
  double n2_max = 0.0, n2_min = 0.0;
  double theta_max = 0.0, theta_min = 0.0;  // refined extremum locations
};

// (max - min) / (max + min) with extrema refined by a local quadratic fit;
// needs >= 16 points spanning a full period
VisibilityResult visibility_from_curve(const FringeCurve& curve);

// closed-form visibility of the wide-distribution limit,
// tanh(Delta2 * p0 / (G2 * (1 + 2 n_bar)))
double visibility_tanh(const params::ProtocolParams& pr);

struct LorentzianVisibility {
  double value = 0.0;       // at the configured detuning
  double delta2_opt = 0.0;  // sqrt(kappa2^2 + G2^2 p0^2)
  double v_max = 0.0;       // value at delta2_opt
};

// closed-form visibility of the narrow-distribution limit,
// V = 2 |Delta2 G2 p0| / (kappa2^2 + G2^2 p0^2 + Delta2^2)
LorentzianVisibility visibility_lorentzian(const params::ProtocolParams& pr);

enum class Regime { doppler, lorentzian, intermediate };
const char* regime_name(Regime r);

struct RegimeClass {
  Regime regime = Regime::intermediate;
  double ratio = 0.0;  // (1 + 2 n_bar) G2^2 / kappa2^2
  std::string note;    // set when the detuning sits far out on the profile wing
};

RegimeClass classify_regime(const params::ProtocolParams& pr);

struct VisibilityReport {
  Method numeric_method = Method::exact;
  VisibilityResult numeric;
  double v_tanh = 0.0;
  LorentzianVisibility lorentzian;
  RegimeClass regime;
};

VisibilityReport visibility_report(const params::ProtocolParams& pr, const FringeCurve& curve);

// columns: theta,tau_ns,n2,err_estimate,method; one row per point per curve
void write_fringe_csv(const std::vector<FringeCurve>& curves, const std::string& path);

}  // namespace optokick::signal
