#include "optokick/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "optokick/io.hpp"
#include "optokick/phasespace.hpp"

namespace optokick::signal {

namespace {

constexpr double two_pi = 2.0 * M_PI;

template <class Eval>
FringeCurve assemble(Method m, const params::ProtocolParams& pr, const std::vector<double>& thetas,
                     bool parallel, Eval&& eval) {
  FringeCurve curve;
  curve.method = m;
  curve.params = pr;
  curve.points.resize(thetas.size());
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      SignalPoint& p = curve.points[i];
      p.theta = thetas[i];
      p.tau_ns =
          pr.omega_m > 0.0 ? thetas[i] / pr.omega_m : std::numeric_limits<double>::quiet_NaN();
      eval(thetas[i], p);
    }
  };
  unsigned nw = std::max(1u, std::thread::hardware_concurrency());
  nw = std::min<unsigned>(nw, static_cast<unsigned>(thetas.size()));
  if (!parallel || nw <= 1) {
    work(0, thetas.size());
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    const size_t n = thetas.size();
    for (unsigned k = 0; k < nw; ++k)
      pool.emplace_back(work, n * k / nw, n * (k + 1) / nw);
    for (auto& t : pool) t.join();
  }
  for (const auto& p : curve.points)
    if (!p.converged) curve.partial = true;
  return curve;
}

void require_probe(const params::ProtocolParams& pr) {
  if (!(pr.kappa2 > 0.0))
    throw std::invalid_argument("probe-pulse cavity linewidth must be positive");
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::gaussian: return "gaussian";
    case Method::doppler: return "doppler";
    case Method::lorentzian: return "lorentzian";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "exact") return Method::exact;
  if (name == "gaussian") return Method::gaussian;
  if (name == "doppler") return Method::doppler;
  if (name == "lorentzian") return Method::lorentzian;
  return std::nullopt;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::doppler: return "doppler";
    case Regime::lorentzian: return "lorentzian";
    case Regime::intermediate: return "intermediate";
  }
  return "?";
}

std::vector<double> theta_grid(int n) {
  if (n < 1) throw std::invalid_argument("theta grid needs at least one point");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = two_pi * i / n;
  return t;
}

FringeCurve probe_signal_exact(const params::ProtocolParams& pr, const std::vector<double>& thetas,
                               const SignalOptions& opt) {
  require_probe(pr);
  const auto rho = phasespace::post_kick_density_exact(pr);
  const quadrature::LorentzKernel L{pr.E2, pr.kappa2, pr.Delta2, pr.G2};
  return assemble(Method::exact, pr, thetas, opt.parallel, [&](double th, SignalPoint& p) {
    auto r = quadrature::integrate_signal_3d(rho.centered, rho.S, rho.p_sigma, rho.p_mean, L, th,
                                             opt.integral);
    p.n2 = r.value;
    p.err_estimate = r.error;
    p.converged = r.converged;
  });
}

FringeCurve probe_signal_gaussian(const params::ProtocolParams& pr,
                                  const std::vector<double>& thetas, const SignalOptions& opt) {
  require_probe(pr);
  const double S = pr.thermal_width();
  const double p0 = params::kick_momentum(pr);
  const double R = opt.voigt_range_sigmas * std::sqrt(S);
  const double norm = 1.0 / std::sqrt(two_pi * S);
  const quadrature::LorentzKernel base{pr.E2, pr.kappa2, 0.0, pr.G2};
  return assemble(Method::gaussian, pr, thetas, opt.parallel, [&](double th, SignalPoint& p) {
    // shifting the detuning instead of the Gaussian keeps one code path
    const double dth = pr.Delta2 - pr.G2 * p0 * std::sin(th);
    quadrature::AdaptiveOptions aopt;
    aopt.rel_tol = opt.voigt_rel_tol;
    aopt.max_intervals = opt.voigt_max_intervals;
    if (pr.G2 != 0.0) {
      const double pole = dth / pr.G2;
      const double w = pr.kappa2 / std::abs(pr.G2);
      for (double b : {pole, pole - w, pole + w})
        if (b > -R && b < R) aopt.breakpoints.push_back(b);
    }
    quadrature::LorentzKernel L = base;
    L.Delta2 = dth;
    auto r = quadrature::integrate_adaptive(
        [&](double q) { return norm * std::exp(-q * q / (2.0 * S)) * L(q); }, -R, R, aopt);
    p.n2 = r.value;
    p.err_estimate = r.error;
    p.converged = r.converged;
  });
}

FringeCurve probe_signal_doppler(const params::ProtocolParams& pr,
                                 const std::vector<double>& thetas, const SignalOptions& opt) {
  require_probe(pr);
  if (pr.G2 == 0.0)
    throw std::invalid_argument("wide-distribution closed form needs a nonzero probe coupling");
  const double S = pr.thermal_width();
  const double p0 = params::kick_momentum(pr);
  const double prefactor =
      pr.E2 * pr.E2 * std::sqrt(M_PI) / (pr.kappa2 * std::abs(pr.G2) * std::sqrt(2.0 * S));
  const double inv_two_var = 1.0 / (2.0 * pr.G2 * pr.G2 * S);
  return assemble(Method::doppler, pr, thetas, opt.parallel, [&](double th, SignalPoint& p) {
    const double dth = pr.Delta2 - pr.G2 * p0 * std::sin(th);
    p.n2 = prefactor * std::exp(-dth * dth * inv_two_var);
    p.err_estimate = 0.0;
  });
}

FringeCurve probe_signal_lorentzian(const params::ProtocolParams& pr,
                                    const std::vector<double>& thetas, const SignalOptions& opt) {
  require_probe(pr);
  const double p0 = params::kick_momentum(pr);
  const double E2sq = pr.E2 * pr.E2;
  const double k2sq = pr.kappa2 * pr.kappa2;
  return assemble(Method::lorentzian, pr, thetas, opt.parallel, [&](double th, SignalPoint& p) {
    const double dth = pr.Delta2 - pr.G2 * p0 * std::sin(th);
    p.n2 = E2sq / (k2sq + dth * dth);
    p.err_estimate = 0.0;
  });
}

FringeCurve probe_signal(Method m, const params::ProtocolParams& pr,
                         const std::vector<double>& thetas, const SignalOptions& opt) {
  switch (m) {
    case Method::exact: return probe_signal_exact(pr, thetas, opt);
    case Method::gaussian: return probe_signal_gaussian(pr, thetas, opt);
    case Method::doppler: return probe_signal_doppler(pr, thetas, opt);
    case Method::lorentzian: return probe_signal_lorentzian(pr, thetas, opt);
  }
  throw std::invalid_argument("unknown signal method");
}

namespace {

struct Extremum {
  double theta, value;
};

// vertex of the parabola through three points; falls back to the middle
// sample when the curvature is numerically zero or the vertex escapes
Extremum refine_quadratic(double ta, double fa, double tb, double fb, double tc, double fc) {
  const double d1 = (fb - fa) / (tb - ta);
  const double d2 = (fc - fb) / (tc - tb);
  const double dd = (d2 - d1) / (tc - ta);
  const double scale = (std::abs(fa) + std::abs(fb) + std::abs(fc)) / ((tc - ta) * (tc - ta));
  if (std::abs(dd) < 1e-14 * scale + 1e-300) return {tb, fb};
  const double tv = 0.5 * (ta + tb) - d1 / (2.0 * dd);
  if (tv < ta || tv > tc) return {tb, fb};
  const double fv = fa + d1 * (tv - ta) + dd * (tv - ta) * (tv - tb);
  return {tv, fv};
}

}  // namespace

VisibilityResult visibility_from_curve(const FringeCurve& curve) {
  const auto& pts = curve.points;
  const size_t n = pts.size();
  if (n < 16) throw std::invalid_argument("visibility needs a curve of at least 16 points");
  for (size_t i = 1; i < n; ++i)
    if (!(pts[i].theta > pts[i - 1].theta))
      throw std::invalid_argument("fringe curve thetas must be strictly increasing");
  const double span = pts[n - 1].theta - pts[0].theta;
  if (span < two_pi * (1.0 - 2.0 / static_cast<double>(n)) - 1e-12)
    throw std::invalid_argument("visibility needs a curve spanning a full period");

  size_t imax = 0, imin = 0;
  for (size_t i = 1; i < n; ++i) {
    if (pts[i].n2 > pts[imax].n2) imax = i;
    if (pts[i].n2 < pts[imin].n2) imin = i;
  }
  // periodic wraparound supplies the neighbors of the boundary samples
  auto neighbor = [&](size_t i, int step) -> std::pair<double, double> {
    if (step < 0 && i == 0) return {pts[n - 1].theta - two_pi, pts[n - 1].n2};
    if (step > 0 && i == n - 1) return {pts[0].theta + two_pi, pts[0].n2};
    const size_t j = i + step;
    return {pts[j].theta, pts[j].n2};
  };
  auto refine = [&](size_t i) {
    auto [ta, fa] = neighbor(i, -1);
    auto [tc, fc] = neighbor(i, +1);
    return refine_quadratic(ta, fa, pts[i].theta, pts[i].n2, tc, fc);
  };
  const Extremum hi = refine(imax);
  const Extremum lo = refine(imin);

  VisibilityResult v;
  v.n2_max = hi.value;
  v.n2_min = lo.value;
  v.theta_max = hi.theta;
  v.theta_min = lo.theta;
  const double amp = hi.value - lo.value;
  const double mid = hi.value + lo.value;
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(hi.value), std::abs(lo.value));
  if (amp <= floor || mid == 0.0) {
    v.zero_amplitude = true;
    v.value = 0.0;
  } else {
    v.value = amp / mid;
  }
  return v;
}

double visibility_tanh(const params::ProtocolParams& pr) {
  const double S = pr.thermal_width();
  const double p0 = params::kick_momentum(pr);
  if (pr.G2 == 0.0 || p0 == 0.0) return 0.0;
  return std::tanh(pr.Delta2 * p0 / (pr.G2 * S));
}

LorentzianVisibility visibility_lorentzian(const params::ProtocolParams& pr) {
  require_probe(pr);
  const double g = pr.G2 * params::kick_momentum(pr);
  const double s = pr.kappa2 * pr.kappa2 + g * g;
  LorentzianVisibility v;
  v.delta2_opt = std::sqrt(s);
  v.v_max = std::abs(g) / v.delta2_opt;
  v.value = 2.0 * std::abs(pr.Delta2 * g) / (s + pr.Delta2 * pr.Delta2);
  return v;
}

RegimeClass classify_regime(const params::ProtocolParams& pr) {
  require_probe(pr);
  RegimeClass c;
  c.ratio = pr.thermal_width() * pr.G2 * pr.G2 / (pr.kappa2 * pr.kappa2);
  if (c.ratio > 10.0)
    c.regime = Regime::doppler;
  else if (c.ratio < 0.1)
    c.regime = Regime::lorentzian;
  else
    c.regime = Regime::intermediate;
  if (c.regime == Regime::doppler && pr.G2 != 0.0) {
    const double widths = std::abs(pr.Delta2) / (std::abs(pr.G2) * std::sqrt(pr.thermal_width()));
    if (widths > 2.0)
      c.note = "probe detuning sits " + io::format_double(widths) +
               " Gaussian widths from resonance; the narrow-profile wings compete with the "
               "Gaussian core there";
  }
  return c;
}

VisibilityReport visibility_report(const params::ProtocolParams& pr, const FringeCurve& curve) {
  VisibilityReport r;
  r.numeric_method = curve.method;
  r.numeric = visibility_from_curve(curve);
  r.v_tanh = visibility_tanh(pr);
  r.lorentzian = visibility_lorentzian(pr);
  r.regime = classify_regime(pr);
  return r;
}

void write_fringe_csv(const std::vector<FringeCurve>& curves, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "theta,tau_ns,n2,err_estimate,method\n";
  for (const auto& c : curves)
    for (const auto& p : c.points)
      out << io::format_double(p.theta) << ',' << io::format_double(p.tau_ns) << ','
          << io::format_double(p.n2) << ',' << io::format_double(p.err_estimate) << ','
          << method_name(c.method) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace optokick::signal
