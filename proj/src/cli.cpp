#include "optokick/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "optokick/constants.hpp"
#include "optokick/io.hpp"

namespace optokick::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double two_pi = 6.283185307179586476925286766559;
constexpr double speed_of_light_m_s = 299792458.0;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    std::size_t a = start, b = comma;
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    if (b > a) out.push_back(s.substr(a, b - a));
    start = comma + 1;
  }
  return out;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// explicit value vs material-derived value for the same parameter
void reconcile(double& slot, bool explicit_set, double derived, const char* key,
               std::vector<std::string>& notes) {
  if (explicit_set) {
    const double scale = std::max(std::abs(slot), std::abs(derived));
    if (std::abs(slot - derived) > 1e-9 * scale)
      throw std::runtime_error(std::string("config: [protocol] ") + key +
                               " = " + io::format_double(slot) +
                               " conflicts with the material-derived value " +
                               io::format_double(derived) +
                               "; give one or the other");
    return;
  }
  slot = derived;
  notes.push_back(std::string(key) + " = " + io::format_double(derived) +
                  " derived from the [material] block");
}

ordered_json protocol_json(const params::ProtocolParams& p) {
  ordered_json j;
  j["kappa1_rad_per_ns"] = p.kappa1;
  j["kappa2_rad_per_ns"] = p.kappa2;
  j["delta1_rad_per_ns"] = p.Delta1;
  j["delta2_rad_per_ns"] = p.Delta2;
  j["coupling1_rad_per_ns"] = p.G1;
  j["coupling2_rad_per_ns"] = p.G2;
  j["drive1_rad_per_ns"] = p.E1;
  j["drive2_rad_per_ns"] = p.E2;
  j["t1_ns"] = p.t1;
  j["t2_ns"] = p.t2;
  j["omega_m_rad_per_ns"] = p.omega_m;
  j["gamma_m_rad_per_ns"] = p.gamma_m;
  j["n_bar"] = p.n_bar;
  j["tau_ns"] = p.tau;
  j["thermal_width"] = p.thermal_width();
  j["kick_momentum"] = params::kick_momentum(p);
  j["momentum_variance_coeff"] = params::momentum_variance_coeff(p).a1;
  return j;
}

ordered_json material_json(const params::MaterialParams& m) {
  ordered_json j;
  if (m.mass_kg) j["mass_kg"] = *m.mass_kg;
  if (m.force_per_photon_N) j["force_per_photon_N"] = *m.force_per_photon_N;
  if (m.input_power_W) j["input_power_W"] = *m.input_power_W;
  if (m.laser_omega_rad_s) j["laser_omega_rad_s"] = *m.laser_omega_rad_s;
  if (m.temperature_K) j["temperature_K"] = *m.temperature_K;
  return j;
}

ordered_json regime_json(const params::RegimeReport& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json row;
    row["name"] = c.name;
    row["value"] = c.value;
    row["pass_threshold"] = c.pass_threshold;
    row["fail_threshold"] = c.fail_threshold;
    row["larger_is_better"] = c.larger_is_better;
    row["status"] = params::to_string(c.status);
    rows.push_back(row);
  }
  ordered_json j;
  j["checks"] = rows;
  j["g1_over_kappa1"] = r.g1_over_kappa1;
  j["first_order_expansion_valid"] = r.approx_first_order_valid;
  j["any_fail"] = r.any_fail;
  j["any_marginal"] = r.any_marginal;
  return j;
}

ordered_json visibility_json(const signal::VisibilityResult& v) {
  ordered_json j;
  j["value"] = v.value;
  j["zero_amplitude"] = v.zero_amplitude;
  j["n2_max"] = v.n2_max;
  j["n2_min"] = v.n2_min;
  j["theta_max"] = v.theta_max;
  j["theta_min"] = v.theta_min;
  return j;
}

ordered_json closed_forms_json(const params::ProtocolParams& pr) {
  const auto lor = signal::visibility_lorentzian(pr);
  ordered_json j;
  j["tanh"] = signal::visibility_tanh(pr);
  j["lorentzian_at_detuning"] = lor.value;
  j["optimal_detuning_rad_per_ns"] = lor.delta2_opt;
  j["v_max"] = lor.v_max;
  return j;
}

ordered_json regime_class_json(const signal::RegimeClass& rc) {
  ordered_json j;
  j["regime"] = signal::regime_name(rc.regime);
  j["ratio"] = rc.ratio;
  if (!rc.note.empty()) j["note"] = rc.note;
  return j;
}

ordered_json header_json(const RunConfig& cfg, const char* command) {
  ordered_json j;
  j["tool"] = ordered_json{{"name", "optokick"}, {"version", version_string}};
  j["command"] = command;
  j["config"] = cfg.config_path;
  j["seed"] = cfg.seed;
  j["parameters"] = protocol_json(cfg.protocol);
  ordered_json mat = material_json(cfg.material);
  if (!mat.empty()) j["material"] = mat;
  if (!cfg.derivations.empty()) j["derived"] = cfg.derivations;
  return j;
}

void write_json(const ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// resolves method names or reports the offender; empty selection is an error
std::vector<signal::Method> resolve_methods(const std::vector<std::string>& names) {
  if (names.empty())
    throw std::runtime_error(
        "no methods selected; choose from exact, gaussian, doppler, lorentzian");
  std::vector<signal::Method> out;
  for (const auto& n : names) {
    auto m = signal::method_from_name(n);
    if (!m)
      throw std::runtime_error("unknown method '" + n +
                               "'; choose from exact, gaussian, doppler, lorentzian");
    out.push_back(*m);
  }
  return out;
}

int fail_config(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return exit_bad_config;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  cfg.config_path = path;
  const io::IniFile ini = io::IniFile::parse_file(path);
  auto& pr = cfg.protocol;

  pr.kappa1 = ini.number_or("protocol", "kappa1_rad_per_ns", pr.kappa1);
  pr.kappa2 = ini.number_or("protocol", "kappa2_rad_per_ns", pr.kappa2);
  pr.Delta1 = ini.number_or("protocol", "delta1_rad_per_ns", 0.0);
  pr.Delta2 = ini.number_or("protocol", "delta2_rad_per_ns", 0.0);
  pr.E1 = ini.number_or("protocol", "drive1_rad_per_ns", 0.0);
  pr.E2 = ini.number_or("protocol", "drive2_rad_per_ns", 0.0);
  pr.t1 = ini.number_or("protocol", "t1_ns", pr.t1);
  pr.t2 = ini.number_or("protocol", "t2_ns", pr.t2);

  const bool mhz = ini.has("protocol", "omega_m_over_2pi_MHz");
  const bool omega_direct = ini.has("protocol", "omega_m_rad_per_ns");
  if (mhz && omega_direct)
    throw std::runtime_error(
        "config: give omega_m_over_2pi_MHz or omega_m_rad_per_ns, not both");
  if (mhz) pr.omega_m = two_pi * ini.number("protocol", "omega_m_over_2pi_MHz") * 1e-3;
  if (omega_direct) pr.omega_m = ini.number("protocol", "omega_m_rad_per_ns");

  const bool quality = ini.has("protocol", "quality_factor");
  const bool gamma_direct = ini.has("protocol", "gamma_m_rad_per_ns");
  if (quality && gamma_direct)
    throw std::runtime_error("config: give quality_factor or gamma_m_rad_per_ns, not both");
  if (quality) {
    const double q = ini.number("protocol", "quality_factor");
    if (!(q > 0.0)) throw std::runtime_error("config: quality_factor must be positive");
    if (!(pr.omega_m > 0.0))
      throw std::runtime_error("config: quality_factor needs the mechanical frequency");
    pr.gamma_m = pr.omega_m / q;
  }
  if (gamma_direct) pr.gamma_m = ini.number("protocol", "gamma_m_rad_per_ns");

  const bool g1_explicit = ini.has("protocol", "coupling1_rad_per_ns");
  const bool g2_explicit = ini.has("protocol", "coupling2_rad_per_ns");
  if (g1_explicit) pr.G1 = ini.number("protocol", "coupling1_rad_per_ns");
  if (g2_explicit) pr.G2 = ini.number("protocol", "coupling2_rad_per_ns");
  const bool nbar_explicit = ini.has("protocol", "n_bar");
  if (nbar_explicit) pr.n_bar = ini.number("protocol", "n_bar");

  auto& mat = cfg.material;
  if (ini.has("material", "mass_pg")) mat.mass_kg = ini.number("material", "mass_pg") * 1e-15;
  if (ini.has("material", "force_per_photon_pN"))
    mat.force_per_photon_N = ini.number("material", "force_per_photon_pN") * 1e-12;
  if (ini.has("material", "input_power_uW"))
    mat.input_power_W = ini.number("material", "input_power_uW") * 1e-6;
  if (ini.has("material", "laser_wavelength_nm")) {
    const double lambda = ini.number("material", "laser_wavelength_nm") * 1e-9;
    if (!(lambda > 0.0)) throw std::runtime_error("config: laser wavelength must be positive");
    mat.laser_omega_rad_s = two_pi * speed_of_light_m_s / lambda;
  }
  if (ini.has("material", "temperature_K"))
    mat.temperature_K = ini.number("material", "temperature_K");

  if (mat.mass_kg && mat.force_per_photon_N) {
    if (!(pr.omega_m > 0.0))
      throw std::runtime_error("config: coupling derivation needs the mechanical frequency");
    const double omega_rad_s = pr.omega_m / rad_per_s_to_rad_per_ns;
    const double g = params::coupling_from_force(*mat.force_per_photon_N, *mat.mass_kg,
                                                 omega_rad_s) *
                     rad_per_s_to_rad_per_ns;
    reconcile(pr.G1, g1_explicit, g, "coupling1_rad_per_ns", cfg.derivations);
    reconcile(pr.G2, g2_explicit, g, "coupling2_rad_per_ns", cfg.derivations);
  }
  if (mat.temperature_K) {
    if (!(pr.omega_m > 0.0))
      throw std::runtime_error("config: occupation derivation needs the mechanical frequency");
    const double omega_rad_s = pr.omega_m / rad_per_s_to_rad_per_ns;
    const double n = params::thermal_occupation(*mat.temperature_K, omega_rad_s);
    double slot = pr.n_bar;
    reconcile(slot, nbar_explicit, n, "n_bar", cfg.derivations);
    pr.n_bar = slot;
  }

  // the sweep spans a full fringe period; regime checks use the worst-case delay
  pr.tau = ini.number_or("protocol", "tau_ns",
                         pr.omega_m > 0.0 ? two_pi / pr.omega_m : 0.0);

  cfg.theta_points = static_cast<int>(ini.integer_or("sweep", "theta_points", 128));
  cfg.methods =
      ini.list_or("sweep", "methods", {"exact", "gaussian", "doppler", "lorentzian"});

  if (ini.sections().count("detector")) {
    cfg.has_detector = true;
    cfg.detector.efficiency = ini.number("detector", "efficiency");
    cfg.detector.dark_rate_hz = ini.number_or("detector", "dark_rate_Hz", 0.0);
    cfg.detector.window_s = ini.number_or("detector", "window_ms", 0.0) * 1e-3;
    cfg.repetition_rate_hz = ini.number_or("detector", "repetition_rate_Hz", 0.0);
    cfg.total_shots = ini.unsigned_or("detector", "total_shots", 0);
    cfg.theta_bins = static_cast<int>(ini.integer_or("detector", "theta_bins", 32));
    cfg.curve_method = ini.text_or("detector", "curve_method", "exact");
    cfg.target_z = ini.number_or("detector", "target_z", 5.0);
  }

  cfg.seed = ini.unsigned_or("output", "seed", 0);
  cfg.out_dir = ini.text_or("output", "dir", ".");
  return cfg;
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
  if (ov.methods) cfg.methods = split_csv(*ov.methods);
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.theta_points) cfg.theta_points = *ov.theta_points;
}

int cmd_sweep(const RunConfig& cfg) {
  std::vector<signal::Method> methods;
  try {
    cfg.protocol.check();
    methods = resolve_methods(cfg.methods);
    if (cfg.theta_points < 16)
      throw std::runtime_error("theta_points must be at least 16 for visibility extraction");
  } catch (const std::exception& e) {
    return fail_config(e);
  }

  const auto thetas = signal::theta_grid(cfg.theta_points);
  std::vector<signal::FringeCurve> curves;
  try {
    for (auto m : methods) curves.push_back(signal::probe_signal(m, cfg.protocol, thetas));
  } catch (const std::exception& e) {
    return fail_config(e);
  }

  bool partial = false;
  for (const auto& c : curves) partial = partial || c.partial;

  ordered_json summary = header_json(cfg, "sweep");
  summary["regime_checks"] = regime_json(params::validate_regime(cfg.protocol));
  summary["classification"] = regime_class_json(signal::classify_regime(cfg.protocol));
  {
    ordered_json sweep;
    sweep["theta_points"] = cfg.theta_points;
    sweep["methods"] = cfg.methods;
    sweep["csv"] = "fringe.csv";
    sweep["partial"] = partial;
    summary["sweep"] = sweep;
  }
  ordered_json per_curve = ordered_json::array();
  for (const auto& c : curves) {
    const auto vis = signal::visibility_from_curve(c);
    ordered_json jc;
    jc["method"] = signal::method_name(c.method);
    jc["partial"] = c.partial;
    jc["visibility"] = visibility_json(vis);
    if (!c.warnings.empty()) jc["warnings"] = c.warnings;
    per_curve.push_back(jc);
  }
  summary["visibilities"] = per_curve;
  summary["closed_forms"] = closed_forms_json(cfg.protocol);

  try {
    const auto dir = prepare_out_dir(cfg);
    signal::write_fringe_csv(curves, (dir / "fringe.csv").string());
    write_json(summary, dir / "summary.json");
    std::cout << "wrote " << (dir / "fringe.csv").string() << " and "
              << (dir / "summary.json").string() << "\n";
  } catch (const std::exception& e) {
    return fail_config(e);
  }

  for (const auto& jc : per_curve) {
    std::cout << "  " << jc["method"].get<std::string>()
              << ": V = " << io::format_double(jc["visibility"]["value"].get<double>());
    if (jc["visibility"]["zero_amplitude"].get<bool>()) std::cout << " (flat curve)";
    if (jc["partial"].get<bool>()) std::cout << " [partial: unconverged points]";
    std::cout << "\n";
  }
  const auto& rc = summary["classification"];
  std::cout << "  regime: " << rc["regime"].get<std::string>()
            << " (ratio " << fmt("%.4g", rc["ratio"].get<double>()) << ")\n";
  for (const auto& c : curves)
    for (const auto& w : c.warnings)
      std::cout << "  note [" << signal::method_name(c.method) << "]: " << w << "\n";
  if (partial) {
    std::cout << "  some points did not converge; outputs are marked partial\n";
    return exit_unconverged;
  }
  return exit_ok;
}

int cmd_visibility(const RunConfig& cfg, bool optimize_detuning) {
  std::vector<signal::Method> methods;
  try {
    cfg.protocol.check();
    methods = resolve_methods(cfg.methods);
    if (cfg.theta_points < 16)
      throw std::runtime_error("theta_points must be at least 16 for visibility extraction");
  } catch (const std::exception& e) {
    return fail_config(e);
  }

  signal::FringeCurve curve;
  try {
    curve = signal::probe_signal(methods.front(), cfg.protocol, signal::theta_grid(cfg.theta_points));
  } catch (const std::exception& e) {
    return fail_config(e);
  }
  const auto report = signal::visibility_report(cfg.protocol, curve);

  ordered_json j = header_json(cfg, "visibility");
  j["numeric_method"] = signal::method_name(report.numeric_method);
  j["theta_points"] = cfg.theta_points;
  j["numeric"] = visibility_json(report.numeric);
  j["closed_forms"] = closed_forms_json(cfg.protocol);
  j["classification"] = regime_class_json(report.regime);
  j["partial"] = curve.partial;

  std::cout << "visibility report (" << signal::method_name(report.numeric_method) << " curve, "
            << cfg.theta_points << " points)\n";
  std::cout << "  numeric            V = " << io::format_double(report.numeric.value)
            << (report.numeric.zero_amplitude ? "  (flat curve)" : "") << "\n";
  std::cout << "  wide-limit tanh    V = " << io::format_double(report.v_tanh) << "\n";
  std::cout << "  narrow-limit       V = " << io::format_double(report.lorentzian.value)
            << " at the configured detuning\n";
  std::cout << "  optimal detuning   " << io::format_double(report.lorentzian.delta2_opt)
            << " rad/ns (narrow-limit V_max = " << io::format_double(report.lorentzian.v_max)
            << ")\n";
  std::cout << "  regime             " << signal::regime_name(report.regime.regime) << " (ratio "
            << fmt("%.4g", report.regime.ratio) << ")\n";
  if (!report.regime.note.empty()) std::cout << "  note: " << report.regime.note << "\n";

  if (optimize_detuning) {
    const double opt = report.lorentzian.delta2_opt;
    if (opt > 0.0) {
      const int n = 501;
      const double hi = 5.0 * opt;
      double best_d = 0.0, best_v = -1.0;
      for (int i = 0; i < n; ++i) {
        params::ProtocolParams p2 = cfg.protocol;
        p2.Delta2 = hi * i / (n - 1);
        const double v = signal::visibility_lorentzian(p2).value;
        if (v > best_v) {
          best_v = v;
          best_d = p2.Delta2;
        }
      }
      const double step = hi / (n - 1);
      const bool agrees = std::abs(best_d - opt) <= step;
      ordered_json scan;
      scan["scan_max_rad_per_ns"] = hi;
      scan["points"] = n;
      scan["argmax_rad_per_ns"] = best_d;
      scan["v_at_argmax"] = best_v;
      scan["closed_form_optimum_rad_per_ns"] = opt;
      scan["agrees_within_grid_step"] = agrees;
      j["optimize_detuning"] = scan;
      std::cout << "  detuning scan      argmax " << io::format_double(best_d) << " rad/ns over ["
                << "0, " << io::format_double(hi) << "], "
                << (agrees ? "matches" : "DISAGREES with") << " the closed-form optimum\n";
    } else {
      j["optimize_detuning"] = {{"skipped", "no momentum kick, visibility vanishes"}};
      std::cout << "  detuning scan      skipped: no momentum kick\n";
    }
  }

  try {
    const auto dir = prepare_out_dir(cfg);
    write_json(j, dir / "visibility.json");
    std::cout << "wrote " << (dir / "visibility.json").string() << "\n";
  } catch (const std::exception& e) {
    return fail_config(e);
  }
  return curve.partial ? exit_unconverged : exit_ok;
}

int cmd_counts(const RunConfig& cfg) {
  signal::Method method = signal::Method::exact;
  try {
    if (!cfg.has_detector)
      throw std::runtime_error("config has no [detector] section; counts needs one");
    cfg.protocol.check();
    cfg.detector.check();
    if (cfg.total_shots == 0)
      throw std::runtime_error("detector total_shots must be positive");
    if (!(cfg.repetition_rate_hz > 0.0))
      throw std::runtime_error("detector repetition_rate_Hz must be positive");
    if (cfg.theta_bins < 16)
      throw std::runtime_error("theta_bins must be at least 16 for visibility extraction");
    auto m = signal::method_from_name(cfg.curve_method);
    if (!m)
      throw std::runtime_error("unknown curve_method '" + cfg.curve_method +
                               "'; choose from exact, gaussian, doppler, lorentzian");
    method = *m;
    if (cfg.total_shots / static_cast<std::uint64_t>(cfg.theta_bins) == 0)
      throw std::runtime_error("total_shots is smaller than the number of theta bins");
  } catch (const std::exception& e) {
    return fail_config(e);
  }

  signal::FringeCurve curve;
  try {
    curve = signal::probe_signal(method, cfg.protocol, signal::theta_grid(cfg.theta_bins));
  } catch (const std::exception& e) {
    return fail_config(e);
  }
  const auto vis = signal::visibility_from_curve(curve);
  const std::uint64_t shots_per_bin =
      cfg.total_shots / static_cast<std::uint64_t>(cfg.theta_bins);
  const std::uint64_t dropped =
      cfg.total_shots - shots_per_bin * static_cast<std::uint64_t>(cfg.theta_bins);

  const auto campaign = counting::simulate_campaign(curve, cfg.detector, shots_per_bin, cfg.seed,
                                                    cfg.repetition_rate_hz);
  double mean_n2 = 0.0;
  for (const auto& pt : curve.points) mean_n2 += pt.n2;
  mean_n2 /= static_cast<double>(curve.points.size());
  const auto required = counting::required_shots(vis.value, mean_n2, cfg.detector, cfg.target_z);
  const double analytic = counting::analytic_z(vis.value, cfg.detector.efficiency * mean_n2,
                                               cfg.detector.dark_per_shot(), campaign.total_shots);

  ordered_json j = header_json(cfg, "counts");
  {
    ordered_json d;
    d["efficiency"] = cfg.detector.efficiency;
    d["dark_rate_hz"] = cfg.detector.dark_rate_hz;
    d["window_s"] = cfg.detector.window_s;
    d["dark_counts_per_shot"] = cfg.detector.dark_per_shot();
    d["repetition_rate_hz"] = cfg.repetition_rate_hz;
    j["detector"] = d;
  }
  {
    ordered_json c;
    c["curve_method"] = signal::method_name(method);
    c["theta_bins"] = cfg.theta_bins;
    c["shots_per_bin"] = campaign.shots_per_bin;
    c["total_shots"] = campaign.total_shots;
    if (dropped) c["shots_dropped_by_binning"] = dropped;
    c["schedule_s"] = campaign.schedule_s;
    c["visibility_used"] = vis.value;
    c["mean_signal_per_shot"] = mean_n2;
    c["curve_partial"] = curve.partial;
    ordered_json bins = ordered_json::array();
    for (std::size_t i = 0; i < campaign.thetas.size(); ++i) {
      ordered_json b;
      b["theta"] = campaign.thetas[i];
      b["n2"] = curve.points[i].n2;
      b["counts"] = campaign.counts[i];
      bins.push_back(b);
    }
    c["bins"] = bins;
    c["amplitude"] = campaign.amplitude;
    c["amplitude_stderr"] = campaign.amplitude_stderr;
    c["z_score"] = campaign.z_score;
    c["analytic_z"] = analytic;
    c["mean_counts_per_shot"] = campaign.mean_counts_per_shot;
    c["expected_dark_total"] = campaign.expected_dark_total;
    j["campaign"] = c;
  }
  {
    ordered_json r;
    r["target_z"] = cfg.target_z;
    r["infinite"] = required.infinite;
    if (required.infinite) {
      r["shots"] = nullptr;
    } else {
      r["shots"] = required.shots;
      r["schedule_s"] = counting::campaign_schedule(required.shots, cfg.repetition_rate_hz);
    }
    r["model"] = required.model;
    j["required"] = r;
  }

  try {
    const auto dir = prepare_out_dir(cfg);
    write_json(j, dir / "counts.json");
    std::cout << "wrote " << (dir / "counts.json").string() << "\n";
  } catch (const std::exception& e) {
    return fail_config(e);
  }

  std::cout << "  campaign: " << campaign.total_shots << " shots over "
            << fmt("%.6g", campaign.schedule_s) << " s, z = " << fmt("%.4g", campaign.z_score)
            << " (analytic " << fmt("%.4g", analytic) << ")\n";
  if (required.infinite)
    std::cout << "  required shots for z = " << fmt("%.3g", cfg.target_z)
              << ": unbounded (no usable fringe)\n";
  else
    std::cout << "  required shots for z = " << fmt("%.3g", cfg.target_z) << ": " << required.shots
              << " (" << fmt("%.6g", counting::campaign_schedule(required.shots, cfg.repetition_rate_hz))
              << " s)\n";
  return curve.partial ? exit_unconverged : exit_ok;
}

int cmd_validate(const RunConfig& cfg) {
  try {
    cfg.protocol.check();
  } catch (const std::exception& e) {
    return fail_config(e);
  }
  const auto report = params::validate_regime(cfg.protocol);
  const bool resonant = cfg.protocol.Delta1 == 0.0;

  std::printf("%-44s %12s %10s %10s  %s\n", "assumption", "value", "pass", "fail", "status");
  for (const auto& c : report.checks) {
    const char dir = c.larger_is_better ? '>' : '<';
    char pass[32], fail[32];
    std::snprintf(pass, sizeof pass, "%c%.3g", dir, c.pass_threshold);
    std::snprintf(fail, sizeof fail, "%c%.3g", c.larger_is_better ? '<' : '>', c.fail_threshold);
    std::printf("%-44s %12.5g %10s %10s  %s\n", c.name.c_str(), c.value, pass, fail,
                params::to_string(c.status));
  }
  std::printf("%-44s %12.5g %10s %10s  %s\n", "resonant pump drive, Delta1", cfg.protocol.Delta1,
              "=0", "!=0", resonant ? "pass" : "fail");
  std::printf("\nG1/kappa1 = %.5g: second-order kick expansion %s\n", report.g1_over_kappa1,
              report.approx_first_order_valid ? "applies" : "is not controlled");
  if (report.any_marginal) std::printf("note: marginal ratios above; treat results with care\n");

  const bool ok = !report.any_fail && resonant;
  std::printf("%s\n", ok ? "all assumptions hold" : "some assumptions FAIL");
  return ok ? exit_ok : exit_validation_failed;
}

}  // namespace optokick::cli
