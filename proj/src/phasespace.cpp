#include "optokick/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>
#include <vector>

#include "optokick/io.hpp"
#include "optokick/quadrature.hpp"

namespace optokick::phasespace {

namespace {

constexpr double two_pi = 2.0 * M_PI;

Eigen::VectorXd linspace(double lo, double hi, int n) {
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

// contiguous row ranges over a small worker pool; writes are per-index, so
// the result does not depend on the worker count
void parallel_rows(int n, const std::function<void(int, int)>& body) {
  unsigned nw = std::max(1u, std::thread::hardware_concurrency());
  nw = std::min<unsigned>(nw, static_cast<unsigned>(n));
  if (nw <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (unsigned k = 0; k < nw; ++k) {
    const int begin = static_cast<int>(static_cast<long>(n) * k / nw);
    const int end = static_cast<int>(static_cast<long>(n) * (k + 1) / nw);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

void catmull_rom_weights(double t, double out[4]) {
  out[0] = ((-0.5 * t + 1.0) * t - 0.5) * t;
  out[1] = (1.5 * t - 2.5) * t * t + 1.0;
  out[2] = ((-1.5 * t + 2.0) * t + 0.5) * t;
  out[3] = (0.5 * t - 0.5) * t * t;
}

void require_positive_kappa1(const params::ProtocolParams& pr) {
  if (!(pr.kappa1 > 0.0))
    throw std::invalid_argument("first-pulse cavity linewidth must be positive");
}

void finalize_mass(WignerGrid& g, bool enforce, double tolerance) {
  g.mass_defect = std::abs(1.0 - g.w.sum() * g.dq * g.dp);
  if (enforce && g.mass_defect > tolerance)
    throw std::runtime_error("phase-space grid does not capture the state: mass defect " +
                             io::format_double(g.mass_defect) + " exceeds " +
                             io::format_double(tolerance));
}

}  // namespace

GridSpec GridSpec::square(double half_width, int n) {
  GridSpec s;
  s.q_min = -half_width;
  s.q_max = half_width;
  s.p_min = -half_width;
  s.p_max = half_width;
  s.nq = n;
  s.np = n;
  return s;
}

GridSpec default_grid(double S) { return GridSpec::square(6.0 * std::sqrt(S)); }

PositionDensity thermal_density(double n_bar) {
  if (n_bar < 0.0) throw std::domain_error("thermal occupation must be nonnegative");
  const double S = 1.0 + 2.0 * n_bar;
  const double norm = 1.0 / std::sqrt(two_pi * S);
  PositionDensity rho;
  rho.kind = DensityKind::thermal;
  rho.S = S;
  rho.p_mean = 0.0;
  rho.p_sigma = std::sqrt(S);
  rho.centered = [S, norm](double q, double y) -> std::complex<double> {
    return {norm * std::exp(-q * q / (2.0 * S) - 0.5 * S * y * y), 0.0};
  };
  return rho;
}

std::complex<double> cavity_amplitude(double q, double t, double E, double kappa, double Delta,
                                      double G) {
  if (t < 0.0) throw std::invalid_argument("pulse duration must be nonnegative");
  const std::complex<double> lambda(kappa, Delta - G * q);
  if (std::isinf(t)) {
    if (!(kappa > 0.0))
      throw std::invalid_argument("asymptotic amplitude needs a positive linewidth");
    return E / lambda;
  }
  return E / lambda * (1.0 - std::exp(-lambda * t));
}

std::complex<double> post_kick_factor(const params::ProtocolParams& pr, double q, double y) {
  require_positive_kappa1(pr);
  if (pr.Delta1 != 0.0)
    throw std::invalid_argument(
        "post-kick state is only available for resonant first-pulse drive (Delta1 = 0)");
  const double k2 = pr.kappa1 * pr.kappa1;
  const double G = pr.G1;
  const double c = 2.0 * pr.E1 * pr.E1 * G;  // shared scale of damping and phase
  const double ap = k2 + G * G * (q + y) * (q + y);
  const double am = k2 + G * G * (q - y) * (q - y);
  const double inv = 1.0 / (ap * am);
  const double R = c * G * y * y * inv;
  const double Phi = c * pr.kappa1 * y * inv;
  return std::polar(std::exp(-R), Phi);
}

PositionDensity post_kick_density_exact(const params::ProtocolParams& pr) {
  require_positive_kappa1(pr);
  if (pr.Delta1 != 0.0)
    throw std::invalid_argument(
        "post-kick state is only available for resonant first-pulse drive (Delta1 = 0)");
  const double S = pr.thermal_width();
  const double norm = 1.0 / std::sqrt(two_pi * S);
  const double k1 = pr.kappa1;
  const double k2 = k1 * k1;
  const double G = pr.G1;
  const double c = 2.0 * pr.E1 * pr.E1 * G;

  PositionDensity rho;
  rho.kind = DensityKind::post_kick_exact;
  rho.S = S;
  rho.p_mean = params::kick_momentum(pr);
  rho.p_sigma = std::sqrt(0.5 * params::momentum_variance_coeff(pr).a1);
  rho.centered = [=](double q, double y) -> std::complex<double> {
    const double ap = k2 + G * G * (q + y) * (q + y);
    const double am = k2 + G * G * (q - y) * (q - y);
    const double inv = 1.0 / (ap * am);
    const double mag = norm * std::exp(-q * q / (2.0 * S) - 0.5 * S * y * y - c * G * y * y * inv);
    const double Phi = c * k1 * y * inv;
    return {mag * std::cos(Phi), mag * std::sin(Phi)};
  };
  return rho;
}

PositionDensity post_kick_density_approx(const params::ProtocolParams& pr) {
  require_positive_kappa1(pr);
  if (std::abs(pr.G1) >= pr.kappa1)
    throw std::invalid_argument("second-order post-kick state needs |G1| < kappa1");
  const double S = pr.thermal_width();
  const double norm = 1.0 / std::sqrt(two_pi * S);
  const double a1 = params::momentum_variance_coeff(pr).a1;
  const double p0 = params::kick_momentum(pr);

  PositionDensity rho;
  rho.kind = DensityKind::post_kick_approx;
  rho.S = S;
  rho.p_mean = p0;
  rho.p_sigma = std::sqrt(0.5 * a1);
  rho.centered = [=](double q, double y) -> std::complex<double> {
    const double mag = norm * std::exp(-q * q / (2.0 * S) - 0.25 * a1 * y * y);
    return {mag * std::cos(p0 * y), mag * std::sin(p0 * y)};
  };
  return rho;
}

GaussianState post_kick_gaussian(const params::ProtocolParams& pr) {
  require_positive_kappa1(pr);
  GaussianState g;
  g.mean_q = 0.0;
  g.mean_p = params::kick_momentum(pr);
  g.var_q = pr.thermal_width();
  g.var_p = 0.5 * params::momentum_variance_coeff(pr).a1;
  return g;
}

PositionDensity displaced_thermal_density(const params::ProtocolParams& pr, double theta) {
  require_positive_kappa1(pr);
  const double S = pr.thermal_width();
  const double norm = 1.0 / std::sqrt(two_pi * S);
  const double p0 = params::kick_momentum(pr);
  const double qc = p0 * std::sin(theta);
  const double pc = p0 * std::cos(theta);

  PositionDensity rho;
  rho.kind = DensityKind::displaced_thermal;
  rho.S = S;
  rho.p_mean = pc;
  rho.p_sigma = std::sqrt(S);
  rho.centered = [=](double q, double y) -> std::complex<double> {
    const double d = q - qc;
    const double mag = norm * std::exp(-d * d / (2.0 * S) - 0.5 * S * y * y);
    return {mag * std::cos(pc * y), mag * std::sin(pc * y)};
  };
  return rho;
}

WignerGrid wigner_from_density(const PositionDensity& rho, const GridSpec& spec) {
  if (spec.nq < 2 || spec.np < 2) throw std::invalid_argument("grid needs at least 2x2 nodes");
  WignerGrid g;
  g.q = linspace(spec.q_min, spec.q_max, spec.nq);
  g.p = linspace(spec.p_min, spec.p_max, spec.np);
  g.dq = (spec.q_max - spec.q_min) / (spec.nq - 1);
  g.dp = (spec.p_max - spec.p_min) / (spec.np - 1);
  g.w.resize(spec.nq, spec.np);

  const auto& rule = quadrature::gauss_hermite(spec.y_order);
  const int ny = rule.order;
  const double y_scale = std::sqrt(2.0 / rho.S);
  const double prefactor = y_scale / two_pi;

  Eigen::VectorXd ys(ny), wexp(ny);
  for (int k = 0; k < ny; ++k) {
    ys[k] = rule.nodes[k] * y_scale;
    wexp[k] = rule.weights[k] * std::exp(rule.nodes[k] * rule.nodes[k]);
  }
  // phase tables reused by every row
  Eigen::MatrixXd cosM(ny, spec.np), sinM(ny, spec.np);
  for (int j = 0; j < spec.np; ++j) {
    cosM.col(j) = (ys.array() * g.p[j]).cos();
    sinM.col(j) = (ys.array() * g.p[j]).sin();
  }

  std::vector<double> row_imag(spec.nq, 0.0);
  parallel_rows(spec.nq, [&](int begin, int end) {
    Eigen::VectorXd wce(ny), wso(ny), re(spec.np), im(spec.np);
    for (int i = begin; i < end; ++i) {
      const double qi = g.q[i];
      for (int k = 0; k < ny; ++k) {
        const std::complex<double> r = rho.centered(qi, ys[k]);
        wce[k] = wexp[k] * r.real();
        wso[k] = wexp[k] * r.imag();
      }
      re.noalias() = cosM.transpose() * wce + sinM.transpose() * wso;
      im.noalias() = cosM.transpose() * wso - sinM.transpose() * wce;
      g.w.row(i) = (prefactor * re).transpose();
      row_imag[i] = prefactor * im.cwiseAbs().maxCoeff();
    }
  });

  const double w_max = g.w.cwiseAbs().maxCoeff();
  const double im_max = *std::max_element(row_imag.begin(), row_imag.end());
  g.imag_residual = w_max > 0.0 ? im_max / w_max : 0.0;
  finalize_mass(g, spec.enforce_mass, spec.mass_tolerance);
  return g;
}

WignerGrid wigner_from_gaussian(const GaussianState& s, const GridSpec& spec) {
  if (!(s.var_q > 0.0) || !(s.var_p > 0.0))
    throw std::invalid_argument("Gaussian state variances must be positive");
  WignerGrid g;
  g.q = linspace(spec.q_min, spec.q_max, spec.nq);
  g.p = linspace(spec.p_min, spec.p_max, spec.np);
  g.dq = (spec.q_max - spec.q_min) / (spec.nq - 1);
  g.dp = (spec.p_max - spec.p_min) / (spec.np - 1);
  Eigen::VectorXd gq =
      (-(g.q.array() - s.mean_q).square() / (2.0 * s.var_q)).exp() / std::sqrt(two_pi * s.var_q);
  Eigen::VectorXd gp =
      (-(g.p.array() - s.mean_p).square() / (2.0 * s.var_p)).exp() / std::sqrt(two_pi * s.var_p);
  g.w = gq * gp.transpose();
  g.imag_residual = 0.0;
  finalize_mass(g, spec.enforce_mass, spec.mass_tolerance);
  return g;
}

double sample_bicubic(const WignerGrid& w, double q, double p) {
  const int nq = static_cast<int>(w.q.size());
  const int np = static_cast<int>(w.p.size());
  const double u = (q - w.q[0]) / w.dq;
  const double v = (p - w.p[0]) / w.dp;
  const int i0 = static_cast<int>(std::floor(u));
  const int j0 = static_cast<int>(std::floor(v));
  if (i0 < -2 || i0 > nq || j0 < -2 || j0 > np) return 0.0;
  double wu[4], wv[4];
  catmull_rom_weights(u - i0, wu);
  catmull_rom_weights(v - j0, wv);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int i = i0 - 1 + a;
    if (i < 0 || i >= nq) continue;
    double row = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int j = j0 - 1 + b;
      if (j < 0 || j >= np) continue;
      row += wv[b] * w.w(i, j);
    }
    acc += wu[a] * row;
  }
  return acc;
}

WignerGrid rotate_phase_space(const WignerGrid& w, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation angle must be finite");
  WignerGrid out;
  out.q = w.q;
  out.p = w.p;
  out.dq = w.dq;
  out.dp = w.dp;
  out.w.resize(w.w.rows(), w.w.cols());
  out.imag_residual = w.imag_residual;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const int nq = static_cast<int>(w.q.size());
  const int np = static_cast<int>(w.p.size());
  parallel_rows(nq, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const double qi = w.q[i];
      for (int j = 0; j < np; ++j) {
        const double pj = w.p[j];
        out.w(i, j) = sample_bicubic(w, qi * c - pj * s, pj * c + qi * s);
      }
    }
  });
  finalize_mass(out, false, 0.0);  // rotation reports, construction enforces
  return out;
}

GaussianState rotate_phase_space(const GaussianState& g, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation angle must be finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  GaussianState out;
  out.mean_q = g.mean_q * c + g.mean_p * s;
  out.mean_p = g.mean_p * c - g.mean_q * s;
  // the cross term (var_p - var_q) sin cos is dropped: the type carries none,
  // and the protocol's states are isotropic to the order kept
  out.var_q = g.var_q * c * c + g.var_p * s * s;
  out.var_p = g.var_p * c * c + g.var_q * s * s;
  return out;
}

PositionDensity density_from_wigner(const WignerGrid& w) {
  auto grid = std::make_shared<WignerGrid>(w);
  const GridMoments m = moments(w);
  PositionDensity rho;
  rho.kind = DensityKind::gridded;
  rho.S = std::max(m.var_p, 1e-12);
  rho.p_mean = m.mean_p;
  rho.p_sigma = std::sqrt(std::max(m.var_p, 1e-12));
  rho.centered = [grid](double q, double y) -> std::complex<double> {
    const int nq = static_cast<int>(grid->q.size());
    const int np = static_cast<int>(grid->p.size());
    const double u = (q - grid->q[0]) / grid->dq;
    const int i0 = static_cast<int>(std::floor(u));
    if (i0 < -2 || i0 > nq) return {0.0, 0.0};
    double wu[4];
    catmull_rom_weights(u - i0, wu);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(np);
    for (int a = 0; a < 4; ++a) {
      const int i = i0 - 1 + a;
      if (i < 0 || i >= nq) continue;
      row += wu[a] * grid->w.row(i).transpose();
    }
    const Eigen::ArrayXd phase = grid->p.array() * y;
    const double re = (row.array() * phase.cos()).sum() * grid->dp;
    const double im = (row.array() * phase.sin()).sum() * grid->dp;
    return {re, im};
  };
  return rho;
}

GridMoments moments(const WignerGrid& w) {
  GridMoments m;
  const double cell = w.dq * w.dp;
  m.mass = w.w.sum() * cell;
  if (m.mass == 0.0) return m;
  const Eigen::VectorXd over_p = w.w.rowwise().sum() * cell;  // marginal in q
  const Eigen::VectorXd over_q = w.w.colwise().sum().transpose() * cell;
  m.mean_q = over_p.dot(w.q) / m.mass;
  m.mean_p = over_q.dot(w.p) / m.mass;
  m.var_q = over_p.dot((w.q.array() - m.mean_q).square().matrix()) / m.mass;
  m.var_p = over_q.dot((w.p.array() - m.mean_p).square().matrix()) / m.mass;
  return m;
}

void write_wigner_csv(const WignerGrid& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable line endings
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "q,p,w\n";
  const int nq = static_cast<int>(w.q.size());
  const int np = static_cast<int>(w.p.size());
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < np; ++j)
      out << io::format_double(w.q[i]) << ',' << io::format_double(w.p[j]) << ','
          << io::format_double(w.w(i, j)) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace optokick::phasespace
