#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

#include "optokick/params.hpp"

namespace optokick::phasespace {

enum class DensityKind { thermal, post_kick_exact, post_kick_approx, displaced_thermal, gridded };

// Position-representation density matrix addressed by midpoint and offset:
// centered(q, y) = rho(q + y, q - y). Closed-form kinds carry exact evaluators;
// the gridded kind interpolates a WignerGrid row and Fourier-sums it.
// Invariants: hermiticity centered(q, -y) = conj(centered(q, y)); unit trace;
// nonnegative diagonal.
struct PositionDensity {
  DensityKind kind = DensityKind::thermal;
  double S = 1.0;        // thermal width 1 + 2 n_bar
  double p_mean = 0.0;   // momentum first moment, range hint
  double p_sigma = 1.0;  // momentum spread, range hint
  std::function<std::complex<double>(double, double)> centered;

  std::complex<double> operator()(double x, double xp) const {
    return centered(0.5 * (x + xp), 0.5 * (x - xp));
  }
};

// Zero cross-covariance by construction; the protocol's approximate states
// never develop one.
struct GaussianState {
  double mean_q = 0.0;
  double mean_p = 0.0;
  double var_q = 1.0;
  double var_p = 1.0;
};

struct GridSpec {
  double q_min = -6.0, q_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  int nq = 512;
  int np = 512;
  int y_order = 64;              // Gauss-Hermite order of the offset integral
  double mass_tolerance = 1e-6;  // construction fails beyond this defect
  bool enforce_mass = true;

  static GridSpec square(double half_width, int n = 512);
};

// state-adapted default: +-6 sqrt(1+2 n_bar) on both axes, 512 points
GridSpec default_grid(double S);

struct WignerGrid {
  Eigen::VectorXd q, p;  // uniform ascending axes
  Eigen::MatrixXd w;     // w(i, j) = W(q_i, p_j)
  double dq = 0.0, dp = 0.0;
  double imag_residual = 0.0;  // max |Im W| / max |Re W| over nodes
  double mass_defect = 0.0;    // |1 - sum(W) dq dp|
};

struct GridMoments {
  double mass = 0.0;
  double mean_q = 0.0, mean_p = 0.0;
  double var_q = 0.0, var_p = 0.0;
};

PositionDensity thermal_density(double n_bar);

// Intracavity amplitude for a resonator clamped at position q, driven from
// vacuum for a time t. Pass t = infinity for the asymptotic value.
std::complex<double> cavity_amplitude(double q, double t, double E, double kappa, double Delta,
                                      double G);

// Off-diagonal factor the first pulse imprints on the thermal state,
// exp(-R + i Phi); unity at y = 0. Requires resonant first-pulse drive.
std::complex<double> post_kick_factor(const params::ProtocolParams& pr, double q, double y);

PositionDensity post_kick_density_exact(const params::ProtocolParams& pr);
PositionDensity post_kick_density_approx(const params::ProtocolParams& pr);
GaussianState post_kick_gaussian(const params::ProtocolParams& pr);

// Free-evolution image of the approximate post-kick state: thermal profile
// displaced along q by p0 sin(theta) with momentum phase p0 cos(theta).
PositionDensity displaced_thermal_density(const params::ProtocolParams& pr, double theta);

// W(q,p) = (1/2pi) Int rho(q+y, q-y) exp(-i y p) dy on the grid nodes.
// Real part returned; the imaginary residue and mass defect are recorded.
// Throws when the mass defect exceeds spec.mass_tolerance (grid too small).
WignerGrid wigner_from_density(const PositionDensity& rho, const GridSpec& spec);
WignerGrid wigner_from_gaussian(const GaussianState& g, const GridSpec& spec);

// W'(q,p) = W(q cos - p sin, p cos + q sin), resampled by bicubic
// interpolation with zero padding outside the extents. Mass defect after
// rotation is recorded, not enforced.
WignerGrid rotate_phase_space(const WignerGrid& w, double theta);
GaussianState rotate_phase_space(const GaussianState& g, double theta);

// inverse transform: rho(q+y, q-y) = Int W(q,p) exp(i y p) dp, kind=gridded
PositionDensity density_from_wigner(const WignerGrid& w);

GridMoments moments(const WignerGrid& w);

// Catmull-Rom bicubic sample at an off-node point; zero outside the extents.
double sample_bicubic(const WignerGrid& w, double q, double p);

// q,p,w triplets in row-major order (q outer); axes recoverable from the file
void write_wigner_csv(const WignerGrid& w, const std::string& path);

}  // namespace optokick::phasespace
