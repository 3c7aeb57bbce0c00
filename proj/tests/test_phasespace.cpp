#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "optokick/params.hpp"
#include "optokick/phasespace.hpp"
#include "support/ode_oracle.hpp"

using namespace optokick;
using phasespace::GridSpec;
using phasespace::WignerGrid;

namespace {

constexpr double two_pi = 2.0 * M_PI;

// reference operating point: 10 MHz resonator, 1 pg mass, 0.1 pN per photon
params::ProtocolParams reference_point() {
  params::ProtocolParams p;
  p.kappa1 = p.kappa2 = 1.0;
  p.Delta2 = 20.0;
  p.G1 = p.G2 = 2.746989425323e-2;
  p.E1 = 1.0;
  p.E2 = 1000.0;
  p.t1 = p.t2 = 5.0;
  p.omega_m = 2.0 * M_PI * 1e-2;
  p.gamma_m = p.omega_m / 1e6;
  p.n_bar = 1e4;
  p.tau = 2.0 * M_PI / p.omega_m;
  return p;
}

// stronger kick at modest occupation; cheap grids resolve it
params::ProtocolParams strong_kick_point() {
  params::ProtocolParams p;
  p.kappa1 = 1.0;
  p.kappa2 = 1.0;
  p.G1 = 0.25;
  p.E1 = 2.0;
  p.n_bar = 4.0;
  return p;
}

double thermal_rho(double S, double q, double y) {
  return std::exp(-q * q / (2.0 * S) - 0.5 * S * y * y) / std::sqrt(two_pi * S);
}

double thermal_wigner(double S, double q, double p) {
  return std::exp(-(q * q + p * p) / (2.0 * S)) / (two_pi * S);
}

double max_rel_to_peak(const WignerGrid& a, const WignerGrid& b) {
  return (a.w - b.w).cwiseAbs().maxCoeff() / a.w.cwiseAbs().maxCoeff();
}

// 3-node grid whose center lands exactly on (q, p)
GridSpec pinhole(double q, double p) {
  GridSpec s;
  s.q_min = q - 0.5;
  s.q_max = q + 0.5;
  s.p_min = p - 0.5;
  s.p_max = p + 0.5;
  s.nq = s.np = 3;
  s.y_order = 96;
  s.enforce_mass = false;
  return s;
}

}  // namespace

TEST_CASE("thermal density closed form") {
  const double n_bar = 3.5;
  const double S = 1.0 + 2.0 * n_bar;
  const auto rho = phasespace::thermal_density(n_bar);
  CHECK(rho.kind == phasespace::DensityKind::thermal);
  CHECK(rho.S == S);
  CHECK(rho.p_mean == 0.0);
  CHECK(rho.p_sigma == doctest::Approx(std::sqrt(S)).epsilon(1e-14));
  for (double q : {0.0, 0.4, -2.1})
    for (double y : {0.0, 0.15, -0.6}) {
      const auto v = rho.centered(q, y);
      CHECK(v.real() == doctest::Approx(thermal_rho(S, q, y)).epsilon(1e-14));
      CHECK(v.imag() == 0.0);
    }
  // trace over the diagonal is one (Simpson over the support)
  const int n = 4000;
  const double L = 8.0 * std::sqrt(S), h = 2.0 * L / n;
  double tr = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double q = -L + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    tr += w * rho.centered(q, 0.0).real();
  }
  tr *= h / 3.0;
  CHECK(tr == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(phasespace::thermal_density(-0.1), std::domain_error);
}

TEST_CASE("cavity amplitude closed form and limits") {
  // resonant buildup from vacuum: alpha = (E/kappa)(1 - e^{-kappa t})
  const double a5 = phasespace::cavity_amplitude(0.0, 5.0, 2.0, 1.0, 0.0, 0.5).real();
  CHECK(a5 == doctest::Approx(2.0 * (1.0 - std::exp(-5.0))).epsilon(1e-14));
  CHECK(phasespace::cavity_amplitude(0.7, 0.0, 2.0, 1.0, 0.3, 0.5) == std::complex<double>(0.0));

  // asymptotic sentinel equals E / (kappa + i(Delta - G q))
  const double inf = std::numeric_limits<double>::infinity();
  const auto ainf = phasespace::cavity_amplitude(1.5, inf, 2.0, 0.8, 1.1, 0.4);
  const std::complex<double> lambda(0.8, 1.1 - 0.4 * 1.5);
  CHECK(std::abs(ainf - 2.0 / lambda) < 1e-15);
  // long but finite drive converges to the sentinel
  const auto along = phasespace::cavity_amplitude(1.5, 80.0, 2.0, 0.8, 1.1, 0.4);
  CHECK(std::abs(along - ainf) < 1e-14);

  CHECK_THROWS_AS(phasespace::cavity_amplitude(0.0, -1.0, 1.0, 1.0, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(phasespace::cavity_amplitude(0.0, inf, 1.0, 0.0, 0.5, 0.0),
                  std::invalid_argument);
}

TEST_CASE("cavity amplitude against an integrated equation of motion") {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> uq(-5.0, 5.0), ut(0.3, 8.0), ue(0.2, 3.0),
      uk(0.15, 2.5), ud(-3.0, 3.0), ug(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double q = uq(gen), t = ut(gen), E = ue(gen), k = uk(gen), D = ud(gen), G = ug(gen);
    const auto closed = phasespace::cavity_amplitude(q, t, E, k, D, G);
    const auto stepped = oracle::cavity_amplitude_rk4(q, t, E, k, D, G);
    CHECK(std::abs(closed - stepped) <= 1e-9 * std::max(1.0, std::abs(stepped)));
  }
}

TEST_CASE("pulse kick factor") {
  auto pr = strong_kick_point();
  CHECK(phasespace::post_kick_factor(pr, 0.7, 0.0) == std::complex<double>(1.0));
  for (double q : {0.0, 0.8, -1.7})
    for (double y : {0.1, -0.45, 1.2}) {
      const auto f = phasespace::post_kick_factor(pr, q, y);
      // hand-evaluated damping and phase
      const double k2 = pr.kappa1 * pr.kappa1;
      const double ap = k2 + pr.G1 * pr.G1 * (q + y) * (q + y);
      const double am = k2 + pr.G1 * pr.G1 * (q - y) * (q - y);
      const double c = 2.0 * pr.E1 * pr.E1 * pr.G1 / (ap * am);
      const auto want = std::polar(std::exp(-c * pr.G1 * y * y), c * pr.kappa1 * y);
      CHECK(std::abs(f - want) < 1e-15);
      // hermiticity and contractivity
      CHECK(std::abs(f - std::conj(phasespace::post_kick_factor(pr, q, -y))) < 1e-16);
      CHECK(std::abs(f) <= 1.0);
    }
  pr.Delta1 = 0.3;
  CHECK_THROWS_AS(phasespace::post_kick_factor(pr, 0.0, 0.1), std::invalid_argument);
  pr.Delta1 = 0.0;
  pr.kappa1 = 0.0;
  CHECK_THROWS_AS(phasespace::post_kick_factor(pr, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("post-kick density against its second-order form") {
  const auto pr = reference_point();
  const double S = pr.thermal_width();
  const auto exact = phasespace::post_kick_density_exact(pr);
  const auto approx = phasespace::post_kick_density_approx(pr);
  CHECK(exact.kind == phasespace::DensityKind::post_kick_exact);
  CHECK(approx.kind == phasespace::DensityKind::post_kick_approx);
  CHECK(exact.p_mean == doctest::Approx(params::kick_momentum(pr)).epsilon(1e-14));

  // the coupling is weak here, so the second-order state tracks the exact one
  // pointwise across the thermal support
  double worst = 0.0;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const double q = 0.3 * i * std::sqrt(S);
      const double y = 0.3 * j / std::sqrt(S);
      const auto e = exact.centered(q, y);
      const auto a = approx.centered(q, y);
      worst = std::max(worst, std::abs(e - a) / std::abs(e));
    }
  CHECK(worst < 1e-2);

  // diagonal carries no kick imprint: it is the thermal profile exactly
  for (double q : {0.0, 50.0, -140.0}) {
    const auto d = exact.centered(q, 0.0);
    CHECK(d.real() == doctest::Approx(thermal_rho(S, q, 0.0)).epsilon(1e-14));
    CHECK(d.imag() == 0.0);
  }

  // hermiticity of the full matrix addressing, rho(x, x') = conj(rho(x', x))
  std::mt19937 gen(777);
  std::uniform_real_distribution<double> u(-2.0 * std::sqrt(S), 2.0 * std::sqrt(S));
  for (int i = 0; i < 100; ++i) {
    const double x = u(gen), xp = u(gen);
    const auto lhs = exact(x, xp);
    const auto rhs = std::conj(exact(xp, x));
    CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(lhs));
  }

  // switching the pump off reduces the state to thermal
  auto off = pr;
  off.E1 = 0.0;
  const auto idle = phasespace::post_kick_density_exact(off);
  for (double q : {0.0, 30.0, -80.0})
    for (double y : {0.0, 0.002, -0.005}) {
      const auto v = idle.centered(q, y);
      CHECK(v.real() == doctest::Approx(thermal_rho(S, q, y)).epsilon(1e-13));
      CHECK(v.imag() == 0.0);
    }

  auto tight = pr;
  tight.G1 = 1.5 * tight.kappa1;
  CHECK_THROWS_AS(phasespace::post_kick_density_approx(tight), std::invalid_argument);
}

TEST_CASE("gaussian summary of the kicked state") {
  const auto pr = strong_kick_point();
  const auto g = phasespace::post_kick_gaussian(pr);
  CHECK(g.mean_q == 0.0);
  CHECK(g.mean_p == doctest::Approx(params::kick_momentum(pr)).epsilon(1e-14));
  CHECK(g.var_q == doctest::Approx(pr.thermal_width()).epsilon(1e-14));
  CHECK(g.var_p ==
        doctest::Approx(0.5 * params::momentum_variance_coeff(pr).a1).epsilon(1e-14));
}

TEST_CASE("displaced thermal image of free evolution") {
  const auto pr = strong_kick_point();
  const double S = pr.thermal_width();
  const double p0 = params::kick_momentum(pr);
  const double theta = 0.8;
  const auto rho = phasespace::displaced_thermal_density(pr, theta);
  CHECK(rho.kind == phasespace::DensityKind::displaced_thermal);

  const double qc = p0 * std::sin(theta), pc = p0 * std::cos(theta);
  for (double q : {0.0, 1.3, -2.0})
    for (double y : {0.0, 0.2, -0.5}) {
      const auto v = rho.centered(q, y);
      const double mag = thermal_rho(S, q - qc, y);
      CHECK(std::abs(v - mag * std::polar(1.0, pc * y)) < 1e-15);
    }

  const auto w = phasespace::wigner_from_density(rho, phasespace::default_grid(S));
  const auto m = phasespace::moments(w);
  CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(m.mean_q == doctest::Approx(qc).epsilon(1e-6));
  CHECK(m.mean_p == doctest::Approx(pc).epsilon(1e-6));
  CHECK(m.var_q == doctest::Approx(S).epsilon(5e-3));
  CHECK(m.var_p == doctest::Approx(S).epsilon(5e-3));
}

TEST_CASE("wigner grid of a thermal state matches the analytic profile") {
  const double n_bar = 3.0, S = 7.0;
  const auto w =
      phasespace::wigner_from_density(phasespace::thermal_density(n_bar), phasespace::default_grid(S));
  CHECK(w.mass_defect < 1e-7);
  CHECK(w.imag_residual < 1e-12);
  const double peak = 1.0 / (two_pi * S);
  double worst = 0.0;
  for (int i = 0; i < w.q.size(); i += 7)
    for (int j = 0; j < w.p.size(); j += 7)
      worst = std::max(worst, std::abs(w.w(i, j) - thermal_wigner(S, w.q[i], w.p[j])));
  CHECK(worst / peak < 1e-8);
  const auto m = phasespace::moments(w);
  CHECK(std::abs(m.mean_q) < 1e-9);
  CHECK(std::abs(m.mean_p) < 1e-9);
  CHECK(m.var_q == doctest::Approx(S).epsilon(1e-6));
  CHECK(m.var_p == doctest::Approx(S).epsilon(1e-6));
}

TEST_CASE("wigner values of the kicked state at pinned points") {
  const auto pr = reference_point();
  const auto rho = phasespace::post_kick_density_exact(pr);
  // independently integrated transform values at hand-picked (q, p) nodes
  const struct {
    double q, p, w;
  } pin[] = {
      {0.0, 0.0, 7.957348086254e-06},
      {10.0, 0.05, 7.937481232965e-06},
      {100.0, -0.1, 6.197265738419e-06},
      {0.0, 0.2, 7.957344500836e-06},
  };
  for (const auto& t : pin) {
    const auto w = phasespace::wigner_from_density(rho, pinhole(t.q, t.p));
    CHECK(w.w(1, 1) == doctest::Approx(t.w).epsilon(1e-9));
  }
  // thermal closed form at the origin, W(0,0) = 1 / (2 pi S)
  const auto wt = phasespace::wigner_from_density(phasespace::thermal_density(1.0), pinhole(0, 0));
  CHECK(wt.w(1, 1) == doctest::Approx(5.305164769730e-02).epsilon(1e-11));
}

TEST_CASE("wigner grid of the kicked state: mass, realness, first moment") {
  const auto pr = reference_point();
  const auto w = phasespace::wigner_from_density(phasespace::post_kick_density_exact(pr),
                                                 phasespace::default_grid(pr.thermal_width()));
  CHECK(w.mass_defect < 1e-6);
  CHECK(w.imag_residual < 1e-10);
  const auto m = phasespace::moments(w);
  // the kick shifts the mean momentum well below the weak-coupling value
  // 2 E1^2 G1 / kappa1^3; the grid must reproduce the exact first moment
  CHECK(m.mean_p == doctest::Approx(8.6361559665e-3).epsilon(1e-5));
  CHECK(std::abs(m.mean_q) < 1e-6);
  CHECK(m.var_q == doctest::Approx(pr.thermal_width()).epsilon(5e-3));
}

TEST_CASE("second-order state equals its gaussian summary on the grid") {
  params::ProtocolParams pr;
  pr.kappa1 = 1.2;
  pr.G1 = 0.2;
  pr.E1 = 2.0;
  pr.n_bar = 2.0;
  const auto grid = GridSpec::square(16.0);
  const auto wa = phasespace::wigner_from_density(phasespace::post_kick_density_approx(pr), grid);
  const auto wg = phasespace::wigner_from_gaussian(phasespace::post_kick_gaussian(pr), grid);
  CHECK(max_rel_to_peak(wa, wg) < 1e-8);
  CHECK(wa.mass_defect < 1e-6);
  CHECK(wg.mass_defect < 1e-6);
}

TEST_CASE("grid rotation identities") {
  phasespace::GaussianState g;
  g.mean_q = 0.4;
  g.mean_p = 1.2;
  g.var_q = g.var_p = 5.0;
  const auto spec = phasespace::default_grid(5.0);
  const auto w = phasespace::wigner_from_gaussian(g, spec);

  // zero and full-turn rotations reproduce the grid
  CHECK(max_rel_to_peak(phasespace::rotate_phase_space(w, 0.0), w) < 1e-13);
  CHECK(max_rel_to_peak(phasespace::rotate_phase_space(w, two_pi), w) < 1e-8);

  // two quarter steps cost at most twice one half step
  const auto analytic = [&](double th) {
    return phasespace::wigner_from_gaussian(phasespace::rotate_phase_space(g, th), spec);
  };
  const auto direct = phasespace::rotate_phase_space(w, 1.8);
  const auto composed =
      phasespace::rotate_phase_space(phasespace::rotate_phase_space(w, 0.9), 0.9);
  const double e_single = max_rel_to_peak(direct, analytic(1.8));
  const double e_comp = max_rel_to_peak(composed, analytic(1.8));
  CHECK(e_single < 1e-5);
  CHECK(e_comp <= 2.0 * e_single + 1e-14);

  // forward then backward lands on the start within interpolation error
  const auto back = phasespace::rotate_phase_space(direct, -1.8);
  CHECK(max_rel_to_peak(back, w) < 1e-5);
  CHECK(direct.mass_defect < 1e-6);

  CHECK_THROWS_AS(phasespace::rotate_phase_space(w, std::nan("")), std::invalid_argument);
}

TEST_CASE("gaussian summary rotation") {
  phasespace::GaussianState g;
  g.mean_q = 1.0;
  g.mean_p = -0.5;
  g.var_q = 2.0;
  g.var_p = 6.0;
  const double th = 0.7, c = std::cos(th), s = std::sin(th);
  const auto r = phasespace::rotate_phase_space(g, th);
  CHECK(r.mean_q == doctest::Approx(g.mean_q * c + g.mean_p * s).epsilon(1e-15));
  CHECK(r.mean_p == doctest::Approx(g.mean_p * c - g.mean_q * s).epsilon(1e-15));
  CHECK(r.var_q == doctest::Approx(g.var_q * c * c + g.var_p * s * s).epsilon(1e-15));
  CHECK(r.var_p == doctest::Approx(g.var_p * c * c + g.var_q * s * s).epsilon(1e-15));

  // isotropic states compose exactly
  g.var_p = g.var_q;
  const auto one = phasespace::rotate_phase_space(g, 1.1);
  const auto two = phasespace::rotate_phase_space(phasespace::rotate_phase_space(g, 0.4), 0.7);
  CHECK(two.mean_q == doctest::Approx(one.mean_q).epsilon(1e-14));
  CHECK(two.mean_p == doctest::Approx(one.mean_p).epsilon(1e-14));
  CHECK(two.var_q == doctest::Approx(one.var_q).epsilon(1e-14));
}

TEST_CASE("gridded density round trip") {
  const auto rho = phasespace::thermal_density(1.0);  // S = 3
  const auto w = phasespace::wigner_from_density(rho, phasespace::default_grid(3.0));
  const auto back = phasespace::density_from_wigner(w);
  CHECK(back.kind == phasespace::DensityKind::gridded);
  CHECK(back.S == doctest::Approx(3.0).epsilon(1e-3));

  const double peak = rho.centered(0.0, 0.0).real();
  double worst = 0.0;
  for (double q : {0.0, 0.7, -1.9, 3.0})
    for (double y : {0.0, 0.3, -0.8, 1.4})
      worst = std::max(worst, std::abs(back.centered(q, y) - rho.centered(q, y)));
  CHECK(worst < 1e-6 * peak);

  // hermiticity survives the grid representation exactly
  for (double q : {0.2, -1.1})
    for (double y : {0.4, -0.9}) {
      const auto d = back.centered(q, -y) - std::conj(back.centered(q, y));
      CHECK(std::abs(d) < 1e-16);
    }

  // a thermal state is rotation invariant through the whole pipeline
  const auto rot = phasespace::rotate_phase_space(w, 1.1);
  const auto back2 = phasespace::density_from_wigner(rot);
  worst = 0.0;
  for (double q : {0.0, 0.7, -1.9, 3.0})
    for (double y : {0.0, 0.3, -0.8, 1.4})
      worst = std::max(worst, std::abs(back2.centered(q, y) - rho.centered(q, y)));
  CHECK(worst < 1e-6 * peak);
}

TEST_CASE("grid refuses a state it cannot hold") {
  const auto rho = phasespace::thermal_density(4.0);  // S = 9
  auto small = GridSpec::square(4.0, 128);
  CHECK_THROWS_WITH_AS(phasespace::wigner_from_density(rho, small),
                       doctest::Contains("mass defect"), std::runtime_error);
  small.enforce_mass = false;
  const auto w = phasespace::wigner_from_density(rho, small);
  CHECK(w.mass_defect > 1e-2);

  auto degenerate = GridSpec::square(4.0, 1);
  CHECK_THROWS_AS(phasespace::wigner_from_density(rho, degenerate), std::invalid_argument);
}

TEST_CASE("grid geometry helpers") {
  const auto d = phasespace::default_grid(4.0);
  CHECK(d.q_min == doctest::Approx(-12.0));
  CHECK(d.q_max == doctest::Approx(12.0));
  CHECK(d.p_min == doctest::Approx(-12.0));
  CHECK(d.nq == 512);
  CHECK(d.np == 512);
  const auto s = GridSpec::square(3.0, 64);
  CHECK(s.q_min == -3.0);
  CHECK(s.p_max == 3.0);
  CHECK(s.nq == 64);
}

TEST_CASE("bicubic sampling hits nodes and respects extents") {
  phasespace::GaussianState g;
  g.var_q = g.var_p = 2.0;
  const auto w = phasespace::wigner_from_gaussian(g, GridSpec::square(10.0, 65));
  for (int i : {0, 7, 32, 64})
    for (int j : {0, 13, 32, 64})
      CHECK(phasespace::sample_bicubic(w, w.q[i], w.p[j]) ==
            doctest::Approx(w.w(i, j)).epsilon(1e-12));
  CHECK(phasespace::sample_bicubic(w, 25.0, 0.0) == 0.0);
  CHECK(phasespace::sample_bicubic(w, 0.0, -31.0) == 0.0);
}

TEST_CASE("wigner csv is stable") {
  const auto rho = phasespace::thermal_density(0.5);
  auto spec = GridSpec::square(5.0, 8);
  spec.enforce_mass = false;
  const auto w = phasespace::wigner_from_density(rho, spec);
  const auto path =
      (std::filesystem::temp_directory_path() / "optokick_wigner_test.csv").string();
  phasespace::write_wigner_csv(w, path);
  std::ostringstream first;
  first << std::ifstream(path).rdbuf();
  phasespace::write_wigner_csv(w, path);
  std::ostringstream second;
  second << std::ifstream(path).rdbuf();
  const std::string text = first.str();
  CHECK(text == second.str());
  CHECK(text.substr(0, 6) == "q,p,w\n");
  CHECK(std::count(text.begin(), text.end(), '\n') == 65);
  std::filesystem::remove(path);
}
