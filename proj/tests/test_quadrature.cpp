#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "optokick/params.hpp"
#include "optokick/phasespace.hpp"
#include "optokick/quadrature.hpp"
#include "support/faddeeva_oracle.hpp"

using namespace optokick;

namespace {

constexpr double sqrt_pi = 1.7724538509055160273;

// degree-d polynomial with the analytic integral over [a, b]
struct Poly {
  std::vector<double> c;  // c[k] x^k
  double eval(double x) const {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
  }
  double integral(double a, double b) const {
    double fa = 0.0, fb = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
      fa = fa * a + c[k] / static_cast<double>(k + 1);
      fb = fb * b + c[k] / static_cast<double>(k + 1);
    }
    return fb * b - fa * a;
  }
};

Poly random_poly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly p;
  p.c.resize(degree + 1);
  for (auto& v : p.c) v = u(rng);
  return p;
}

}  // namespace

TEST_CASE("Gauss-Hermite lowest orders are analytic") {
  const auto& r1 = quadrature::gauss_hermite(1);
  REQUIRE(r1.nodes.size() == 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(sqrt_pi).epsilon(1e-15));

  const auto& r2 = quadrature::gauss_hermite(2);
  REQUIRE(r2.nodes.size() == 2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(+1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(sqrt_pi / 2.0).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(sqrt_pi / 2.0).epsilon(1e-14));
  // symmetric by construction
  CHECK(r2.nodes[0] == -r2.nodes[1]);
  CHECK(r2.weights[0] == r2.weights[1]);
}

TEST_CASE("Gauss-Hermite moment identities") {
  for (int n : {3, 8, 64, 96, 128}) {
    const auto& r = quadrature::gauss_hermite(n);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0, m1 = 0.0, m3 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = r.nodes[i], w = r.weights[i];
      m0 += w;
      m1 += w * x;
      m2 += w * x * x;
      m3 += w * x * x * x;
      if (n >= 3) m4 += w * x * x * x * x;
    }
    CHECK(m0 == doctest::Approx(sqrt_pi).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(sqrt_pi / 2.0).epsilon(1e-13));
    if (n >= 3) CHECK(m4 == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-13));
    CHECK(std::abs(m1) < 1e-13);
    CHECK(std::abs(m3) < 1e-13);
  }
  // high-order sanity: integrate exp(-x^2) cos(2x) = sqrt(pi) exp(-1)
  const auto& r = quadrature::gauss_hermite(96);
  double acc = 0.0;
  for (int i = 0; i < 96; ++i) acc += r.weights[i] * std::cos(2.0 * r.nodes[i]);
  CHECK(acc == doctest::Approx(sqrt_pi * std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("Gauss-Hermite order bounds") {
  CHECK_THROWS(quadrature::gauss_hermite(0));
  CHECK_THROWS(quadrature::gauss_hermite(-3));
  CHECK_THROWS(quadrature::gauss_hermite(1000));
}

TEST_CASE("Gauss-Kronrod panel is exact on polynomials") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ab(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    double a = ab(rng), b = ab(rng);
    if (std::abs(b - a) < 0.1) b = a + 0.5;
    // Kronrod value exact through degree 22
    const auto p22 = random_poly(rng, 22);
    const auto iv = quadrature::detail::gk15([&](double x) { return p22.eval(x); }, a, b);
    const double truth = p22.integral(a, b);
    CHECK(iv.value == doctest::Approx(truth).epsilon(1e-12));
    // embedded Gauss rule also exact through degree 13: error estimate collapses
    const auto p13 = random_poly(rng, 13);
    const auto iv13 = quadrature::detail::gk15([&](double x) { return p13.eval(x); }, a, b);
    CHECK(iv13.error <= 1e-11 * (1.0 + std::abs(iv13.value)));
  }
}

TEST_CASE("adaptive integration on known antiderivatives") {
  // example contract: int_0^1 x^2 = 1/3 to 1e-12
  auto r = quadrature::integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-12);

  // normal mass over +-10 sigma (sigma = 2.5)
  const double sig = 2.5;
  r = quadrature::integrate_adaptive(
      [&](double x) { return std::exp(-x * x / (2 * sig * sig)) / (sig * std::sqrt(2 * M_PI)); },
      -10 * sig, 10 * sig);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0) < 1e-12);

  struct Case {
    std::function<double(double)> f;
    double a, b, truth;
    std::vector<double> breaks;
  };
  const std::vector<Case> cases = {
      {[](double x) { return std::sin(x); }, 0.0, M_PI, 2.0, {}},
      {[](double x) { return std::exp(x); }, 0.0, 1.0, std::exp(1.0) - 1.0, {}},
      {[](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, M_PI / 4.0, {}},
      {[](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 0.29, {0.3}},
      {[](double x) { return std::exp(-x); }, 0.0, 20.0, 1.0 - std::exp(-20.0), {}},
      {[](double x) { return std::cos(40.0 * x); }, 0.0, 1.0, std::sin(40.0) / 40.0, {}},
      {[](double x) { return 1.0 / ((x - 0.5) * (x - 0.5) + 1e-4); },
       0.0, 1.0, 2e2 * std::atan(50.0), {0.5}},
  };
  int covered = 0, total = 0;
  for (const auto& c : cases) {
    quadrature::AdaptiveOptions opt;
    opt.breakpoints = c.breaks;
    const auto res = quadrature::integrate_adaptive(c.f, c.a, c.b, opt);
    CHECK(res.converged);
    CHECK(std::abs(res.value - c.truth) <= std::max(1e-9 * std::abs(c.truth), 1e-12));
    ++total;
    if (std::abs(res.value - c.truth) <= std::max(res.error, 1e-15)) ++covered;
  }
  // error estimates cover the true error on random polynomials as well
  std::mt19937_64 rng(777);
  for (int t = 0; t < 23; ++t) {
    const auto p = random_poly(rng, 9 + (t % 14));
    const auto res = quadrature::integrate_adaptive([&](double x) { return p.eval(x); }, -1.5, 2.0);
    const double truth = p.integral(-1.5, 2.0);
    CHECK(res.converged);
    ++total;
    if (std::abs(res.value - truth) <= std::max(res.error, 1e-13 * (1.0 + std::abs(truth))))
      ++covered;
  }
  CHECK(covered * 100 >= total * 95);
}

TEST_CASE("adaptive integration reports non-convergence honestly") {
  quadrature::AdaptiveOptions opt;
  opt.max_intervals = 2;
  opt.rel_tol = 1e-14;
  const auto r = quadrature::integrate_adaptive(
      [](double x) { return std::cos(200.0 * x * x); }, 0.0, 3.0, opt);
  CHECK(!r.converged);
  CHECK(r.error > 0.0);
}

TEST_CASE("adaptive integration edge cases") {
  const auto r0 = quadrature::integrate_adaptive([](double x) { return x; }, 1.0, 1.0);
  CHECK(r0.value == 0.0);
  CHECK(r0.converged);
  // breakpoints outside the interval are ignored
  quadrature::AdaptiveOptions opt;
  opt.breakpoints = {-5.0, 7.0, 0.25};
  const auto r = quadrature::integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, opt);
  CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("Voigt integrals match the Faddeeva oracle") {
  REQUIRE(oracle::faddeeva_self_test() < 5e-14);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double s = std::pow(10.0, -1.0 + 3.0 * u(rng));
    const double kap = std::pow(10.0, -1.0 + 2.0 * u(rng));
    const double del = -30.0 + 60.0 * u(rng);
    // int exp(-x^2/(2 s^2)) / (kap^2 + (del - x)^2) dx = (pi/kap) Re w((del + i kap)/(s sqrt 2))
    const double truth =
        M_PI / kap * oracle::faddeeva({del / (s * std::sqrt(2.0)), kap / (s * std::sqrt(2.0))}).real();
    const double span = 13.0 * s + std::abs(del) + 13.0 * kap;
    quadrature::AdaptiveOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_intervals = 4000;
    opt.breakpoints = {0.0, del - kap, del, del + kap};
    const auto r = quadrature::integrate_adaptive(
        [&](double x) {
          const double d = del - x;
          return std::exp(-x * x / (2.0 * s * s)) / (kap * kap + d * d);
        },
        -span, span, opt);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(truth).epsilon(1e-10));
  }
}

TEST_CASE("triple integral with no kick reduces to a theta-independent Voigt") {
  const double n_bar = 20.0;
  const double S = 1.0 + 2.0 * n_bar;
  const double kap2 = 1.3, del2 = 6.0, g2 = 0.4, e2 = 3.0;
  const auto rho = phasespace::thermal_density(n_bar);
  const quadrature::LorentzKernel L{e2, kap2, del2, g2};
  const double gs = g2 * std::sqrt(2.0 * S);
  const double truth = e2 * e2 * std::sqrt(M_PI) / (gs * kap2) *
                       oracle::faddeeva({del2 / gs, kap2 / gs}).real();
  for (double theta : {0.0, 0.7, M_PI / 2.0, 2.1}) {
    const auto r = quadrature::integrate_signal_3d(rho.centered, S, std::sqrt(S), 0.0, L, theta);
    CHECK(r.converged);
    // rotation invariance of the thermal state: every angle gives the Voigt value
    CHECK(r.value == doctest::Approx(truth).epsilon(1e-3));
    CHECK(std::abs(r.value - truth) <= std::max(r.error * 4.0, 1e-9 * truth));
  }
}

TEST_CASE("triple integral is 2 pi periodic") {
  params::ProtocolParams pr;
  pr.kappa1 = 1.0;
  pr.G1 = 0.1;
  pr.E1 = 1.0;
  pr.n_bar = 5.0;
  pr.kappa2 = 1.0;
  pr.Delta2 = 3.0;
  pr.G2 = 0.5;
  pr.E2 = 10.0;
  const auto rho = phasespace::post_kick_density_exact(pr);
  const quadrature::LorentzKernel L{pr.E2, pr.kappa2, pr.Delta2, pr.G2};
  const double S = pr.thermal_width();
  const auto a = quadrature::integrate_signal_3d(rho.centered, S, rho.p_sigma, rho.p_mean, L, 0.0);
  const auto b =
      quadrature::integrate_signal_3d(rho.centered, S, rho.p_sigma, rho.p_mean, L, 2.0 * M_PI);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
}

TEST_CASE("triple integral tolerance scaling") {
  params::ProtocolParams pr;
  pr.kappa1 = 1.0;
  pr.G1 = 0.1;
  pr.E1 = 1.0;
  pr.n_bar = 5.0;
  pr.kappa2 = 1.0;
  pr.Delta2 = 3.0;
  pr.G2 = 0.5;
  pr.E2 = 10.0;
  const auto rho = phasespace::post_kick_density_exact(pr);
  const quadrature::LorentzKernel L{pr.E2, pr.kappa2, pr.Delta2, pr.G2};
  const double S = pr.thermal_width();
  quadrature::SignalIntegralSpec loose;
  loose.rel_tol = 1e-6;
  loose.p_rel_tol = 1e-7;
  quadrature::SignalIntegralSpec tight;
  tight.rel_tol = 1e-10;
  tight.p_rel_tol = 1e-11;
  const double th = 1.1;
  const auto rl =
      quadrature::integrate_signal_3d(rho.centered, S, rho.p_sigma, rho.p_mean, L, th, loose);
  const auto rt =
      quadrature::integrate_signal_3d(rho.centered, S, rho.p_sigma, rho.p_mean, L, th, tight);
  CHECK(rl.converged);
  CHECK(rt.converged);
  // the loose run's error estimate covers its deviation from the tight run
  CHECK(std::abs(rl.value - rt.value) <= std::max(4.0 * rl.error, 1e-6 * std::abs(rt.value)));
  CHECK(rt.error < std::abs(rt.value) * 1e-8);
}

TEST_CASE("triple integral with a flat kernel returns the squared drive ratio") {
  const auto rho = phasespace::thermal_density(3.0);
  const quadrature::LorentzKernel L{2.0, 4.0, 0.0, 0.0};  // G2 = 0: constant kernel
  const double S = 7.0;
  const auto r = quadrature::integrate_signal_3d(rho.centered, S, std::sqrt(S), 0.0, L, 0.3);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0 * 2.0 / (4.0 * 4.0)).epsilon(1e-8));
}
