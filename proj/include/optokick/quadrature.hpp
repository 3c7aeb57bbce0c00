#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <queue>
#include <vector>

namespace optokick::quadrature {

// Physicists' convention: integrates f against exp(-x^2) on the real line.
// Nodes ascend and are exactly antisymmetric; weights sum to sqrt(pi).
struct GaussHermiteRule {
  int order = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Cached per order; thread safe. 1 <= n <= 512.
const GaussHermiteRule& gauss_hermite(int n);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long evaluations = 0;
  bool converged = false;
};

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 2000;
  // interior points the first partition must respect (poles, sharp features)
  std::vector<double> breakpoints;
};

namespace detail {

// Gauss 7 / Kronrod 15 pair on [-1, 1].
inline constexpr double gk_nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double gk_wk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr double gk_wg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct Interval {
  double a, b, value, error;
};

struct IntervalWorse {
  bool operator()(const Interval& x, const Interval& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic tie break
  }
};

template <class F>
Interval gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = gk_wk[7] * f(c);
  double gauss = gk_wg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk_nodes[i];
    const double fs = f(c - dx) + f(c + dx);
    kron += gk_wk[i] * fs;
    if (i % 2 == 1) gauss += gk_wg[i / 2] * fs;
  }
  Interval r;
  r.a = a;
  r.b = b;
  r.value = kron * h;
  r.error = std::abs((kron - gauss) * h);
  return r;
}

}  // namespace detail

// Globally adaptive bisection with a Gauss-Kronrod 7/15 pair. Never returns a
// silent wrong answer: if the budget runs out the result carries converged=false
// and the achieved error estimate.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  AdaptiveResult res;
  if (!(a < b)) {
    res.converged = (a == b);
    return res;
  }
  std::vector<double> edges;
  edges.push_back(a);
  for (double x : opt.breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<detail::Interval, std::vector<detail::Interval>, detail::IntervalWorse> heap;
  double total = 0.0, err = 0.0;
  long evals = 0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    auto iv = detail::gk15(f, edges[i], edges[i + 1]);
    evals += 15;
    total += iv.value;
    err += iv.error;
    heap.push(iv);
  }
  const auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  int n_intervals = static_cast<int>(edges.size()) - 1;
  while (err > tolerance() && n_intervals < opt.max_intervals && !heap.empty()) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval at floating-point resolution; its estimate cannot improve
      heap.push({worst.a, worst.b, worst.value, 0.0});
      err -= worst.error;
      continue;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n_intervals;
  }
  res.value = total;
  res.error = err;
  res.evaluations = evals;
  res.converged = err <= tolerance();
  return res;
}

// Probe-cavity line shape: L(x) = E2^2 / (kappa2^2 + (Delta2 - G2 x)^2), the
// mean intracavity photon number when the resonator sits at position x.
struct LorentzKernel {
  double E2 = 0.0;
  double kappa2 = 1.0;
  double Delta2 = 0.0;
  double G2 = 0.0;
  double operator()(double x) const {
    const double d = Delta2 - G2 * x;
    return E2 * E2 / (kappa2 * kappa2 + d * d);
  }
};

struct SignalIntegralSpec {
  int y_order = 96;          // Gauss-Hermite order for the off-diagonal coordinate
  double rel_tol = 1e-9;     // target relative error of the full triple integral
  double p_rel_tol = 1e-10;  // relative tolerance of each inner momentum integral
  int max_intervals_q = 600;
  int max_intervals_p = 600;
  double q_sigmas = 8.0;     // position range in units of sqrt(1+2 n_bar)
  double p_sigmas = 8.0;     // momentum range in units of the momentum spread
  bool escalate = true;      // one retry with doubled order and budgets
};

struct SignalIntegralResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = false;
  double imag_residual = 0.0;  // |imaginary part| of the reconstructed state, relative
};

// Triple integral of the rotated phase-space state against the probe Lorentzian:
//
//   n2(theta) = (1/2pi) Int dq dp dy rho(q+y, q-y) e^{-i y p} L(q cos + p sin)
//
// rho_centered(q, y) evaluates the state's position representation at the
// midpoint/offset pair; it must contain the thermal factor exp(-y^2 S / 2)
// so that Gauss-Hermite in y (weight matched to that Gaussian) applies.
// Hermiticity makes the y integral real: the even part of rho pairs with
// cos(y p) and the odd imaginary part with sin(y p); in the hot loop the
// symmetric node pairs are folded, and the orphaned odd combination is
// measured at probe points instead of being assumed away.
// Layering: y innermost (Gauss-Hermite), p adaptive with a pole seed,
// q outermost adaptive over the thermal envelope.
template <class Rho>
SignalIntegralResult integrate_signal_3d(Rho&& rho_centered, double S, double sigma_p,
                                         double p_offset, const LorentzKernel& L, double theta,
                                         const SignalIntegralSpec& spec = {}) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double Q = spec.q_sigmas * std::sqrt(S);
  const double P = spec.p_sigmas * sigma_p + std::abs(p_offset);
  const double y_scale = std::sqrt(2.0 / S);

  // q values where the y-truncation and hermiticity residuals are measured
  std::vector<double> probes = {0.0, 0.7 * std::sqrt(S), -1.3 * std::sqrt(S)};
  if (L.G2 != 0.0 && std::abs(ct) > 1e-14) {
    const double qpole = L.Delta2 / (L.G2 * ct);
    if (qpole > -Q && qpole < Q) probes.push_back(qpole);
  }

  struct Pass {
    double value = 0.0, error = 0.0;
    long evals = 0;
    bool ok = false;
    double imag = 0.0, y_rel = 0.0;
  };

  auto run = [&](int y_order, int mq, int mp, double p_rel) {
    if (y_order % 2) ++y_order;  // folding below needs the symmetric pair structure
    Pass out;
    const auto& rule = gauss_hermite(y_order);
    const int h = y_order / 2;
    // positive half of the node set; weights carry the pair fold factor 2
    Eigen::ArrayXd ys(h), w2(h), expu(h);
    for (int i = 0; i < h; ++i) {
      const double u = rule.nodes[h + i];
      ys[i] = u * y_scale;
      w2[i] = 2.0 * rule.weights[h + i];
      expu[i] = std::exp(u * u);
    }
    Eigen::ArrayXd ce(h), so(h), yp(h), cv(h), sv(h);
    long evals = 0;

    // fills ce/so for one q; returns the inner momentum integral
    auto load_row = [&](double q) {
      for (int i = 0; i < h; ++i) {
        // strip the Gaussian the weight models: residual = rho * exp(+u^2)
        const std::complex<double> r = rho_centered(q, ys[i]) * expu[i];
        ce[i] = w2[i] * r.real();
        so[i] = w2[i] * r.imag();
      }
      evals += h;
    };
    auto wigner_slice = [&]([[maybe_unused]] double q, double p) -> double {
      yp = ys * p;
      cv = yp.cos();
      sv = yp.sin();
      return (ce * cv + so * sv).sum();
    };

    auto inner_options = [&](double q, double abs_tol) {
      AdaptiveOptions popt;
      popt.rel_tol = p_rel;
      popt.abs_tol = abs_tol;
      popt.max_intervals = mp;
      if (L.G2 != 0.0 && std::abs(st) > 1e-14) {
        const double pole = (L.Delta2 - L.G2 * q * ct) / (L.G2 * st);
        if (pole > -P && pole < P) {
          popt.breakpoints.push_back(pole);
          const double w = L.kappa2 / std::abs(L.G2 * st);
          if (pole - w > -P) popt.breakpoints.push_back(pole - w);
          if (pole + w < P) popt.breakpoints.push_back(pole + w);
        }
      }
      return popt;
    };
    auto inner_integral = [&](double q, double abs_tol) {
      auto popt = inner_options(q, abs_tol);
      auto r = integrate_adaptive(
          [&](double p) { return wigner_slice(q, p) * L(q * ct + p * st); }, -P, P, popt);
      evals += r.evaluations;
      return r;
    };

    // magnitude probe fixes an absolute floor for the inner tolerance so that
    // far-tail q nodes stop immediately instead of chasing relative precision
    // on negligible contributions
    double scale = 0.0;
    double y_rel = 0.0, imag_rel = 0.0, even_scale = 0.0;
    {
      const int h_half = h / 2;
      Eigen::ArrayXd ys_l(h_half), w2_l(h_half), expu_l(h_half);
      const auto& low = gauss_hermite(y_order / 2);
      for (int i = 0; i < h_half; ++i) {
        const double u = low.nodes[h_half + i];
        ys_l[i] = u * y_scale;
        w2_l[i] = 2.0 * low.weights[h_half + i];
        expu_l[i] = std::exp(u * u);
      }
      Eigen::ArrayXd ce_l(h_half), so_l(h_half);
      for (double q : probes) {
        load_row(q);
        auto full = inner_integral(q, 0.0);
        scale = std::max(scale, std::abs(full.value));
        // same integral with half the y nodes: truncation-of-order estimate
        for (int i = 0; i < h_half; ++i) {
          const std::complex<double> r = rho_centered(q, ys_l[i]) * expu_l[i];
          ce_l[i] = w2_l[i] * r.real();
          so_l[i] = w2_l[i] * r.imag();
        }
        evals += h_half;
        auto popt = inner_options(q, 0.0);
        auto halfr = integrate_adaptive(
            [&](double p) {
              const double w =
                  (ce_l * (ys_l * p).cos() + so_l * (ys_l * p).sin()).sum();
              return w * L(q * ct + p * st);
            },
            -P, P, popt);
        evals += halfr.evaluations;
        if (std::abs(full.value) > 0.0)
          y_rel = std::max(y_rel, std::abs(full.value - halfr.value) / std::abs(full.value));
        // unfolded hermiticity residual at a representative p
        const double p_probe = p_offset + 0.5 * sigma_p;
        double w_even = 0.0, w_odd = 0.0;
        for (int i = 0; i < h; ++i) {
          const std::complex<double> rp = rho_centered(q, ys[i]) * expu[i];
          const std::complex<double> rm = rho_centered(q, -ys[i]) * expu[i];
          const double w = 0.5 * w2[i];
          const double c = std::cos(ys[i] * p_probe), s = std::sin(ys[i] * p_probe);
          w_even += w * ((rp.real() + rm.real()) * c + (rp.imag() - rm.imag()) * s);
          w_odd += w * ((rp.imag() + rm.imag()) * c - (rp.real() - rm.real()) * s);
        }
        evals += 2 * h;
        even_scale = std::max(even_scale, std::abs(w_even));
        imag_rel = std::max(imag_rel, std::abs(w_odd));
      }
    }
    const double inner_abs_tol = p_rel * scale;

    // the floor follows a slow Gaussian envelope in q: tail slices still stop
    // immediately (their true value decays twice as fast), but the integrated
    // floor is sqrt(4 pi S) * inner_abs_tol instead of the 2Q worst case
    auto q_integrand = [&](double q) -> double {
      load_row(q);
      return inner_integral(q, inner_abs_tol * std::exp(-q * q / (4.0 * S))).value;
    };

    AdaptiveOptions qopt;
    qopt.rel_tol = 0.5 * spec.rel_tol;
    qopt.abs_tol = 0.0;
    qopt.max_intervals = mq;
    qopt.breakpoints.push_back(0.0);
    if (L.G2 != 0.0 && std::abs(ct) > 1e-14) {
      const double qpole = L.Delta2 / (L.G2 * ct);
      if (qpole > -Q && qpole < Q) qopt.breakpoints.push_back(qpole);
    }
    auto outer = integrate_adaptive(q_integrand, -Q, Q, qopt);

    const double prefactor = y_scale / (2.0 * M_PI);
    out.value = prefactor * outer.value;
    out.y_rel = y_rel;
    // each inner integral errs at most max(floor(q), p_rel * |slice|); both
    // caps integrate over q to sqrt(4 pi S) * inner_abs_tol + p_rel * |value|
    out.error = prefactor * (outer.error + std::sqrt(4.0 * M_PI * S) * inner_abs_tol) +
                (p_rel + y_rel) * std::abs(out.value);
    out.evals = evals;
    out.ok = outer.converged;
    out.imag = even_scale > 0.0 ? imag_rel / even_scale : 0.0;
    return out;
  };

  Pass first = run(spec.y_order, spec.max_intervals_q, spec.max_intervals_p, spec.p_rel_tol);

  SignalIntegralResult res;
  res.value = first.value;
  res.error = first.error;
  res.evaluations = first.evals;
  res.imag_residual = first.imag;
  const double tol = spec.rel_tol * std::abs(first.value);
  res.converged = first.ok && res.error <= std::max(tol, 1e-300);

  if (!res.converged && spec.escalate) {
    Pass second = run(2 * spec.y_order, 2 * spec.max_intervals_q, 2 * spec.max_intervals_p,
                      0.1 * spec.p_rel_tol);
    res.value = second.value;
    res.error = second.error;
    res.evaluations += second.evals;
    res.imag_residual = second.imag;
    res.converged = second.ok && res.error <= spec.rel_tol * std::abs(second.value);
  }
  return res;
}

}  // namespace optokick::quadrature
