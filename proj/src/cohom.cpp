#include "hamrep/cohom.hpp"

#include <cmath>
#include <complex>

#include "hamrep/fft.hpp"

namespace hamrep {

double denom_lower_bound(long n) {
  if (n == 0) throw ArgumentError("denom_lower_bound: n must be nonzero");
  const double an = static_cast<double>(std::labs(n));
  return 4.0 / (2.0 * std::sqrt(2.0) * an + 1.0);
}

namespace {

inline void two_prod(double a, double b, double& hi, double& lo) {
  hi = a * b;
  lo = std::fma(a, b, -hi);
}

// sqrt(2) as an unevaluated double-double.
inline void sqrt2_dd(double& hi, double& lo) {
  hi = std::sqrt(2.0);
  const double r = std::fma(hi, hi, -2.0);  // hi^2 - 2, exact
  lo = -r / (2.0 * hi);
}

}  // namespace

double unit_circle_gap(long n) {
  if (n == 0) throw ArgumentError("unit_circle_gap: n must be nonzero");
  const double an = static_cast<double>(std::labs(n));
  double s_hi, s_lo;
  sqrt2_dd(s_hi, s_lo);
  double p_hi, p_lo;
  two_prod(s_hi, an, p_hi, p_lo);
  const double frac_hi = p_hi - std::floor(p_hi);  // exact: p_hi < 2^53
  double t = frac_hi + (p_lo + s_lo * an);
  t -= std::floor(t);
  const double lambda = std::min(t, 1.0 - t);  // distance of sqrt(2)|n| to Z
  return 2.0 * std::fabs(std::sin(kPi * lambda));
}

GridFunction spectral_shift(const GridFunction& g, double shift) {
  const GridSpec& spec = g.spec();
  if (spec.dim() < 1 || spec.axes[0].kind != AxisKind::Periodic)
    throw ArgumentError("spectral_shift: axis 0 must be periodic");
  const size_t n = spec.axes[0].n;
  size_t inner = g.size() / n;
  const double freq = 2.0 * kPi / spec.axes[0].length();
  std::vector<double> out(g.size());
  std::vector<std::complex<double>> line(n);
  const auto& in = g.values();
  for (size_t i = 0; i < inner; ++i) {
    for (size_t j = 0; j < n; ++j) line[j] = in[j * inner + i];
    fft_inplace(line, false);
    for (size_t j = 0; j < n; ++j) {
      const long m = fft_mode(j, n);
      line[j] *= std::exp(std::complex<double>(0.0, static_cast<double>(m) * freq * shift));
    }
    fft_inplace(line, true);
    for (size_t j = 0; j < n; ++j) out[j * inner + i] = line[j].real();
  }
  return GridFunction(spec, std::move(out));
}

TwistedSolution solve_twisted(const GridFunction& f) {
  const GridSpec& spec = f.spec();
  if (spec.dim() < 1 || spec.axes[0].kind != AxisKind::Periodic)
    throw ArgumentError("solve_twisted: axis 0 must be the periodic circle");
  if (std::fabs(spec.axes[0].length() - 2.0 * kPi) > 1e-12)
    throw ArgumentError("solve_twisted: circle axis must have period 2*pi");
  const size_t n = spec.axes[0].n;
  const size_t inner = f.size() / n;

  const double fsup = f.sup_norm();
  const double mean_tol = 1e-10 * std::max(1.0, fsup);
  {
    const GridFunction fm = fiber_integral(f, 0);
    if (fm.sup_norm() > mean_tol)
      throw PreconditionError("solve_twisted: nonzero fiber mean along the circle, sup " +
                              format_double(fm.sup_norm()));
  }
  if (spectral_tail_fraction(f) > 1e-8 && fsup > 0)
    throw ResolutionError("solve_twisted: top spectral decade carries > 1e-8 of mass; "
                          "grid under-resolves the input");

  // Certified denominators over the full mode range.
  const long nyq = static_cast<long>(n / 2);
  for (long m = 1; m <= nyq; ++m) {
    const double gap = unit_circle_gap(m);
    const double bound = denom_lower_bound(m);
    if (gap < 0.5 * bound)
      throw std::logic_error("small-denominator consistency violated at mode " +
                             std::to_string(m));
  }

  std::vector<double> gvals(f.size());
  std::vector<std::complex<double>> line(n);
  const auto& in = f.values();
  for (size_t i = 0; i < inner; ++i) {
    for (size_t j = 0; j < n; ++j) line[j] = in[j * inner + i];
    fft_inplace(line, false);
    line[0] = 0.0;
    for (size_t j = 1; j < n; ++j) {
      const long m = fft_mode(j, n);
      // Exactly computed complex denominator, never the lower bound.
      const std::complex<double> denom =
          std::exp(std::complex<double>(0.0, static_cast<double>(m) * kAlpha)) - 1.0;
      line[j] /= denom;
    }
    fft_inplace(line, true);
    for (size_t j = 0; j < n; ++j) gvals[j * inner + i] = line[j].real();
  }

  TwistedSolution sol;
  sol.g = GridFunction(spec, std::move(gvals));
  sol.alpha = kAlpha;
  const GridFunction resid = spectral_shift(sol.g, kAlpha) - sol.g - f;
  sol.residual_sup = resid.sup_norm();
  const double d3f = deriv_sup_norm(f, 3);
  sol.deriv_bound_ratio = d3f > 0 ? deriv_sup_norm(sol.g, 1) / d3f : 0.0;
  return sol;
}

ReportFragment verify_twisted(const GridFunction& f, const TwistedSolution& sol,
                              double residual_tol) {
  if (!(f.spec() == sol.g.spec())) throw ArgumentError("verify_twisted: grid mismatch");
  ReportFragment frag;
  frag.module = "cohom";
  const GridFunction resid = spectral_shift(sol.g, sol.alpha) - sol.g - f;
  frag.require("residual_sup", resid.sup_norm(), residual_tol);
  frag.require("stored_residual_consistent", std::fabs(resid.sup_norm() - sol.residual_sup),
               1e-12 + 1e-6 * residual_tol);
  const double d3f = deriv_sup_norm(f, 3);
  const double ratio = d3f > 0 ? deriv_sup_norm(sol.g, 1) / d3f : 0.0;
  frag.require("deriv_bound_ratio", ratio, 2.0 + 1e-9);
  return frag;
}

}  // namespace hamrep
