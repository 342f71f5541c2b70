#pragma once

#include "hamrep/gridfn.hpp"
#include "hamrep/report.hpp"

namespace hamrep {

// Solution of f(t,x) = g(t+alpha,x) - g(t,x) on (R/2piZ) x (-1,1)^m with
// alpha = 2*sqrt(2)*pi.
struct TwistedSolution {
  GridFunction g;
  double alpha = kAlpha;
  double residual_sup = 0.0;
  double deriv_bound_ratio = 0.0;  // |Dg|_inf / |D^3 f|_inf
};

// Certified lower bound 4/(2*sqrt(2)|n|+1) for |e^{in alpha}-1|.
double denom_lower_bound(long n);

// |e^{in alpha}-1| = 2|sin(sqrt(2) pi n)| computed with a double-double
// reduction of sqrt(2)*n mod 1, accurate to ~1e-22 in the reduced argument.
double unit_circle_gap(long n);

// Exact shift along the periodic axis-0 in Fourier space.
GridFunction spectral_shift(const GridFunction& g, double shift);

TwistedSolution solve_twisted(const GridFunction& f);

ReportFragment verify_twisted(const GridFunction& f, const TwistedSolution& sol,
                              double residual_tol = 1e-9);

}  // namespace hamrep
