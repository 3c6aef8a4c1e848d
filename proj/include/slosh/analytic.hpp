#pragma once

#include "slosh/bond.hpp"

namespace slosh::analytic {

/// J_n(x) for integer order n >= 0 and real x >= 0 (absolute error below
/// 1e-12 for x <= 50). Ascending series for small x, Miller's backward
/// recurrence otherwise. Throws DomainError for negative n or x.
double bessel_j(int n, double x);

/// d/dx J_n(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2, with J_0' = -J_1.
double bessel_j_derivative(int n, double x);

/// m-th positive root of J_n'. For n = 0 the root x = 0 (the constant mode)
/// is skipped, so (0, 1) returns 3.8317...
/// Throws DomainError for n < 0 or m < 1, ConvergenceFailure if the sign
/// scan cannot bracket the root.
double bessel_jp_root(int n, int m);

/// Cylinder eigendata for container radius a, depth h:
///   lambda^2 = z tanh(z h/a),   omega^2 = lambda^2 (1 + z^2 / Bo).
struct DispersionPoint {
  int n = 0;
  int m = 1;
  double z = 0.0;
  double lambda_sq = 0.0;
  double omega_sq = 0.0;
  double h_over_a = 1.0;
  BondNumber bond = BondNumber::infinite();
};

DispersionPoint cylinder_dispersion(int n, int m, double h_over_a, BondNumber bond);

/// omega as an analytic function of eps = 1/Bo for one cylinder mode. Valid
/// for eps > -1/z^2, which lets finite differences be centred at eps = 0.
double cylinder_omega(int n, int m, double h_over_a, double eps);

/// Rectangular box [0,lx] x [0,ly] x [-h,0] mode cos(p pi x/lx) cos(q pi y/ly):
///   k = pi sqrt((p/lx)^2 + (q/ly)^2),  omega^2 = k tanh(k h) (1 + k^2/Bo).
/// Not part of the cylinder closed form; derived here by separation of
/// variables to validate the solver on rectangles.
struct BoxDispersionPoint {
  int p = 0;
  int q = 0;
  double wavenumber = 0.0;
  double lambda_sq = 0.0;
  double omega_sq = 0.0;
  BondNumber bond = BondNumber::infinite();
};

/// Throws InvalidArgument for (p, q) = (0, 0) or non-positive lengths.
BoxDispersionPoint box_dispersion(int p, int q, double lx, double ly, double h, BondNumber bond);

/// Smallest box frequency over all (p, q) != (0, 0).
BoxDispersionPoint box_fundamental(double lx, double ly, double h, BondNumber bond);

}  // namespace slosh::analytic
