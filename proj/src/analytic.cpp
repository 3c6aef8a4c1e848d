#include "slosh/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "slosh/errors.hpp"

namespace slosh::analytic {

namespace {

constexpr double kSeriesLimit = 8.0;

double bessel_series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's algorithm: recur J_{k-1} = (2k/x) J_k - J_{k+1} downward from a
// start index well above max(n, x), normalized by J_0 + 2 sum J_{2k} = 1.
double bessel_miller(int n, double x) {
  const int top = std::max(n, static_cast<int>(x));
  const int start = 2 * ((top + 20 + static_cast<int>(std::sqrt(60.0 * top))) / 2);
  double next = 0.0;   // J_{k+1}
  double cur = 1e-30;  // J_k
  double norm = 0.0;
  double wanted = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = (2.0 * k / x) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 == n) wanted = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      wanted *= 1e-250;
    }
  }
  norm += cur;  // J_0
  return wanted / norm;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) throw DomainError("Bessel order must be non-negative");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("Bessel argument must be finite and non-negative");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= kSeriesLimit) return bessel_series(n, x);
  return bessel_miller(n, x);
}

double bessel_j_derivative(int n, double x) {
  if (n == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

double bessel_jp_root(int n, int m) {
  if (n < 0) throw DomainError("Bessel order must be non-negative");
  if (m < 1) throw DomainError("root index must be at least 1");
  // J_n' keeps one sign on (0, j'_{n,1}) and j'_{n,1} > n, so the scan can
  // start at n/2. Consecutive roots are roughly pi apart; a step of 0.05
  // cannot step over one.
  const double step = 0.05;
  double a = std::max(0.05, 0.5 * n);
  double fa = bessel_j_derivative(n, a);
  const double limit = n + std::numbers::pi * (m + 2) + 10.0;
  int found = 0;
  while (a < limit) {
    const double b = a + step;
    const double fb = bessel_j_derivative(n, b);
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      if (++found == m) {
        double lo = a, hi = b, flo = fa;
        if (fa == 0.0) return a;
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = bessel_j_derivative(n, mid);
          if (fm == 0.0) return mid;
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        const double root = 0.5 * (lo + hi);
        if (std::abs(bessel_j_derivative(n, root)) > 1e-12) {
          throw ConvergenceFailure("root of J_" + std::to_string(n) + "' did not converge");
        }
        return root;
      }
    }
    a = b;
    fa = fb;
  }
  throw ConvergenceFailure("could not bracket root " + std::to_string(m) + " of J_" + std::to_string(n) + "'");
}

DispersionPoint cylinder_dispersion(int n, int m, double h_over_a, BondNumber bond) {
  if (!(h_over_a > 0.0)) throw InvalidArgument("depth ratio must be positive");
  DispersionPoint p;
  p.n = n;
  p.m = m;
  p.h_over_a = h_over_a;
  p.bond = bond;
  p.z = bessel_jp_root(n, m);
  p.lambda_sq = p.z * std::tanh(p.z * h_over_a);
  p.omega_sq = bond.is_infinite() ? p.lambda_sq : p.lambda_sq * (1.0 + p.z * p.z / bond.value());
  return p;
}

double cylinder_omega(int n, int m, double h_over_a, double eps) {
  const double z = bessel_jp_root(n, m);
  const double factor = 1.0 + z * z * eps;
  if (!(factor > 0.0)) throw DomainError("eps below -1/z^2 gives imaginary frequency");
  return std::sqrt(z * std::tanh(z * h_over_a) * factor);
}

BoxDispersionPoint box_dispersion(int p, int q, double lx, double ly, double h, BondNumber bond) {
  if (p == 0 && q == 0) throw InvalidArgument("(p, q) = (0, 0) is the trivial constant mode");
  if (p < 0 || q < 0) throw InvalidArgument("box mode indices must be non-negative");
  if (!(lx > 0.0 && ly > 0.0 && h > 0.0)) throw InvalidArgument("box dimensions must be positive");
  BoxDispersionPoint point;
  point.p = p;
  point.q = q;
  point.bond = bond;
  const double kx = p / lx, ky = q / ly;
  point.wavenumber = std::numbers::pi * std::sqrt(kx * kx + ky * ky);
  const double k = point.wavenumber;
  point.lambda_sq = k * std::tanh(k * h);
  point.omega_sq = point.lambda_sq * (1.0 + k * k * bond.inverse());
  return point;
}

BoxDispersionPoint box_fundamental(double lx, double ly, double h, BondNumber bond) {
  BoxDispersionPoint best;
  bool have = false;
  for (int p = 0; p <= 2; ++p) {
    for (int q = 0; q <= 2; ++q) {
      if (p == 0 && q == 0) continue;
      const auto point = box_dispersion(p, q, lx, ly, h, bond);
      if (!have || point.omega_sq < best.omega_sq) {
        best = point;
        have = true;
      }
    }
  }
  return best;
}

}  // namespace slosh::analytic
