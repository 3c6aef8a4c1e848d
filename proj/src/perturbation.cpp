#include "slosh/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "slosh/analytic.hpp"
#include "slosh/errors.hpp"

namespace slosh {

namespace {

constexpr double kMinOverlap = 0.9;
constexpr double kClusterGap = 5e-3;

double mass_inner(const VectorXd& a, const VectorXd& b, const SparseMatrix& mass) { return a.dot(mass * b); }

double normalized_overlap(const VectorXd& a, const VectorXd& b, const SparseMatrix& mass) {
  const double na = std::sqrt(mass_inner(a, a, mass));
  const double nb = std::sqrt(mass_inner(b, b, mass));
  return std::abs(mass_inner(a, b, mass)) / (na * nb);
}

// Fraction of ref (in the M_F norm) captured by span{candidates}.
double subspace_overlap(const VectorXd& ref, const std::vector<const VectorXd*>& candidates,
                        const SparseMatrix& mass) {
  const auto n = static_cast<Eigen::Index>(candidates.size());
  MatrixXd gram(n, n);
  VectorXd rhs(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    rhs[a] = mass_inner(*candidates[a], ref, mass);
    for (Eigen::Index b = 0; b < n; ++b) gram(a, b) = mass_inner(*candidates[a], *candidates[b], mass);
  }
  const VectorXd coeff = gram.ldlt().solve(rhs);
  const double captured = rhs.dot(coeff) / mass_inner(ref, ref, mass);
  return std::sqrt(std::clamp(captured, 0.0, 1.0));
}

std::vector<std::size_t> cluster_of(const Spectrum& s, std::size_t i) {
  std::vector<std::size_t> members;
  const double w = s.modes[i].omega;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (std::abs(s.modes[j].omega - w) <= kClusterGap * w) members.push_back(j);
  }
  return members;
}

void validate_epsilons(std::span<const double> eps) {
  if (eps.size() < 2) throw InvalidArgument("finite differences need at least two eps values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw InvalidArgument("eps values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw InvalidArgument("eps values must be strictly decreasing");
  }
}

}  // namespace

void ensure_simple(const Spectrum& spectrum, std::size_t index, double rel_gap) {
  if (index >= spectrum.size()) throw InvalidArgument("mode index out of range");
  const double w = spectrum.modes[index].omega;
  auto too_close = [&](std::size_t j) { return std::abs(spectrum.modes[j].omega - w) <= rel_gap * w; };
  if ((index > 0 && too_close(index - 1)) || (index + 1 < spectrum.size() && too_close(index + 1))) {
    throw NotSimple("mode " + std::to_string(index + 1) + " is not a simple eigenvalue");
  }
}

double slope_formula(const SloshingMode& mode0, const OperatorSet& ops) {
  if (!ops.bond().is_infinite()) throw InvalidArgument("slope formula needs the Bo = infinity mode");
  const VectorXd phi_f = ops.trace_of(mode0.phi);
  const double gradient = phi_f.dot(ops.surface_stiffness() * phi_f);
  const double mass = phi_f.dot(ops.surface_mass() * phi_f);
  if (!(mass > 0.0)) throw InvalidArgument("mode has zero surface trace");
  return 0.5 * mode0.omega * gradient / mass;
}

double slope_formula(const Spectrum& steklov, std::size_t index, const OperatorSet& ops) {
  ensure_simple(steklov, index);
  return slope_formula(steklov.modes[index], ops);
}

SlopeEstimate richardson_slope(const std::function<double(double)>& omega_of_eps, std::span<const double> eps,
                               DifferenceScheme scheme) {
  validate_epsilons(eps);
  SlopeEstimate est;
  est.epsilons.assign(eps.begin(), eps.end());
  const double base = scheme == DifferenceScheme::OneSided ? omega_of_eps(0.0) : 0.0;
  std::vector<double> t;
  for (double e : eps) {
    if (scheme == DifferenceScheme::OneSided) {
      est.quotients.push_back((omega_of_eps(e) - base) / e);
      t.push_back(e);
    } else {
      est.quotients.push_back((omega_of_eps(e) - omega_of_eps(-e)) / (2.0 * e));
      t.push_back(e * e);
    }
  }
  // Neville's scheme for the interpolating polynomial in t evaluated at 0.
  std::vector<double> p = est.quotients;
  const std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      p[i] = (t[i + level] * p[i] - t[i] * p[i + 1]) / (t[i + level] - t[i]);
    }
  }
  est.slope = p[0];
  const double d0 = std::abs(est.quotients[0] - est.slope);
  const double d1 = std::abs(est.quotients[1] - est.slope);
  est.order = (d0 > 0.0 && d1 > 0.0) ? std::log(d0 / d1) / std::log(eps[0] / eps[1])
                                     : std::numeric_limits<double>::quiet_NaN();
  return est;
}

SlopeEstimate slope_fd_cylinder(int n, int m, double h_over_a, std::span<const double> eps) {
  return richardson_slope([&](double e) { return analytic::cylinder_omega(n, m, h_over_a, e); }, eps,
                          DifferenceScheme::Central);
}

SlopeEstimate slope_fd(const ReducedSolver& solver, const Spectrum& steklov, std::size_t index,
                       std::span<const double> eps) {
  if (!steklov.bond.is_infinite()) throw InvalidArgument("reference spectrum must be solved with Bo = infinity");
  if (index >= steklov.size()) throw InvalidArgument("mode index out of range");
  const OperatorSet& ops = solver.neumann().operators();
  const SloshingMode& ref = steklov.modes[index];
  const int available = ops.surface_dofs() - 1;
  const int k = std::min(available, static_cast<int>(index) + 4);
  auto omega_of_eps = [&](double e) {
    if (e == 0.0) return ref.omega;
    const Spectrum s = solver.solve(BondNumber::finite(1.0 / e), k);
    double best = -1.0;
    double omega = 0.0;
    for (const auto& mode : s.modes) {
      const double o = normalized_overlap(mode.xi, ref.xi, ops.surface_mass());
      if (o > best) {
        best = o;
        omega = mode.omega;
      }
    }
    if (best < kMinOverlap) {
      throw ModeTrackingFailure("mode " + std::to_string(index + 1) + " lost at eps = " + std::to_string(e) +
                                " (overlap " + std::to_string(best) + ")");
    }
    return omega;
  };
  return richardson_slope(omega_of_eps, eps, DifferenceScheme::OneSided);
}

PerturbationReport perturbation_report(const ReducedSolver& solver, const Spectrum& steklov, std::size_t index,
                                       std::span<const double> eps) {
  PerturbationReport report;
  report.mode_index = index;
  report.slope_formula = slope_formula(steklov, index, solver.neumann().operators().with_bond(BondNumber::infinite()));
  report.omega0 = steklov.modes[index].omega;
  const SlopeEstimate fd = slope_fd(solver, steklov, index, eps);
  report.slope_fd = fd.slope;
  report.fd_order = fd.order;
  report.epsilon_values = fd.epsilons;
  report.rel_error = std::abs(report.slope_formula - fd.slope) / std::abs(fd.slope);
  return report;
}

SweepResult bond_sweep(const ReducedSolver& solver, std::span<const BondNumber> bonds, int k) {
  if (bonds.empty()) throw InvalidArgument("Bond sweep needs at least one Bond number");
  const OperatorSet& ops = solver.neumann().operators();
  const SparseMatrix& mass = ops.surface_mass();
  const int available = ops.surface_dofs() - 1;
  if (k < 1 || k > available) throw InvalidArgument("invalid mode count for Bond sweep");
  const int extra = std::min(available, k + 4);

  SweepResult result;
  result.bonds.assign(bonds.begin(), bonds.end());
  std::stable_sort(result.bonds.begin(), result.bonds.end(),
                   [](const BondNumber& a, const BondNumber& b) { return a.inverse() > b.inverse(); });

  const Spectrum reference = solver.solve(BondNumber::infinite(), extra);
  std::vector<std::vector<double>> omega(result.bonds.size(), std::vector<double>(k));
  for (std::size_t b = 0; b < result.bonds.size(); ++b) {
    const BondNumber bond = result.bonds[b];
    const Spectrum s = bond.is_infinite() ? reference : solver.solve(bond, extra);
    for (int j = 0; j < k; ++j) {
      const VectorXd& ref_xi = reference.modes[j].xi;
      std::size_t best = 0;
      double best_overlap = -1.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double o = normalized_overlap(s.modes[i].xi, ref_xi, mass);
        if (o > best_overlap) {
          best_overlap = o;
          best = i;
        }
      }
      const auto candidates = cluster_of(s, best);
      const auto ref_cluster = cluster_of(reference, static_cast<std::size_t>(j));
      const auto rank = static_cast<std::size_t>(
          std::find(ref_cluster.begin(), ref_cluster.end(), static_cast<std::size_t>(j)) - ref_cluster.begin());
      const std::size_t chosen = candidates[std::min(rank, candidates.size() - 1)];
      std::vector<const VectorXd*> span;
      for (std::size_t i : candidates) span.push_back(&s.modes[i].xi);
      const double overlap = subspace_overlap(ref_xi, span, mass);
      result.min_overlap = std::min(result.min_overlap, overlap);
      if (overlap < kMinOverlap) {
        throw ModeTrackingFailure("mode " + std::to_string(j + 1) + " lost at Bo = " + bond.to_string() +
                                  " (overlap " + std::to_string(overlap) + ")");
      }
      omega[b][j] = s.modes[chosen].omega;
      result.entries.push_back({bond, j + 1, s.modes[chosen].omega, overlap});
    }
  }
  for (int j = 0; j < k; ++j) {
    for (std::size_t b = 1; b < result.bonds.size(); ++b) {
      if (omega[b][j] > omega[b - 1][j] * (1.0 + 1e-12)) result.monotone = false;
    }
  }
  return result;
}

}  // namespace slosh
