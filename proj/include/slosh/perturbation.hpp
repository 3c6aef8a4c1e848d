#pragma once

#include <functional>
#include <span>
#include <vector>

#include "slosh/eigensolve.hpp"

namespace slosh {

/// Relative gap below which two frequencies are treated as one multiple
/// eigenvalue.
inline constexpr double kSimplicityGap = 1e-6;

/// Throws NotSimple unless mode `index` (0-based) is separated from its
/// neighbours in the spectrum by more than `rel_gap` relative.
void ensure_simple(const Spectrum& spectrum, std::size_t index, double rel_gap = kSimplicityGap);

/// First-order large-Bond slope d omega / d eps at eps = 1/Bo = 0:
///   (omega0 / 2) * (phi_F^T K_F phi_F) / (phi_F^T M_F phi_F),  phi_F = R Phi0.
/// `mode0` must come from a solve with Bo = infinity (InvalidArgument
/// otherwise).
double slope_formula(const SloshingMode& mode0, const OperatorSet& ops);
/// Same, after checking that mode `index` is simple.
double slope_formula(const Spectrum& steklov, std::size_t index, const OperatorSet& ops);

enum class DifferenceScheme {
  OneSided,  // (omega(eps) - omega(0)) / eps, error expansion in eps
  Central,   // (omega(eps) - omega(-eps)) / (2 eps), error expansion in eps^2
};

struct SlopeEstimate {
  double slope = 0.0;
  /// Observed order of the raw difference quotients against the
  /// extrapolated value (NaN when it cannot be measured).
  double order = 0.0;
  std::vector<double> epsilons;
  std::vector<double> quotients;
};

/// Difference quotients of omega(eps) at each eps, Richardson-extrapolated
/// to eps = 0 (Neville). eps must hold >= 2 strictly positive, strictly
/// decreasing values (InvalidArgument otherwise).
SlopeEstimate richardson_slope(const std::function<double(double)>& omega_of_eps, std::span<const double> eps,
                               DifferenceScheme scheme);

/// Central-difference slope of the closed-form cylinder dispersion.
SlopeEstimate slope_fd_cylinder(int n, int m, double h_over_a, std::span<const double> eps);

/// One-sided slope of the finite-element frequency. The mode is followed
/// across eps by maximal overlap <xi(eps), xi(0)>_{M_F}; ModeTrackingFailure
/// if the best normalized overlap drops below 0.9.
SlopeEstimate slope_fd(const ReducedSolver& solver, const Spectrum& steklov, std::size_t index,
                       std::span<const double> eps);

inline const std::vector<double> kDefaultEpsilonLadder{1e-2, 1e-3, 1e-4};

struct PerturbationReport {
  std::size_t mode_index = 0;  // 0-based
  double omega0 = 0.0;
  double slope_formula = 0.0;
  double slope_fd = 0.0;
  double fd_order = 0.0;
  std::vector<double> epsilon_values;
  double rel_error = 0.0;
};

/// Formula and finite-difference slopes for one simple Steklov mode.
PerturbationReport perturbation_report(const ReducedSolver& solver, const Spectrum& steklov, std::size_t index,
                                       std::span<const double> eps = kDefaultEpsilonLadder);

/// omega_j(Bo) table across a Bond sweep.
struct SweepEntry {
  BondNumber bond = BondNumber::infinite();
  int mode_index = 0;  // 1-based
  double omega = 0.0;
  double tracking_overlap = 0.0;
};

struct SweepResult {
  std::vector<BondNumber> bonds;  // sorted by increasing Bo, infinity last
  std::vector<SweepEntry> entries;
  /// omega_j(Bo) non-increasing in Bo for every tracked mode.
  bool monotone = true;
  double min_overlap = 1.0;
};

/// Solves each Bond number against a shared Neumann-to-Dirichlet operator
/// and tracks the first k modes of the Bo = infinity spectrum through the
/// sweep. Near-degenerate modes are tracked as a cluster: the overlap is the
/// M_F-norm fraction of xi(inf) captured by the cluster span.
/// ModeTrackingFailure when any overlap falls below 0.9.
SweepResult bond_sweep(const ReducedSolver& solver, std::span<const BondNumber> bonds, int k);

}  // namespace slosh
