#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slosh/eigensolve.hpp"
#include "slosh/geometry.hpp"

namespace slosh {

/// Discrete energies of one mode and the quotient form of omega.
struct EnergyReport {
  double d_energy = 0.0;     // 1/2 Phi^T K_D Phi
  double s_energy = 0.0;     // 1/2 xi^T (M_F + Bo^-1 K_F) xi
  double coupling = 0.0;     // (R Phi)^T M_F xi
  double omega_check = 0.0;  // (D + S) / |coupling|
  /// max(|D - S|, |D - omega c/2|, |S - omega c/2|) / (D + S)
  double equidistribution = 0.0;
  /// |omega_check - omega| / omega
  double omega_residual = 0.0;

  double worst() const { return std::max(equidistribution, omega_residual); }
};

/// Energies of `mode` under ops (whose Bond number must be the one the mode
/// was solved with). InvalidArgument when the coupling vanishes.
EnergyReport energy_report(const SloshingMode& mode, const OperatorSet& ops);

/// energy_report plus the equidistribution check D = S = (omega/2) <Phi, xi>
/// and omega_check = omega, both to `tol` relative. IdentityViolation
/// carries the worst residual.
EnergyReport check_energy(const SloshingMode& mode, const OperatorSet& ops, double tol = 1e-8);

struct OrthogonalityReport {
  double max_residual = 0.0;
  int checked_pairs = 0;
  /// 1-based index pairs skipped as near-degenerate (|w_j - w_k| <= 1e-6 w_k).
  std::vector<std::pair<int, int>> skipped;
};

/// max |<Phi_j, xi_k>| and |<xi_j, Phi_k>| over distinct-frequency pairs.
/// Modes must share one normalization, so the residual is absolute.
/// InvalidArgument for an empty spectrum.
OrthogonalityReport orthogonality_report(const Spectrum& spectrum, const OperatorSet& ops);
/// Same, IdentityViolation when the residual exceeds tol.
OrthogonalityReport check_orthogonality(const Spectrum& spectrum, const OperatorSet& ops, double tol = 1e-8);

struct MonotonicityVerdict {
  double omega_shallow = 0.0;
  double omega_deep = 0.0;
  bool holds = false;
};

/// Fundamental frequencies of two containers over the same free surface.
/// InvalidArgument unless the containers share shape, in-plane size and
/// resolution and shallow.depth <= deep.depth. holds is
/// omega_1(shallow) <= omega_1(deep) + 1e-10.
MonotonicityVerdict monotonicity_verdict(const ContainerSpec& shallow, const ContainerSpec& deep, BondNumber bond,
                                         int layers);
/// Same, IdentityViolation when the ordering fails.
MonotonicityVerdict check_monotonicity(const ContainerSpec& shallow, const ContainerSpec& deep, BondNumber bond,
                                       int layers);

struct YoungLaplaceReport {
  double bond = 0.0;
  /// Smallest eigenvalue of K_F + Bo M_F by inverse iteration.
  double smallest_eigenvalue = 0.0;
  /// Bo times the smallest eigenvalue of M_F, a lower bound since K_F >= 0.
  double lower_bound = 0.0;
  /// Every LDL^T pivot of K_F + Bo M_F is positive.
  bool positive_definite = false;
};

/// Discrete linearized meniscus operator K_F + Bo M_F is positive definite,
/// so s = 0 is its only null solution. InvalidArgument unless Bo is finite
/// and positive; IdentityViolation when a nonpositive eigenvalue is found.
YoungLaplaceReport young_laplace_check(const OperatorSet& ops, double bond);

struct HighSpot {
  int node = -1;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double elevation = 0.0;  // signed xi at the node
  bool on_boundary = false;
};

/// Node of maximal |xi|. InvalidArgument for an all-zero xi,
/// DimensionMismatch when xi does not match the surface.
HighSpot high_spot(const SloshingMode& mode, const SurfaceMesh& surface);

struct ModalTrajectory {
  std::vector<double> times;
  std::vector<double> energy;
  double delta = 0.0;
  /// max |E(t) - E(0)| / E(0)
  double drift = 0.0;
};

/// E(t) = D[Phi cos(wt + delta)] + S[xi sin(wt + delta)] on the given
/// strictly increasing time grid.
ModalTrajectory modal_trajectory(const SloshingMode& mode, const OperatorSet& ops, double delta,
                                 std::span<const double> times);
/// `samples` equally spaced times covering one period 2 pi / omega.
std::vector<double> period_grid(double omega, int samples);

/// One line of a verification report.
struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string ref;
  std::string detail;
};

/// `CHECK <name> <PASS|FAIL> residual=<v> ref=<id>`
std::string format_check(const CheckResult& check);

enum class Fault { None, SignFlip };

struct SuiteOptions {
  int modes = 5;
  /// Depth of the comparison container for the monotonicity check.
  std::optional<double> compare_depth;
  /// Large finite Bond number compared against Bo = infinity.
  double steklov_bond = 1e8;
  std::vector<double> young_laplace_bonds{0.1, 1.0, 10.0};
  /// Seed for the random zero-mean data of the reciprocity check.
  std::uint64_t seed = 0;
  /// Test hook: corrupt the solved spectrum before checking.
  Fault fault = Fault::None;
};

/// Runs every identity check on one container at one Bond number: zero
/// means, Euler-Lagrange pairing, energy equidistribution, cross
/// orthogonality, coupled/reduced agreement, Neumann-to-Dirichlet
/// reciprocity and positivity, depth monotonicity, the Steklov
/// limit and its Rayleigh quotient, the large-Bond slope, the meniscus
/// uniqueness operator and energy conservation.
std::vector<CheckResult> run_checks(const ContainerMesh& mesh, BondNumber bond, const SuiteOptions& options);

/// Self-adjointness and positivity of the Neumann-to-Dirichlet map on
/// `samples` random zero-mean pairs (N = Neumann solve, norms in M_F):
///   asymmetry  = max |g1^T M_F R N g2 - g2^T M_F R N g1| / (|g1||R N g2| + |g2||R N g1|)
///   min_energy = min g^T M_F R N g / (|g||R N g|)
struct ReciprocityReport {
  double asymmetry = 0.0;
  double min_energy = 0.0;
};
ReciprocityReport reciprocity_report(const NeumannSolver& neumann, std::uint64_t seed, int samples = 4);

/// Flips the sign of xi on x < 0 for the second mode (no-op on smaller
/// spectra). Used to exercise the failure path of the checks.
void inject_sign_flip(Spectrum& spectrum, const SurfaceMesh& surface);

}  // namespace slosh
