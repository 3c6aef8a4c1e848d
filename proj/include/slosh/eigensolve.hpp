#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "slosh/assembly.hpp"

namespace slosh {

/// One eigentriple (omega, Phi, xi) of the linear sloshing problem with
/// surface tension. Normalized so that <Phi, xi>_{L2(F)} = 1 and the
/// largest-magnitude entry of xi is positive.
struct SloshingMode {
  double omega = 0.0;
  VectorXd phi;  // volume nodes
  VectorXd xi;   // surface nodes
};

/// Positive frequencies in ascending order; the trivial omega = 0 mode is
/// never included.
struct Spectrum {
  std::vector<SloshingMode> modes;
  BondNumber bond = BondNumber::infinite();
  std::uint64_t mesh_fingerprint = 0;

  std::size_t size() const { return modes.size(); }
  bool empty() const { return modes.empty(); }
};

/// Relative residuals of the weak equations
///   K_D Phi = omega R^T M_F xi        (kinematic condition)
///   B xi    = omega M_F R Phi         (dynamic condition, B = M_F + Bo^-1 K_F)
struct ModeResiduals {
  double kinematic = 0.0;
  double dynamic = 0.0;
};
ModeResiduals mode_residuals(const SloshingMode& mode, const OperatorSet& ops);

/// Scale (Phi, xi) to unit coupling and fix the sign convention.
/// Throws InvalidArgument when the coupling is not positive.
void normalize_mode(SloshingMode& mode, const OperatorSet& ops);

/// Interior Neumann problem K_D Phi = R^T M_F g on a factorization of K_D
/// with one pinned node (the constant nullspace removed).
class NeumannSolver {
 public:
  explicit NeumannSolver(const OperatorSet& ops);
  ~NeumannSolver();
  NeumannSolver(NeumannSolver&&) noexcept;
  NeumannSolver& operator=(NeumannSolver&&) noexcept;

  /// Requires 1^T M_F g = 0 (IncompatibleData otherwise). The returned
  /// potential has zero mean over F.
  VectorXd solve(const VectorXd& g) const;

  /// Dense T = M_F R K_D^+ R^T M_F, the surface matrix of the
  /// Neumann-to-Dirichlet map. Only its action on zero-mean vectors is
  /// meaningful. One solve per surface node, run in parallel.
  MatrixXd trace_operator() const;

  const OperatorSet& operators() const { return ops_; }

 private:
  VectorXd solve_pinned(const VectorXd& rhs) const;

  struct Factor;
  OperatorSet ops_;
  std::unique_ptr<Factor> factor_;
  int pinned_ = 0;
};

/// Surface-only formulation: (M_F + Bo^-1 K_F) xi = omega^2 T xi on zero-mean
/// xi, Phi reconstructed as omega times the Neumann solution.
/// T does not depend on Bo, so one instance serves whole Bond sweeps.
class ReducedSolver {
 public:
  explicit ReducedSolver(const OperatorSet& ops);

  Spectrum solve(BondNumber bond, int k) const;
  Spectrum solve(int k) const { return solve(neumann_.operators().bond(), k); }
  const NeumannSolver& neumann() const { return neumann_; }
  const MatrixXd& trace_operator() const { return trace_operator_; }

 private:
  NeumannSolver neumann_;
  MatrixXd trace_operator_;
};

/// Coupled formulation: the block pencil
///   [K_D 0; 0 B] (Phi; xi) = omega [0 C^T; C 0] (Phi; xi),  C = M_F R,
/// reduced by eliminating xi = omega B^-1 C Phi and the interior potential
/// (Dirichlet-to-Neumann Schur complement of K_D onto the surface nodes).
/// Higher modes are taken one at a time from the subspace satisfying the
/// cross constraints <Phi, xi_j> = 0 = <xi, Phi_j> for all lower modes.
class CoupledSolver {
 public:
  explicit CoupledSolver(const OperatorSet& ops);
  ~CoupledSolver();
  CoupledSolver(CoupledSolver&&) noexcept;
  CoupledSolver& operator=(CoupledSolver&&) noexcept;

  Spectrum solve(BondNumber bond, int k) const;
  Spectrum solve(int k) const { return solve(ops_.bond(), k); }
  /// Dirichlet-to-Neumann matrix on the surface nodes (Bo independent).
  const MatrixXd& dirichlet_to_neumann() const { return dtn_; }

 private:
  VectorXd harmonic_extension(const VectorXd& surface_values) const;

  struct Factor;
  OperatorSet ops_;
  std::unique_ptr<Factor> factor_;
  std::vector<int> interior_;       // volume indices of non-surface nodes
  std::vector<int> interior_slot_;  // volume index -> row in K_II, -1 on F
  MatrixXd dtn_;
};

Spectrum solve_coupled(const OperatorSet& ops, int k);
Spectrum solve_reduced(const OperatorSet& ops, int k);
VectorXd neumann_solve(const OperatorSet& ops, const VectorXd& g);

}  // namespace slosh
