#include "slosh/eigensolve.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "slosh/errors.hpp"
#include "slosh/parallel.hpp"

namespace slosh {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

constexpr double kPairingTolerance = 1e-8;
constexpr double kNeumannResidualTolerance = 1e-10;

void factorize_spd(Ldlt& ldlt, const SparseMatrix& matrix, const char* what) {
  ldlt.compute(matrix);
  if (ldlt.info() != Eigen::Success) throw SolverFailure(std::string("factorization of ") + what + " failed");
  if (!(ldlt.vectorD().minCoeff() > 0.0)) {
    throw SingularOperator(std::string(what) + " is not positive definite");
  }
}

void check_mode_count(int k, int surface_dofs) {
  if (k < 1) throw InvalidArgument("mode count must be at least 1");
  if (k > surface_dofs - 1) {
    throw InvalidArgument("requested " + std::to_string(k) + " modes but only " + std::to_string(surface_dofs - 1) +
                          " zero-mean surface directions exist");
  }
}

MatrixXd symmetrized(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// G = M_F B^-1 M_F; exactly M_F when Bo is infinite.
MatrixXd kinetic_surface_metric(const OperatorSet& ops) {
  const MatrixXd mass = MatrixXd(ops.surface_mass());
  if (ops.bond().is_infinite()) return mass;
  Ldlt ldlt;
  factorize_spd(ldlt, ops.surface_energy_matrix(), "surface energy matrix");
  MatrixXd g = mass * ldlt.solve(mass);
  return symmetrized(g);
}

void validate_spectrum(const Spectrum& spectrum, const OperatorSet& ops) {
  for (std::size_t i = 0; i < spectrum.modes.size(); ++i) {
    const auto r = mode_residuals(spectrum.modes[i], ops);
    if (!(r.kinematic <= kPairingTolerance && r.dynamic <= kPairingTolerance)) {
      throw SolverFailure("mode " + std::to_string(i + 1) + " residuals " + std::to_string(r.kinematic) + ", " +
                          std::to_string(r.dynamic) + " exceed tolerance");
    }
  }
}

}  // namespace

ModeResiduals mode_residuals(const SloshingMode& mode, const OperatorSet& ops) {
  const VectorXd kphi = ops.volume_stiffness() * mode.phi;
  const VectorXd cxi = ops.lift(ops.surface_mass() * mode.xi);
  const VectorXd bxi = ops.surface_energy_matrix() * mode.xi;
  const VectorXd cphi = ops.surface_mass() * ops.trace_of(mode.phi);
  auto rel = [](const VectorXd& lhs, const VectorXd& rhs) {
    const double scale = lhs.norm() + rhs.norm();
    return scale > 0.0 ? (lhs - rhs).norm() / scale : 0.0;
  };
  return {rel(kphi, mode.omega * cxi), rel(bxi, mode.omega * cphi)};
}

void normalize_mode(SloshingMode& mode, const OperatorSet& ops) {
  const double c = ops.coupling(mode.phi, mode.xi);
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("mode has non-positive coupling " + std::to_string(c));
  }
  const double s = 1.0 / std::sqrt(c);
  mode.phi *= s;
  mode.xi *= s;
  Eigen::Index imax = 0;
  mode.xi.cwiseAbs().maxCoeff(&imax);
  if (mode.xi[imax] < 0.0) {
    mode.phi = -mode.phi;
    mode.xi = -mode.xi;
  }
}

// ---------------------------------------------------------------------------
// Neumann-to-Dirichlet route

struct NeumannSolver::Factor {
  Ldlt ldlt;
};

NeumannSolver::NeumannSolver(const OperatorSet& ops) : ops_(ops), factor_(std::make_unique<Factor>()) {
  pinned_ = ops.volume_dofs() - 1;
  SparseMatrix k = ops.volume_stiffness();
  const int p = pinned_;
  k.prune([p](Eigen::Index r, Eigen::Index c, double) { return r != p && c != p; });
  k.coeffRef(p, p) = 1.0;
  k.makeCompressed();
  factorize_spd(factor_->ldlt, k, "pinned volume stiffness");
}

NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

VectorXd NeumannSolver::solve_pinned(const VectorXd& rhs) const {
  VectorXd b = rhs;
  b[pinned_] = 0.0;
  return factor_->ldlt.solve(b);
}

VectorXd NeumannSolver::solve(const VectorXd& g) const {
  if (g.size() != ops_.surface_dofs()) throw DimensionMismatch("Neumann data has wrong size");
  const VectorXd& w = ops_.surface_weights();
  const double mean = w.dot(g);
  const double scale = w.cwiseAbs().dot(g.cwiseAbs());
  if (std::abs(mean) > 1e-10 * scale) {
    throw IncompatibleData("Neumann data has nonzero mean " + std::to_string(mean));
  }
  const VectorXd rhs = ops_.lift(ops_.surface_mass() * g);
  VectorXd phi = solve_pinned(rhs);
  const double rhs_norm = rhs.norm();
  if (rhs_norm > 0.0) {
    const double res = (ops_.volume_stiffness() * phi - rhs).norm();
    if (res > kNeumannResidualTolerance * rhs_norm) {
      throw SolverFailure("Neumann solve residual " + std::to_string(res / rhs_norm));
    }
  }
  const double phi_mean = w.dot(ops_.trace_of(phi)) / ops_.surface_area();
  phi.array() -= phi_mean;
  return phi;
}

MatrixXd NeumannSolver::trace_operator() const {
  const int nf = ops_.surface_dofs();
  const MatrixXd mass = MatrixXd(ops_.surface_mass());
  // Column j holds R K^+ R^T M_F e_j. Individual columns are incompatible
  // data; only zero-mean combinations are used, for which the pinned solve
  // is exact.
  MatrixXd response(nf, nf);
  parallel_for(static_cast<std::size_t>(nf), [&](std::size_t j) {
    const VectorXd x = solve_pinned(ops_.lift(mass.col(static_cast<Eigen::Index>(j))));
    response.col(static_cast<Eigen::Index>(j)) = ops_.trace_of(x);
  });
  return symmetrized(mass * response);
}

ReducedSolver::ReducedSolver(const OperatorSet& ops) : neumann_(ops), trace_operator_(neumann_.trace_operator()) {}

Spectrum ReducedSolver::solve(BondNumber bond, int k) const {
  const OperatorSet ops = neumann_.operators().with_bond(bond);
  check_mode_count(k, ops.surface_dofs());
  const SparseMatrix q = MeanProjector(ops).basis();
  const SparseMatrix qt = q.transpose();
  const MatrixXd energy = symmetrized(MatrixXd(qt * ops.surface_energy_matrix() * q));
  const MatrixXd kinetic = symmetrized(qt * (trace_operator_ * q));

  // kinetic y = mu energy y with mu = 1/omega^2; the well-conditioned energy
  // matrix is the one factored.
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(kinetic, energy,
                                                            Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw SolverFailure("dense generalized eigensolver did not converge");
  const VectorXd& mu = solver.eigenvalues();
  const Eigen::Index n = mu.size();

  Spectrum spectrum;
  spectrum.bond = bond;
  spectrum.mesh_fingerprint = ops.mesh_fingerprint();
  for (int m = 0; m < k; ++m) {
    const Eigen::Index col = n - 1 - m;
    if (!(mu[col] > 1e-14 * std::abs(mu[n - 1]))) {
      throw SingularOperator("Neumann-to-Dirichlet operator is not positive definite on zero-mean data");
    }
    SloshingMode mode;
    mode.omega = 1.0 / std::sqrt(mu[col]);
    mode.xi = q * solver.eigenvectors().col(col);
    mode.phi = mode.omega * neumann_.solve(mode.xi);
    normalize_mode(mode, ops);
    spectrum.modes.push_back(std::move(mode));
  }
  validate_spectrum(spectrum, ops);
  return spectrum;
}

// ---------------------------------------------------------------------------
// Coupled route

struct CoupledSolver::Factor {
  Ldlt ldlt;                    // interior block K_II
  SparseMatrix interior_surface;  // K_IF, columns in surface order
};

CoupledSolver::CoupledSolver(const OperatorSet& ops) : ops_(ops), factor_(std::make_unique<Factor>()) {
  const int nv = ops.volume_dofs();
  const int nf = ops.surface_dofs();
  std::vector<int> surface_slot(nv, -1);
  for (int i = 0; i < nf; ++i) surface_slot[ops.trace()[i]] = i;
  interior_slot_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (surface_slot[v] < 0) {
      interior_slot_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  }
  const int ni = static_cast<int>(interior_.size());
  if (ni == 0) throw SingularOperator("mesh has no interior nodes below the free surface");

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> kii, kif, kff;
  const SparseMatrix& kd = ops.volume_stiffness();
  for (int c = 0; c < kd.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(kd, c); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int ri = interior_slot_[r], ci = interior_slot_[c];
      if (ri >= 0 && ci >= 0) {
        kii.emplace_back(ri, ci, it.value());
      } else if (ri >= 0) {
        kif.emplace_back(ri, surface_slot[c], it.value());
      } else if (ci < 0) {
        kff.emplace_back(surface_slot[r], surface_slot[c], it.value());
      }
    }
  }
  SparseMatrix kii_mat(ni, ni), kff_mat(nf, nf);
  factor_->interior_surface.resize(ni, nf);
  kii_mat.setFromTriplets(kii.begin(), kii.end());
  factor_->interior_surface.setFromTriplets(kif.begin(), kif.end());
  kff_mat.setFromTriplets(kff.begin(), kff.end());
  factorize_spd(factor_->ldlt, kii_mat, "interior volume stiffness");

  // DtN = K_FF - K_FI K_II^-1 K_IF, one interior Dirichlet solve per column.
  const SparseMatrix kfi = factor_->interior_surface.transpose();
  dtn_ = MatrixXd(kff_mat);
  parallel_for(static_cast<std::size_t>(nf), [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    const VectorXd rhs = factor_->interior_surface.col(col);
    const VectorXd x = factor_->ldlt.solve(rhs);
    dtn_.col(col) -= kfi * x;
  });
  dtn_ = symmetrized(dtn_);
}

CoupledSolver::~CoupledSolver() = default;
CoupledSolver::CoupledSolver(CoupledSolver&&) noexcept = default;
CoupledSolver& CoupledSolver::operator=(CoupledSolver&&) noexcept = default;

VectorXd CoupledSolver::harmonic_extension(const VectorXd& surface_values) const {
  const VectorXd interior = -factor_->ldlt.solve(factor_->interior_surface * surface_values);
  VectorXd phi = ops_.lift(surface_values);
  for (std::size_t i = 0; i < interior_.size(); ++i) phi[interior_[i]] = interior[static_cast<Eigen::Index>(i)];
  return phi;
}

Spectrum CoupledSolver::solve(BondNumber bond, int k) const {
  const OperatorSet ops = ops_.with_bond(bond);
  check_mode_count(k, ops.surface_dofs());
  const SparseMatrix q = MeanProjector(ops).basis();
  const SparseMatrix qt = q.transpose();

  // Eliminating xi = omega B^-1 M_F u and the interior potential leaves
  //   DtN u = omega^2 G u,  G = M_F B^-1 M_F,  u = Phi on F.
  const MatrixXd metric = symmetrized(qt * (kinetic_surface_metric(ops) * q));
  const MatrixXd stiffness = symmetrized(qt * (dtn_ * q));
  const Eigen::LLT<MatrixXd> llt(metric);
  if (llt.info() != Eigen::Success) throw SingularOperator("kinetic surface metric is not positive definite");
  const MatrixXd half = llt.matrixL().solve(stiffness);
  const MatrixXd reduced = symmetrized(llt.matrixL().solve(half.transpose()));

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) throw SolverFailure("dense symmetric eigensolver did not converge");
  const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();

  // In the reduced coordinates y = L^T Q^T u both cross constraints
  // <Phi, xi_j> = 0 and <xi, Phi_j> = 0 become y^T y_j = 0, so mode m is the
  // Rayleigh quotient minimizer on the orthogonal complement of y_1..y_{m-1}.
  std::vector<VectorXd> lower;
  Spectrum spectrum;
  spectrum.bond = bond;
  spectrum.mesh_fingerprint = ops.mesh_fingerprint();
  const bool infinite = bond.is_infinite();
  Ldlt energy_ldlt;
  if (!infinite) factorize_spd(energy_ldlt, ops.surface_energy_matrix(), "surface energy matrix");
  for (int m = 0; m < k; ++m) {
    VectorXd y = solver.eigenvectors().col(m);
    for (const auto& prev : lower) y -= prev.dot(y) * prev;
    y.normalize();
    const double lambda = y.dot(reduced * y);
    if (!(lambda > 1e-14 * scale)) {
      throw SingularOperator("volume stiffness is not positive definite on zero-mean potentials");
    }
    lower.push_back(y);

    SloshingMode mode;
    mode.omega = std::sqrt(lambda);
    const VectorXd u = q * llt.matrixU().solve(y);
    mode.phi = harmonic_extension(u);
    const VectorXd mu = ops.surface_mass() * u;
    mode.xi = infinite ? VectorXd(mode.omega * u) : VectorXd(mode.omega * energy_ldlt.solve(mu));
    normalize_mode(mode, ops);
    spectrum.modes.push_back(std::move(mode));
  }
  validate_spectrum(spectrum, ops);
  return spectrum;
}

Spectrum solve_coupled(const OperatorSet& ops, int k) {
  check_mode_count(k, ops.surface_dofs());
  return CoupledSolver(ops).solve(k);
}

Spectrum solve_reduced(const OperatorSet& ops, int k) {
  check_mode_count(k, ops.surface_dofs());
  return ReducedSolver(ops).solve(k);
}

VectorXd neumann_solve(const OperatorSet& ops, const VectorXd& g) { return NeumannSolver(ops).solve(g); }

}  // namespace slosh
