#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "slosh/bond.hpp"
#include "slosh/geometry.hpp"

namespace slosh {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// P1 finite-element operators for one container mesh at one Bond number.
///
/// Discrete energies of a potential u (volume nodes) and a height xi
/// (surface nodes):
///   D_h[u]  = 1/2 u^T K_D u
///   S_h[xi] = 1/2 xi^T (M_F + Bo^-1 K_F) xi
///   <u, xi> = (R u)^T M_F xi,   R = restriction to the surface trace.
/// The matrices are shared between copies, so with_bond() is cheap.
class OperatorSet {
 public:
  OperatorSet(SparseMatrix volume_stiffness, SparseMatrix surface_mass, SparseMatrix surface_stiffness,
              std::vector<int> trace, BondNumber bond, std::uint64_t mesh_fingerprint);

  const SparseMatrix& volume_stiffness() const { return data_->volume_stiffness; }
  const SparseMatrix& surface_mass() const { return data_->surface_mass; }
  const SparseMatrix& surface_stiffness() const { return data_->surface_stiffness; }
  const std::vector<int>& trace() const { return data_->trace; }
  const BondNumber& bond() const { return bond_; }
  std::uint64_t mesh_fingerprint() const { return data_->fingerprint; }

  int volume_dofs() const { return static_cast<int>(data_->volume_stiffness.rows()); }
  int surface_dofs() const { return static_cast<int>(data_->surface_mass.rows()); }
  /// 1^T M_F 1 = |F| for the discrete surface.
  double surface_area() const { return data_->area; }
  /// M_F 1, the lumped quadrature weights of the surface.
  const VectorXd& surface_weights() const { return data_->weights; }

  /// M_F + Bo^-1 K_F; exactly M_F when Bo is infinite.
  SparseMatrix surface_energy_matrix() const;
  OperatorSet with_bond(BondNumber bond) const;

  /// R u: potential values on the free surface.
  VectorXd trace_of(const VectorXd& volume_vector) const;
  /// R^T g: scatter surface values into a volume vector.
  VectorXd lift(const VectorXd& surface_vector) const;

  double dirichlet_energy(const VectorXd& phi) const;
  double surface_energy(const VectorXd& xi) const;
  /// <phi, xi>_{L2(F)} computed as (R phi)^T M_F xi.
  double coupling(const VectorXd& phi, const VectorXd& xi) const;

 private:
  struct Data {
    SparseMatrix volume_stiffness;
    SparseMatrix surface_mass;
    SparseMatrix surface_stiffness;
    std::vector<int> trace;
    std::uint64_t fingerprint = 0;
    double area = 0.0;
    VectorXd weights;
  };
  std::shared_ptr<const Data> data_;
  BondNumber bond_;
};

/// Assemble K_D (tets), M_F and K_F (surface triangles) with exact
/// element integrals for products of linears.
OperatorSet assemble(const ContainerMesh& mesh, BondNumber bond);

// Element kernels, exposed for testing.
Eigen::Matrix4d tet_stiffness(const std::array<Eigen::Vector3d, 4>& vertices);
Eigen::Matrix3d triangle_mass(double area);
Eigen::Matrix3d triangle_stiffness(const std::array<Eigen::Vector2d, 3>& vertices);

/// xi^T K_F xi = integral over F of |grad_F xi_h|^2 for the P1 interpolant.
double surface_gradient_energy(const VectorXd& xi, const OperatorSet& ops);

/// M_F-orthogonal projector onto the zero-mean subspace {v : 1^T M_F v = 0}.
class MeanProjector {
 public:
  explicit MeanProjector(const OperatorSet& ops);

  /// 1^T M_F v / |F|.
  double mean(const VectorXd& v) const;
  VectorXd apply(const VectorXd& v) const;
  /// Sparse basis Q (n x n-1) of the zero-mean subspace:
  /// column i is e_i - (w_i / w_last) e_last with w = M_F 1.
  SparseMatrix basis() const;

 private:
  VectorXd weights_;
  double area_;
};

}  // namespace slosh
