#include "slosh/assembly.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "slosh/errors.hpp"

namespace slosh {

OperatorSet::OperatorSet(SparseMatrix volume_stiffness, SparseMatrix surface_mass, SparseMatrix surface_stiffness,
                         std::vector<int> trace, BondNumber bond, std::uint64_t mesh_fingerprint)
    : bond_(bond) {
  auto data = std::make_shared<Data>();
  if (surface_mass.rows() != static_cast<Eigen::Index>(trace.size()) ||
      surface_stiffness.rows() != surface_mass.rows()) {
    throw DimensionMismatch("surface operators do not match the trace map");
  }
  data->volume_stiffness = std::move(volume_stiffness);
  data->surface_mass = std::move(surface_mass);
  data->surface_stiffness = std::move(surface_stiffness);
  data->trace = std::move(trace);
  data->fingerprint = mesh_fingerprint;
  data->weights = data->surface_mass * VectorXd::Ones(data->surface_mass.rows());
  data->area = data->weights.sum();
  data_ = std::move(data);
}

SparseMatrix OperatorSet::surface_energy_matrix() const {
  if (bond_.is_infinite()) return surface_mass();
  SparseMatrix b = surface_mass() + bond_.inverse() * surface_stiffness();
  b.prune(0.0);
  return b;
}

OperatorSet OperatorSet::with_bond(BondNumber bond) const {
  OperatorSet copy = *this;
  copy.bond_ = bond;
  return copy;
}

VectorXd OperatorSet::trace_of(const VectorXd& volume_vector) const {
  if (volume_vector.size() != volume_dofs()) throw DimensionMismatch("volume vector has wrong size");
  VectorXd out(surface_dofs());
  for (int i = 0; i < surface_dofs(); ++i) out[i] = volume_vector[data_->trace[i]];
  return out;
}

VectorXd OperatorSet::lift(const VectorXd& surface_vector) const {
  if (surface_vector.size() != surface_dofs()) throw DimensionMismatch("surface vector has wrong size");
  VectorXd out = VectorXd::Zero(volume_dofs());
  for (int i = 0; i < surface_dofs(); ++i) out[data_->trace[i]] = surface_vector[i];
  return out;
}

double OperatorSet::dirichlet_energy(const VectorXd& phi) const {
  if (phi.size() != volume_dofs()) throw DimensionMismatch("potential has wrong size");
  return 0.5 * phi.dot(volume_stiffness() * phi);
}

double OperatorSet::surface_energy(const VectorXd& xi) const {
  if (xi.size() != surface_dofs()) throw DimensionMismatch("height has wrong size");
  double e = xi.dot(surface_mass() * xi);
  if (!bond_.is_infinite()) e += bond_.inverse() * xi.dot(surface_stiffness() * xi);
  return 0.5 * e;
}

double OperatorSet::coupling(const VectorXd& phi, const VectorXd& xi) const {
  if (xi.size() != surface_dofs()) throw DimensionMismatch("height has wrong size");
  return trace_of(phi).dot(surface_mass() * xi);
}

Eigen::Matrix4d tet_stiffness(const std::array<Eigen::Vector3d, 4>& v) {
  Eigen::Matrix3d jac;
  jac.col(0) = v[1] - v[0];
  jac.col(1) = v[2] - v[0];
  jac.col(2) = v[3] - v[0];
  const double det = jac.determinant();
  if (!(det > 0.0)) throw DegenerateElement("tetrahedron Jacobian " + std::to_string(det));
  // Rows of J^-1 are the gradients of barycentric coordinates 1..3.
  const Eigen::Matrix3d inv = jac.inverse();
  Eigen::Matrix<double, 4, 3> grad;
  grad.row(1) = inv.row(0);
  grad.row(2) = inv.row(1);
  grad.row(3) = inv.row(2);
  grad.row(0) = -(grad.row(1) + grad.row(2) + grad.row(3));
  return (det / 6.0) * grad * grad.transpose();
}

Eigen::Matrix3d triangle_mass(double area) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Constant(area / 12.0);
  m.diagonal().setConstant(area / 6.0);
  return m;
}

Eigen::Matrix3d triangle_stiffness(const std::array<Eigen::Vector2d, 3>& v) {
  Eigen::Matrix2d jac;
  jac.col(0) = v[1] - v[0];
  jac.col(1) = v[2] - v[0];
  const double det = jac.determinant();
  if (!(det > 0.0)) throw DegenerateElement("triangle Jacobian " + std::to_string(det));
  const Eigen::Matrix2d inv = jac.inverse();
  Eigen::Matrix<double, 3, 2> grad;
  grad.row(1) = inv.row(0);
  grad.row(2) = inv.row(1);
  grad.row(0) = -(grad.row(1) + grad.row(2));
  return (0.5 * det) * grad * grad.transpose();
}

OperatorSet assemble(const ContainerMesh& mesh, BondNumber bond) {
  const auto& vol = mesh.volume;
  const auto& surf = mesh.surface;
  if (vol.surface_trace.size() != surf.nodes.size()) {
    throw DimensionMismatch("surface trace does not cover the surface mesh");
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> kd;
  kd.reserve(16 * vol.tets.size());
  for (const auto& t : vol.tets) {
    const std::array<Eigen::Vector3d, 4> v{vol.nodes[t[0]], vol.nodes[t[1]], vol.nodes[t[2]], vol.nodes[t[3]]};
    const Eigen::Matrix4d ke = tet_stiffness(v);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) kd.emplace_back(t[a], t[b], ke(a, b));
  }

  std::vector<Triplet> mf, kf;
  mf.reserve(9 * surf.triangles.size());
  kf.reserve(9 * surf.triangles.size());
  for (std::size_t e = 0; e < surf.triangles.size(); ++e) {
    const auto& t = surf.triangles[e];
    const std::array<Eigen::Vector2d, 3> v{surf.nodes[t[0]], surf.nodes[t[1]], surf.nodes[t[2]]};
    const Eigen::Matrix3d ke = triangle_stiffness(v);
    const Eigen::Matrix3d me = triangle_mass(surf.areas[e]);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        kf.emplace_back(t[a], t[b], ke(a, b));
        mf.emplace_back(t[a], t[b], me(a, b));
      }
    }
  }

  const int nv = vol.node_count();
  const int nf = surf.node_count();
  SparseMatrix kd_mat(nv, nv), mf_mat(nf, nf), kf_mat(nf, nf);
  kd_mat.setFromTriplets(kd.begin(), kd.end());
  mf_mat.setFromTriplets(mf.begin(), mf.end());
  kf_mat.setFromTriplets(kf.begin(), kf.end());
  // Symmetrize away the last-bit asymmetry of element kernels.
  SparseMatrix kd_t = kd_mat.transpose();
  kd_mat = 0.5 * (kd_mat + kd_t);
  SparseMatrix kf_t = kf_mat.transpose();
  kf_mat = 0.5 * (kf_mat + kf_t);
  return OperatorSet(std::move(kd_mat), std::move(mf_mat), std::move(kf_mat), vol.surface_trace, bond,
                     fingerprint(vol));
}

double surface_gradient_energy(const VectorXd& xi, const OperatorSet& ops) {
  if (xi.size() != ops.surface_dofs()) {
    throw DimensionMismatch("height vector has " + std::to_string(xi.size()) + " entries, expected " +
                            std::to_string(ops.surface_dofs()));
  }
  return xi.dot(ops.surface_stiffness() * xi);
}

MeanProjector::MeanProjector(const OperatorSet& ops) : weights_(ops.surface_weights()), area_(ops.surface_area()) {}

double MeanProjector::mean(const VectorXd& v) const {
  if (v.size() != weights_.size()) throw DimensionMismatch("vector size does not match surface mass");
  return weights_.dot(v) / area_;
}

VectorXd MeanProjector::apply(const VectorXd& v) const {
  return v.array() - mean(v);
}

SparseMatrix MeanProjector::basis() const {
  const Eigen::Index n = weights_.size();
  const double last = weights_[n - 1];
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * (n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    entries.emplace_back(i, i, 1.0);
    entries.emplace_back(n - 1, i, -weights_[i] / last);
  }
  SparseMatrix q(n, n - 1);
  q.setFromTriplets(entries.begin(), entries.end());
  return q;
}

}  // namespace slosh
