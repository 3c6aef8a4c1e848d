#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "slosh/assembly.hpp"
#include "slosh/errors.hpp"

using namespace slosh;

namespace {

// Gradients of the barycentric functions from the vertex interpolation
// matrix [1 x y (z)]: row k of the inverse is the coefficient vector of
// basis function k.
Eigen::Matrix4d oracle_tet_stiffness(const std::array<Eigen::Vector3d, 4>& v) {
  Eigen::Matrix4d p;
  for (int i = 0; i < 4; ++i) p.row(i) << 1.0, v[i].x(), v[i].y(), v[i].z();
  const Eigen::Matrix4d c = p.fullPivLu().inverse();
  const double volume = std::abs(p.determinant()) / 6.0;
  Eigen::Matrix<double, 4, 3> grad = c.bottomRows<3>().transpose();
  return volume * grad * grad.transpose();
}

Eigen::Matrix3d oracle_triangle_stiffness(const std::array<Eigen::Vector2d, 3>& v) {
  Eigen::Matrix3d p;
  for (int i = 0; i < 3; ++i) p.row(i) << 1.0, v[i].x(), v[i].y();
  const Eigen::Matrix3d c = p.fullPivLu().inverse();
  const double area = std::abs(p.determinant()) / 2.0;
  Eigen::Matrix<double, 3, 2> grad = c.bottomRows<2>().transpose();
  return area * grad * grad.transpose();
}

// Edge-midpoint rule, exact for quadratics: basis k is 1/2 at the two
// midpoints of its edges and 0 at the opposite one.
Eigen::Matrix3d oracle_triangle_mass(double area) {
  const double mid[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (const auto& q : mid)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m(a, b) += area / 3.0 * q[a] * q[b];
  return m;
}

VectorXd nodal(const ContainerMesh& mesh, auto f) {
  VectorXd u(mesh.volume.node_count());
  for (int i = 0; i < u.size(); ++i) u[i] = f(mesh.volume.nodes[i]);
  return u;
}

VectorXd surface_nodal(const ContainerMesh& mesh, auto f) {
  VectorXd u(mesh.surface.node_count());
  for (int i = 0; i < u.size(); ++i) u[i] = f(mesh.surface.nodes[i]);
  return u;
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("constants are in the stiffness nullspaces") {
    const auto mesh = build_mesh(ContainerSpec::disk(1, 1, 4), 3);
    const auto ops = assemble(mesh, BondNumber::finite(3.0));
    const VectorXd one_v = VectorXd::Ones(ops.volume_dofs()), one_f = VectorXd::Ones(ops.surface_dofs());
    CHECK((ops.volume_stiffness() * one_v).norm() <= 1e-12 * max_abs(ops.volume_stiffness()));
    CHECK((ops.surface_stiffness() * one_f).norm() <= 1e-12 * max_abs(ops.surface_stiffness()));
    CHECK(std::abs(one_v.dot(ops.volume_stiffness() * one_v)) <= 1e-12);
  }

  TEST_CASE("surface mass integrates 1 to the unit-square area") {
    const auto ops = assemble(build_mesh(ContainerSpec::rectangle(1, 1, 1, 3), 2), BondNumber::infinite());
    const VectorXd one = VectorXd::Ones(ops.surface_dofs());
    CHECK(std::abs(one.dot(ops.surface_mass() * one) - 1.0) <= 1e-12);
    CHECK(std::abs(ops.surface_area() - 1.0) <= 1e-12);
  }

  TEST_CASE("u = z on the unit cube has Dirichlet integral 1") {
    const auto mesh = build_mesh(ContainerSpec::rectangle(1, 1, 1, 3), 3);
    const auto ops = assemble(mesh, BondNumber::infinite());
    const VectorXd u = nodal(mesh, [](const Eigen::Vector3d& p) { return p.z(); });
    CHECK(std::abs(u.dot(ops.volume_stiffness() * u) - 1.0) <= 1e-12);
    CHECK(std::abs(ops.dirichlet_energy(u) - 0.5) <= 1e-12);
  }

  TEST_CASE("surface gradient energy of linear heights") {
    SUBCASE("x - mean on the unit square") {
      const auto mesh = build_mesh(ContainerSpec::rectangle(1, 1, 1, 4), 1);
      const auto ops = assemble(mesh, BondNumber::infinite());
      const MeanProjector p(ops);
      const VectorXd xi = p.apply(surface_nodal(mesh, [](const Eigen::Vector2d& q) { return q.x(); }));
      CHECK(std::abs(surface_gradient_energy(xi, ops) - 1.0) <= 1e-12);
    }
    SUBCASE("x + y - mean on the 2 x 1 rectangle") {
      const auto mesh = build_mesh(ContainerSpec::rectangle(2, 1, 1, 4), 1);
      const auto ops = assemble(mesh, BondNumber::infinite());
      const MeanProjector p(ops);
      const VectorXd xi = p.apply(surface_nodal(mesh, [](const Eigen::Vector2d& q) { return q.x() + q.y(); }));
      CHECK(std::abs(surface_gradient_energy(xi, ops) - 4.0) <= 1e-12);
    }
    SUBCASE("constant") {
      const auto ops = assemble(build_mesh(ContainerSpec::disk(1, 1, 3), 1), BondNumber::infinite());
      CHECK(std::abs(surface_gradient_energy(VectorXd::Constant(ops.surface_dofs(), 2.5), ops)) <= 1e-12);
    }
    SUBCASE("wrong size") {
      const auto ops = assemble(build_mesh(ContainerSpec::disk(1, 1, 3), 1), BondNumber::infinite());
      CHECK_THROWS_AS(surface_gradient_energy(VectorXd::Ones(3), ops), DimensionMismatch);
    }
  }

  TEST_CASE("assembled forms match a per-element brute-force oracle") {
    const auto mesh = build_mesh(ContainerSpec::rectangle(1.3, 0.9, 0.7, 2), 2);
    REQUIRE(mesh.volume.tets.size() <= 100);
    const auto ops = assemble(mesh, BondNumber::infinite());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    VectorXd u(ops.volume_dofs()), v(ops.volume_dofs()), f(ops.surface_dofs()), g(ops.surface_dofs());
    for (auto* x : {&u, &v}) for (int i = 0; i < x->size(); ++i) (*x)[i] = uni(rng);
    for (auto* x : {&f, &g}) for (int i = 0; i < x->size(); ++i) (*x)[i] = uni(rng);

    double kd = 0.0;
    for (const auto& t : mesh.volume.tets) {
      const std::array<Eigen::Vector3d, 4> x{mesh.volume.nodes[t[0]], mesh.volume.nodes[t[1]],
                                             mesh.volume.nodes[t[2]], mesh.volume.nodes[t[3]]};
      const Eigen::Matrix4d k = oracle_tet_stiffness(x);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) kd += u[t[a]] * k(a, b) * v[t[b]];
    }
    double mf = 0.0, kf = 0.0;
    for (const auto& t : mesh.surface.triangles) {
      const std::array<Eigen::Vector2d, 3> x{mesh.surface.nodes[t[0]], mesh.surface.nodes[t[1]],
                                             mesh.surface.nodes[t[2]]};
      const Eigen::Matrix3d k = oracle_triangle_stiffness(x);
      const Eigen::Vector2d e1 = x[1] - x[0], e2 = x[2] - x[0];
      const Eigen::Matrix3d m = oracle_triangle_mass(0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x()));
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          kf += f[t[a]] * k(a, b) * g[t[b]];
          mf += f[t[a]] * m(a, b) * g[t[b]];
        }
    }
    CHECK(std::abs(u.dot(ops.volume_stiffness() * v) - kd) <= 1e-12 * std::abs(kd));
    CHECK(std::abs(f.dot(ops.surface_stiffness() * g) - kf) <= 1e-12 * std::abs(kf));
    CHECK(std::abs(f.dot(ops.surface_mass() * g) - mf) <= 1e-12 * std::abs(mf));
  }

  TEST_CASE("matrices are symmetric") {
    const auto ops = assemble(build_mesh(ContainerSpec::disk(1, 1, 4), 2), BondNumber::finite(2.0));
    for (const SparseMatrix* a : {&ops.volume_stiffness(), &ops.surface_mass(), &ops.surface_stiffness()}) {
      const SparseMatrix diff = *a - SparseMatrix(a->transpose());
      CHECK(max_abs(diff) <= 1e-14 * max_abs(*a));
    }
  }

  TEST_CASE("surface mass is positive definite") {
    const auto ops = assemble(build_mesh(ContainerSpec::disk(1, 1, 3), 1), BondNumber::infinite());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd(ops.surface_mass()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }

  TEST_CASE("Bond number only scales the capillary term") {
    const auto mesh = build_mesh(ContainerSpec::disk(1, 1, 4), 1);
    const auto a = assemble(mesh, BondNumber::finite(5.0));
    const auto b = a.with_bond(BondNumber::finite(10.0));
    const SparseMatrix da = a.surface_energy_matrix() - a.surface_mass();
    const SparseMatrix db = b.surface_energy_matrix() - b.surface_mass();
    CHECK(max_abs(SparseMatrix(da - 2.0 * db)) <= 1e-14 * max_abs(a.surface_energy_matrix()));
    const auto inf = a.with_bond(BondNumber::infinite());
    CHECK(max_abs(SparseMatrix(inf.surface_energy_matrix() - inf.surface_mass())) == 0.0);
  }

  TEST_CASE("energies and coupling") {
    const auto mesh = build_mesh(ContainerSpec::rectangle(1, 1, 1, 3), 2);
    const auto ops = assemble(mesh, BondNumber::finite(4.0));
    const VectorXd phi = nodal(mesh, [](const Eigen::Vector3d&) { return 2.0; });
    const VectorXd xi = VectorXd::Constant(ops.surface_dofs(), 3.0);
    CHECK(std::abs(ops.coupling(phi, xi) - 6.0) <= 1e-12);
    CHECK(std::abs(ops.surface_energy(xi) - 4.5) <= 1e-12);
    CHECK(ops.trace_of(ops.lift(xi)) == xi);
  }

  TEST_CASE("mean projector") {
    const auto ops = assemble(build_mesh(ContainerSpec::disk(1, 1, 4), 1), BondNumber::infinite());
    const MeanProjector p(ops);
    const auto& m = ops.surface_mass();
    CHECK(p.apply(VectorXd::Constant(ops.surface_dofs(), 1.7)).norm() <= 1e-12);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      VectorXd u(ops.surface_dofs()), v(ops.surface_dofs());
      for (int i = 0; i < u.size(); ++i) {
        u[i] = uni(rng);
        v[i] = uni(rng);
      }
      const VectorXd pv = p.apply(v);
      CHECK((p.apply(pv) - pv).norm() <= 1e-12 * pv.norm());
      CHECK(std::abs(ops.surface_weights().dot(pv)) <= 1e-12);
      CHECK(std::abs(p.apply(u).dot(m * v) - u.dot(m * pv)) <= 1e-12);
    }
    const SparseMatrix q = p.basis();
    CHECK(q.cols() == ops.surface_dofs() - 1);
    CHECK((ops.surface_weights().transpose() * q).norm() <= 1e-12);
  }

  TEST_CASE("inverted elements are rejected") {
    const std::array<Eigen::Vector3d, 4> tet{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 1, 0),
                                             Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1)};
    CHECK_THROWS_AS(tet_stiffness(tet), DegenerateElement);
    const std::array<Eigen::Vector2d, 3> tri{Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0)};
    CHECK_THROWS_AS(triangle_stiffness(tri), DegenerateElement);
  }

  TEST_CASE("element kernels agree with the oracle") {
    const std::array<Eigen::Vector3d, 4> tet{Eigen::Vector3d(0.1, 0, 0), Eigen::Vector3d(1, 0.2, 0),
                                             Eigen::Vector3d(0.3, 1, 0.1), Eigen::Vector3d(0.2, 0.3, 0.9)};
    CHECK((tet_stiffness(tet) - oracle_tet_stiffness(tet)).norm() <= 1e-13);
    CHECK((triangle_mass(0.7) - oracle_triangle_mass(0.7)).norm() <= 1e-15);
  }
}
