#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support.hpp"
#include "slosh/analytic.hpp"
#include "slosh/errors.hpp"
#include "slosh/perturbation.hpp"

using namespace slosh;
using slosh::testing::rel;

TEST_SUITE("perturbation") {
  TEST_CASE("analytic cylinder (0,1): finite differences match the slope formula") {
    const double z = analytic::bessel_jp_root(0, 1);
    const double lambda = std::sqrt(z * std::tanh(z));
    const double formula = 0.5 * lambda * z * z;
    CHECK(std::abs(formula - 14.36) <= 0.01);
    const std::vector<double> eps{1e-3, 5e-4};
    const auto fd = slope_fd_cylinder(0, 1, 1.0, eps);
    CHECK(rel(fd.slope, formula) <= 1e-6);
    CHECK(fd.quotients.size() == 2);
    CHECK(std::abs(fd.order - 2.0) <= 0.1);
  }

  TEST_CASE("Richardson extrapolation of a smooth function") {
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    const auto est = richardson_slope([](double e) { return std::exp(2.0 * e); }, eps, DifferenceScheme::OneSided);
    CHECK(std::abs(est.slope - 2.0) <= 1e-9);
    CHECK(std::abs(est.order - 1.0) <= 0.1);
  }

  TEST_CASE("invalid epsilon ladders are rejected") {
    auto f = [](double e) { return e; };
    const std::vector<double> with_zero{1e-3, 0.0}, single{1e-3}, increasing{1e-4, 1e-3}, negative{1e-3, -1e-4};
    for (const auto* list : {&with_zero, &single, &increasing, &negative}) {
      CHECK_THROWS_AS(richardson_slope(f, *list, DifferenceScheme::OneSided), InvalidArgument);
    }
  }

  TEST_CASE("slope formula needs a Bo = infinity mode and a simple eigenvalue") {
    const auto ops = assemble(build_mesh(ContainerSpec::disk(1, 1, 3), 2), BondNumber::finite(10.0));
    const auto s = solve_reduced(ops, 2);
    CHECK_THROWS_AS(slope_formula(s.modes[0], ops), InvalidArgument);

    Spectrum twin;
    twin.modes = {s.modes[0], s.modes[0], s.modes[1]};
    CHECK_THROWS_AS(ensure_simple(twin, 0), NotSimple);
    CHECK_THROWS_AS(ensure_simple(twin, 1), NotSimple);
    CHECK_NOTHROW(ensure_simple(twin, 2));
  }

  TEST_CASE("FEM cylinder (0,1): formula agrees with FEM finite differences") {
    const auto mesh = build_mesh(ContainerSpec::disk(1, 1, 4), 4);
    const auto ops = assemble(mesh, BondNumber::infinite());
    const ReducedSolver solver(ops);
    const auto steklov = solver.solve(BondNumber::infinite(), 8);
    const auto match = slosh::testing::match_axisymmetric(steklov, ops, mesh.surface, 1.0);
    REQUIRE(match.overlap > 0.9);
    const std::vector<double> eps{1e-3, 5e-4};
    const auto report = perturbation_report(solver, steklov, match.index, eps);
    CHECK(report.rel_error <= 1e-3);
    CHECK(report.epsilon_values == eps);
    CHECK(report.omega0 == steklov.modes[match.index].omega);
    // same order of magnitude as the closed form on a coarse mesh
    CHECK(rel(report.slope_formula, 14.363) <= 0.3);
  }

  TEST_CASE("box (1,0) slope is (omega0/2) pi^2") {
    const auto mesh = build_mesh(ContainerSpec::rectangle(1, 0.5, 1, 8), 8);
    const auto ops = assemble(mesh, BondNumber::infinite());
    const auto s = solve_reduced(ops, 2);
    const double slope = slope_formula(s, 0, ops);
    CHECK(rel(slope, 0.5 * s.modes[0].omega * std::numbers::pi * std::numbers::pi) <= 0.02);
  }

  TEST_CASE("Bond sweep") {
    const auto mesh = build_mesh(ContainerSpec::disk(1, 1, 4), 4);
    const ReducedSolver solver(assemble(mesh, BondNumber::infinite()));
    const std::vector<BondNumber> bonds{BondNumber::infinite(), BondNumber::finite(100.0), BondNumber::finite(1.0),
                                        BondNumber::finite(10.0)};
    const auto sweep = bond_sweep(solver, bonds, 3);
    REQUIRE(sweep.bonds.size() == 4);
    CHECK(sweep.bonds[0] == BondNumber::finite(1.0));
    CHECK(sweep.bonds[3] == BondNumber::infinite());
    CHECK(sweep.entries.size() == 12);
    CHECK(sweep.monotone);
    CHECK(sweep.min_overlap >= 0.9);
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& e : sweep.entries) {
      if (e.mode_index != 1) continue;
      CHECK(e.omega < previous);
      previous = e.omega;
    }
    const auto direct = solver.solve(BondNumber::infinite(), 3);
    CHECK(sweep.entries[9].omega == direct.modes[0].omega);
  }

  TEST_CASE("Bo = 1e8 is within 2e-8 of the Steklov limit") {
    const ReducedSolver solver(assemble(build_mesh(ContainerSpec::disk(1, 1, 4), 4), BondNumber::infinite()));
    const std::vector<BondNumber> bonds{BondNumber::finite(1e8), BondNumber::infinite()};
    const auto sweep = bond_sweep(solver, bonds, 1);
    CHECK(rel(sweep.entries[0].omega, sweep.entries[1].omega) <= 2e-8);
  }

  TEST_CASE("single-entry sweep equals a solve") {
    const ReducedSolver solver(assemble(build_mesh(ContainerSpec::disk(1, 1, 3), 3), BondNumber::infinite()));
    const std::vector<BondNumber> bonds{BondNumber::finite(10.0)};
    const auto sweep = bond_sweep(solver, bonds, 2);
    const auto direct = solver.solve(BondNumber::finite(10.0), 2);
    CHECK(sweep.entries.size() == 2);
    CHECK(sweep.entries[0].omega == direct.modes[0].omega);
    CHECK_THROWS_AS(bond_sweep(solver, std::span<const BondNumber>{}, 1), InvalidArgument);
  }
}
