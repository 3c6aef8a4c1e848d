#include "slosh/verify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "slosh/errors.hpp"
#include "slosh/perturbation.hpp"

namespace slosh {

namespace {

constexpr double kDegenerateGap = 1e-6;
constexpr double kMonotonicitySlack = 1e-10;

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

// Smallest eigenvalue of a factorized symmetric positive definite matrix by
// inverse iteration with a Rayleigh-quotient stopping test.
double inverse_iteration(const SparseMatrix& a, const Ldlt& ldlt) {
  const auto n = a.rows();
  VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(1.0 + static_cast<double>(i));
  x.normalize();
  double lambda = x.dot(a * x);
  for (int it = 0; it < 5000; ++it) {
    VectorXd y = ldlt.solve(x);
    y.normalize();
    const double next = y.dot(a * y);
    x = std::move(y);
    const bool converged = std::abs(next - lambda) <= 1e-14 * std::abs(next);
    lambda = next;
    if (converged) break;
  }
  return lambda;
}

double relative_gap(const Spectrum& s, std::size_t i) {
  double gap = std::numeric_limits<double>::infinity();
  const double w = s.modes[i].omega;
  if (i > 0) gap = std::min(gap, (w - s.modes[i - 1].omega) / w);
  if (i + 1 < s.size()) gap = std::min(gap, (s.modes[i + 1].omega - w) / w);
  return gap;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

EnergyReport energy_report(const SloshingMode& mode, const OperatorSet& ops) {
  EnergyReport r;
  r.d_energy = ops.dirichlet_energy(mode.phi);
  r.s_energy = ops.surface_energy(mode.xi);
  r.coupling = ops.coupling(mode.phi, mode.xi);
  if (r.coupling == 0.0 || !std::isfinite(r.coupling)) throw InvalidArgument("mode has zero coupling <Phi, xi>");
  const double total = r.d_energy + r.s_energy;
  r.omega_check = total / std::abs(r.coupling);
  const double half = 0.5 * mode.omega * r.coupling;
  const double scale = total > 0.0 ? total : 1.0;
  r.equidistribution = std::max({std::abs(r.d_energy - r.s_energy), std::abs(r.d_energy - half),
                                 std::abs(r.s_energy - half)}) /
                       scale;
  r.omega_residual = std::abs(r.omega_check - mode.omega) / mode.omega;
  return r;
}

EnergyReport check_energy(const SloshingMode& mode, const OperatorSet& ops, double tol) {
  const EnergyReport r = energy_report(mode, ops);
  if (!(r.worst() <= tol)) throw IdentityViolation("energy equidistribution violated", r.worst());
  return r;
}

OrthogonalityReport orthogonality_report(const Spectrum& spectrum, const OperatorSet& ops) {
  if (spectrum.empty()) throw InvalidArgument("orthogonality check needs at least one mode");
  OrthogonalityReport r;
  const SparseMatrix& mass = ops.surface_mass();
  std::vector<VectorXd> phi_f, mxi;
  for (const auto& m : spectrum.modes) {
    phi_f.push_back(ops.trace_of(m.phi));
    mxi.push_back(mass * m.xi);
  }
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    for (std::size_t k = j + 1; k < spectrum.size(); ++k) {
      const double wj = spectrum.modes[j].omega, wk = spectrum.modes[k].omega;
      if (std::abs(wj - wk) <= kDegenerateGap * wk) {
        r.skipped.emplace_back(static_cast<int>(j + 1), static_cast<int>(k + 1));
        continue;
      }
      ++r.checked_pairs;
      r.max_residual = std::max({r.max_residual, std::abs(phi_f[j].dot(mxi[k])), std::abs(phi_f[k].dot(mxi[j]))});
    }
  }
  return r;
}

OrthogonalityReport check_orthogonality(const Spectrum& spectrum, const OperatorSet& ops, double tol) {
  OrthogonalityReport r = orthogonality_report(spectrum, ops);
  if (!(r.max_residual <= tol)) throw IdentityViolation("cross orthogonality violated", r.max_residual);
  return r;
}

MonotonicityVerdict monotonicity_verdict(const ContainerSpec& shallow, const ContainerSpec& deep, BondNumber bond,
                                         int layers) {
  shallow.validate();
  deep.validate();
  const bool same_surface = shallow.shape == deep.shape && shallow.resolution == deep.resolution &&
                            (shallow.shape == Shape::Disk ? shallow.radius == deep.radius
                                                          : shallow.lx == deep.lx && shallow.ly == deep.ly);
  if (!same_surface) throw InvalidArgument("monotonicity check needs the same free surface and resolution");
  if (shallow.depth > deep.depth) throw InvalidArgument("shallow container is deeper than the deep one");
  auto fundamental = [&](const ContainerSpec& spec) {
    return solve_reduced(assemble(build_mesh(spec, layers), bond), 1).modes.front().omega;
  };
  MonotonicityVerdict v;
  v.omega_shallow = fundamental(shallow);
  v.omega_deep = fundamental(deep);
  v.holds = v.omega_shallow <= v.omega_deep + kMonotonicitySlack;
  return v;
}

MonotonicityVerdict check_monotonicity(const ContainerSpec& shallow, const ContainerSpec& deep, BondNumber bond,
                                       int layers) {
  const MonotonicityVerdict v = monotonicity_verdict(shallow, deep, bond, layers);
  if (!v.holds) {
    throw IdentityViolation("shallow container has the higher fundamental frequency", v.omega_shallow - v.omega_deep);
  }
  return v;
}

YoungLaplaceReport young_laplace_check(const OperatorSet& ops, double bond) {
  if (!(bond > 0.0) || !std::isfinite(bond)) throw InvalidArgument("Bond number must be finite and positive");
  YoungLaplaceReport r;
  r.bond = bond;
  const SparseMatrix a = ops.surface_stiffness() + bond * ops.surface_mass();
  Ldlt ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SolverFailure("factorization of K_F + Bo M_F failed");
  r.positive_definite = ldlt.vectorD().minCoeff() > 0.0;
  if (!r.positive_definite) throw IdentityViolation("K_F + Bo M_F has a nonpositive pivot", ldlt.vectorD().minCoeff());
  r.smallest_eigenvalue = inverse_iteration(a, ldlt);
  Ldlt mass_ldlt(ops.surface_mass());
  r.lower_bound = bond * inverse_iteration(ops.surface_mass(), mass_ldlt);
  if (!(r.smallest_eigenvalue > 0.0)) {
    throw IdentityViolation("K_F + Bo M_F has a nonpositive eigenvalue", r.smallest_eigenvalue);
  }
  return r;
}

HighSpot high_spot(const SloshingMode& mode, const SurfaceMesh& surface) {
  if (mode.xi.size() != surface.node_count()) throw DimensionMismatch("xi does not match the surface mesh");
  Eigen::Index node = 0;
  const double peak = mode.xi.cwiseAbs().maxCoeff(&node);
  if (!(peak > 0.0)) throw InvalidArgument("xi is identically zero");
  HighSpot h;
  h.node = static_cast<int>(node);
  h.position = surface.nodes[node];
  h.elevation = mode.xi[node];
  h.on_boundary = surface.boundary_flags()[node];
  return h;
}

ModalTrajectory modal_trajectory(const SloshingMode& mode, const OperatorSet& ops, double delta,
                                 std::span<const double> times) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }
  const double d = ops.dirichlet_energy(mode.phi);
  const double s = ops.surface_energy(mode.xi);
  ModalTrajectory t;
  t.delta = delta;
  t.times.assign(times.begin(), times.end());
  for (double time : times) {
    const double arg = mode.omega * time + delta;
    const double c = std::cos(arg), sn = std::sin(arg);
    t.energy.push_back(d * c * c + s * sn * sn);
  }
  const double e0 = t.energy.front();
  for (double e : t.energy) t.drift = std::max(t.drift, std::abs(e - e0));
  t.drift /= std::max(std::abs(e0), std::numeric_limits<double>::min());
  return t;
}

std::vector<double> period_grid(double omega, int samples) {
  if (!(omega > 0.0)) throw InvalidArgument("period grid needs a positive frequency");
  if (samples < 2) throw InvalidArgument("period grid needs at least two samples");
  std::vector<double> times(samples);
  const double period = 2.0 * std::numbers::pi / omega;
  for (int i = 0; i < samples; ++i) times[i] = period * i / (samples - 1);
  return times;
}

std::string format_check(const CheckResult& check) {
  return "CHECK " + check.name + " " + (check.passed ? "PASS" : "FAIL") + " residual=" + sci(check.residual) +
         " ref=" + check.ref;
}

ReciprocityReport reciprocity_report(const NeumannSolver& neumann, std::uint64_t seed, int samples) {
  const OperatorSet& ops = neumann.operators();
  const MeanProjector projector(ops);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  auto random_zero_mean = [&] {
    VectorXd g(ops.surface_dofs());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = uniform(rng);
    return projector.apply(g);
  };
  auto mass_norm = [&](const VectorXd& v) { return std::sqrt(v.dot(ops.surface_mass() * v)); };
  ReciprocityReport r;
  r.min_energy = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const VectorXd g1 = random_zero_mean(), g2 = random_zero_mean();
    const VectorXd t1 = ops.trace_of(neumann.solve(g1)), t2 = ops.trace_of(neumann.solve(g2));
    const double a = g1.dot(ops.surface_mass() * t2), b = g2.dot(ops.surface_mass() * t1);
    const double scale = mass_norm(g1) * mass_norm(t2) + mass_norm(g2) * mass_norm(t1);
    r.asymmetry = std::max(r.asymmetry, std::abs(a - b) / scale);
    r.min_energy = std::min(r.min_energy, g1.dot(ops.surface_mass() * t1) / (mass_norm(g1) * mass_norm(t1)));
  }
  return r;
}

void inject_sign_flip(Spectrum& spectrum, const SurfaceMesh& surface) {
  if (spectrum.size() < 2) return;
  VectorXd& xi = spectrum.modes[1].xi;
  for (int i = 0; i < surface.node_count(); ++i) {
    if (surface.nodes[i].x() < 0.0) xi[i] = -xi[i];
  }
}

std::vector<CheckResult> run_checks(const ContainerMesh& mesh, BondNumber bond, const SuiteOptions& options) {
  const OperatorSet ops = assemble(mesh, bond);
  const int k = options.modes;
  if (k < 1) throw InvalidArgument("verification needs at least one mode");

  const CoupledSolver coupled(ops);
  const ReducedSolver reduced(ops);
  std::vector<Spectrum> spectra{coupled.solve(bond, k), reduced.solve(bond, k)};
  if (options.fault == Fault::SignFlip) {
    for (auto& s : spectra) inject_sign_flip(s, mesh.surface);
  }

  std::vector<CheckResult> out;
  auto add = [&](std::string name, double residual, bool passed, std::string ref, std::string detail = {}) {
    out.push_back({std::move(name), passed, residual, std::move(ref), std::move(detail)});
  };

  {
    double worst = 0.0;
    const VectorXd& w = ops.surface_weights();
    for (const auto& s : spectra) {
      for (const auto& m : s.modes) {
        const VectorXd phi_f = ops.trace_of(m.phi);
        worst = std::max({worst, std::abs(w.dot(phi_f)) / m.phi.norm(), std::abs(w.dot(m.xi)) / m.xi.norm()});
      }
    }
    add("zero-mean", worst, worst <= 1e-10, "zero-mean");
  }
  {
    double worst = 0.0;
    for (const auto& s : spectra) {
      for (const auto& m : s.modes) worst = std::max(worst, std::abs(ops.coupling(m.phi, m.xi) - 1.0));
    }
    add("unit-coupling", worst, worst <= 1e-10, "minimizer-constraint");
  }
  {
    double worst = 0.0;
    for (const auto& s : spectra) {
      for (const auto& m : s.modes) {
        const auto r = mode_residuals(m, ops);
        worst = std::max({worst, r.kinematic, r.dynamic});
      }
    }
    add("euler-lagrange-pairing", worst, worst <= 1e-8, "euler-lagrange");
  }
  {
    double worst = 0.0;
    for (const auto& s : spectra) {
      for (const auto& m : s.modes) worst = std::max(worst, energy_report(m, ops).worst());
    }
    add("energy-equidistribution", worst, worst <= 1e-8, "energy-equidistribution");
  }
  {
    double worst = 0.0;
    std::string detail;
    for (const auto& s : spectra) {
      const auto r = orthogonality_report(s, ops);
      worst = std::max(worst, r.max_residual);
      detail = "checked " + std::to_string(r.checked_pairs) + " pairs, skipped " + std::to_string(r.skipped.size()) +
               " near-degenerate";
      for (const auto& [a, b] : r.skipped) detail += " (" + std::to_string(a) + "," + std::to_string(b) + ")";
    }
    add("cross-orthogonality", worst, worst <= 1e-8, "cross-orthogonality", detail);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
      const double wc = spectra[0].modes[i].omega, wr = spectra[1].modes[i].omega;
      worst = std::max(worst, std::abs(wc - wr) / wr);
    }
    add("formulation-equivalence", worst, worst <= 1e-8, "neumann-to-dirichlet-duality");
  }
  {
    const auto r = reciprocity_report(reduced.neumann(), options.seed);
    add("neumann-reciprocity", r.asymmetry, r.asymmetry <= 1e-10 && r.min_energy >= 0.0,
        "kinetic-operator-symmetry", "min normalized g^T M_F R N g = " + sci(r.min_energy));
  }
  {
    ContainerSpec other = mesh.spec;
    other.depth = options.compare_depth.value_or(0.5 * mesh.spec.depth);
    const ContainerSpec& shallow = other.depth <= mesh.spec.depth ? other : mesh.spec;
    const ContainerSpec& deep = other.depth <= mesh.spec.depth ? mesh.spec : other;
    const MonotonicityVerdict v = monotonicity_verdict(shallow, deep, bond, mesh.layers);
    add("domain-monotonicity", std::max(0.0, v.omega_shallow - v.omega_deep), v.holds, "domain-monotonicity",
        "omega1(h=" + sci(shallow.depth) + ")=" + sci(v.omega_shallow) + " omega1(h=" + sci(deep.depth) +
            ")=" + sci(v.omega_deep));
  }

  const int steklov_modes = std::min(k + 1, ops.surface_dofs() - 1);
  const Spectrum steklov = reduced.solve(BondNumber::infinite(), steklov_modes);
  {
    const double w_inf = steklov.modes[0].omega;
    const double w_big = reduced.solve(BondNumber::finite(options.steklov_bond), 1).modes[0].omega;
    const double rel = std::abs(w_big - w_inf) / w_inf;
    add("steklov-limit", rel, rel <= 1e-6, "steklov-limit", "Bo=" + sci(options.steklov_bond));
  }
  {
    double worst = 0.0;
    for (const auto& m : steklov.modes) {
      // Rescaling Phi leaves the quotient unchanged; it must equal omega^2.
      const VectorXd u_f = ops.trace_of(m.phi);
      const double q = m.phi.dot(ops.volume_stiffness() * m.phi) / u_f.dot(ops.surface_mass() * u_f);
      worst = std::max(worst, std::abs(q - m.omega * m.omega) / (m.omega * m.omega));
    }
    add("steklov-rayleigh-quotient", worst, worst <= 1e-8, "steklov-limit");
  }
  {
    // The best-separated mode keeps finite-difference tracking away from
    // the split azimuthal pairs.
    std::size_t best = 0;
    for (std::size_t i = 1; i < static_cast<std::size_t>(k) && i < steklov.size(); ++i) {
      if (relative_gap(steklov, i) > relative_gap(steklov, best)) best = i;
    }
    try {
      const auto rep = perturbation_report(reduced, steklov, best);
      add("first-order-bond-perturbation", rep.rel_error, rep.rel_error <= 1e-3, "first-order-bond-perturbation",
          "mode " + std::to_string(best + 1) + " slope " + sci(rep.slope_formula) + " vs fd " + sci(rep.slope_fd));
    } catch (const NotSimple& e) {
      add("first-order-bond-perturbation", 0.0, true, "first-order-bond-perturbation",
          std::string("skipped: ") + e.what());
    } catch (const ModeTrackingFailure& e) {
      add("first-order-bond-perturbation", 1.0, false, "first-order-bond-perturbation", e.what());
    }
  }
  {
    double smallest = std::numeric_limits<double>::infinity();
    bool passed = true;
    for (double bo : options.young_laplace_bonds) {
      try {
        smallest = std::min(smallest, young_laplace_check(ops, bo).smallest_eigenvalue);
      } catch (const IdentityViolation& e) {
        passed = false;
        smallest = std::min(smallest, e.residual());
      }
    }
    add("young-laplace-uniqueness", smallest, passed && smallest > 0.0, "young-laplace-uniqueness",
        "smallest eigenvalue of K_F + Bo M_F");
  }
  {
    double worst = 0.0;
    for (const auto& s : spectra) {
      for (const auto& m : s.modes) {
        const auto grid = period_grid(m.omega, 100);
        worst = std::max(worst, modal_trajectory(m, ops, 0.0, grid).drift);
      }
    }
    add("energy-conservation", worst, worst <= 1e-8, "energy-conservation");
  }
  return out;
}

}  // namespace slosh
