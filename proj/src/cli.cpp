#include "slosh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slosh/analytic.hpp"
#include "slosh/assembly.hpp"
#include "slosh/eigensolve.hpp"
#include "slosh/errors.hpp"
#include "slosh/io.hpp"
#include "slosh/perturbation.hpp"

namespace slosh {

namespace {

using nlohmann::json;

constexpr int kMaxRefinements = 5;
constexpr double kEquivalenceTolerance = 1e-8;
constexpr double kFemSlopeTolerance = 1e-3;
constexpr double kOrderGuard = 1.0;

void require_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) throw InvalidSpec(where + " must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) throw InvalidSpec("unknown key \"" + key + "\" in " + where);
  }
}

double number_field(const json& object, const char* key) {
  if (!object.contains(key)) throw InvalidSpec(std::string("missing field \"") + key + "\"");
  const json& v = object.at(key);
  if (!v.is_number()) throw InvalidSpec(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

int integer_field(const json& object, const char* key) {
  const json& v = object.at(key);
  if (!v.is_number_integer()) throw InvalidSpec(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

BondNumber bond_value(const json& v) {
  if (v.is_string()) return BondNumber::parse(v.get<std::string>());
  if (v.is_number()) return BondNumber::finite(v.get<double>());
  throw InvalidSpec("Bond number must be a positive number or \"inf\"");
}

Formulation parse_formulation(const std::string& text) {
  if (text == "coupled") return Formulation::Coupled;
  if (text == "reduced") return Formulation::Reduced;
  if (text == "both") return Formulation::Both;
  throw InvalidSpec("formulation must be coupled, reduced or both");
}

ContainerSpec parse_container(const json& c) {
  require_keys(c, {"shape", "radius", "Lx", "Ly", "depth", "resolution"}, "container");
  if (!c.contains("shape") || !c.at("shape").is_string()) throw InvalidSpec("container.shape must be a string");
  const std::string shape = c.at("shape").get<std::string>();
  if (!c.contains("resolution")) throw InvalidSpec("missing field \"resolution\"");
  const int resolution = integer_field(c, "resolution");
  const double depth = number_field(c, "depth");
  ContainerSpec spec;
  if (shape == "disk") {
    spec = ContainerSpec::disk(number_field(c, "radius"), depth, resolution);
  } else if (shape == "rectangle") {
    spec = ContainerSpec::rectangle(number_field(c, "Lx"), number_field(c, "Ly"), depth, resolution);
  } else {
    throw InvalidSpec("container.shape must be \"disk\" or \"rectangle\"");
  }
  spec.validate();
  return spec;
}

std::string padded(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", index);
  return buf;
}

double max_relative_difference(const Spectrum& a, const Spectrum& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(a.modes[i].omega - b.modes[i].omega) / b.modes[i].omega);
  }
  return worst;
}

struct Context {
  RunConfig config;
  std::ostream& out;
  std::ostream& err;

  std::filesystem::path file(const std::string& name) const { return config.output_dir / name; }
  void prepare_output() const { std::filesystem::create_directories(config.output_dir); }
};

int cmd_solve(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const ContainerMesh mesh = cfg.build();
  const OperatorSet ops = assemble(mesh, cfg.bond);
  std::optional<Spectrum> coupled, reduced;
  if (cfg.formulation != Formulation::Reduced) coupled = solve_coupled(ops, cfg.modes);
  if (cfg.formulation != Formulation::Coupled) reduced = solve_reduced(ops, cfg.modes);
  const Spectrum& primary = coupled ? *coupled : *reduced;

  ctx.prepare_output();
  io::write_atomic(ctx.file("spectrum.csv"), io::spectrum_csv(primary, ops));
  if (coupled && reduced) io::write_atomic(ctx.file("spectrum_reduced.csv"), io::spectrum_csv(*reduced, ops));

  std::ostringstream energies;
  for (std::size_t i = 0; i < primary.size(); ++i) {
    const auto& mode = primary.modes[i];
    const EnergyReport e = energy_report(mode, ops);
    energies << "mode=" << i + 1 << " omega=" << io::format_double(mode.omega)
             << " D=" << io::format_double(e.d_energy) << " S=" << io::format_double(e.s_energy)
             << " coupling=" << io::format_double(e.coupling) << " omega_check=" << io::format_double(e.omega_check)
             << " residual=" << io::format_double(e.worst()) << "\n";
    io::write_atomic(ctx.file("mode_" + padded(i + 1) + "_volume.vtk"), io::volume_vtk(mesh.volume, &mode.phi));
    io::write_atomic(ctx.file("mode_" + padded(i + 1) + "_surface.vtk"), io::surface_vtk(mesh.surface, &mode.xi));
  }
  io::write_atomic(ctx.file("energy_report.txt"), energies.str());
  ctx.out << energies.str();

  if (coupled && reduced) {
    const double diff = max_relative_difference(*coupled, *reduced);
    const std::string line = "equivalence max_rel_diff=" + io::format_double(diff) + "\n";
    io::write_atomic(ctx.file("equivalence.txt"), line);
    ctx.out << line;
    if (!(diff <= kEquivalenceTolerance)) {
      ctx.err << "coupled and reduced frequencies differ by " << diff << "\n";
      return 1;
    }
  }
  return 0;
}

int cmd_verify(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  SuiteOptions options;
  options.modes = cfg.modes;
  options.compare_depth = cfg.compare_depth;
  options.seed = cfg.seed;
  options.fault = cfg.fault;
  const auto checks = run_checks(cfg.build(), cfg.bond, options);
  ctx.prepare_output();
  const std::string text = io::checks_text(checks);
  io::write_atomic(ctx.file("verify.txt"), text);
  io::write_atomic(ctx.file("verify.json"), io::checks_json(checks));
  ctx.out << text;
  const bool all = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  return all ? 0 : 1;
}

int cmd_sweep(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<BondNumber> bonds = cfg.sweep_bonds.empty() ? std::vector<BondNumber>{cfg.bond} : cfg.sweep_bonds;
  const ReducedSolver solver(assemble(cfg.build(), BondNumber::infinite()));
  const SweepResult sweep = bond_sweep(solver, bonds, cfg.modes);
  ctx.prepare_output();
  io::write_atomic(ctx.file("sweep.csv"), io::sweep_csv(sweep));
  ctx.out << "sweep bonds=" << sweep.bonds.size() << " modes=" << cfg.modes
          << " min_overlap=" << io::format_double(sweep.min_overlap)
          << " monotone=" << (sweep.monotone ? "yes" : "no") << "\n";
  return sweep.monotone ? 0 : 1;
}

int cmd_perturb(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const OperatorSet ops = assemble(cfg.build(), BondNumber::infinite());
  const ReducedSolver solver(ops);
  const int k = std::min(cfg.modes + 1, ops.surface_dofs() - 1);
  const Spectrum steklov = solver.solve(BondNumber::infinite(), k);
  std::vector<PerturbationReport> reports;
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.modes); ++i) {
    try {
      reports.push_back(perturbation_report(solver, steklov, i));
    } catch (const NotSimple& e) {
      ctx.err << "skipping mode " << i + 1 << ": " << e.what() << "\n";
    }
  }
  ctx.prepare_output();
  io::write_atomic(ctx.file("perturbation.csv"), io::perturbation_csv(reports));
  bool ok = true;
  for (const auto& r : reports) {
    ctx.out << "mode=" << r.mode_index + 1 << " slope_formula=" << io::format_double(r.slope_formula)
            << " slope_fd=" << io::format_double(r.slope_fd) << " rel_error=" << io::format_double(r.rel_error)
            << "\n";
    ok = ok && r.rel_error <= kFemSlopeTolerance;
  }
  return ok ? 0 : 1;
}

int cmd_convergence(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  if (cfg.refinements < 1) throw InvalidArgument("convergence needs refinements >= 1");
  const ConvergenceStudy study = convergence_study(cfg.container, cfg.layers, cfg.bond, cfg.refinements);
  std::ostringstream csv;
  csv << "level,surface_nodes,volume_nodes,omega,omega_exact,rel_error,order\n";
  for (const auto& l : study.levels) {
    csv << l.level << ',' << l.surface_nodes << ',' << l.volume_nodes << ',' << io::format_double(l.omega) << ','
        << io::format_double(l.exact) << ',' << io::format_double(l.rel_error) << ','
        << (std::isnan(l.order) ? std::string("nan") : io::format_double(l.order)) << '\n';
  }
  ctx.prepare_output();
  io::write_atomic(ctx.file("convergence.csv"), csv.str());
  if (cfg.container.shape == Shape::Disk) {
    std::vector<analytic::DispersionPoint> points;
    const double ratio = cfg.container.depth / cfg.container.radius;
    for (int n = 0; n <= 3; ++n) {
      for (int m = 1; m <= 2; ++m) points.push_back(analytic::cylinder_dispersion(n, m, ratio, cfg.bond));
    }
    io::write_atomic(ctx.file("dispersion.csv"), io::dispersion_csv(points));
  }
  ctx.out << csv.str() << "fitted_order=" << io::format_double(study.fitted_order) << "\n";
  if (!(study.fitted_order >= kOrderGuard)) {
    throw ConvergenceFailure("convergence order " + std::to_string(study.fitted_order) + " is below 1");
  }
  return 0;
}

int cmd_monotonicity(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  ContainerSpec other = cfg.container;
  other.depth = cfg.compare_depth.value_or(0.5 * cfg.container.depth);
  const bool other_shallower = other.depth <= cfg.container.depth;
  const ContainerSpec& shallow = other_shallower ? other : cfg.container;
  const ContainerSpec& deep = other_shallower ? cfg.container : other;
  const MonotonicityVerdict v = monotonicity_verdict(shallow, deep, cfg.bond, cfg.layers);
  std::ostringstream text;
  text << "h_shallow=" << io::format_double(shallow.depth) << " omega1=" << io::format_double(v.omega_shallow) << "\n"
       << "h_deep=" << io::format_double(deep.depth) << " omega1=" << io::format_double(v.omega_deep) << "\n"
       << "CHECK domain-monotonicity " << (v.holds ? "PASS" : "FAIL")
       << " residual=" << io::format_double(std::max(0.0, v.omega_shallow - v.omega_deep))
       << " ref=domain-monotonicity\n";
  ctx.prepare_output();
  io::write_atomic(ctx.file("monotonicity.txt"), text.str());
  ctx.out << text.str();
  return v.holds ? 0 : 1;
}

}  // namespace

void RunConfig::validate() const {
  container.validate();
  if (modes < 1) throw InvalidSpec("modes must be at least 1");
  if (layers < 1) throw InvalidSpec("layers must be at least 1");
  if (refinements < 0 || refinements > kMaxRefinements) throw InvalidSpec("refinements must be in [0, 5]");
  if (compare_depth && !(*compare_depth > 0.0)) throw InvalidSpec("compare_depth must be positive");
  if (output_dir.empty()) throw InvalidSpec("output_dir must not be empty");
}

ContainerMesh RunConfig::build() const {
  ContainerMesh mesh = build_mesh(container, layers);
  for (int r = 0; r < refinements; ++r) mesh = refine(mesh);
  return mesh;
}

int default_layers(const ContainerSpec& spec) {
  const double extent = spec.shape == Shape::Disk ? spec.radius : std::max(spec.lx, spec.ly);
  return std::max(1, static_cast<int>(std::ceil(spec.resolution * spec.depth / extent - 1e-9)));
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(root, {"container", "Bo", "modes", "layers", "refinements", "formulation", "output_dir", "seed",
                      "sweep_Bo", "compare_depth", "fault"},
               "config");
  RunConfig cfg;
  try {
    if (!root.contains("container")) throw InvalidSpec("missing field \"container\"");
    cfg.container = parse_container(root.at("container"));
    if (root.contains("Bo")) cfg.bond = bond_value(root.at("Bo"));
    if (root.contains("modes")) cfg.modes = integer_field(root, "modes");
    cfg.layers = root.contains("layers") ? integer_field(root, "layers") : default_layers(cfg.container);
    if (root.contains("refinements")) cfg.refinements = integer_field(root, "refinements");
    if (root.contains("formulation")) {
      if (!root.at("formulation").is_string()) throw InvalidSpec("formulation must be a string");
      cfg.formulation = parse_formulation(root.at("formulation").get<std::string>());
    }
    if (root.contains("output_dir")) {
      if (!root.at("output_dir").is_string()) throw InvalidSpec("output_dir must be a string");
      cfg.output_dir = root.at("output_dir").get<std::string>();
    }
    if (root.contains("seed")) {
      const json& s = root.at("seed");
      if (!s.is_number_unsigned()) throw InvalidSpec("seed must be a non-negative integer");
      cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("sweep_Bo")) {
      const json& list = root.at("sweep_Bo");
      if (!list.is_array() || list.empty()) throw InvalidSpec("sweep_Bo must be a non-empty list");
      for (const auto& v : list) cfg.sweep_bonds.push_back(bond_value(v));
    }
    if (root.contains("compare_depth")) cfg.compare_depth = number_field(root, "compare_depth");
    if (root.contains("fault")) {
      const json& f = root.at("fault");
      if (f == "none") {
        cfg.fault = Fault::None;
      } else if (f == "sign-flip") {
        cfg.fault = Fault::SignFlip;
      } else {
        throw InvalidSpec("fault must be \"none\" or \"sign-flip\"");
      }
    }
  } catch (const InvalidArgument& e) {
    throw InvalidSpec(e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

double exact_fundamental(const ContainerSpec& spec, BondNumber bond) {
  spec.validate();
  if (spec.shape == Shape::Disk) {
    // Wavenumber z11 / a in the container's own length units.
    const double k = analytic::bessel_jp_root(1, 1) / spec.radius;
    return std::sqrt(k * std::tanh(k * spec.depth) * (1.0 + k * k * bond.inverse()));
  }
  return std::sqrt(analytic::box_fundamental(spec.lx, spec.ly, spec.depth, bond).omega_sq);
}

ConvergenceStudy convergence_study(const ContainerSpec& spec, int layers, BondNumber bond, int refinements) {
  if (refinements < 1 || refinements > kMaxRefinements) throw InvalidArgument("refinements must be in [1, 5]");
  const double exact = exact_fundamental(spec, bond);
  ConvergenceStudy study;
  ContainerMesh mesh = build_mesh(spec, layers);
  for (int level = 0; level <= refinements; ++level) {
    if (level > 0) mesh = refine(mesh);
    ConvergenceLevel l;
    l.level = level;
    l.surface_nodes = mesh.surface.node_count();
    l.volume_nodes = mesh.volume.node_count();
    l.omega = solve_reduced(assemble(mesh, bond), 1).modes.front().omega;
    l.exact = exact;
    l.rel_error = std::abs(l.omega - exact) / exact;
    l.order = level == 0 ? std::numeric_limits<double>::quiet_NaN()
                         : std::log2(study.levels.back().rel_error / l.rel_error);
    study.levels.push_back(l);
  }
  const std::size_t first = study.levels.size() > 2 ? 1 : 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(study.levels.size() - first);
  for (std::size_t i = first; i < study.levels.size(); ++i) {
    const double x = study.levels[i].level;
    const double y = -std::log2(study.levels[i].rel_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  study.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear sloshing eigenfrequencies with surface tension"};
  app.require_subcommand(1);
  std::string config_path, out_dir, bo_text, formulation_text;
  std::optional<int> modes;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "Solve for the first modes and write spectrum, mode and energy files"},
      {"verify", "Run every identity check and report PASS/FAIL per check"},
      {"sweep", "Track modes across the sweep_Bo list"},
      {"perturb", "Compare the large-Bond slope formula with finite differences"},
      {"convergence", "Fundamental frequency error under uniform refinement"},
      {"monotonicity", "Compare fundamental frequencies at two depths"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--modes", modes, "Mode count (overrides modes)");
    sub->add_option("--bo", bo_text, "Bond number or inf (overrides Bo)");
    sub->add_option("--formulation", formulation_text, "coupled, reduced or both");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    config = load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (modes) config.modes = *modes;
    if (!bo_text.empty()) config.bond = BondNumber::parse(bo_text);
    if (!formulation_text.empty()) config.formulation = parse_formulation(formulation_text);
    config.validate();
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  const Context ctx{config, out, err};
  try {
    if (command == "solve") return cmd_solve(ctx);
    if (command == "verify") return cmd_verify(ctx);
    if (command == "sweep") return cmd_sweep(ctx);
    if (command == "perturb") return cmd_perturb(ctx);
    if (command == "convergence") return cmd_convergence(ctx);
    return cmd_monotonicity(ctx);
  } catch (const InvalidSpec& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IdentityViolation& e) {
    err << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace slosh
