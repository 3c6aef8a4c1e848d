#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slosh/bond.hpp"
#include "slosh/geometry.hpp"
#include "slosh/verify.hpp"

namespace slosh {

enum class Formulation { Coupled, Reduced, Both };

/// Batch configuration, read from JSON:
///   {"container": {"shape": "disk", "radius": 1, "depth": 1, "resolution": 4},
///    "Bo": "inf", "modes": 5, "layers": 4, "refinements": 0,
///    "formulation": "both", "output_dir": "out", "seed": 0}
/// Optional: "sweep_Bo" (list of numbers or "inf"), "compare_depth",
/// "fault" ("none" | "sign-flip", a test hook).
/// Rectangles use "Lx" and "Ly" instead of "radius".
struct RunConfig {
  ContainerSpec container;
  BondNumber bond = BondNumber::infinite();
  int modes = 5;
  /// Extrusion layers of the unrefined mesh; derived from resolution and
  /// depth when absent.
  int layers = 0;
  int refinements = 0;
  Formulation formulation = Formulation::Both;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::vector<BondNumber> sweep_bonds;
  std::optional<double> compare_depth;
  Fault fault = Fault::None;

  /// InvalidSpec / InvalidArgument on out-of-range fields.
  void validate() const;
  ContainerMesh build() const;
};

/// Parses JSON text. Unknown keys and malformed values raise InvalidSpec.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Default layer count: about one layer per surface edge length of depth.
int default_layers(const ContainerSpec& spec);

struct ConvergenceLevel {
  int level = 0;
  int surface_nodes = 0;
  int volume_nodes = 0;
  double omega = 0.0;
  double exact = 0.0;
  double rel_error = 0.0;
  /// log2(e_{l-1} / e_l), NaN on level 0.
  double order = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  /// Least-squares slope of -log2(error) against level over levels >= 1
  /// (all levels when only one refined level exists).
  double fitted_order = 0.0;
};

/// Fundamental frequency of the exact container solution (cylinder (1,1)
/// mode or the lowest box mode) for the container's geometry.
double exact_fundamental(const ContainerSpec& spec, BondNumber bond);

/// omega_1 on the base mesh and `refinements` uniform refinements, against
/// exact_fundamental. InvalidArgument when refinements < 1 or > 5.
ConvergenceStudy convergence_study(const ContainerSpec& spec, int layers, BondNumber bond, int refinements);

/// Command-line entry point. Returns the process exit code:
/// 0 ok, 1 verification failure, 2 usage or config error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slosh
