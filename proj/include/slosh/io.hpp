#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "slosh/analytic.hpp"
#include "slosh/eigensolve.hpp"
#include "slosh/geometry.hpp"
#include "slosh/perturbation.hpp"
#include "slosh/verify.hpp"

namespace slosh::io {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file. Throws Error on I/O failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip-safe text: 17 significant digits.
std::string format_double(double value);

/// mode_index,omega,omega_squared,D_energy,S_energy,coupling (1-based index).
std::string spectrum_csv(const Spectrum& spectrum, const OperatorSet& ops);
/// n,m,z_nm,h_over_a,Bo,lambda_sq,omega_sq
std::string dispersion_csv(std::span<const analytic::DispersionPoint> points);
/// Bo,mode_index,omega,tracking_overlap
std::string sweep_csv(const SweepResult& sweep);
/// mode_index,omega0,slope_formula,slope_fd,rel_error (1-based index).
std::string perturbation_csv(std::span<const PerturbationReport> reports);

/// Legacy ASCII VTK unstructured grids. Point data is attached when given.
std::string volume_vtk(const VolumeMesh& mesh, const VectorXd* phi = nullptr);
std::string surface_vtk(const SurfaceMesh& mesh, const VectorXd* xi = nullptr);

/// Lower triangle of a symmetric matrix in 1-based MatrixMarket coordinates.
std::string matrix_market(const SparseMatrix& matrix);

/// One text line per check, as produced by format_check.
std::string checks_text(std::span<const CheckResult> checks);
/// JSON array mirroring the text report.
std::string checks_json(std::span<const CheckResult> checks);

}  // namespace slosh::io
