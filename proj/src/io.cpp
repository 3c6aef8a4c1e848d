#include "slosh/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "slosh/errors.hpp"

namespace slosh::io {

namespace {

void vtk_points(std::ostringstream& out, std::size_t count) {
  out << "# vtk DataFile Version 3.0\n"
      << "slosh\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << count << " double\n";
}

void vtk_scalars(std::ostringstream& out, const char* name, const VectorXd& values) {
  out << "POINT_DATA " << values.size() << "\n"
      << "SCALARS " << name << " double 1\n"
      << "LOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << "\n";
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string spectrum_csv(const Spectrum& spectrum, const OperatorSet& ops) {
  std::ostringstream out;
  out << "mode_index,omega,omega_squared,D_energy,S_energy,coupling\n";
  const OperatorSet at_bond = ops.with_bond(spectrum.bond);
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto& m = spectrum.modes[i];
    out << i + 1 << ',' << format_double(m.omega) << ',' << format_double(m.omega * m.omega) << ','
        << format_double(at_bond.dirichlet_energy(m.phi)) << ',' << format_double(at_bond.surface_energy(m.xi))
        << ',' << format_double(at_bond.coupling(m.phi, m.xi)) << '\n';
  }
  return out.str();
}

std::string dispersion_csv(std::span<const analytic::DispersionPoint> points) {
  std::ostringstream out;
  out << "n,m,z_nm,h_over_a,Bo,lambda_sq,omega_sq\n";
  for (const auto& p : points) {
    out << p.n << ',' << p.m << ',' << format_double(p.z) << ',' << format_double(p.h_over_a) << ','
        << p.bond.to_string() << ',' << format_double(p.lambda_sq) << ',' << format_double(p.omega_sq) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "Bo,mode_index,omega,tracking_overlap\n";
  for (const auto& e : sweep.entries) {
    out << e.bond.to_string() << ',' << e.mode_index << ',' << format_double(e.omega) << ','
        << format_double(e.tracking_overlap) << '\n';
  }
  return out.str();
}

std::string perturbation_csv(std::span<const PerturbationReport> reports) {
  std::ostringstream out;
  out << "mode_index,omega0,slope_formula,slope_fd,rel_error\n";
  for (const auto& r : reports) {
    out << r.mode_index + 1 << ',' << format_double(r.omega0) << ',' << format_double(r.slope_formula) << ','
        << format_double(r.slope_fd) << ',' << format_double(r.rel_error) << '\n';
  }
  return out.str();
}

std::string volume_vtk(const VolumeMesh& mesh, const VectorXd* phi) {
  std::ostringstream out;
  vtk_points(out, mesh.nodes.size());
  for (const auto& p : mesh.nodes) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  }
  out << "CELLS " << mesh.tets.size() << ' ' << 5 * mesh.tets.size() << '\n';
  for (const auto& t : mesh.tets) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << mesh.tets.size() << '\n';
  for (std::size_t i = 0; i < mesh.tets.size(); ++i) out << "10\n";
  if (phi) {
    if (phi->size() != mesh.node_count()) throw DimensionMismatch("phi does not match the volume mesh");
    vtk_scalars(out, "phi", *phi);
  }
  return out.str();
}

std::string surface_vtk(const SurfaceMesh& mesh, const VectorXd* xi) {
  std::ostringstream out;
  vtk_points(out, mesh.nodes.size());
  for (const auto& p : mesh.nodes) out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  out << "CELLS " << mesh.triangles.size() << ' ' << 4 * mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.triangles.size() << '\n';
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";
  if (xi) {
    if (xi->size() != mesh.node_count()) throw DimensionMismatch("xi does not match the surface mesh");
    vtk_scalars(out, "xi", *xi);
  }
  return out.str();
}

std::string matrix_market(const SparseMatrix& matrix) {
  std::ostringstream body;
  std::size_t count = 0;
  for (Eigen::Index c = 0; c < matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(matrix, c); it; ++it) {
      if (it.row() < it.col()) continue;
      body << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
      ++count;
    }
  }
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real symmetric\n"
      << matrix.rows() << ' ' << matrix.cols() << ' ' << count << '\n'
      << body.str();
  return out.str();
}

std::string checks_text(std::span<const CheckResult> checks) {
  std::string out;
  for (const auto& c : checks) out += format_check(c) + "\n";
  return out;
}

std::string checks_json(std::span<const CheckResult> checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"status", c.passed ? "PASS" : "FAIL"},
                   {"residual", c.residual},
                   {"ref", c.ref},
                   {"detail", c.detail}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace slosh::io
