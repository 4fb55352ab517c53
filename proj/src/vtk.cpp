#include "xfem3d1d/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace xfem3d1d {

void write_vtk(std::ostream& out, const TetMesh& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_scalars, const std::string& title) {
  for (const auto& [name, values] : point_scalars)
    if (values.size() != mesh.num_vertices())
      throw std::invalid_argument("write_vtk: field '" + name + "' does not match the vertex count");

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  out << "CELLS " << mesh.num_tets() << ' ' << 5 * mesh.num_tets() << '\n';
  for (const auto& t : mesh.tets) out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << mesh.num_tets() << '\n';
  for (int e = 0; e < mesh.num_tets(); ++e) out << "10\n";
  if (point_scalars.empty()) return;
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (const auto& [name, values] : point_scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < values.size(); ++i) out << values[i] << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const TetMesh& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_scalars, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path.string());
  write_vtk(out, mesh, point_scalars, title);
  if (!out) throw std::runtime_error("write_vtk: write failed for " + path.string());
}

}  // namespace xfem3d1d
