#pragma once

#include "xfem3d1d/mesh.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace xfem3d1d {

/// Legacy ASCII VTK unstructured grid of tetrahedra (cell type 10) with
/// per-vertex scalar fields.
void write_vtk(std::ostream& out, const TetMesh& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_scalars,
               const std::string& title = "xfem3d1d");

void write_vtk(const std::filesystem::path& path, const TetMesh& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_scalars,
               const std::string& title = "xfem3d1d");

}  // namespace xfem3d1d
