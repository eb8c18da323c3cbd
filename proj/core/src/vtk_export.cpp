#include "gregsolid/vtk_export.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace gregsolid {
namespace {

/// Shortest decimal form that parses back to the identical double.
std::string number(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

std::vector<double> vertex_min_jacobians(const HexGrid& mesh, const JacobianVector& jv) {
    if (jv.values.size() != 8 * mesh.cells.size())
        throw ArgumentError("Jacobian vector holds " + std::to_string(jv.values.size()) +
                            " entries but the mesh has " + std::to_string(mesh.cells.size()) +
                            " cells (8 corners each)");
    std::vector<double> out(mesh.vertices.size(), std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c)
        for (int h = 0; h < 8; ++h) {
            const auto v = static_cast<std::size_t>(mesh.cells[c][static_cast<std::size_t>(h)]);
            const double j = jv.values[8 * c + static_cast<std::size_t>(h)];
            if (j < out[v]) out[v] = j;
        }
    // a vertex used by no cell carries no quality information
    for (double& v : out)
        if (v == std::numeric_limits<double>::infinity()) v = 0.0;
    return out;
}

void export_vtk(const HexGrid& mesh, const JacobianVector& jv, const std::string& path) {
    const std::vector<double> scalars = vertex_min_jacobians(mesh, jv);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    out << "# vtk DataFile Version 3.0\n";
    out << "gregsolid hexahedral grid\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertices.size() << " double\n";
    for (const Vec3& p : mesh.vertices)
        out << number(p.x()) << ' ' << number(p.y()) << ' ' << number(p.z()) << '\n';
    out << "CELLS " << mesh.cells.size() << ' ' << 9 * mesh.cells.size() << '\n';
    for (const auto& cell : mesh.cells) {
        out << '8';
        for (const int v : cell) out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.cells.size() << '\n';
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) out << "12\n";
    out << "POINT_DATA " << mesh.vertices.size() << '\n';
    out << "SCALARS scaled_jacobian double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (const double s : scalars) out << number(s) << '\n';

    out.flush();
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace gregsolid
