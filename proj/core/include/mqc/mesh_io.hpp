#pragma once
#include <string>

#include "mqc/mesh.hpp"

namespace mqc {

enum class MeshFormat { obj, off };

MeshFormat format_from_path(const std::string& path);

/// Reads an OBJ (v/f lines only) or OFF triangle mesh, normalizes the
/// winding to be globally consistent (and positively oriented for planar
/// meshes), and returns a validated TriMesh.
TriMesh load_mesh(const std::string& path);
TriMesh load_mesh(const std::string& path, MeshFormat format);

/// Writers emit vertex coordinates with 17 significant digits so that
/// write/read round trips are bit-stable.
void save_mesh(const TriMesh& mesh, const std::string& path);
void save_mesh(const TriMesh& mesh, const std::string& path, MeshFormat format);

/// Saves a 2D embedding as a mesh with z = 0.
void save_embedding(const Embedding2D& map, const std::string& path);

/// Reads only the vertex positions, in file order, without validation or
/// winding changes; stored embeddings may contain inverted faces that
/// load_mesh would reject or reorient.
std::vector<Vec3> load_vertex_positions(const std::string& path);

}  // namespace mqc
