#pragma once
#include <array>
#include <vector>

#include "mqc/mesh.hpp"

namespace mqc {

/// A genus-1 closed mesh cut open to a disk, with the bookkeeping needed
/// for periodic (flat-torus) parameterization: every open vertex projects
/// to an original vertex and carries an integer lattice-translation tag,
/// so that any admissible map f satisfies
///   f(v1) - f(v2) = (tag(v1) - tag(v2)) . [L1 L2]
/// for identified copies v1, v2.
struct CutMesh {
    TriMesh open_mesh;                        // disk topology, same face list
    std::vector<int> projection;              // open vertex -> original vertex
    std::vector<std::array<int, 2>> tags;     // lattice tag per open vertex
    std::array<Vec2, 2> lattice;
    std::vector<std::vector<int>> copies;     // original vertex -> its open copies

    /// Plane position implied by a per-original-vertex base position.
    Vec2 unfold(int open_vertex, const Vec2& base) const {
        const auto& t = tags[open_vertex];
        return base + static_cast<double>(t[0]) * lattice[0] +
               static_cast<double>(t[1]) * lattice[1];
    }
    Vec2 tag_offset(int open_vertex) const {
        const auto& t = tags[open_vertex];
        return static_cast<double>(t[0]) * lattice[0] +
               static_cast<double>(t[1]) * lattice[1];
    }
};

/// Cuts a closed genus-1 mesh open along a homology basis found by
/// tree-cotree decomposition (pruned to the two generator loops) and
/// derives the lattice tags by integrating two integer 1-cocycles over the
/// resulting disk.
CutMesh cut_torus(const TriMesh& mesh, const std::array<Vec2, 2>& lattice);

}  // namespace mqc
