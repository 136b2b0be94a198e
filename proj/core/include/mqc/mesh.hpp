#pragma once
#include <array>
#include <string>
#include <vector>

#include "mqc/vec.hpp"

namespace mqc {

/// Shared triangle-mesh connectivity plus a 2D or 3D embedding of the
/// vertices. Immutable after build(); all derived adjacency is precomputed.
///
/// build() validates the invariants: positive face areas, consistent
/// winding, edge-manifoldness, single-component connectivity and
/// fan-shaped vertex links (no dangling points). Meshes violating any of
/// them are rejected with a distinct validation error.
class TriMesh {
public:
    struct DualEdge {
        int face_a, face_b;      // the two faces sharing the edge
        int vert_a, vert_b;      // edge endpoints, oriented as seen from face_a
    };

    static TriMesh build(std::vector<Vec3> vertices,
                         std::vector<std::array<int, 3>> faces);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_edges() const { return edge_count_; }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::array<int, 3>& face(int f) const { return faces_[f]; }
    const Vec3& vertex(int v) const { return vertices_[v]; }

    /// Faces incident to a vertex, in index order.
    const std::vector<int>& vertex_faces(int v) const { return vertex_faces_[v]; }
    /// Interior (two-sided) edges, one record each.
    const std::vector<DualEdge>& dual_edges() const { return dual_edges_; }
    /// Ordered boundary vertex loops; empty for closed meshes.
    const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }
    bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }

    /// Opposite halfedge of halfedge k of face f (edge face[k]->face[k+1]),
    /// encoded as 3*f'+k', or -1 on the boundary.
    int twin(int f, int k) const { return twins_[3 * f + k]; }

    int euler_characteristic() const {
        return num_vertices() - num_edges() + num_faces();
    }
    bool is_closed() const { return boundary_loops_.empty(); }
    /// Genus of a closed mesh (2 - chi)/2.
    int genus() const { return (2 - euler_characteristic()) / 2; }

    double face_area(int f) const;
    double total_area() const;
    Vec3 face_centroid(int f) const;
    /// Squared bounding-box diagonal; scale for the degeneracy tolerance.
    double bbox_diag_sq() const { return bbox_diag_sq_; }

private:
    TriMesh() = default;
    void build_connectivity();

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<int> twins_;
    std::vector<std::vector<int>> vertex_faces_;
    std::vector<TriMesh::DualEdge> dual_edges_;
    std::vector<std::vector<int>> boundary_loops_;
    std::vector<char> boundary_vertex_;
    int edge_count_ = 0;
    double bbox_diag_sq_ = 0.0;
};

/// Piecewise-linear map of a TriMesh into the plane, stored as per-vertex
/// image positions.
struct Embedding2D {
    const TriMesh* parent = nullptr;
    std::vector<Vec2> positions;

    Embedding2D() = default;
    Embedding2D(const TriMesh& mesh, std::vector<Vec2> pos)
        : parent(&mesh), positions(std::move(pos)) {}

    const Vec2& pos(int v) const { return positions[v]; }
    double signed_area(int f) const;
    double total_signed_area() const;
    Vec2 face_centroid(int f) const;

    /// Number of image triangles with signed area <= 0. Zero means the PL
    /// map is locally injective on faces.
    int orientation_report() const;
    bool fold_free() const { return orientation_report() == 0; }
};

// --- per-face geometry kernels -------------------------------------------

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c);

/// Gradient of the linear interpolant of `values` over a non-degenerate
/// triangle: (1/2A) * Rot90 * sum_i u_i (w_{2+i} - w_{1+i}), indices mod 3.
Vec2 pl_gradient(const std::array<Vec2, 3>& corners,
                 const std::array<double, 3>& values);

/// Gradients of the three hat functions on a triangle.
std::array<Vec2, 3> hat_gradients(const std::array<Vec2, 3>& corners);

/// Isometric unfolding of a (possibly 3D) triangle into local 2D
/// coordinates: a at the origin, b on the positive x-axis.
std::array<Vec2, 3> local_frame(const Vec3& a, const Vec3& b, const Vec3& c);

/// Area tolerance below which a face counts as degenerate.
inline double degeneracy_tolerance(double bbox_diag_sq) {
    return 1e-14 * bbox_diag_sq;
}

}  // namespace mqc
