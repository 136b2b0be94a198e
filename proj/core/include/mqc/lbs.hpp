#pragma once
#include <Eigen/SparseCore>
#include <utility>
#include <vector>

#include "mqc/beltrami.hpp"
#include "mqc/cut.hpp"
#include "mqc/mesh.hpp"

namespace mqc {

/// The constraint Gamma of the least-squares Beltrami solve: a landmark
/// pin set (>= 2 pins), a full Dirichlet boundary assignment, or the
/// genus-1 lattice identifications plus one translation-fixing pin.
struct Constraint {
    enum class Mode { landmark, dirichlet, periodic };
    Mode mode = Mode::landmark;
    std::vector<std::pair<int, Vec2>> pins;  // (vertex index, target)
    const CutMesh* cover = nullptr;          // periodic mode only

    static Constraint landmark(std::vector<std::pair<int, Vec2>> pins);
    /// Pins every boundary vertex of `mesh` at its position in `boundary_values`.
    static Constraint dirichlet(const TriMesh& mesh, const Embedding2D& boundary_values);
    static Constraint dirichlet(std::vector<std::pair<int, Vec2>> boundary_pins);
    /// One pin (on an open-mesh vertex) fixes the translation.
    static Constraint periodic(const CutMesh& cover, int pin_vertex, Vec2 pin_target);
};

/// The discretized quadratic forms of the anisotropic Dirichlet energy and
/// the area functional:
///   E_A(u) = u^t L u,   Area(u,v) = (u v) [0 U; -U 0] (u v),
///   M = [L -U; U L].
/// L has constants in its null space, U is skew-symmetric, M is symmetric.
struct AssembledSystem {
    const TriMesh* mesh = nullptr;
    Eigen::SparseMatrix<double> L;  // n x n
    Eigen::SparseMatrix<double> U;  // n x n
    Eigen::SparseMatrix<double> M;  // 2n x 2n, ordering (u..., v...)
};

/// Generalized Laplacian assembly over a planar chart.
AssembledSystem assemble(const Embedding2D& chart, const BeltramiField& mu);

/// Same assembly with per-face isometric local frames of a (possibly 3D)
/// embedding; equals assemble(chart, mu) when the mesh is planar.
AssembledSystem assemble_intrinsic(const TriMesh& mesh, const BeltramiField& mu);

struct LbsResult {
    Embedding2D map;
    double residual = 0.0;  // relative residual of the reduced solve
};

/// Minimizes the assembled energy under the constraint: landmark mode uses
/// the full matrix M, Dirichlet and periodic modes the Laplacian L alone.
LbsResult solve_lbs(const AssembledSystem& system, const Constraint& constraint);

/// The two most distant boundary vertices, mapped to (0,0) and (1,0).
std::vector<std::pair<int, Vec2>> default_pins(const TriMesh& mesh);

}  // namespace mqc
