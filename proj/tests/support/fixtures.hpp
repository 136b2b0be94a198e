#pragma once
#include <array>
#include <functional>
#include <vector>

#include "mqc/mesh.hpp"

namespace mqc::testing {

/// Structured grid on [0,w] x [0,h] with nx x ny cells, each split into
/// two triangles; planar (z = 0), counter-clockwise faces.
TriMesh grid_mesh(int nx, int ny, double w = 1.0, double h = 1.0);

/// Grid with interior vertices jittered by amount*cell (deterministic),
/// still fold-free.
TriMesh jittered_grid(int nx, int ny, unsigned seed, double amount = 0.25);

/// Low-quality planar fixture: jittered grid stretched 3:1 in x.
TriMesh bad_quality_mesh(int nx, int ny, unsigned seed);

/// Unit-disk mesh from a (2n x 2n) grid mapped square-to-disk radially;
/// 2n*2n*2 faces.
TriMesh structured_disk(int n);

/// Delaunay triangulation (Bowyer-Watson) of n_boundary evenly spaced
/// circle points plus n_interior random points in the unit disk.
TriMesh delaunay_disk(int n_interior, int n_boundary, unsigned seed);

/// Polar unit-disk mesh: m concentric rings, ring j carrying
/// max(3, round(alpha*j)) vertices; roughly alpha*m^2 faces. alpha = 6
/// gives near-equilateral faces; smaller alpha trades azimuthal for
/// radial resolution (faces azimuthally elongated, radially fine).
TriMesh polar_disk(int m, double alpha = 6.0);

/// Disk mesh lifted onto a spherical cap z = sqrt(R^2 - r^2) - sqrt(R^2 - 1).
TriMesh cap_surface(int n, double R = 1.2);

/// Disk mesh with a Gaussian bump z = height * exp(-4 |x - c|^2).
TriMesh bump_disk(int n, double height = 0.4, Vec2 center = {0.3, 0.2});

/// Structured nx x ny torus: grid connectivity with wrap-around, embedded
/// in 3D with radii (R_major, r_minor).
TriMesh torus_mesh(int nx, int ny, double R_major = 2.0, double r_minor = 0.5);

/// Planar identity embedding (drops z).
Embedding2D identity_embedding(const TriMesh& mesh);

/// Embedding transformed by an affine map of the xy coordinates.
Embedding2D affine_embedding(const TriMesh& mesh, double a11, double a12, double a21, double a22,
                             Vec2 shift = {0.0, 0.0});

/// Uniform 1->4 refinement (edge midpoints).
TriMesh refine_uniform(const TriMesh& mesh);

/// 7-point degree-5 triangle quadrature of fn over one planar face.
double quad7(const std::array<Vec2, 3>& corners, const std::function<double(Vec2)>& fn);

/// Mean of 2 r_in / R_circ over the faces of a planar embedding (1 for
/// equilateral triangles).
double mean_quality(const Embedding2D& map);

}  // namespace mqc::testing
