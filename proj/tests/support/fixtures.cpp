#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "mqc/driver.hpp"
#include "mqc/error.hpp"

namespace mqc::testing {

TriMesh grid_mesh(int nx, int ny, double w, double h) {
    std::vector<Vec3> verts;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            verts.push_back({w * i / nx, h * j / ny, 0.0});
    const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> faces;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return TriMesh::build(std::move(verts), std::move(faces));
}

TriMesh jittered_grid(int nx, int ny, unsigned seed, double amount) {
    TriMesh base = grid_mesh(nx, ny);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> jit(-amount, amount);
    std::vector<Vec3> verts = base.vertices();
    const double hx = 1.0 / nx, hy = 1.0 / ny;
    for (int v = 0; v < base.num_vertices(); ++v) {
        if (base.is_boundary_vertex(v)) continue;
        verts[v].x += jit(rng) * hx;
        verts[v].y += jit(rng) * hy;
    }
    return TriMesh::build(std::move(verts), base.faces());
}

TriMesh bad_quality_mesh(int nx, int ny, unsigned seed) {
    TriMesh base = jittered_grid(nx, ny, seed, 0.35);
    std::vector<Vec3> verts = base.vertices();
    for (auto& v : verts) v.x *= 3.0;
    return TriMesh::build(std::move(verts), base.faces());
}

TriMesh structured_disk(int n) {
    TriMesh base = grid_mesh(2 * n, 2 * n, 2.0, 2.0);
    std::vector<Vec3> verts = base.vertices();
    for (auto& v : verts) {
        const double x = v.x - 1.0, y = v.y - 1.0;
        const double r = std::hypot(x, y);
        if (r > 0.0) {
            const double s = std::max(std::abs(x), std::abs(y)) / r;
            v = {x * s, y * s, 0.0};
        } else {
            v = {0.0, 0.0, 0.0};
        }
    }
    return TriMesh::build(std::move(verts), base.faces());
}

namespace {

struct DelaunayTri {
    std::array<int, 3> v;
    bool alive = true;
};

bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
    const double ax = a.x - p.x, ay = a.y - p.y;
    const double bx = b.x - p.x, by = b.y - p.y;
    const double cx = c.x - p.x, cy = c.y - p.y;
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                       (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > 0.0;  // assumes (a,b,c) counter-clockwise
}

// Bowyer-Watson triangulation of the first n points (a super-triangle is
// appended internally and its faces discarded).
std::vector<std::array<int, 3>> bowyer_watson(std::vector<Vec2> pts) {
    const int n = static_cast<int>(pts.size());
    pts.push_back({-100.0, -100.0});
    pts.push_back({100.0, -100.0});
    pts.push_back({0.0, 100.0});
    std::vector<DelaunayTri> tris{{{n, n + 1, n + 2}, true}};
    for (int p = 0; p < n; ++p) {
        std::map<std::pair<int, int>, int> boundary_edges;
        for (auto& t : tris) {
            if (!t.alive) continue;
            if (in_circumcircle(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[p])) {
                t.alive = false;
                for (int k = 0; k < 3; ++k) {
                    const int a = t.v[k], b = t.v[(k + 1) % 3];
                    // an edge shared by two removed triangles cancels out
                    auto rev = boundary_edges.find({b, a});
                    if (rev != boundary_edges.end())
                        boundary_edges.erase(rev);
                    else
                        boundary_edges[{a, b}] = 1;
                }
            }
        }
        for (const auto& [e, _] : boundary_edges) tris.push_back({{e.first, e.second, p}, true});
        std::erase_if(tris, [](const DelaunayTri& t) { return !t.alive; });
    }
    std::vector<std::array<int, 3>> faces;
    for (const auto& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
        faces.push_back(t.v);
    }
    return faces;
}

}  // namespace

TriMesh delaunay_disk(int n_interior, int n_boundary, unsigned seed) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n_boundary; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n_boundary;
        // tiny radial perturbation breaks the exact cocircularity of the
        // boundary ring, which otherwise makes the incircle tests ambiguous
        const double r = 1.0 + 1e-7 * std::cos(3.7 * i + 0.5);
        pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    while (static_cast<int>(pts.size()) < n_boundary + n_interior) {
        const Vec2 p{uni(rng), uni(rng)};
        if (p.squared_norm() > 0.85 * 0.85) continue;
        bool ok = true;  // crude minimum spacing keeps triangle quality sane
        const double min_d = 0.8 / std::sqrt(static_cast<double>(n_interior));
        for (const auto& q : pts)
            if ((p - q).squared_norm() < min_d * min_d) {
                ok = false;
                break;
            }
        if (ok) pts.push_back(p);
    }

    // Lloyd-style smoothing sweeps: interior points move to the average of
    // their Delaunay neighbors, evening out the size distribution so that
    // the smallest faces are not far below the mean.
    for (int sweep = 0; sweep < 4; ++sweep) {
        const auto faces = bowyer_watson(pts);
        std::vector<Vec2> acc(pts.size(), {0.0, 0.0});
        std::vector<int> cnt(pts.size(), 0);
        for (const auto& t : faces)
            for (int k = 0; k < 3; ++k) {
                acc[t[k]] += pts[t[(k + 1) % 3]] + pts[t[(k + 2) % 3]];
                cnt[t[k]] += 2;
            }
        for (size_t i = n_boundary; i < pts.size(); ++i)
            if (cnt[i] > 0) pts[i] = (1.0 / cnt[i]) * acc[i];
    }

    auto faces = bowyer_watson(pts);
    std::vector<Vec3> verts;
    for (const auto& p : pts) verts.push_back({p.x, p.y, 0.0});
    return TriMesh::build(std::move(verts), std::move(faces));
}

TriMesh polar_disk(int m, double alpha) {
    std::vector<Vec3> verts{{0.0, 0.0, 0.0}};
    std::vector<int> ring_start{0};  // index of the first vertex of ring j
    std::vector<int> counts{0};      // vertex count of ring j
    for (int j = 1; j <= m; ++j) {
        ring_start.push_back(static_cast<int>(verts.size()));
        const int nj = std::max(3, static_cast<int>(std::lround(alpha * j)));
        counts.push_back(nj);
        const double r = static_cast<double>(j) / m;
        for (int i = 0; i < nj; ++i) {
            const double a = 2.0 * std::numbers::pi * i / nj;
            verts.push_back({r * std::cos(a), r * std::sin(a), 0.0});
        }
    }
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < counts[1]; ++i)  // center fan
        faces.push_back({0, 1 + i, 1 + (i + 1) % counts[1]});
    // zipper between consecutive rings: advance whichever ring's next
    // vertex comes first in angle
    for (int j = 2; j <= m; ++j) {
        const int na = counts[j - 1], nb = counts[j];
        const int sa = ring_start[j - 1], sb = ring_start[j];
        const auto ang = [](int i, int n) { return 2.0 * std::numbers::pi * i / n; };
        int a = 0, b = 0;
        while (a < na || b < nb) {
            const double next_a = a < na ? ang(a + 1, na) : 1e9;
            const double next_b = b < nb ? ang(b + 1, nb) : 1e9;
            if (next_a < next_b) {
                faces.push_back({sa + a % na, sb + b % nb, sa + (a + 1) % na});
                ++a;
            } else {
                faces.push_back({sa + a % na, sb + b % nb, sb + (b + 1) % nb});
                ++b;
            }
        }
    }
    return TriMesh::build(std::move(verts), std::move(faces));
}

TriMesh cap_surface(int n, double R) {
    TriMesh disk = structured_disk(n);
    std::vector<Vec3> verts = disk.vertices();
    const double base = std::sqrt(R * R - 1.0);
    for (auto& v : verts) v.z = std::sqrt(R * R - v.x * v.x - v.y * v.y) - base;
    return TriMesh::build(std::move(verts), disk.faces());
}

TriMesh bump_disk(int n, double height, Vec2 center) {
    TriMesh disk = structured_disk(n);
    std::vector<Vec3> verts = disk.vertices();
    for (auto& v : verts) {
        const double d2 = (v.xy() - center).squared_norm();
        v.z = height * std::exp(-4.0 * d2);
    }
    return TriMesh::build(std::move(verts), disk.faces());
}

TriMesh torus_mesh(int nx, int ny, double R_major, double r_minor) {
    std::vector<Vec3> verts;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            // half-step offset keeps even tiny (2x2) grids non-degenerate
            const double u = 2.0 * std::numbers::pi * (i + 0.5) / nx;
            const double v = 2.0 * std::numbers::pi * (j + 0.5) / ny;
            const double w = R_major + r_minor * std::cos(v);
            verts.push_back({w * std::cos(u), w * std::sin(u), r_minor * std::sin(v)});
        }
    const auto id = [nx, ny](int i, int j) { return ((j + ny) % ny) * nx + (i + nx) % nx; };
    std::vector<std::array<int, 3>> faces;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return TriMesh::build(std::move(verts), std::move(faces));
}

Embedding2D identity_embedding(const TriMesh& mesh) {
    std::vector<Vec2> pos(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) pos[v] = mesh.vertex(v).xy();
    return {mesh, std::move(pos)};
}

Embedding2D affine_embedding(const TriMesh& mesh, double a11, double a12, double a21, double a22,
                             Vec2 shift) {
    std::vector<Vec2> pos(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec2 p = mesh.vertex(v).xy();
        pos[v] = {a11 * p.x + a12 * p.y + shift.x, a21 * p.x + a22 * p.y + shift.y};
    }
    return {mesh, std::move(pos)};
}

TriMesh refine_uniform(const TriMesh& mesh) {
    std::vector<Vec3> verts = mesh.vertices();
    std::map<std::pair<int, int>, int> midpoint;
    const auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = static_cast<int>(verts.size());
        verts.push_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)));
        midpoint[key] = id;
        return id;
    };
    std::vector<std::array<int, 3>> faces;
    for (const auto& t : mesh.faces()) {
        const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
        faces.push_back({t[0], m01, m20});
        faces.push_back({m01, t[1], m12});
        faces.push_back({m20, m12, t[2]});
        faces.push_back({m01, m12, m20});
    }
    return TriMesh::build(std::move(verts), std::move(faces));
}

double quad7(const std::array<Vec2, 3>& corners, const std::function<double(Vec2)>& fn) {
    // degree-5 rule (Radon): centroid + two symmetric orbits
    static const double w0 = 9.0 / 40.0;
    static const double a1 = 0.059715871789770, b1 = 0.470142064105115,
                        w1 = 0.132394152788506;
    static const double a2 = 0.797426985353087, b2 = 0.101286507323456,
                        w2 = 0.125939180544827;
    const auto at = [&](double l0, double l1, double l2) {
        return fn({l0 * corners[0].x + l1 * corners[1].x + l2 * corners[2].x,
                   l0 * corners[0].y + l1 * corners[1].y + l2 * corners[2].y});
    };
    double s = w0 * at(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    s += w1 * (at(a1, b1, b1) + at(b1, a1, b1) + at(b1, b1, a1));
    s += w2 * (at(a2, b2, b2) + at(b2, a2, b2) + at(b2, b2, a2));
    return s * std::abs(triangle_signed_area(corners[0], corners[1], corners[2]));
}

double mean_quality(const Embedding2D& map) { return mean_triangle_quality(map); }

}  // namespace mqc::testing
