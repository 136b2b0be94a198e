#include "mqc/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>

#include "mqc/error.hpp"

namespace mqc {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * (b - a).cross(c - a);
}

Vec2 pl_gradient(const std::array<Vec2, 3>& w, const std::array<double, 3>& u) {
    const double area2 = (w[1] - w[0]).cross(w[2] - w[0]);
    if (area2 == 0.0) fail_validation("pl_gradient: degenerate face");
    Vec2 s{0.0, 0.0};
    for (int i = 0; i < 3; ++i) s += u[i] * (w[(2 + i) % 3] - w[(1 + i) % 3]);
    return (1.0 / area2) * s.rot90();
}

std::array<Vec2, 3> hat_gradients(const std::array<Vec2, 3>& w) {
    const double area2 = (w[1] - w[0]).cross(w[2] - w[0]);
    std::array<Vec2, 3> g;
    for (int i = 0; i < 3; ++i)
        g[i] = (1.0 / area2) * (w[(2 + i) % 3] - w[(1 + i) % 3]).rot90();
    return g;
}

std::array<Vec2, 3> local_frame(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const double lx = e1.norm();
    if (lx == 0.0) fail_validation("local_frame: degenerate face");
    const Vec3 ux = (1.0 / lx) * e1;
    const double px = e2.dot(ux);
    const double py = (e2 - px * ux).norm();
    return {Vec2{0.0, 0.0}, Vec2{lx, 0.0}, Vec2{px, py}};
}

double TriMesh::face_area(int f) const {
    const auto& t = faces_[f];
    return triangle_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double TriMesh::total_area() const {
    double s = 0.0;
    for (int f = 0; f < num_faces(); ++f) s += face_area(f);
    return s;
}

Vec3 TriMesh::face_centroid(int f) const {
    const auto& t = faces_[f];
    return (1.0 / 3.0) * (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]);
}

double Embedding2D::signed_area(int f) const {
    const auto& t = parent->face(f);
    return triangle_signed_area(positions[t[0]], positions[t[1]], positions[t[2]]);
}

double Embedding2D::total_signed_area() const {
    double s = 0.0;
    for (int f = 0; f < parent->num_faces(); ++f) s += signed_area(f);
    return s;
}

Vec2 Embedding2D::face_centroid(int f) const {
    const auto& t = parent->face(f);
    return (1.0 / 3.0) * (positions[t[0]] + positions[t[1]] + positions[t[2]]);
}

int Embedding2D::orientation_report() const {
    int count = 0;
    for (int f = 0; f < parent->num_faces(); ++f)
        if (signed_area(f) <= 0.0) ++count;
    return count;
}

namespace {

// Key for grouping halfedges by their undirected vertex pair.
uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

TriMesh TriMesh::build(std::vector<Vec3> vertices,
                       std::vector<std::array<int, 3>> faces) {
    TriMesh m;
    m.vertices_ = std::move(vertices);
    m.faces_ = std::move(faces);

    const int nv = m.num_vertices();
    const int nf = m.num_faces();
    if (nv < 3 || nf < 1) fail_validation("mesh: needs at least one triangle");

    Vec3 lo = m.vertices_[0], hi = m.vertices_[0];
    for (const auto& p : m.vertices_) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    }
    m.bbox_diag_sq_ = (hi - lo).dot(hi - lo);
    const double area_tol = degeneracy_tolerance(m.bbox_diag_sq_);

    for (int f = 0; f < nf; ++f) {
        const auto& t = m.faces_[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv)
                fail_validation("mesh: vertex index out of range in face " + std::to_string(f));
            if (t[k] == t[(k + 1) % 3])
                fail_validation("mesh: repeated vertex in face " + std::to_string(f));
        }
        if (m.face_area(f) <= area_tol)
            fail_validation("mesh: zero-area face " + std::to_string(f));
    }

    m.build_connectivity();
    return m;
}

void TriMesh::build_connectivity() {
    const int nv = num_vertices();
    const int nf = num_faces();

    // Group halfedges by undirected vertex pair. Within a group, each
    // halfedge must be matched with one of opposite direction; parallel
    // edges are allowed as long as the directions balance (a structured
    // 2x2 torus carries two distinct edges per vertex pair).
    std::map<uint64_t, std::vector<int>> groups;
    for (int f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k)
            groups[edge_key(faces_[f][k], faces_[f][(k + 1) % 3])].push_back(3 * f + k);

    // doubled parallel edges admit two valid twin pairings; remember them so
    // a pairing that happens to disconnect the surface can be repaired below
    std::vector<std::array<int, 2>> ambiguous_pairs;
    twins_.assign(3 * nf, -1);
    auto origin = [&](int he) { return faces_[he / 3][he % 3]; };

    for (auto& [key, hes] : groups) {
        std::vector<int> fwd, bwd;
        const int a = static_cast<int>(key >> 32);
        for (int he : hes) (origin(he) == a ? fwd : bwd).push_back(he);
        if (fwd.size() != bwd.size()) {
            if (hes.size() <= 2 && bwd.empty() && fwd.size() == 2)
                fail_validation("mesh: inconsistently oriented or repeated faces at edge (" +
                                std::to_string(a) + "," + std::to_string(static_cast<int>(key & 0xffffffff)) + ")");
            if (hes.size() > 2)
                fail_validation("mesh: non-manifold edge (" + std::to_string(a) + "," +
                                std::to_string(static_cast<int>(key & 0xffffffff)) + ")");
            // one boundary halfedge: fine, stays -1
            if (hes.size() != 1)
                fail_validation("mesh: non-manifold edge (" + std::to_string(a) + "," +
                                std::to_string(static_cast<int>(key & 0xffffffff)) + ")");
        } else {
            // pair each forward halfedge with a reverse one, preferring a
            // partner whose face has a different apex vertex: pairing two
            // faces that share all three vertices would pinch off a closed
            // two-face pillow and disconnect the rest of the surface
            const auto apex = [&](int he) { return faces_[he / 3][(he % 3 + 2) % 3]; };
            std::vector<char> taken(bwd.size(), 0);
            for (int h : fwd) {
                int pick = -1;
                for (size_t i = 0; i < bwd.size(); ++i)
                    if (!taken[i] && apex(bwd[i]) != apex(h)) { pick = static_cast<int>(i); break; }
                if (pick < 0)
                    for (size_t i = 0; i < bwd.size(); ++i)
                        if (!taken[i]) { pick = static_cast<int>(i); break; }
                taken[pick] = 1;
                twins_[h] = bwd[pick];
                twins_[bwd[pick]] = h;
            }
            if (fwd.size() == 2) ambiguous_pairs.push_back({fwd[0], fwd[1]});
        }
    }

    vertex_faces_.assign(nv, {});
    for (int f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k) vertex_faces_[faces_[f][k]].push_back(f);
    for (int v = 0; v < nv; ++v)
        if (vertex_faces_[v].empty())
            fail_validation("mesh: isolated vertex " + std::to_string(v));

    // connectivity via face adjacency: the face graph under the chosen twin
    // assignment must be one component
    const auto connected = [&]() {
        std::vector<char> seen(nf, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            const int f = q.front();
            q.pop();
            for (int k = 0; k < 3; ++k) {
                const int tw = twins_[3 * f + k];
                if (tw >= 0 && !seen[tw / 3]) {
                    seen[tw / 3] = 1;
                    ++reached;
                    q.push(tw / 3);
                }
            }
        }
        return reached == nf;
    };
    // every vertex link must be a single fan; returns false on a pinched
    // (figure-eight) link, fills boundary_vertex_ on success
    const auto single_fans = [&]() {
        boundary_vertex_.assign(nv, 0);
        for (int v = 0; v < nv; ++v) {
            const auto& inc = vertex_faces_[v];
            const int f0 = inc[0];
            int k0 = 0;
            while (faces_[f0][k0] != v) ++k0;
            // walk around v in both directions from (f0,k0)
            std::vector<char> visited_local(inc.size(), 0);
            auto mark = [&](int f) {
                for (size_t i = 0; i < inc.size(); ++i)
                    if (inc[i] == f && !visited_local[i]) {
                        visited_local[i] = 1;
                        return true;
                    }
                return false;
            };
            mark(f0);
            int boundary_hits = 0;
            for (int dir = 0; dir < 2; ++dir) {
                int f = f0, k = k0;
                while (true) {
                    // dir 0: cross the halfedge leaving v; dir 1: the arriving one
                    const int he = dir == 0 ? 3 * f + k : 3 * f + (k + 2) % 3;
                    const int tw = twins_[he];
                    if (tw < 0) { ++boundary_hits; break; }
                    f = tw / 3;
                    k = 0;
                    while (faces_[f][k] != v) ++k;
                    if (f == f0 && k == k0) break;  // full loop (interior vertex)
                    if (!mark(f)) break;            // revisited through a parallel edge
                }
                if (boundary_hits == 0) break;  // interior: one direction suffices
            }
            size_t visited = 0;
            for (char c : visited_local) visited += c;
            if (visited != inc.size()) return false;
            boundary_vertex_[v] = boundary_hits > 0;
        }
        return true;
    };

    if (!ambiguous_pairs.empty()) {
        // doubled edges make the twin assignment ambiguous, and an unlucky
        // pairing can pinch the surface apart (the 2x2 structured torus can
        // be matched into two tetrahedra or a figure-eight link); such
        // groups only appear on tiny structured meshes, so search the 2^n
        // pairing configurations for one giving a connected manifold
        if (ambiguous_pairs.size() > 16)
            fail_validation("mesh: too many doubled edges to disambiguate");
        bool found = false;
        std::vector<std::array<int, 4>> base;  // h0, h1, twin(h0), twin(h1)
        base.reserve(ambiguous_pairs.size());
        for (const auto& [h0, h1] : ambiguous_pairs)
            base.push_back({h0, h1, twins_[h0], twins_[h1]});
        for (uint32_t mask = 0; mask < (1u << ambiguous_pairs.size()); ++mask) {
            for (size_t i = 0; i < base.size(); ++i) {
                const auto& [h0, h1, b0, b1] = base[i];
                const bool swap_i = ((mask >> i) & 1u) != 0;
                const int p0 = swap_i ? b1 : b0, p1 = swap_i ? b0 : b1;
                twins_[h0] = p0;
                twins_[p0] = h0;
                twins_[h1] = p1;
                twins_[p1] = h1;
            }
            if (connected() && single_fans()) {
                found = true;
                break;
            }
        }
        if (!found) fail_validation("mesh: disconnected");
    } else {
        if (!connected()) fail_validation("mesh: disconnected");
        // vertex links are validated below, with a per-vertex message
    }

    // edge count and dual (interior) edges, from the final twin assignment
    edge_count_ = 0;
    dual_edges_.clear();
    for (int he = 0; he < 3 * nf; ++he) {
        const int tw = twins_[he];
        if (tw < 0) {
            ++edge_count_;  // boundary edge
        } else if (he < tw) {
            ++edge_count_;
            dual_edges_.push_back({he / 3, tw / 3, faces_[he / 3][he % 3],
                                   faces_[he / 3][(he % 3 + 1) % 3]});
        }
    }

    // vertex links must be single fans (no dangling points)
    boundary_vertex_.assign(nv, 0);
    for (int v = 0; v < nv; ++v) {
        const auto& inc = vertex_faces_[v];
        const int f0 = inc[0];
        int k0 = 0;
        while (faces_[f0][k0] != v) ++k0;
        // walk around v in both directions from (f0,k0)
        std::vector<char> visited_local(inc.size(), 0);
        auto mark = [&](int f) {
            for (size_t i = 0; i < inc.size(); ++i)
                if (inc[i] == f && !visited_local[i]) {
                    visited_local[i] = 1;
                    return true;
                }
            return false;
        };
        mark(f0);
        int boundary_hits = 0;
        for (int dir = 0; dir < 2; ++dir) {
            int f = f0, k = k0;
            while (true) {
                // dir 0: cross the halfedge leaving v; dir 1: cross the one arriving
                const int he = dir == 0 ? 3 * f + k : 3 * f + (k + 2) % 3;
                const int tw = twins_[he];
                if (tw < 0) { ++boundary_hits; break; }
                f = tw / 3;
                k = 0;
                while (faces_[f][k] != v) ++k;
                if (f == f0 && k == k0) break;  // full loop (interior vertex)
                if (!mark(f)) break;            // revisited through a parallel edge
            }
            if (boundary_hits == 0) break;  // interior: one direction suffices
        }
        size_t visited = 0;
        for (char c : visited_local) visited += c;
        if (visited != inc.size())
            fail_validation("mesh: dangling point at vertex " + std::to_string(v));
        boundary_vertex_[v] = boundary_hits > 0;
    }

    // ordered boundary loops from unpaired halfedges
    boundary_loops_.clear();
    std::map<int, int> next_on_boundary;  // origin vertex -> halfedge
    for (int he = 0; he < 3 * nf; ++he)
        if (twins_[he] < 0) next_on_boundary[faces_[he / 3][he % 3]] = he;
    std::vector<char> used(3 * nf, 0);
    for (auto [v0, he0] : next_on_boundary) {
        if (used[he0]) continue;
        std::vector<int> loop;
        int he = he0;
        while (!used[he]) {
            used[he] = 1;
            loop.push_back(faces_[he / 3][he % 3]);
            const int dst = faces_[he / 3][(he % 3 + 1) % 3];
            auto it = next_on_boundary.find(dst);
            if (it == next_on_boundary.end())
                fail_validation("mesh: open boundary chain");
            he = it->second;
        }
        boundary_loops_.push_back(std::move(loop));
    }
}

}  // namespace mqc
