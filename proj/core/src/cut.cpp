#include "mqc/cut.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "mqc/error.hpp"

namespace mqc {

namespace {

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

CutMesh cut_torus(const TriMesh& mesh, const std::array<Vec2, 2>& lattice) {
    if (!mesh.is_closed() || mesh.euler_characteristic() != 0)
        fail_validation("cut_torus: input is not a closed genus-1 mesh (chi = " +
                        std::to_string(mesh.euler_characteristic()) + ")");
    if (std::abs(lattice[0].cross(lattice[1])) <= 0.0)
        fail_validation("cut_torus: lattice vectors are parallel");

    const int nv = mesh.num_vertices();
    const int nf = mesh.num_faces();

    // canonical edge ids: each interior edge keyed by its smaller halfedge
    std::vector<int> edge_of(3 * nf, -1);
    std::vector<int> canonical_he;
    for (int he = 0; he < 3 * nf; ++he) {
        const int tw = mesh.twin(he / 3, he % 3);
        if (he < tw) {
            edge_of[he] = edge_of[tw] = static_cast<int>(canonical_he.size());
            canonical_he.push_back(he);
        }
    }
    const int ne = static_cast<int>(canonical_he.size());
    auto he_origin = [&](int he) { return mesh.face(he / 3)[he % 3]; };
    auto he_dest = [&](int he) { return mesh.face(he / 3)[(he % 3 + 1) % 3]; };

    // primal spanning tree over vertices
    std::vector<char> in_tree(ne, 0);
    {
        std::vector<char> seen(nv, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        // iterate halfedges from reached vertices
        std::vector<std::vector<int>> out_he(nv);
        for (int he = 0; he < 3 * nf; ++he) out_he[he_origin(he)].push_back(he);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int he : out_he[v]) {
                const int w = he_dest(he);
                if (!seen[w]) {
                    seen[w] = 1;
                    in_tree[edge_of[he]] = 1;
                    q.push(w);
                }
            }
        }
    }

    // dual spanning tree over faces avoiding primal tree edges
    std::vector<int> dual_parent_he(nf, -1);  // halfedge of the child face crossed
    std::vector<int> dual_order;              // BFS order, root first
    {
        std::vector<char> seen(nf, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        dual_order.push_back(0);
        std::vector<char> crossed(ne, 0);
        while (!q.empty()) {
            const int f = q.front();
            q.pop();
            for (int k = 0; k < 3; ++k) {
                const int he = 3 * f + k;
                const int e = edge_of[he];
                if (in_tree[e]) continue;
                const int g = mesh.twin(f, k) / 3;
                if (!seen[g]) {
                    seen[g] = 1;
                    crossed[e] = 1;
                    dual_parent_he[g] = mesh.twin(f, k);
                    dual_order.push_back(g);
                    q.push(g);
                }
            }
        }
        if (static_cast<int>(dual_order.size()) != nf)
            fail_numerical("cut_torus: dual cotree construction failed");
        // leftover edges generate the homology basis
        std::vector<int> leftover;
        for (int e = 0; e < ne; ++e)
            if (!in_tree[e] && !crossed[e]) leftover.push_back(e);
        if (leftover.size() != 2)
            fail_numerical("cut_torus: expected 2 leftover edges, got " +
                           std::to_string(leftover.size()));

        // cut graph = primal tree + leftover edges, pruned of dangling paths
        std::vector<char> in_cut(ne, 0);
        for (int e = 0; e < ne; ++e) in_cut[e] = in_tree[e];
        in_cut[leftover[0]] = in_cut[leftover[1]] = 1;
        std::vector<int> cut_degree(nv, 0);
        for (int e = 0; e < ne; ++e)
            if (in_cut[e]) {
                ++cut_degree[he_origin(canonical_he[e])];
                ++cut_degree[he_dest(canonical_he[e])];
            }
        std::queue<int> prune;
        for (int v = 0; v < nv; ++v)
            if (cut_degree[v] == 1) prune.push(v);
        std::vector<std::vector<int>> vertex_edges(nv);
        for (int e = 0; e < ne; ++e) {
            vertex_edges[he_origin(canonical_he[e])].push_back(e);
            vertex_edges[he_dest(canonical_he[e])].push_back(e);
        }
        while (!prune.empty()) {
            const int v = prune.front();
            prune.pop();
            if (cut_degree[v] != 1) continue;
            for (int e : vertex_edges[v])
                if (in_cut[e]) {
                    in_cut[e] = 0;
                    const int a = he_origin(canonical_he[e]), b = he_dest(canonical_he[e]);
                    if (--cut_degree[a] == 1) prune.push(a);
                    if (--cut_degree[b] == 1) prune.push(b);
                    break;
                }
        }

        // integer 1-cocycles with unit periods on the two generators:
        // zero on tree edges, unit on the leftover edges, and the remaining
        // (cotree-crossed) values fixed by face closure, children first
        std::vector<std::array<int, 2>> eta(ne, {0, 0});
        eta[leftover[0]] = {1, 0};
        eta[leftover[1]] = {0, 1};
        auto he_value = [&](int he, int j) {
            const int e = edge_of[he];
            return canonical_he[e] == he ? eta[e][j] : -eta[e][j];
        };
        for (auto it = dual_order.rbegin(); it != dual_order.rend(); ++it) {
            const int f = *it;
            const int phe = dual_parent_he[f];
            if (phe < 0) continue;  // root
            for (int j = 0; j < 2; ++j) {
                int sum = 0;
                for (int k = 0; k < 3; ++k)
                    if (3 * f + k != phe) sum += he_value(3 * f + k, j);
                const int e = edge_of[phe];
                eta[e][j] = canonical_he[e] == phe ? -sum : sum;
            }
        }

        // wedge grouping: corners around each vertex united across non-cut edges
        DisjointSet ds(3 * nf);  // element = corner index 3f+k (vertex faces[f][k])
        for (int he = 0; he < 3 * nf; ++he) {
            if (in_cut[edge_of[he]]) continue;
            const int tw = mesh.twin(he / 3, he % 3);
            if (he > tw) continue;
            // crossing edge he glues corner(origin in f) with corner(dest in tw-face)
            // and corner(dest in f) with corner(origin in tw-face)
            const int f = he / 3, k = he % 3;
            const int g = tw / 3, l = tw % 3;
            ds.unite(3 * f + k, 3 * g + (l + 1) % 3);          // origin corner
            ds.unite(3 * f + (k + 1) % 3, 3 * g + l);          // dest corner
        }
        std::vector<int> wedge_id(3 * nf, -1);
        std::vector<int> projection;
        std::vector<Vec3> open_pos;
        for (int c = 0; c < 3 * nf; ++c) {
            const int r = ds.find(c);
            if (wedge_id[r] < 0) {
                wedge_id[r] = static_cast<int>(projection.size());
                const int v = mesh.face(r / 3)[r % 3];
                projection.push_back(v);
                open_pos.push_back(mesh.vertex(v));
            }
            wedge_id[c] = wedge_id[r];
        }
        std::vector<std::array<int, 3>> open_faces(nf);
        for (int f = 0; f < nf; ++f)
            for (int k = 0; k < 3; ++k) open_faces[f][k] = wedge_id[3 * f + k];

        CutMesh out{TriMesh::build(std::move(open_pos), std::move(open_faces)),
                    std::move(projection),
                    {},
                    lattice,
                    {}};
        if (out.open_mesh.euler_characteristic() != 1 ||
            out.open_mesh.boundary_loops().size() != 1)
            fail_numerical("cut_torus: cut did not produce a disk");

        // integrate the cocycles over the (simply connected) open mesh
        const int n_open = out.open_mesh.num_vertices();
        out.tags.assign(n_open, {0, 0});
        {
            std::vector<char> seen(n_open, 0);
            std::queue<int> q;
            const auto& ofaces = out.open_mesh.faces();
            struct Arc { int to, he, sign; };
            std::vector<std::vector<Arc>> adj(n_open);
            for (int f = 0; f < nf; ++f)
                for (int k = 0; k < 3; ++k) {
                    const int a = ofaces[f][k], b = ofaces[f][(k + 1) % 3];
                    adj[a].push_back({b, 3 * f + k, +1});
                    adj[b].push_back({a, 3 * f + k, -1});
                }
            seen[ofaces[0][0]] = 1;
            q.push(ofaces[0][0]);
            while (!q.empty()) {
                const int v = q.front();
                q.pop();
                for (const auto& arc : adj[v]) {
                    if (seen[arc.to]) continue;
                    seen[arc.to] = 1;
                    out.tags[arc.to] = {out.tags[v][0] + arc.sign * he_value(arc.he, 0),
                                        out.tags[v][1] + arc.sign * he_value(arc.he, 1)};
                    q.push(arc.to);
                }
            }
        }

        out.copies.assign(nv, {});
        for (int v = 0; v < n_open; ++v) out.copies[out.projection[v]].push_back(v);
        for (int v = 0; v < nv; ++v)
            if (out.copies[v].empty())
                fail_numerical("cut_torus: projection not surjective");
        return out;
    }
}

}  // namespace mqc
