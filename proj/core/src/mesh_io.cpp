#include "mqc/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "mqc/error.hpp"

namespace mqc {

namespace {

// Flips faces over a BFS of shared undirected edges so that every interior
// edge is traversed once in each direction. Leaves meshes with parallel
// edges untouched (their winding must already be consistent).
void normalize_winding(std::vector<std::array<int, 3>>& faces, int num_vertices) {
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
        for (int k = 0; k < 3; ++k) {
            int a = faces[f][k], b = faces[f][(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_faces[{a, b}].push_back(f);
        }
    for (const auto& [e, fs] : edge_faces)
        if (fs.size() > 2) return;  // parallel edges: leave as-is

    auto has_directed = [&](int f, int a, int b) {
        for (int k = 0; k < 3; ++k)
            if (faces[f][k] == a && faces[f][(k + 1) % 3] == b) return true;
        return false;
    };

    std::vector<int> state(faces.size(), 0);  // 0 unseen, 1 keep, 2 flipped
    for (int seed = 0; seed < static_cast<int>(faces.size()); ++seed) {
        if (state[seed]) continue;
        state[seed] = 1;
        std::queue<int> q;
        q.push(seed);
        while (!q.empty()) {
            const int f = q.front();
            q.pop();
            for (int k = 0; k < 3; ++k) {
                int a = faces[f][k], b = faces[f][(k + 1) % 3];
                if (state[f] == 2) std::swap(a, b);
                int lo = std::min(a, b), hi = std::max(a, b);
                for (int g : edge_faces[{lo, hi}]) {
                    if (g == f || state[g]) continue;
                    // g must traverse the shared edge opposite to f
                    const bool g_has_ab = has_directed(g, a, b);
                    state[g] = g_has_ab ? 2 : 1;
                    q.push(g);
                }
            }
        }
    }
    for (size_t f = 0; f < faces.size(); ++f)
        if (state[f] == 2) std::swap(faces[f][1], faces[f][2]);
    (void)num_vertices;
}

TriMesh finish(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
    // repeated faces in a file are a modelling error; meshes built in
    // memory may carry them legitimately (2x2 structured torus)
    std::set<std::array<int, 3>> seen;
    for (size_t f = 0; f < faces.size(); ++f) {
        auto key = faces[f];
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second)
            fail_validation("mesh: repeated face " + std::to_string(f));
    }

    normalize_winding(faces, static_cast<int>(vertices.size()));

    bool planar = true;
    for (const auto& p : vertices)
        if (p.z != 0.0) { planar = false; break; }
    if (planar) {
        double total = 0.0;
        for (const auto& t : faces)
            total += triangle_signed_area(vertices[t[0]].xy(), vertices[t[1]].xy(),
                                          vertices[t[2]].xy());
        if (total < 0.0)
            for (auto& t : faces) std::swap(t[1], t[2]);
    }
    return TriMesh::build(std::move(vertices), std::move(faces));
}

int parse_obj_index(const std::string& token, int num_vertices) {
    // accepts "3", "3/1", "3/1/2"
    int v = 0;
    try {
        v = std::stoi(token.substr(0, token.find('/')));
    } catch (const std::exception&) {
        fail_io("obj: bad face index '" + token + "'");
    }
    if (v < 0) v = num_vertices + v + 1;  // negative = relative
    if (v < 1 || v > num_vertices) fail_io("obj: face index out of range");
    return v - 1;
}

TriMesh load_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y)) fail_io("obj: bad vertex at line " + std::to_string(lineno));
            if (!(ls >> p.z)) p.z = 0.0;
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (toks.size() != 3)
                fail_io("obj: only triangle faces accepted (line " + std::to_string(lineno) + ")");
            const int n = static_cast<int>(vertices.size());
            faces.push_back({parse_obj_index(toks[0], n), parse_obj_index(toks[1], n),
                             parse_obj_index(toks[2], n)});
        }
        // all other tags ignored
    }
    if (vertices.empty() || faces.empty()) fail_io("obj: no triangles found");
    return finish(std::move(vertices), std::move(faces));
}

TriMesh load_off(std::istream& in) {
    auto next_token = [&](const char* what) {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        fail_io(std::string("off: unexpected end of file reading ") + what);
    };
    std::string magic = next_token("header");
    if (magic != "OFF") fail_io("off: missing OFF header");
    int nv = 0, nf = 0, ne = 0;
    try {
        nv = std::stoi(next_token("vertex count"));
        nf = std::stoi(next_token("face count"));
        ne = std::stoi(next_token("edge count"));
    } catch (const std::exception&) {
        fail_io("off: bad counts");
    }
    (void)ne;
    std::vector<Vec3> vertices(nv);
    for (int i = 0; i < nv; ++i) {
        try {
            vertices[i].x = std::stod(next_token("vertex"));
            vertices[i].y = std::stod(next_token("vertex"));
            vertices[i].z = std::stod(next_token("vertex"));
        } catch (const std::exception&) {
            fail_io("off: bad vertex " + std::to_string(i));
        }
    }
    std::vector<std::array<int, 3>> faces(nf);
    for (int f = 0; f < nf; ++f) {
        int c = 0;
        try {
            c = std::stoi(next_token("face size"));
        } catch (const std::exception&) {
            fail_io("off: bad face " + std::to_string(f));
        }
        if (c != 3) fail_io("off: only triangle faces accepted (face " + std::to_string(f) + ")");
        for (int k = 0; k < 3; ++k) {
            try {
                faces[f][k] = std::stoi(next_token("face index"));
            } catch (const std::exception&) {
                fail_io("off: bad face index");
            }
            if (faces[f][k] < 0 || faces[f][k] >= nv) fail_io("off: face index out of range");
        }
    }
    return finish(std::move(vertices), std::move(faces));
}

std::vector<Vec3> load_positions_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag != "v") continue;
        Vec3 p;
        if (!(ls >> p.x >> p.y)) fail_io("obj: bad vertex at line " + std::to_string(lineno));
        if (!(ls >> p.z)) p.z = 0.0;
        vertices.push_back(p);
    }
    if (vertices.empty()) fail_io("obj: no vertices found");
    return vertices;
}

std::vector<Vec3> load_positions_off(std::istream& in) {
    std::string tok;
    if (!(in >> tok) || tok != "OFF") fail_io("off: missing OFF header");
    int nv = 0, nf = 0, ne = 0;
    if (!(in >> nv >> nf >> ne) || nv < 1) fail_io("off: bad counts");
    std::vector<Vec3> vertices(nv);
    for (int i = 0; i < nv; ++i)
        if (!(in >> vertices[i].x >> vertices[i].y >> vertices[i].z))
            fail_io("off: bad vertex " + std::to_string(i));
    return vertices;
}

}  // namespace

std::vector<Vec3> load_vertex_positions(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open " + path);
    return format_from_path(path) == MeshFormat::obj ? load_positions_obj(in)
                                                     : load_positions_off(in);
}

MeshFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "obj" || ext == "OBJ") return MeshFormat::obj;
    if (ext == "off" || ext == "OFF") return MeshFormat::off;
    fail_io("unknown mesh extension: " + path);
}

TriMesh load_mesh(const std::string& path) {
    return load_mesh(path, format_from_path(path));
}

TriMesh load_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open " + path);
    return format == MeshFormat::obj ? load_obj(in) : load_off(in);
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
    save_mesh(mesh, path, format_from_path(path));
}

void save_mesh(const TriMesh& mesh, const std::string& path, MeshFormat format) {
    std::ofstream out(path);
    if (!out) fail_io("cannot write " + path);
    char buf[128];
    if (format == MeshFormat::off) {
        out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
        for (const auto& p : mesh.vertices()) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
            out << buf;
        }
        for (const auto& t : mesh.faces())
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    } else {
        for (const auto& p : mesh.vertices()) {
            std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
            out << buf;
        }
        for (const auto& t : mesh.faces())
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    if (!out) fail_io("write failed: " + path);
}

void save_embedding(const Embedding2D& map, const std::string& path) {
    // written directly so that even degenerate intermediate embeddings can
    // be dumped for inspection
    std::ofstream out(path);
    if (!out) fail_io("cannot write " + path);
    char buf[128];
    const bool off = format_from_path(path) == MeshFormat::off;
    if (off)
        out << "OFF\n" << map.positions.size() << ' ' << map.parent->num_faces() << " 0\n";
    for (const auto& p : map.positions) {
        std::snprintf(buf, sizeof(buf), off ? "%.17g %.17g 0\n" : "v %.17g %.17g 0\n", p.x, p.y);
        out << buf;
    }
    for (const auto& t : map.parent->faces()) {
        if (off)
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        else
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    if (!out) fail_io("write failed: " + path);
}

}  // namespace mqc
