#include "mqc/mu_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqc/error.hpp"

namespace mqc {

namespace {

constexpr double kWeightFloor = 1e-6;

double cotan(const Vec2& a, const Vec2& b) {
    // cot of the angle between a and b
    return a.dot(b) / std::abs(a.cross(b));
}

DualGraph build_frames(const TriMesh& mesh,
                       const std::vector<std::array<Vec2, 3>>& frames) {
    DualGraph g;
    g.parent = &mesh;
    g.face_area.resize(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f)
        g.face_area[f] = std::abs(triangle_signed_area(frames[f][0], frames[f][1], frames[f][2]));

    // cotangent weight of each interior primal edge: half the sum of the
    // cotangents of the two opposite angles
    for (int he = 0; he < 3 * mesh.num_faces(); ++he) {
        const int f = he / 3, k = he % 3;
        const int tw = mesh.twin(f, k);
        if (tw < 0 || tw < he) continue;
        const int g2 = tw / 3, l = tw % 3;
        const auto& wa = frames[f];
        const auto& wb = frames[g2];
        // angle opposite the edge in each face
        const double ca = cotan(wa[k] - wa[(k + 2) % 3], wa[(k + 1) % 3] - wa[(k + 2) % 3]);
        const double cb = cotan(wb[l] - wb[(l + 2) % 3], wb[(l + 1) % 3] - wb[(l + 2) % 3]);
        g.edges.push_back({f, g2, std::max(0.5 * (ca + cb), kWeightFloor)});
    }
    return g;
}

}  // namespace

DualGraph DualGraph::build(const Embedding2D& chart) {
    const TriMesh& mesh = *chart.parent;
    std::vector<std::array<Vec2, 3>> frames(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        frames[f] = {chart.pos(t[0]), chart.pos(t[1]), chart.pos(t[2])};
    }
    return build_frames(mesh, frames);
}

DualGraph DualGraph::build_intrinsic(const TriMesh& mesh) {
    std::vector<std::array<Vec2, 3>> frames(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        frames[f] = local_frame(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
    }
    return build_frames(mesh, frames);
}

double DualGraph::stability_bound() const {
    std::vector<double> weight_sum(face_area.size(), 0.0);
    for (const auto& e : edges) {
        weight_sum[e.face_a] += e.weight;
        weight_sum[e.face_b] += e.weight;
    }
    double bound = std::numeric_limits<double>::infinity();
    for (size_t f = 0; f < face_area.size(); ++f)
        if (weight_sum[f] > 0.0)
            bound = std::min(bound, face_area[f] / weight_sum[f]);
    return 0.9 * bound;
}

double DualGraph::dirichlet_energy(const std::vector<std::complex<double>>& field) const {
    double s = 0.0;
    for (const auto& e : edges) s += e.weight * std::norm(field[e.face_b] - field[e.face_a]);
    return s;
}

BeltramiField project_cap(const BeltramiField& mu, double k) {
    if (!(k >= 0.0 && k < 1.0)) fail_validation("project_cap: k must be in [0,1)");
    BeltramiField out = mu;
    for (auto& z : out.values) {
        // rescale until the magnitude is actually <= k so that a second
        // projection is a bit-exact no-op (one rescale can land 1 ulp high)
        for (int guard = 0; guard < 8 && std::abs(z) > k; ++guard) z *= k / std::abs(z);
    }
    return out;
}

BeltramiField shrink_l2(const BeltramiField& mu, double t) {
    if (t < 0.0) fail_validation("shrink_l2: t must be nonnegative");
    BeltramiField out = mu;
    const double s = std::exp(-t);
    for (auto& z : out.values) z *= s;
    return out;
}

std::vector<std::complex<double>> dual_laplacian(
    const DualGraph& graph, const std::vector<std::complex<double>>& field) {
    std::vector<std::complex<double>> acc(field.size(), {0.0, 0.0});
    for (const auto& e : graph.edges) {
        const auto d = field[e.face_b] - field[e.face_a];
        acc[e.face_a] += e.weight * d;
        acc[e.face_b] -= e.weight * d;
    }
    for (size_t f = 0; f < acc.size(); ++f) acc[f] /= graph.face_area[f];
    return acc;
}

BeltramiField smooth(const BeltramiField& mu, const DualGraph& graph, double t, double tau) {
    if (t < 0.0 || tau <= 0.0) fail_validation("smooth: need t >= 0 and tau > 0");
    if (t == 0.0) return mu;
    const double bound = graph.stability_bound();
    if (tau > bound)
        fail_validation("smooth: tau " + std::to_string(tau) +
                        " above stability bound " + std::to_string(bound));
    BeltramiField out = mu;
    double remaining = t;
    while (remaining > 0.0) {
        const double step = std::min(tau, remaining);
        const auto lap = dual_laplacian(graph, out.values);
        for (size_t f = 0; f < out.values.size(); ++f) out.values[f] += step * lap[f];
        remaining -= step;
    }
    return out;
}

}  // namespace mqc
