#include "mqc/transport.hpp"

#include <algorithm>
#include <cmath>

#include "mqc/error.hpp"

namespace mqc {

namespace {

constexpr double kDensityFloor = 1e-12;

}  // namespace

void FlowParams::validate() const {
    if (t1 < 0.0 || t2 < 0.0 || t3 < 0.0)
        fail_validation("flow params: step times must be nonnegative");
    if (tau_fp <= 0.0) fail_validation("flow params: tau_fp must be positive");
    if (tau_smooth < 0.0) fail_validation("flow params: tau_smooth must be nonnegative");
    if (!(cap_k >= 0.0 && cap_k < 1.0)) fail_validation("flow params: cap_k must be in [0,1)");
    if (max_backtracks < 0) fail_validation("flow params: max_backtracks must be nonnegative");
}

std::vector<Vec2> velocity_field(const FaceDensity& density, const Embedding2D& map,
                                 const ReferenceDensity& reference,
                                 const TransportTopology& topology) {
    const TriMesh& mesh = *map.parent;
    std::vector<double> rho;
    std::vector<Vec2> grad;
    if (topology.cover) {
        rho = vertex_density(density, map, *topology.cover);
        grad = vertex_density_gradient(rho, map, *topology.cover);
    } else {
        rho = vertex_density(density, map);
        grad = vertex_density_gradient(rho, map);
    }

    std::vector<Vec2> v(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        const Vec2 x = map.pos(i);
        const double r = std::max(rho[i], kDensityFloor);
        v[i] = Vec2{-grad[i].x / r, -grad[i].y / r} - reference.grad_V(x);
    }
    if (!topology.cover)
        for (int i = 0; i < mesh.num_vertices(); ++i)
            if (mesh.is_boundary_vertex(i)) v[i] = Vec2{0.0, 0.0};
    return v;
}

TransportResult transport_apply(const Embedding2D& map, const FaceDensity& source,
                                const ReferenceDensity& reference, double duration,
                                const FlowParams& params,
                                const TransportTopology& topology) {
    params.validate();
    if (duration < 0.0) fail_validation("transport: duration must be nonnegative");
    if (!reference.normalized()) fail_validation("transport: reference density not normalized");

    TransportResult result;
    result.map = map;
    if (duration == 0.0) {
        result.entropy_after = relative_entropy(pushforward_density(source, map), map, reference);
        return result;
    }

    const TriMesh& mesh = *map.parent;
    double remaining = duration;
    const double time_tol = 1e-12 * duration;
    while (remaining > time_tol) {
        const FaceDensity rho_img = pushforward_density(source, result.map);
        {
            const double err = std::abs(rho_img.mass(result.map) - 1.0);
            result.max_mass_error = std::max(result.max_mass_error, err);
        }
        const auto v = velocity_field(rho_img, result.map, reference, topology);

        double step = std::min(params.tau_fp, remaining);
        bool accepted = false;
        for (int attempt = 0; attempt <= params.max_backtracks; ++attempt) {
            Embedding2D candidate = result.map;
            for (int i = 0; i < mesh.num_vertices(); ++i)
                candidate.positions[i] = candidate.positions[i] + step * v[i];
            if (candidate.fold_free()) {
                result.map = std::move(candidate);
                remaining -= step;
                ++result.substeps;
                accepted = true;
                break;
            }
            ++result.backtracks;
            step *= 0.5;
        }
        if (!accepted) {
            result.completed = false;
            break;
        }
    }

    result.entropy_after =
        relative_entropy(pushforward_density(source, result.map), result.map, reference);
    return result;
}

}  // namespace mqc
