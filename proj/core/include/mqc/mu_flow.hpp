#pragma once
#include <complex>
#include <vector>

#include "mqc/beltrami.hpp"
#include "mqc/mesh.hpp"

namespace mqc {

/// Face-adjacency graph used to diffuse face-constant Beltrami fields.
/// Edge weights are cotangent weights of the primal edge (computed on the
/// chart, clamped below so obtuse meshes keep omega_e > 0); per-node area
/// is the chart face area.
struct DualGraph {
    const TriMesh* parent = nullptr;
    struct Edge {
        int face_a, face_b;
        double weight;
    };
    std::vector<Edge> edges;
    std::vector<double> face_area;

    static DualGraph build(const Embedding2D& chart);
    static DualGraph build_intrinsic(const TriMesh& mesh);

    /// Explicit-Euler stability bound: 0.9 min_f Area(f) / sum omega_e.
    double stability_bound() const;

    /// sum_e omega_e |g(f') - g(f)|^2
    double dirichlet_energy(const std::vector<std::complex<double>>& field) const;
};

/// P_k: values with |mu| <= k kept, larger ones rescaled to magnitude k.
BeltramiField project_cap(const BeltramiField& mu, double k);

/// e^{-t} mu.
BeltramiField shrink_l2(const BeltramiField& mu, double t);

/// Delta* g(f) = (1/Area(f)) sum_{e in df} omega_e (g(f') - g(f)); real and
/// imaginary parts handled independently, boundary faces sum over interior
/// edges only.
std::vector<std::complex<double>> dual_laplacian(
    const DualGraph& graph, const std::vector<std::complex<double>>& field);

/// R_t: n explicit Euler steps of the dual heat equation (last step
/// shortened so the durations sum to t). Rejects tau above the stability
/// bound.
BeltramiField smooth(const BeltramiField& mu, const DualGraph& graph, double t, double tau);

}  // namespace mqc
