#pragma once
#include <vector>

#include "mqc/cut.hpp"
#include "mqc/density.hpp"
#include "mqc/mesh.hpp"

namespace mqc {

/// Time steps of one outer iteration plus the inner discretization scales.
struct FlowParams {
    double t1 = 0.0015;       // transport duration
    double t2 = 0.0;          // L2 shrink duration
    double t3 = 0.0;          // dual-heat smoothing duration
    double tau_fp = 0.00015;  // transport sub-step
    double tau_smooth = 0.0;  // smoothing sub-step; 0 = stability bound
    double cap_k = 0.95;      // Beltrami cap, in [0,1)
    int max_backtracks = 20;

    void validate() const;
};

/// Boundary handling of the transport step: boundary vertices frozen
/// (surfaces with boundary, Dirichlet mode) or genus-1 universal-cover
/// stencils with identified copies moving together.
struct TransportTopology {
    const CutMesh* cover = nullptr;  // null = fixed-boundary mode
};

/// v_i = -(grad rho)_i / max(rho_i, floor) - grad V(x_i). In fixed-boundary
/// mode boundary velocities are computed, then zeroed.
std::vector<Vec2> velocity_field(const FaceDensity& density, const Embedding2D& map,
                                 const ReferenceDensity& reference,
                                 const TransportTopology& topology = {});

struct TransportResult {
    Embedding2D map;
    int substeps = 0;
    int backtracks = 0;
    bool completed = true;          // false when backtracking was exhausted
    double max_mass_error = 0.0;    // max |mass - 1| over the sub-steps
    double entropy_after = 0.0;
};

/// T_t: sub-stepped explicit Euler advection of the vertex positions with
/// the Fokker-Planck velocity, recomputing the pushforward density each
/// sub-step. On any orientation flip the sub-step is retried with halved
/// tau (up to max_backtracks halvings); the result never contains a
/// flipped face.
TransportResult transport_apply(const Embedding2D& map, const FaceDensity& source,
                                const ReferenceDensity& reference, double duration,
                                const FlowParams& params,
                                const TransportTopology& topology = {});

}  // namespace mqc
