#pragma once
#include <string>
#include <vector>

#include "mqc/beltrami.hpp"
#include "mqc/cut.hpp"
#include "mqc/density.hpp"
#include "mqc/lbs.hpp"
#include "mqc/mu_flow.hpp"
#include "mqc/transport.hpp"

namespace mqc {

/// Target domain of the parameterization.
struct DomainSpec {
    enum class Kind { disk, rectangle, torus };
    Kind kind = Kind::disk;
    double radius = 1.0;                        // disk
    double width = 1.0, height = 1.0;           // rectangle
    std::array<Vec2, 2> lattice{Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};  // torus

    double area() const;
    /// Boundary position at normalized arc length s in [0,1), counter-
    /// clockwise; disk starts at (r,0), rectangle at its (0,0) corner.
    Vec2 boundary_point(double s) const;
};

/// Per-run knobs of the outer splitting loop.
struct Schedule {
    FlowParams params;                    // used when per_iteration is empty
    std::vector<FlowParams> per_iteration;
    int max_iterations = 50;
    double stop_tol = 1e-8;               // relative E-decrease tolerance
    double alpha = 1.0, beta = 1.0;       // combined-energy reporting weights

    const FlowParams& at(int k) const;
    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    double H = 0.0;
    double mu_l2_sq = 0.0;
    double grad_mu_l2_sq = 0.0;
    double E = 0.0;
    double mu_max = 0.0;
    int flips = 0;
    double ms = 0.0;
    bool lbs_fallback = false;  // least-squares output flipped; kept transport map
};

/// Everything one outer iteration reads and writes. chart fixes the
/// conformal structure; intrinsic mode replaces it by per-face local
/// frames of the 3D mesh (the genus-1 path).
struct PipelineState {
    const TriMesh* mesh = nullptr;
    Embedding2D chart;
    bool intrinsic = false;
    Embedding2D map;
    FaceDensity source;
    ReferenceDensity reference;
    Constraint constraint;
    const CutMesh* cover = nullptr;  // genus-1 universal-cover stencils
    double domain_area = 0.0;        // landmark mode: rescale before entropy; 0 = off

    DualGraph graph;  // filled by prepare()
    void prepare();

    BeltramiField measure_mu(const Embedding2D& m) const;
    double mu_weight_l2_sq(const BeltramiField& mu) const;
    double entropy(const Embedding2D& m) const;
};

enum class InitMode { harmonic_dirichlet, lscm_free_boundary };

struct InitialMaps {
    Embedding2D chart;  // LSCM free-boundary conformal chart
    Embedding2D f0;
};

/// Disk-topology initial parameterization: the chart is always the LSCM
/// free-boundary map; f0 is either the harmonic map with arc-length
/// Dirichlet boundary onto the target boundary, or the chart itself.
InitialMaps initial_map(const TriMesh& mesh, const DomainSpec& target, InitMode mode);

/// One splitting step: T_{t1} -> measure mu -> P_k -> e^{-t2} -> R_{t3} ->
/// P_k -> S_Gamma, with fallback to the transported map when the
/// least-squares solve introduces fold-overs.
IterationRecord run_iteration(PipelineState& state, const FlowParams& params, int iter);

struct RunResult {
    Embedding2D map;  // best-E iterate
    std::vector<IterationRecord> records;
};

/// Iterates run_iteration; stops at max_iterations or after 3 consecutive
/// iterations without relative E decrease beyond stop_tol.
RunResult run(PipelineState& state, const Schedule& schedule);

/// Per-face Beltrami coefficient of the affine maps sending each chart
/// triangle to the equilateral triangle (0,0),(1,0),(1/2,sqrt3/2).
BeltramiField equilateral_beltrami(const Embedding2D& chart);

struct Genus1Result {
    CutMesh cover;
    Embedding2D map;  // on cover.open_mesh
    std::vector<IterationRecord> records;
};

/// Full genus-1 pipeline: cut open, periodic harmonic initial map onto the
/// fundamental domain, then the splitting loop with periodic constraints.
Genus1Result genus1_run(const TriMesh& mesh, const DomainSpec& target,
                        const FaceDensity& source_on_torus, ReferenceDensity reference,
                        const Schedule& schedule);

/// Lifts new_mesh (a planar mesh inside the image of f1, z ignored) back
/// to the surface by barycentric interpolation of the source positions.
TriMesh compose_remesh(const TriMesh& surface, const Embedding2D& f1, const TriMesh& new_mesh);

/// Mean triangle quality 2 r_in / R_circ (1 for equilateral).
double mean_triangle_quality(const Embedding2D& map);

}  // namespace mqc
