#include "mqc/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <utility>

#include "mqc/error.hpp"
#include "mqc/locate.hpp"

namespace mqc {

namespace {

BeltramiField zero_mu(const TriMesh& mesh) {
    return {&mesh, std::vector<std::complex<double>>(mesh.num_faces(), {0.0, 0.0})};
}

void require_disk(const TriMesh& mesh) {
    if (mesh.boundary_loops().size() != 1 || mesh.euler_characteristic() != 1)
        fail_validation("initial_map: mesh is not a topological disk");
}

/// Boundary pins mapping the single loop onto the target boundary by
/// normalized arc length, starting at loop[0]; `reversed` flips the
/// traversal direction.
std::vector<std::pair<int, Vec2>> arc_length_pins(const TriMesh& mesh, const DomainSpec& target,
                                                  bool reversed) {
    std::vector<int> loop = mesh.boundary_loops()[0];
    const int n = static_cast<int>(loop.size());
    if (target.kind == DomainSpec::Kind::rectangle) {
        // start at the bottom-left-most boundary vertex so a rectangular
        // mesh boundary lands corner-on-corner
        int best = 0;
        for (int i = 1; i < n; ++i) {
            const auto& p = mesh.vertex(loop[i]);
            const auto& q = mesh.vertex(loop[best]);
            if (p.y < q.y - 1e-12 || (std::abs(p.y - q.y) <= 1e-12 && p.x < q.x)) best = i;
        }
        std::rotate(loop.begin(), loop.begin() + best, loop.end());
    }
    std::vector<double> cum(n + 1, 0.0);
    for (int i = 0; i < n; ++i)
        cum[i + 1] = cum[i] + (mesh.vertex(loop[(i + 1) % n]) - mesh.vertex(loop[i])).norm();
    const double total = cum[n];
    if (total <= 0.0) fail_validation("initial_map: zero-length boundary");
    std::vector<std::pair<int, Vec2>> pins(n);
    for (int i = 0; i < n; ++i) {
        double s = cum[i] / total;
        if (reversed) s = (i == 0) ? 0.0 : 1.0 - s;
        pins[i] = {loop[i], target.boundary_point(s)};
    }
    return pins;
}

}  // namespace

double DomainSpec::area() const {
    switch (kind) {
        case Kind::disk: return std::numbers::pi * radius * radius;
        case Kind::rectangle: return width * height;
        case Kind::torus: return std::abs(lattice[0].cross(lattice[1]));
    }
    return 0.0;
}

Vec2 DomainSpec::boundary_point(double s) const {
    s -= std::floor(s);
    if (kind == Kind::disk) {
        const double a = 2.0 * std::numbers::pi * s;
        return {radius * std::cos(a), radius * std::sin(a)};
    }
    if (kind == Kind::rectangle) {
        double d = s * 2.0 * (width + height);
        if (d <= width) return {d, 0.0};
        d -= width;
        if (d <= height) return {width, d};
        d -= height;
        if (d <= width) return {width - d, height};
        d -= width;
        return {0.0, height - d};
    }
    fail_validation("boundary_point: torus domain has no boundary");
}

const FlowParams& Schedule::at(int k) const {
    if (per_iteration.empty()) return params;
    return per_iteration[std::min<size_t>(k, per_iteration.size() - 1)];
}

void Schedule::validate() const {
    if (max_iterations < 0) fail_validation("schedule: max_iterations must be nonnegative");
    if (stop_tol < 0.0) fail_validation("schedule: stop_tol must be nonnegative");
    if (alpha < 0.0 || beta < 0.0) fail_validation("schedule: alpha, beta must be nonnegative");
    params.validate();
    for (const auto& p : per_iteration) p.validate();
}

void PipelineState::prepare() {
    graph = intrinsic ? DualGraph::build_intrinsic(*mesh) : DualGraph::build(chart);
}

BeltramiField PipelineState::measure_mu(const Embedding2D& m) const {
    return intrinsic ? compute_beltrami_intrinsic(m) : compute_beltrami(m, chart);
}

double PipelineState::mu_weight_l2_sq(const BeltramiField& mu) const {
    return intrinsic ? mu.l2_sq(*mesh) : mu.l2_sq(chart);
}

double PipelineState::entropy(const Embedding2D& m) const {
    if (constraint.mode == Constraint::Mode::landmark && domain_area > 0.0) {
        // free-boundary images drift in scale; measure on a rescaled copy
        double total = 0.0;
        for (int f = 0; f < mesh->num_faces(); ++f) total += m.signed_area(f);
        if (total <= 0.0) fail_numerical("entropy: nonpositive image area");
        const double s = std::sqrt(domain_area / total);
        Embedding2D scaled = m;
        for (auto& p : scaled.positions) p *= s;
        return relative_entropy(pushforward_density(source, scaled), scaled, reference);
    }
    return relative_entropy(pushforward_density(source, m), m, reference);
}

InitialMaps initial_map(const TriMesh& mesh, const DomainSpec& target, InitMode mode) {
    require_disk(mesh);
    const AssembledSystem sys = assemble_intrinsic(mesh, zero_mu(mesh));

    InitialMaps out;
    out.chart = solve_lbs(sys, Constraint::landmark(default_pins(mesh))).map;
    if (!out.chart.fold_free())
        fail_numerical("initial_map: conformal chart has " +
                       std::to_string(out.chart.orientation_report()) + " flipped faces");

    if (mode == InitMode::lscm_free_boundary) {
        out.f0 = out.chart;
        return out;
    }
    auto f0 = solve_lbs(sys, Constraint::dirichlet(arc_length_pins(mesh, target, false))).map;
    if (f0.total_signed_area() < 0.0)
        f0 = solve_lbs(sys, Constraint::dirichlet(arc_length_pins(mesh, target, true))).map;
    if (!f0.fold_free())
        fail_numerical("initial_map: harmonic map has " +
                       std::to_string(f0.orientation_report()) + " flipped faces");
    out.f0 = std::move(f0);
    return out;
}

IterationRecord run_iteration(PipelineState& state, const FlowParams& params, int iter) {
    const auto t_start = std::chrono::steady_clock::now();

    TransportTopology topology{state.cover};
    auto transported = transport_apply(state.map, state.source, state.reference, params.t1,
                                       params, topology);
    if (!transported.completed)
        fail_numerical("iteration " + std::to_string(iter) +
                       ": transport backtracking exhausted");
    Embedding2D g = std::move(transported.map);

    BeltramiField mu = project_cap(state.measure_mu(g), params.cap_k);
    if (params.t2 > 0.0) mu = shrink_l2(mu, params.t2);
    if (params.t3 > 0.0) {
        const double tau =
            params.tau_smooth > 0.0 ? params.tau_smooth : state.graph.stability_bound();
        mu = project_cap(smooth(mu, state.graph, params.t3, tau), params.cap_k);
    }

    if (state.constraint.mode == Constraint::Mode::periodic && state.constraint.pins.size() == 1)
        state.constraint.pins[0].second = g.pos(state.constraint.pins[0].first);
    const AssembledSystem sys =
        state.intrinsic ? assemble_intrinsic(*state.mesh, mu) : assemble(state.chart, mu);
    auto lbs = solve_lbs(sys, state.constraint);

    IterationRecord rec;
    rec.iter = iter;
    if (lbs.map.fold_free()) {
        state.map = std::move(lbs.map);
    } else {
        state.map = std::move(g);
        rec.lbs_fallback = true;
    }

    const BeltramiField mu_f = state.measure_mu(state.map);
    rec.H = state.entropy(state.map);
    rec.mu_l2_sq = state.mu_weight_l2_sq(mu_f);
    rec.grad_mu_l2_sq = state.graph.dirichlet_energy(mu_f.values);
    rec.mu_max = mu_f.max_abs();
    rec.flips = state.map.orientation_report();
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
                 .count();
    return rec;
}

RunResult run(PipelineState& state, const Schedule& schedule) {
    schedule.validate();
    RunResult result;
    result.map = state.map;

    auto combined = [&](const IterationRecord& r) {
        return r.H + schedule.alpha * r.mu_l2_sq + schedule.beta * r.grad_mu_l2_sq;
    };
    // initial energy for the stall detector and the best-iterate tracker
    const BeltramiField mu0 = state.measure_mu(state.map);
    double prev_E = state.entropy(state.map) + schedule.alpha * state.mu_weight_l2_sq(mu0) +
                    schedule.beta * state.graph.dirichlet_energy(mu0.values);
    double best_E = prev_E;

    int stall = 0;
    for (int k = 0; k < schedule.max_iterations; ++k) {
        IterationRecord rec = run_iteration(state, schedule.at(k), k);
        rec.E = combined(rec);
        result.records.push_back(rec);
        if (rec.E < best_E) {
            best_E = rec.E;
            result.map = state.map;
        }
        // absolute floor so that noise-level energies on an already-matched
        // problem register as a stall rather than as tiny relative decreases
        if (prev_E - rec.E > schedule.stop_tol * std::max(std::abs(prev_E), 1.0))
            stall = 0;
        else if (++stall >= 3)
            break;
        prev_E = rec.E;
    }
    return result;
}

BeltramiField equilateral_beltrami(const Embedding2D& chart) {
    if (!chart.fold_free()) fail_validation("equilateral_beltrami: chart has fold-overs");
    const TriMesh& mesh = *chart.parent;
    const std::array<Vec2, 3> eq{Vec2{0.0, 0.0}, Vec2{1.0, 0.0},
                                 Vec2{0.5, 0.5 * std::sqrt(3.0)}};
    BeltramiField out{&mesh, std::vector<std::complex<double>>(mesh.num_faces())};
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        const std::array<Vec2, 3> w{chart.pos(t[0]), chart.pos(t[1]), chart.pos(t[2])};
        const Vec2 gu = pl_gradient(w, {eq[0].x, eq[1].x, eq[2].x});
        const Vec2 gv = pl_gradient(w, {eq[0].y, eq[1].y, eq[2].y});
        const std::complex<double> fz(0.5 * (gu.x + gv.y), 0.5 * (gv.x - gu.y));
        const std::complex<double> fzb(0.5 * (gu.x - gv.y), 0.5 * (gv.x + gu.y));
        if (std::abs(fz) == 0.0)
            fail_numerical("equilateral_beltrami: degenerate face " + std::to_string(f));
        out.values[f] = fzb / fz;
    }
    return out;
}

Genus1Result genus1_run(const TriMesh& mesh, const DomainSpec& target,
                        const FaceDensity& source_on_torus, ReferenceDensity reference,
                        const Schedule& schedule) {
    if (!mesh.is_closed() || mesh.genus() != 1)
        fail_validation("genus1_run: mesh is not a closed genus-1 surface");
    if (target.kind != DomainSpec::Kind::torus)
        fail_validation("genus1_run: target domain must be a torus");

    Genus1Result out{cut_torus(mesh, target.lattice), {}, {}};
    const TriMesh& open = out.cover.open_mesh;

    // same face list, so the source density transfers verbatim
    FaceDensity source{&open, source_on_torus.values};

    const Constraint periodic = Constraint::periodic(out.cover, 0, Vec2{0.0, 0.0});
    auto init = solve_lbs(assemble_intrinsic(open, zero_mu(open)), periodic);
    if (!init.map.fold_free())
        fail_numerical("genus1_run: initial periodic map has " +
                       std::to_string(init.map.orientation_report()) + " flipped faces");
    if (!reference.normalized()) reference.normalize(init.map);

    PipelineState state;
    state.mesh = &open;
    state.intrinsic = true;
    state.map = std::move(init.map);
    state.source = std::move(source);
    state.reference = std::move(reference);
    state.constraint = periodic;
    state.cover = &out.cover;
    state.prepare();

    auto rr = run(state, schedule);
    out.map = std::move(rr.map);
    out.records = std::move(rr.records);
    return out;
}

TriMesh compose_remesh(const TriMesh& surface, const Embedding2D& f1, const TriMesh& new_mesh) {
    if (!f1.fold_free()) fail_validation("compose_remesh: parameterization has fold-overs");
    const PointLocator locator(f1);
    std::vector<Vec3> lifted(new_mesh.num_vertices());
    std::string outside;
    int outside_count = 0;
    for (int v = 0; v < new_mesh.num_vertices(); ++v) {
        const Vec2 q = new_mesh.vertex(v).xy();
        const auto hit = locator.locate(q);
        if (!hit) {
            if (++outside_count <= 8) outside += " " + std::to_string(v);
            continue;
        }
        const auto& t = surface.face(hit->face);
        const auto& b = hit->barycentric;
        lifted[v] = b[0] * surface.vertex(t[0]) + b[1] * surface.vertex(t[1]) +
                    b[2] * surface.vertex(t[2]);
    }
    if (outside_count > 0)
        fail_validation("compose_remesh: " + std::to_string(outside_count) +
                        " vertices outside the image domain, e.g." + outside);
    return TriMesh::build(std::move(lifted), new_mesh.faces());
}

double mean_triangle_quality(const Embedding2D& map) {
    const TriMesh& mesh = *map.parent;
    double sum = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        const double a = (map.pos(t[1]) - map.pos(t[0])).norm();
        const double b = (map.pos(t[2]) - map.pos(t[1])).norm();
        const double c = (map.pos(t[0]) - map.pos(t[2])).norm();
        const double area = std::abs(triangle_signed_area(map.pos(t[0]), map.pos(t[1]),
                                                          map.pos(t[2])));
        // 2 r_in / R_circ = 16 Area^2 / (abc (a+b+c))
        sum += 16.0 * area * area / (a * b * c * (a + b + c));
    }
    return sum / mesh.num_faces();
}

}  // namespace mqc
