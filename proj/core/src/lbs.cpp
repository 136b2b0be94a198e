#include "mqc/lbs.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>

#include "mqc/error.hpp"

namespace mqc {

Constraint Constraint::landmark(std::vector<std::pair<int, Vec2>> pins) {
    if (pins.size() < 2) fail_validation("landmark constraint: need >= 2 pins");
    Constraint c;
    c.mode = Mode::landmark;
    c.pins = std::move(pins);
    return c;
}

Constraint Constraint::dirichlet(const TriMesh& mesh, const Embedding2D& boundary_values) {
    std::vector<std::pair<int, Vec2>> pins;
    for (const auto& loop : mesh.boundary_loops())
        for (int v : loop) pins.push_back({v, boundary_values.pos(v)});
    return dirichlet(std::move(pins));
}

Constraint Constraint::dirichlet(std::vector<std::pair<int, Vec2>> boundary_pins) {
    if (boundary_pins.empty()) fail_validation("dirichlet constraint: empty boundary");
    Constraint c;
    c.mode = Mode::dirichlet;
    c.pins = std::move(boundary_pins);
    return c;
}

Constraint Constraint::periodic(const CutMesh& cover, int pin_vertex, Vec2 pin_target) {
    Constraint c;
    c.mode = Mode::periodic;
    c.cover = &cover;
    c.pins = {{pin_vertex, pin_target}};
    return c;
}

std::vector<std::pair<int, Vec2>> default_pins(const TriMesh& mesh) {
    if (mesh.boundary_loops().empty())
        fail_validation("default_pins: mesh has no boundary");
    // the two most distant boundary vertices (3D distance)
    int best_a = -1, best_b = -1;
    double best = -1.0;
    std::vector<int> bnd;
    for (const auto& loop : mesh.boundary_loops())
        bnd.insert(bnd.end(), loop.begin(), loop.end());
    for (size_t i = 0; i < bnd.size(); ++i)
        for (size_t j = i + 1; j < bnd.size(); ++j) {
            const double d = (mesh.vertex(bnd[i]) - mesh.vertex(bnd[j])).norm();
            if (d > best) {
                best = d;
                best_a = bnd[i];
                best_b = bnd[j];
            }
        }
    return {{best_a, Vec2{0.0, 0.0}}, {best_b, Vec2{1.0, 0.0}}};
}

namespace {

AssembledSystem assemble_frames(const TriMesh& mesh, const BeltramiField& mu,
                                const std::vector<std::array<Vec2, 3>>& frames) {
    if (!mu.admissible())
        fail_validation("assemble: |mu| >= 1 on some face; cap it first");
    const int n = mesh.num_vertices();
    const int nf = mesh.num_faces();
    std::vector<Eigen::Triplet<double>> lt, ut;
    lt.reserve(9 * nf);
    ut.reserve(6 * nf);
    for (int f = 0; f < nf; ++f) {
        const auto& t = mesh.face(f);
        const auto& w = frames[f];
        const double area = triangle_signed_area(w[0], w[1], w[2]);
        const auto g = hat_gradients(w);
        const Mat2Sym A = dilation_matrix(mu.values[f]);
        for (int i = 0; i < 3; ++i) {
            const Vec2 Agi{A.a11 * g[i].x + A.a12 * g[i].y, A.a12 * g[i].x + A.a22 * g[i].y};
            for (int j = 0; j < 3; ++j)
                lt.emplace_back(t[i], t[j], 0.5 * area * Agi.dot(g[j]));
        }
        // discretized area form: per cyclic edge i -> j
        for (int k = 0; k < 3; ++k) {
            ut.emplace_back(t[k], t[(k + 1) % 3], 0.25);
            ut.emplace_back(t[(k + 1) % 3], t[k], -0.25);
        }
    }
    AssembledSystem sys;
    sys.mesh = &mesh;
    sys.L.resize(n, n);
    sys.L.setFromTriplets(lt.begin(), lt.end());
    sys.U.resize(n, n);
    sys.U.setFromTriplets(ut.begin(), ut.end());

    std::vector<Eigen::Triplet<double>> mt;
    mt.reserve(2 * (lt.size() + ut.size()));
    for (int k = 0; k < sys.L.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.L, k); it; ++it) {
            mt.emplace_back(it.row(), it.col(), it.value());
            mt.emplace_back(it.row() + n, it.col() + n, it.value());
        }
    for (int k = 0; k < sys.U.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.U, k); it; ++it) {
            mt.emplace_back(it.row(), it.col() + n, -it.value());
            mt.emplace_back(it.row() + n, it.col(), it.value());
        }
    sys.M.resize(2 * n, 2 * n);
    sys.M.setFromTriplets(mt.begin(), mt.end());
    return sys;
}

}  // namespace

AssembledSystem assemble(const Embedding2D& chart, const BeltramiField& mu) {
    const TriMesh& mesh = *chart.parent;
    std::vector<std::array<Vec2, 3>> frames(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        frames[f] = {chart.pos(t[0]), chart.pos(t[1]), chart.pos(t[2])};
        if (triangle_signed_area(frames[f][0], frames[f][1], frames[f][2]) <= 0.0)
            fail_validation("assemble: chart has a flipped or degenerate face");
    }
    return assemble_frames(mesh, mu, frames);
}

AssembledSystem assemble_intrinsic(const TriMesh& mesh, const BeltramiField& mu) {
    std::vector<std::array<Vec2, 3>> frames(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        frames[f] = local_frame(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
    }
    return assemble_frames(mesh, mu, frames);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Solves the pinned reduced system K_ff x_f = -K_fp x_p with LDLT; returns
// the relative residual of the reduced solve.
double solve_pinned(const SpMat& K, const std::vector<int>& var_of,  // full index -> free index or -1
                    const Eigen::VectorXd& pinned_values,            // full-size, zeros on free
                    Eigen::VectorXd& full_out) {
    const int n = static_cast<int>(K.rows());
    int n_free = 0;
    for (int i = 0; i < n; ++i)
        if (var_of[i] >= 0) ++n_free;
    std::vector<Eigen::Triplet<double>> kt;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    for (int k = 0; k < K.outerSize(); ++k)
        for (SpMat::InnerIterator it(K, k); it; ++it) {
            const int r = var_of[it.row()], c = var_of[static_cast<int>(it.col())];
            if (r < 0) continue;
            if (c >= 0)
                kt.emplace_back(r, c, it.value());
            else
                rhs[r] -= it.value() * pinned_values[it.col()];
        }
    SpMat Kff(n_free, n_free);
    Kff.setFromTriplets(kt.begin(), kt.end());
    Eigen::SimplicialLDLT<SpMat> solver(Kff);
    if (solver.info() != Eigen::Success)
        fail_numerical("solve_lbs: factorization failed (singular reduced system)");
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) fail_numerical("solve_lbs: solve failed");
    const double rn = (Kff * x - rhs).norm();
    const double residual = rhs.norm() > 0 ? rn / rhs.norm() : rn;
    full_out = pinned_values;
    for (int i = 0; i < n; ++i)
        if (var_of[i] >= 0) full_out[i] = x[var_of[i]];
    return residual;
}

}  // namespace

LbsResult solve_lbs(const AssembledSystem& system, const Constraint& constraint) {
    const TriMesh& mesh = *system.mesh;
    const int n = mesh.num_vertices();

    if (constraint.mode == Constraint::Mode::dirichlet) {
        std::vector<char> pinned(n, 0);
        for (const auto& [v, p] : constraint.pins) pinned[v] = 1;
        for (const auto& loop : mesh.boundary_loops())
            for (int v : loop)
                if (!pinned[v])
                    fail_validation("dirichlet solve: boundary vertex " + std::to_string(v) +
                                    " unassigned");
        std::vector<int> var_of(n, -1);
        int nf = 0;
        for (int i = 0; i < n; ++i)
            if (!pinned[i]) var_of[i] = nf++;
        Eigen::VectorXd px = Eigen::VectorXd::Zero(n), py = Eigen::VectorXd::Zero(n);
        for (const auto& [v, p] : constraint.pins) {
            px[v] = p.x;
            py[v] = p.y;
        }
        Eigen::VectorXd xu, xv;
        const double r1 = solve_pinned(system.L, var_of, px, xu);
        const double r2 = solve_pinned(system.L, var_of, py, xv);
        std::vector<Vec2> pos(n);
        for (int i = 0; i < n; ++i) pos[i] = {xu[i], xv[i]};
        return {Embedding2D(mesh, std::move(pos)), std::max(r1, r2)};
    }

    if (constraint.mode == Constraint::Mode::landmark) {
        if (constraint.pins.size() < 2)
            fail_validation("landmark solve: need >= 2 pins");
        std::vector<int> var_of(2 * n, -1);
        Eigen::VectorXd pv = Eigen::VectorXd::Zero(2 * n);
        std::vector<char> pinned(n, 0);
        for (const auto& [v, p] : constraint.pins) {
            pinned[v] = 1;
            pv[v] = p.x;
            pv[v + n] = p.y;
        }
        int nf = 0;
        for (int i = 0; i < n; ++i)
            if (!pinned[i]) var_of[i] = nf++;
        for (int i = 0; i < n; ++i)
            if (!pinned[i]) var_of[i + n] = nf++;
        Eigen::VectorXd x;
        const double r = solve_pinned(system.M, var_of, pv, x);
        std::vector<Vec2> pos(n);
        for (int i = 0; i < n; ++i) pos[i] = {x[i], x[i + n]};
        return {Embedding2D(mesh, std::move(pos)), r};
    }

    // periodic: substitute x_open = x_orig[projection] + tag offset, solve
    // per coordinate with L, pin one original vertex for translation
    const CutMesh& cover = *constraint.cover;
    if (&cover.open_mesh != system.mesh)
        fail_validation("periodic solve: system not assembled on the cut mesh");
    const int n_orig = static_cast<int>(cover.copies.size());
    std::vector<Eigen::Triplet<double>> pt;
    for (int v = 0; v < n; ++v) pt.emplace_back(v, cover.projection[v], 1.0);
    SpMat P(n, n_orig);
    P.setFromTriplets(pt.begin(), pt.end());
    const SpMat K = P.transpose() * system.L * P;
    Eigen::VectorXd cx(n), cy(n);
    for (int v = 0; v < n; ++v) {
        const Vec2 off = cover.tag_offset(v);
        cx[v] = off.x;
        cy[v] = off.y;
    }
    const Eigen::VectorXd bx = P.transpose() * (system.L * cx);
    const Eigen::VectorXd by = P.transpose() * (system.L * cy);

    if (constraint.pins.size() != 1)
        fail_validation("periodic solve: exactly one translation pin expected");
    const int pin_open = constraint.pins[0].first;
    const int pin_orig = cover.projection[pin_open];
    const Vec2 pin_base = constraint.pins[0].second - cover.tag_offset(pin_open);

    std::vector<int> var_of(n_orig, -1);
    int nfree = 0;
    for (int i = 0; i < n_orig; ++i)
        if (i != pin_orig) var_of[i] = nfree++;
    Eigen::VectorXd px = Eigen::VectorXd::Zero(n_orig), py = Eigen::VectorXd::Zero(n_orig);
    px[pin_orig] = pin_base.x;
    py[pin_orig] = pin_base.y;
    // fold the substitution constant into the rhs through solve_pinned's
    // pin mechanism plus an explicit correction
    Eigen::VectorXd xu, xv;
    {
        // K x = -b with the pin: augment pinned_values and subtract b
        // manually after reduction; simplest is to shift rhs by solving the
        // pinned system for (K, rhs = -b - K*pin)
        const int nf2 = nfree;
        std::vector<Eigen::Triplet<double>> kt;
        Eigen::VectorXd rx = Eigen::VectorXd::Zero(nf2), ry = Eigen::VectorXd::Zero(nf2);
        for (int k = 0; k < K.outerSize(); ++k)
            for (SpMat::InnerIterator it(K, k); it; ++it) {
                const int r = var_of[it.row()], c = var_of[static_cast<int>(it.col())];
                if (r < 0) continue;
                if (c >= 0) {
                    kt.emplace_back(r, c, it.value());
                } else {
                    rx[r] -= it.value() * px[it.col()];
                    ry[r] -= it.value() * py[it.col()];
                }
            }
        for (int i = 0; i < n_orig; ++i)
            if (var_of[i] >= 0) {
                rx[var_of[i]] -= bx[i];
                ry[var_of[i]] -= by[i];
            }
        SpMat Kff(nf2, nf2);
        Kff.setFromTriplets(kt.begin(), kt.end());
        Eigen::SimplicialLDLT<SpMat> solver(Kff);
        if (solver.info() != Eigen::Success)
            fail_numerical("periodic solve: factorization failed");
        const Eigen::VectorXd sx = solver.solve(rx);
        const Eigen::VectorXd sy = solver.solve(ry);
        xu = px;
        xv = py;
        for (int i = 0; i < n_orig; ++i)
            if (var_of[i] >= 0) {
                xu[i] = sx[var_of[i]];
                xv[i] = sy[var_of[i]];
            }
    }
    std::vector<Vec2> pos(n);
    for (int v = 0; v < n; ++v) {
        const Vec2 off = cover.tag_offset(v);
        pos[v] = {xu[cover.projection[v]] + off.x, xv[cover.projection[v]] + off.y};
    }
    return {Embedding2D(mesh, std::move(pos)), 0.0};
}

}  // namespace mqc
