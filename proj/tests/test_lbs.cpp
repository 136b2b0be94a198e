#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "mqc/error.hpp"
#include "mqc/lbs.hpp"
#include "support/fixtures.hpp"

using namespace mqc;
using namespace mqc::testing;
using cplx = std::complex<double>;

namespace {

BeltramiField zeros(const TriMesh& m) {
    return {&m, std::vector<cplx>(m.num_faces(), {0.0, 0.0})};
}

/// Independent cotangent Laplacian with the quadratic-form normalization
/// u^t L u = 1/2 int |grad u|^2, i.e. off-diagonals -(cot a + cot b)/4.
Eigen::MatrixXd cot_laplacian(const Embedding2D& chart) {
    const TriMesh& m = *chart.parent;
    const int n = m.num_vertices();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto& t = m.face(f);
        for (int k = 0; k < 3; ++k) {
            const int i = t[k], j = t[(k + 1) % 3], o = t[(k + 2) % 3];
            const Vec2 a = chart.pos(i) - chart.pos(o);
            const Vec2 b = chart.pos(j) - chart.pos(o);
            const double cot = a.dot(b) / std::abs(a.cross(b));
            L(i, j) -= cot / 4.0;
            L(j, i) -= cot / 4.0;
            L(i, i) += cot / 4.0;
            L(j, j) += cot / 4.0;
        }
    }
    return L;
}

double sup_diff(const Embedding2D& a, const Embedding2D& b) {
    double d = 0.0;
    for (size_t v = 0; v < a.positions.size(); ++v)
        d = std::max(d, (a.positions[v] - b.positions[v]).norm());
    return d;
}

}  // namespace

TEST_SUITE("lbs") {

TEST_CASE("assembled system structure") {
    auto m = jittered_grid(6, 6, 13);
    auto chart = identity_embedding(m);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-0.4, 0.4);
    BeltramiField mu{&m, {}};
    for (int f = 0; f < m.num_faces(); ++f) mu.values.push_back({uni(rng), uni(rng)});
    auto sys = assemble(chart, mu);

    const int n = m.num_vertices();
    Eigen::MatrixXd L = Eigen::MatrixXd(sys.L);
    Eigen::MatrixXd U = Eigen::MatrixXd(sys.U);
    Eigen::MatrixXd M = Eigen::MatrixXd(sys.M);
    CHECK((L - L.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((U + U.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((L * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-12);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd u = Eigen::VectorXd::Random(n);
        CHECK(u.dot(L * u) >= -1e-12);
    }
}

TEST_CASE("mu = 0 assembly equals the cotangent Laplacian") {
    auto m = jittered_grid(5, 5, 19);
    auto chart = identity_embedding(m);
    auto sys = assemble(chart, zeros(m));
    Eigen::MatrixXd diff = Eigen::MatrixXd(sys.L) - cot_laplacian(chart);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("energy identity: u^t L u matches the anisotropic Dirichlet integral") {
    auto m = jittered_grid(4, 4, 5);
    auto chart = identity_embedding(m);
    BeltramiField mu{&m, std::vector<cplx>(m.num_faces(), {0.2, -0.3})};
    auto sys = assemble(chart, mu);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXd u(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) u[v] = uni(rng);

    double direct = 0.0;
    const auto A = dilation_matrix(mu.values[0]);
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto& t = m.face(f);
        const std::array<Vec2, 3> tri{chart.pos(t[0]), chart.pos(t[1]), chart.pos(t[2])};
        const Vec2 g = pl_gradient(tri, {u[t[0]], u[t[1]], u[t[2]]});
        const double quad = A.a11 * g.x * g.x + 2.0 * A.a12 * g.x * g.y + A.a22 * g.y * g.y;
        direct += 0.5 * std::abs(chart.signed_area(f)) * quad;
    }
    CHECK(u.dot(Eigen::MatrixXd(sys.L) * u) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("U evaluates the signed image area") {
    auto m = jittered_grid(4, 4, 29);
    auto chart = identity_embedding(m);
    auto sys = assemble(chart, zeros(m));
    auto map = affine_embedding(m, 1.2, 0.3, -0.2, 0.8);
    Eigen::VectorXd u(m.num_vertices()), v(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) {
        u[i] = map.pos(i).x;
        v[i] = map.pos(i).y;
    }
    // Area(u,v) = (u v) [0 U; -U 0] (u v)^t = 2 u^t U v
    const Eigen::MatrixXd U = Eigen::MatrixXd(sys.U);
    const double block_form = u.dot(U * v) - v.dot(U * u);
    CHECK(block_form == doctest::Approx(map.total_signed_area()).epsilon(1e-10));
    CHECK(u.dot(U * v) == doctest::Approx(0.5 * map.total_signed_area()).epsilon(1e-10));
}

TEST_CASE("dirichlet solves") {
    auto m = grid_mesh(8, 8);
    auto chart = identity_embedding(m);
    SUBCASE("identity boundary reproduces the identity") {
        auto res = solve_lbs(assemble(chart, zeros(m)), Constraint::dirichlet(m, chart));
        CHECK(sup_diff(res.map, chart) < 1e-10);
    }
    SUBCASE("shear round trip") {
        auto shear = affine_embedding(m, 1, 1, 0, 1);
        auto mu = compute_beltrami(shear, chart);
        auto res = solve_lbs(assemble(chart, mu), Constraint::dirichlet(m, shear));
        CHECK(sup_diff(res.map, shear) < 1e-8);
    }
    SUBCASE("general affine round trip on a jittered mesh") {
        auto mj = jittered_grid(7, 7, 57);
        auto chartj = identity_embedding(mj);
        auto g = affine_embedding(mj, 1.4, 0.5, 0.1, 0.8);
        auto mu = compute_beltrami(g, chartj);
        auto res = solve_lbs(assemble(chartj, mu), Constraint::dirichlet(mj, g));
        CHECK(sup_diff(res.map, g) < 1e-8);
    }
    SUBCASE("partial boundary coverage rejected") {
        auto pins = Constraint::dirichlet({{m.boundary_loops()[0][0], Vec2{0, 0}},
                                           {m.boundary_loops()[0][1], Vec2{1, 0}}});
        CHECK_THROWS_AS(solve_lbs(assemble(chart, zeros(m)), pins), Error);
    }
}

TEST_CASE("landmark solves") {
    auto m = grid_mesh(6, 4, 1.5, 1.0);
    auto chart = identity_embedding(m);
    SUBCASE("flat input with two pins gives a similarity") {
        auto res = solve_lbs(assemble(chart, zeros(m)),
                             Constraint::landmark({{0, Vec2{0, 0}}, {6, Vec2{1, 0}}}));
        // compare against the exact similarity mapping (0,0)->(0,0), (1.5,0)->(1,0)
        auto expect = affine_embedding(m, 1.0 / 1.5, 0, 0, 1.0 / 1.5);
        CHECK(sup_diff(res.map, expect) < 1e-8);
        CHECK(compute_beltrami(res.map, chart).max_abs() < 1e-8);
    }
    SUBCASE("pins are interpolated exactly") {
        BeltramiField mu{&m, std::vector<cplx>(m.num_faces(), {0.15, 0.1})};
        auto res = solve_lbs(assemble(chart, mu),
                             Constraint::landmark({{3, Vec2{0.2, 0.7}}, {17, Vec2{1.1, -0.3}}}));
        CHECK((res.map.pos(3) - Vec2{0.2, 0.7}).norm() < 1e-12);
        CHECK((res.map.pos(17) - Vec2{1.1, -0.3}).norm() < 1e-12);
    }
    SUBCASE("fewer than two pins rejected") {
        CHECK_THROWS_AS(Constraint::landmark({{0, Vec2{0, 0}}}), Error);
    }
}

TEST_CASE("default pins pick the two most distant boundary vertices") {
    auto m = grid_mesh(4, 2, 2.0, 1.0);
    auto pins = default_pins(m);
    REQUIRE(pins.size() == 2);
    const Vec2 a = m.vertex(pins[0].first).xy(), b = m.vertex(pins[1].first).xy();
    CHECK((a - b).norm() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));  // diagonal
    CHECK((pins[0].second - Vec2{0, 0}).norm() == 0.0);
    CHECK((pins[1].second - Vec2{1, 0}).norm() == 0.0);
}

TEST_CASE("uncapped measured field rejected by assembly") {
    auto m = grid_mesh(3, 3);
    auto chart = identity_embedding(m);
    BeltramiField mu{&m, std::vector<cplx>(m.num_faces(), {1.2, 0.0})};
    CHECK_THROWS_AS(assemble(chart, mu), Error);
}

}  // TEST_SUITE
