#include <doctest.h>

#include <cmath>

#include "mqc/transport.hpp"
#include "support/fixtures.hpp"

using namespace mqc;
using namespace mqc::testing;

namespace {

struct DiskSetup {
    TriMesh mesh;
    Embedding2D map;
    FaceDensity source;
    ReferenceDensity reference;

    explicit DiskSetup(double rate) : mesh(polar_disk(12)), map(identity_embedding(mesh)),
                                      source(FaceDensity::area_induced(mesh)),
                                      reference(ReferenceDensity::gaussian({0.0, 0.0}, rate)) {
        reference.normalize(map);
    }
};

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("velocity field") {
    SUBCASE("matched uniform state is stationary") {
        auto m = structured_disk(8);
        auto id = identity_embedding(m);
        auto rho = FaceDensity::area_induced(m);
        auto ref = ReferenceDensity::uniform();
        ref.normalize(id);
        auto v = velocity_field(rho, id, ref);
        for (const auto& vi : v) CHECK(vi.norm() < 1e-10);
    }
    SUBCASE("uniform density with V = |x|^2 gives v = -2x at interior vertices") {
        auto m = grid_mesh(8, 8);
        auto id = identity_embedding(m);
        FaceDensity rho{&m, std::vector<double>(m.num_faces(), 1.0)};
        auto ref = ReferenceDensity::gaussian({0.0, 0.0}, 1.0);
        ref.normalize(id);
        auto v = velocity_field(rho, id, ref);
        for (int i = 0; i < m.num_vertices(); ++i) {
            if (m.is_boundary_vertex(i)) {
                CHECK(v[i].norm() == 0.0);  // frozen in fixed-boundary mode
            } else {
                CHECK((v[i] + 2.0 * id.pos(i)).norm() < 1e-9);
            }
        }
    }
    SUBCASE("equilibrium state velocity shrinks under refinement") {
        // rho sampled from e^{-V}: v = -grad rho/rho - grad V -> 0 as h -> 0
        auto measure_max_v = [](const TriMesh& m) {
            auto id = identity_embedding(m);
            auto ref = ReferenceDensity::gaussian({0.5, 0.5}, 2.0);
            ref.normalize(id);
            std::vector<double> vals(m.num_faces());
            for (int f = 0; f < m.num_faces(); ++f)
                vals[f] = ref.density(id.face_centroid(f));
            auto rho = FaceDensity::from_values(m, std::move(vals));
            auto v = velocity_field(rho, id, ref);
            // restrict to vertices whose whole umbrella is interior: the
            // averaging stencil changes shape abruptly at the first ring
            // next to the boundary, which costs an O(1) gradient error there
            std::vector<char> near_boundary(m.num_vertices(), 0);
            for (int f = 0; f < m.num_faces(); ++f) {
                const auto& t = m.face(f);
                const bool touches = m.is_boundary_vertex(t[0]) ||
                                     m.is_boundary_vertex(t[1]) || m.is_boundary_vertex(t[2]);
                if (touches)
                    for (int k = 0; k < 3; ++k) near_boundary[t[k]] = 1;
            }
            double mx = 0.0;
            for (int i = 0; i < m.num_vertices(); ++i)
                if (!near_boundary[i]) mx = std::max(mx, v[i].norm());
            return mx;
        };
        const double coarse = measure_max_v(grid_mesh(8, 8));
        const double fine = measure_max_v(grid_mesh(16, 16));
        CHECK(fine < 0.75 * coarse);
    }
}

TEST_CASE("transport_apply") {
    FlowParams params;
    params.t1 = 0.0015;
    params.tau_fp = params.t1 / 10.0;

    SUBCASE("zero duration is the identity") {
        DiskSetup s(2.0);
        auto r = transport_apply(s.map, s.source, s.reference, 0.0, params);
        CHECK(r.substeps == 0);
        for (int v = 0; v < s.mesh.num_vertices(); ++v)
            CHECK((r.map.pos(v) - s.map.pos(v)).norm() == 0.0);
    }
    SUBCASE("matched uniform state stays put") {
        auto m = structured_disk(10);
        auto id = identity_embedding(m);
        auto rho = FaceDensity::area_induced(m);
        auto ref = ReferenceDensity::uniform();
        ref.normalize(id);
        auto r = transport_apply(id, rho, ref, params.t1, params);
        for (int v = 0; v < m.num_vertices(); ++v)
            CHECK((r.map.pos(v) - id.pos(v)).norm() < 1e-10);
    }
    SUBCASE("entropy decreases and mass is conserved") {
        DiskSetup s(2.0);
        const double h0 = relative_entropy(pushforward_density(s.source, s.map), s.map,
                                           s.reference);
        auto r = transport_apply(s.map, s.source, s.reference, params.t1, params);
        CHECK(r.completed);
        CHECK(r.substeps == 10);
        CHECK(r.entropy_after < h0);
        CHECK(r.max_mass_error <= 1e-12);
        CHECK(r.map.fold_free());
    }
    SUBCASE("entropy decreases across sub-steps") {
        DiskSetup s(2.0);
        FlowParams p = params;
        p.tau_fp = p.t1;  // one sub-step at a time
        Embedding2D cur = s.map;
        double prev = relative_entropy(pushforward_density(s.source, cur), cur, s.reference);
        int violations = 0;
        for (int k = 0; k < 50; ++k) {
            auto r = transport_apply(cur, s.source, s.reference, p.t1, p);
            REQUIRE(r.completed);
            if (r.entropy_after > prev + 1e-10) ++violations;
            prev = r.entropy_after;
            cur = std::move(r.map);
        }
        CHECK(violations <= 1);
    }
    SUBCASE("backtracking engages on a huge step and never flips") {
        DiskSetup s(6.0);  // strongly concentrated target
        FlowParams p = params;
        p.t1 = 0.5;
        p.tau_fp = 0.5;  // far above stability: forces halving
        auto r = transport_apply(s.map, s.source, s.reference, p.t1, p);
        CHECK(r.map.fold_free());
        CHECK(r.backtracks > 0);
    }
    SUBCASE("boundary vertices never move") {
        DiskSetup s(3.0);
        auto r = transport_apply(s.map, s.source, s.reference, 10.0 * params.t1, params);
        for (int v = 0; v < s.mesh.num_vertices(); ++v)
            if (s.mesh.is_boundary_vertex(v))
                CHECK((r.map.pos(v) - s.map.pos(v)).norm() == 0.0);
    }
}

}  // TEST_SUITE
