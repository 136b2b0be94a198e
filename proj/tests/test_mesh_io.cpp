#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mqc/error.hpp"
#include "mqc/mesh_io.hpp"
#include "support/fixtures.hpp"

using namespace mqc;
using namespace mqc::testing;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    auto d = fs::temp_directory_path() / "mqc_io_tests";
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_SUITE("mesh_io") {

TEST_CASE("single triangle OFF") {
    const auto p = tmp_dir() / "tri.off";
    write_file(p, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    auto m = load_mesh(p.string());
    CHECK(m.num_faces() == 1);
    CHECK(m.face_area(0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("repeated face rejected") {
    const auto p = tmp_dir() / "dup.off";
    write_file(p, "OFF\n3 2 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n3 0 1 2\n");
    CHECK_THROWS_AS(load_mesh(p.string()), Error);
}

TEST_CASE("unit square OBJ") {
    const auto p = tmp_dir() / "square.obj";
    write_file(p,
               "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
               "f 1 2 3\nf 1 3 4\n");
    auto m = load_mesh(p.string());
    CHECK(m.num_vertices() == 4);
    CHECK(m.num_faces() == 2);
    REQUIRE(m.boundary_loops().size() == 1);
    CHECK(m.boundary_loops()[0].size() == 4);
}

TEST_CASE("obj accepts slash forms and rejects quads") {
    const auto p = tmp_dir() / "slash.obj";
    write_file(p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n");
    CHECK(load_mesh(p.string()).num_faces() == 1);
    const auto q = tmp_dir() / "quad.obj";
    write_file(q, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    CHECK_THROWS_AS(load_mesh(q.string()), Error);
}

TEST_CASE("parse failure is an io error") {
    const auto p = tmp_dir() / "garbage.off";
    write_file(p, "not a mesh\n");
    try {
        load_mesh(p.string());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.exit_code() == 4);
    }
    CHECK_THROWS_AS(load_mesh((tmp_dir() / "missing.obj").string()), Error);
}

TEST_CASE("winding normalized to positive orientation") {
    const auto p = tmp_dir() / "cw.obj";
    write_file(p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 3 2\n");  // clockwise in the plane
    auto m = load_mesh(p.string());
    auto id = identity_embedding(m);
    CHECK(id.fold_free());
}

TEST_CASE("save/load round trip is bit stable") {
    auto m = jittered_grid(5, 5, 17);
    for (const auto ext : {".obj", ".off"}) {
        const auto p = tmp_dir() / (std::string("round") + ext);
        save_mesh(m, p.string());
        auto m2 = load_mesh(p.string());
        REQUIRE(m2.num_vertices() == m.num_vertices());
        REQUIRE(m2.faces() == m.faces());
        for (int v = 0; v < m.num_vertices(); ++v) {
            CHECK(m2.vertex(v).x == m.vertex(v).x);
            CHECK(m2.vertex(v).y == m.vertex(v).y);
            CHECK(m2.vertex(v).z == m.vertex(v).z);
        }
    }
}

TEST_CASE("save_embedding accepts degenerate images") {
    auto m = grid_mesh(2, 2);
    auto e = identity_embedding(m);
    for (auto& p : e.positions) p = {0.0, 0.0};  // fully collapsed
    const auto p = tmp_dir() / "collapsed.obj";
    save_embedding(e, p.string());
    CHECK(fs::exists(p));
}

}  // TEST_SUITE
