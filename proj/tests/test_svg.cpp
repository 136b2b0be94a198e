#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mqc/svg.hpp"
#include "support/fixtures.hpp"

using namespace mqc;
using namespace mqc::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t count_of(const std::string& hay, const std::string& needle) {
    size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

TEST_SUITE("svg") {

TEST_CASE("two-face square renders two polygons") {
    auto m = grid_mesh(1, 1);
    const auto p = fs::temp_directory_path() / "mqc_two_face.svg";
    render_svg(identity_embedding(m), p.string());
    const auto text = slurp(p);
    CHECK(count_of(text, "<polygon") == 2);
    CHECK(text.find("<svg") != std::string::npos);
}

TEST_CASE("constant scalar gives a single fill color") {
    auto m = grid_mesh(2, 2);
    SvgOptions opt;
    opt.face_scalar.assign(m.num_faces(), 0.0);
    const auto p = fs::temp_directory_path() / "mqc_const.svg";
    render_svg(identity_embedding(m), p.string(), opt);
    const auto text = slurp(p);
    // all polygons carry the mid-ramp color of a degenerate scalar range
    CHECK(count_of(text, "fill=\"#ffffff\"") == static_cast<size_t>(m.num_faces()));
}

TEST_CASE("deterministic output") {
    auto m = jittered_grid(4, 4, 77);
    SvgOptions opt;
    for (int f = 0; f < m.num_faces(); ++f) opt.face_scalar.push_back(f * 0.01);
    const auto p1 = fs::temp_directory_path() / "mqc_det1.svg";
    const auto p2 = fs::temp_directory_path() / "mqc_det2.svg";
    render_svg(identity_embedding(m), p1.string(), opt);
    render_svg(identity_embedding(m), p2.string(), opt);
    CHECK(slurp(p1) == slurp(p2));
}

}  // TEST_SUITE
