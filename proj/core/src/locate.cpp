#include "mqc/locate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mqc {

std::array<double, 3> barycentric_coords(const Vec2& a, const Vec2& b,
                                         const Vec2& c, const Vec2& p) {
    const double area2 = (b - a).cross(c - a);
    const double u = (b - p).cross(c - p) / area2;
    const double v = (c - p).cross(a - p) / area2;
    return {u, v, 1.0 - u - v};
}

namespace {

constexpr double kBaryTol = 1e-12;

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = d.squared_norm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * d)).norm();
}

double point_triangle_dist(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    const auto bc = barycentric_coords(a, b, c, p);
    if (bc[0] >= 0 && bc[1] >= 0 && bc[2] >= 0) return 0.0;
    return std::min({point_segment_dist(p, a, b), point_segment_dist(p, b, c),
                     point_segment_dist(p, c, a)});
}

}  // namespace

PointLocator::PointLocator(const Embedding2D& map) : map_(&map) {
    const auto& pos = map.positions;
    Vec2 lo = pos[0], hi = pos[0];
    for (const auto& p : pos) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    origin_ = lo;
    const int nf = map.parent->num_faces();
    // aim for ~1 face per cell
    const double w = std::max(hi.x - lo.x, 1e-300), h = std::max(hi.y - lo.y, 1e-300);
    const double target = std::sqrt(w * h / std::max(nf, 1));
    cell_size_ = std::max(target, 1e-12 * std::max(w, h));
    nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_size_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_size_)));
    buckets_.assign(static_cast<size_t>(nx_) * ny_, {});
    for (int f = 0; f < nf; ++f) {
        const auto& t = map.parent->face(f);
        Vec2 flo = pos[t[0]], fhi = pos[t[0]];
        for (int k = 1; k < 3; ++k) {
            flo.x = std::min(flo.x, pos[t[k]].x); flo.y = std::min(flo.y, pos[t[k]].y);
            fhi.x = std::max(fhi.x, pos[t[k]].x); fhi.y = std::max(fhi.y, pos[t[k]].y);
        }
        const auto [i0, j0] = cell_of(flo);
        const auto [i1, j1] = cell_of(fhi);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                buckets_[static_cast<size_t>(j) * nx_ + i].push_back(f);
    }
}

std::pair<int, int> PointLocator::cell_of(const Vec2& p) const {
    int i = static_cast<int>(std::floor((p.x - origin_.x) / cell_size_));
    int j = static_cast<int>(std::floor((p.y - origin_.y) / cell_size_));
    return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
}

std::optional<LocateResult> PointLocator::locate(const Vec2& query) const {
    const auto [ci, cj] = cell_of(query);
    const auto& pos = map_->positions;
    int best_face = -1;
    std::array<double, 3> best_bc{};
    auto scan = [&](const std::vector<int>& faces) {
        for (int f : faces) {
            if (best_face >= 0 && f >= best_face) continue;
            const auto& t = map_->parent->face(f);
            const auto bc = barycentric_coords(pos[t[0]], pos[t[1]], pos[t[2]], query);
            if (bc[0] >= -kBaryTol && bc[1] >= -kBaryTol && bc[2] >= -kBaryTol) {
                best_face = f;
                best_bc = bc;
            }
        }
    };
    // the containing face may straddle the neighbouring cells
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            const int i = ci + di, j = cj + dj;
            if (i < 0 || i >= nx_ || j < 0 || j >= ny_) continue;
            scan(buckets_[static_cast<size_t>(j) * nx_ + i]);
        }
    if (best_face < 0) return std::nullopt;
    for (auto& c : best_bc) c = std::clamp(c, 0.0, 1.0);
    const double s = best_bc[0] + best_bc[1] + best_bc[2];
    for (auto& c : best_bc) c /= s;
    return LocateResult{best_face, best_bc};
}

double PointLocator::outside_distance(const Vec2& query) const {
    const auto& pos = map_->positions;
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < map_->parent->num_faces(); ++f) {
        const auto& t = map_->parent->face(f);
        best = std::min(best, point_triangle_dist(query, pos[t[0]], pos[t[1]], pos[t[2]]));
    }
    return best;
}

}  // namespace mqc
