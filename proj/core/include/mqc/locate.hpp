#pragma once
#include <array>
#include <optional>
#include <vector>

#include "mqc/mesh.hpp"

namespace mqc {

struct LocateResult {
    int face = -1;
    std::array<double, 3> barycentric{};  // in [0,1], sums to 1
};

/// Point location in a fold-over-free planar embedding, backed by a
/// uniform background grid bucketing face bounding boxes.
class PointLocator {
public:
    explicit PointLocator(const Embedding2D& map);

    /// Returns the containing face (ties on shared edges broken by lowest
    /// face index) or nullopt when the query lies outside the image;
    /// outside_distance() then reports the distance to the nearest face.
    std::optional<LocateResult> locate(const Vec2& query) const;
    double outside_distance(const Vec2& query) const;

private:
    std::pair<int, int> cell_of(const Vec2& p) const;

    const Embedding2D* map_;
    Vec2 origin_;
    double cell_size_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

/// Barycentric coordinates of `p` in triangle (a,b,c); valid for
/// non-degenerate triangles of either orientation.
std::array<double, 3> barycentric_coords(const Vec2& a, const Vec2& b,
                                         const Vec2& c, const Vec2& p);

}  // namespace mqc
