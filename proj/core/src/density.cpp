#include "mqc/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mqc/error.hpp"

namespace mqc {

namespace {
constexpr double kDensityFloor = 1e-12;
}

FaceDensity FaceDensity::area_induced(const TriMesh& mesh) {
    const double rho = 1.0 / mesh.total_area();
    return {&mesh, std::vector<double>(mesh.num_faces(), rho)};
}

FaceDensity FaceDensity::uniform_per_face(const TriMesh& mesh) {
    std::vector<double> v(mesh.num_faces());
    const double m = 1.0 / mesh.num_faces();
    for (int f = 0; f < mesh.num_faces(); ++f) v[f] = m / mesh.face_area(f);
    return {&mesh, std::move(v)};
}

FaceDensity FaceDensity::from_values(const TriMesh& mesh, std::vector<double> values) {
    if (static_cast<int>(values.size()) != mesh.num_faces())
        fail_validation("density: one value per face required");
    double mass = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!(values[f] > 0.0)) fail_validation("density: values must be positive");
        mass += values[f] * mesh.face_area(f);
    }
    for (auto& v : values) v /= mass;
    return {&mesh, std::move(values)};
}

FaceDensity FaceDensity::from_file(const TriMesh& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open " + path);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    return from_values(mesh, std::move(v));
}

double FaceDensity::mass(const TriMesh& mesh) const {
    double m = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) m += values[f] * mesh.face_area(f);
    return m;
}

double FaceDensity::mass(const Embedding2D& map) const {
    double m = 0.0;
    for (int f = 0; f < map.parent->num_faces(); ++f)
        m += values[f] * std::abs(map.signed_area(f));
    return m;
}

// --- ReferenceDensity -----------------------------------------------------

ReferenceDensity ReferenceDensity::uniform() { return {}; }

ReferenceDensity ReferenceDensity::gaussian(Vec2 center, double rate) {
    ReferenceDensity r;
    r.kind_ = Kind::gaussian;
    r.center_ = center;
    r.rate_ = rate;
    return r;
}

ReferenceDensity ReferenceDensity::grid(std::vector<double> values, int nx, int ny,
                                        Vec2 origin, double spacing, bool periodic) {
    if (nx < 2 || ny < 2 || static_cast<int>(values.size()) != nx * ny)
        fail_validation("grid density: need nx*ny values with nx,ny >= 2");
    ReferenceDensity r;
    r.kind_ = Kind::grid;
    r.nx_ = nx;
    r.ny_ = ny;
    r.origin_ = origin;
    r.spacing_ = spacing;
    r.periodic_ = periodic;
    r.grid_V_.resize(values.size());
    for (size_t i = 0; i < values.size(); ++i)
        r.grid_V_[i] = -std::log(std::max(values[i], kDensityFloor));
    // central differences; one-sided at non-periodic borders
    r.grid_dVx_.resize(values.size());
    r.grid_dVy_.resize(values.size());
    auto at = [&](int i, int j) {
        if (periodic) {
            i = ((i % nx) + nx) % nx;
            j = ((j % ny) + ny) % ny;
        } else {
            i = std::clamp(i, 0, nx - 1);
            j = std::clamp(j, 0, ny - 1);
        }
        return r.grid_V_[static_cast<size_t>(j) * nx + i];
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t idx = static_cast<size_t>(j) * nx + i;
            double hx = 2 * spacing, hy = 2 * spacing;
            if (!periodic && (i == 0 || i == nx - 1)) hx = spacing;
            if (!periodic && (j == 0 || j == ny - 1)) hy = spacing;
            r.grid_dVx_[idx] = (at(i + 1, j) - at(i - 1, j)) / hx;
            r.grid_dVy_[idx] = (at(i, j + 1) - at(i, j - 1)) / hy;
        }
    return r;
}

ReferenceDensity ReferenceDensity::grid_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) fail_io("grid density: empty file");
    std::istringstream hs(header);
    int nx, ny;
    Vec2 origin;
    double spacing;
    if (!(hs >> nx >> ny >> origin.x >> origin.y >> spacing))
        fail_io("grid density: bad header (want: nx ny ox oy spacing [periodic])");
    std::string flag;
    bool periodic = (hs >> flag) && flag == "periodic";
    std::vector<double> values;
    double v;
    while (in >> v) {
        if (!(v > 0.0)) fail_validation("grid density: values must be positive");
        values.push_back(v);
    }
    return grid(std::move(values), nx, ny, origin, spacing, periodic);
}

double ReferenceDensity::sample_bilinear(const std::vector<double>& g, const Vec2& x) const {
    double fx = (x.x - origin_.x) / spacing_;
    double fy = (x.y - origin_.y) / spacing_;
    auto at = [&](int i, int j) {
        if (periodic_) {
            i = ((i % nx_) + nx_) % nx_;
            j = ((j % ny_) + ny_) % ny_;
        } else {
            i = std::clamp(i, 0, nx_ - 1);
            j = std::clamp(j, 0, ny_ - 1);
        }
        return g[static_cast<size_t>(j) * nx_ + i];
    };
    if (!periodic_) {
        fx = std::clamp(fx, 0.0, static_cast<double>(nx_ - 1));
        fy = std::clamp(fy, 0.0, static_cast<double>(ny_ - 1));
    }
    const int i = static_cast<int>(std::floor(fx));
    const int j = static_cast<int>(std::floor(fy));
    const double a = fx - i, b = fy - j;
    return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) +
           (1 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1);
}

double ReferenceDensity::unnormalized_V(const Vec2& x) const {
    switch (kind_) {
        case Kind::uniform: return 0.0;
        case Kind::gaussian: return rate_ * (x - center_).squared_norm();
        case Kind::grid: return sample_bilinear(grid_V_, x);
    }
    return 0.0;
}

void ReferenceDensity::normalize(const Embedding2D& domain) {
    double integral = 0.0;
    for (int f = 0; f < domain.parent->num_faces(); ++f)
        integral += std::abs(domain.signed_area(f)) *
                    std::exp(-unnormalized_V(domain.face_centroid(f)));
    if (!(integral > 0.0)) fail_numerical("reference density: vanishing integral");
    log_normalizer_ = -std::log(integral);
    normalized_ = true;
}

double ReferenceDensity::V(const Vec2& x) const {
    return unnormalized_V(x) - log_normalizer_;
}

Vec2 ReferenceDensity::grad_V(const Vec2& x) const {
    switch (kind_) {
        case Kind::uniform: return {0.0, 0.0};
        case Kind::gaussian: return 2.0 * rate_ * (x - center_);
        case Kind::grid:
            return {sample_bilinear(grid_dVx_, x), sample_bilinear(grid_dVy_, x)};
    }
    return {0.0, 0.0};
}

double ReferenceDensity::density(const Vec2& x) const { return std::exp(-V(x)); }

// --- pushforward / vertex averages ---------------------------------------

FaceDensity pushforward_density(const FaceDensity& source, const Embedding2D& map) {
    const TriMesh& mesh = *source.parent;
    Vec2 lo = map.positions[0], hi = map.positions[0];
    for (const auto& p : map.positions) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    const double tol = degeneracy_tolerance((hi - lo).squared_norm());
    std::vector<double> out(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const double image_area = std::abs(map.signed_area(f));
        if (image_area <= tol)
            fail_numerical("pushforward: degenerate image face " + std::to_string(f));
        out[f] = source.values[f] * mesh.face_area(f) / image_area;
    }
    return {&mesh, std::move(out)};
}

namespace {

std::vector<double> vertex_density_impl(const FaceDensity& density, const Embedding2D& map,
                                        const CutMesh* cover) {
    const TriMesh& mesh = *map.parent;
    const int nv = mesh.num_vertices();
    std::vector<double> num(nv, 0.0), den(nv, 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const double a = std::abs(map.signed_area(f));
        for (int v : mesh.face(f)) {
            num[v] += a * density.values[f];
            den[v] += a;
        }
    }
    if (cover) {
        // aggregate over all copies of each original vertex
        for (const auto& group : cover->copies) {
            double n = 0.0, d = 0.0;
            for (int v : group) {
                n += num[v];
                d += den[v];
            }
            for (int v : group) {
                num[v] = n;
                den[v] = d;
            }
        }
    }
    std::vector<double> out(nv);
    for (int v = 0; v < nv; ++v) {
        if (den[v] <= 0.0) fail_numerical("vertex_density: isolated vertex");
        out[v] = num[v] / den[v];
    }
    return out;
}

std::vector<Vec2> vertex_density_gradient_impl(const std::vector<double>& vertex_rho,
                                               const Embedding2D& map,
                                               const CutMesh* cover) {
    const TriMesh& mesh = *map.parent;
    const int nv = mesh.num_vertices();
    std::vector<Vec2> num(nv);
    std::vector<double> den(nv, 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        const std::array<Vec2, 3> w{map.pos(t[0]), map.pos(t[1]), map.pos(t[2])};
        const Vec2 g = pl_gradient(w, {vertex_rho[t[0]], vertex_rho[t[1]], vertex_rho[t[2]]});
        const double a = std::abs(map.signed_area(f));
        for (int v : t) {
            num[v] += a * g;
            den[v] += a;
        }
    }
    if (cover) {
        for (const auto& group : cover->copies) {
            Vec2 n{0, 0};
            double d = 0.0;
            for (int v : group) {
                n += num[v];
                d += den[v];
            }
            for (int v : group) {
                num[v] = n;
                den[v] = d;
            }
        }
    }
    std::vector<Vec2> out(nv);
    for (int v = 0; v < nv; ++v) out[v] = (1.0 / den[v]) * num[v];
    return out;
}

}  // namespace

std::vector<double> vertex_density(const FaceDensity& density, const Embedding2D& map) {
    return vertex_density_impl(density, map, nullptr);
}

std::vector<double> vertex_density(const FaceDensity& density, const Embedding2D& map,
                                   const CutMesh& cover) {
    return vertex_density_impl(density, map, &cover);
}

std::vector<Vec2> vertex_density_gradient(const std::vector<double>& vertex_rho,
                                          const Embedding2D& map) {
    return vertex_density_gradient_impl(vertex_rho, map, nullptr);
}

std::vector<Vec2> vertex_density_gradient(const std::vector<double>& vertex_rho,
                                          const Embedding2D& map, const CutMesh& cover) {
    return vertex_density_gradient_impl(vertex_rho, map, &cover);
}

double relative_entropy(const FaceDensity& density, const Embedding2D& map,
                        const ReferenceDensity& reference) {
    double h = 0.0;
    for (int f = 0; f < map.parent->num_faces(); ++f) {
        const double a = std::abs(map.signed_area(f));
        const double rho = density.values[f];
        h += a * rho * std::log(rho);
        h += rho * a * reference.V(map.face_centroid(f));
    }
    return h;
}

}  // namespace mqc
