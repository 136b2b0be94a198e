#pragma once
#include <string>
#include <vector>

#include "mqc/cut.hpp"
#include "mqc/mesh.hpp"

namespace mqc {

/// Strictly positive piecewise-constant probability density per face.
/// Mass is measured against the areas of whichever embedding the density
/// currently lives on (the source surface for priors, the image for
/// pushforwards).
struct FaceDensity {
    const TriMesh* parent = nullptr;
    std::vector<double> values;

    /// Constant density 1/total_area (the area-induced probability measure).
    static FaceDensity area_induced(const TriMesh& mesh);
    /// Every face carries equal measure 1/|F|.
    static FaceDensity uniform_per_face(const TriMesh& mesh);
    /// Positive per-face values, rescaled to unit mass against the mesh areas.
    static FaceDensity from_values(const TriMesh& mesh, std::vector<double> values);
    /// One positive value per line.
    static FaceDensity from_file(const TriMesh& mesh, const std::string& path);

    double mass(const TriMesh& mesh) const;
    double mass(const Embedding2D& map) const;
};

/// Evaluator for the reference density u = e^{-V}. The log-normalizer is
/// fixed by centroid-rule quadrature over a target-domain mesh at
/// normalize() time; grad_V never depends on it.
class ReferenceDensity {
public:
    static ReferenceDensity uniform();
    static ReferenceDensity gaussian(Vec2 center, double rate);
    /// Plain-text grid file: "nx ny origin_x origin_y spacing [periodic]"
    /// followed by nx*ny positive values in row-major order.
    static ReferenceDensity grid_from_file(const std::string& path);
    static ReferenceDensity grid(std::vector<double> values, int nx, int ny,
                                 Vec2 origin, double spacing, bool periodic);

    /// Computes the normalizer c so that the centroid-rule integral of
    /// e^{-V} over the given domain mesh equals 1.
    void normalize(const Embedding2D& domain);
    bool normalized() const { return normalized_; }

    double V(const Vec2& x) const;
    Vec2 grad_V(const Vec2& x) const;
    double density(const Vec2& x) const;  // e^{-V}

private:
    enum class Kind { uniform, gaussian, grid };
    Kind kind_ = Kind::uniform;
    Vec2 center_{};
    double rate_ = 0.0;
    // grid data
    std::vector<double> grid_V_, grid_dVx_, grid_dVy_;
    int nx_ = 0, ny_ = 0;
    Vec2 origin_{};
    double spacing_ = 1.0;
    bool periodic_ = false;
    double log_normalizer_ = 0.0;
    bool normalized_ = false;

    double unnormalized_V(const Vec2& x) const;
    double sample_bilinear(const std::vector<double>& g, const Vec2& x) const;
};

/// Density of the pushforward measure: rho_f = rho * Area / Area(image).
FaceDensity pushforward_density(const FaceDensity& source, const Embedding2D& map);

/// Area-weighted density average over the faces incident to each vertex.
std::vector<double> vertex_density(const FaceDensity& density, const Embedding2D& map);
/// Genus-1 variant: identified copies aggregate over all faces incident to
/// the original vertex in the universal cover and share one value.
std::vector<double> vertex_density(const FaceDensity& density, const Embedding2D& map,
                                   const CutMesh& cover);

/// Area-weighted average of the per-face gradients of the PL extension of
/// the vertex densities.
std::vector<Vec2> vertex_density_gradient(const std::vector<double>& vertex_rho,
                                          const Embedding2D& map);
std::vector<Vec2> vertex_density_gradient(const std::vector<double>& vertex_rho,
                                          const Embedding2D& map, const CutMesh& cover);

/// Discrete relative entropy
///   H = sum Area(f) rho_f log rho_f + sum rho_f * Area(f) * V(centroid_f)
/// with the one-point centroid quadrature of the V integral.
double relative_entropy(const FaceDensity& density, const Embedding2D& map,
                        const ReferenceDensity& reference);

}  // namespace mqc
