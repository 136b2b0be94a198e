#pragma once
#include <complex>
#include <vector>

#include "mqc/mesh.hpp"

namespace mqc {

/// One complex Beltrami coefficient per face. Solver input requires
/// |mu| < 1 everywhere; measured fields may violate this and are flagged
/// via admissible().
struct BeltramiField {
    const TriMesh* parent = nullptr;
    std::vector<std::complex<double>> values;

    double max_abs() const;
    bool admissible(double bound = 1.0) const { return max_abs() < bound; }

    /// Chart-area-weighted squared L2 norm: sum Area_chart(f) |mu_f|^2.
    double l2_sq(const Embedding2D& chart) const;
    /// Same with the intrinsic (3D) face areas as weights.
    double l2_sq(const TriMesh& mesh) const;

    /// Maximal dilatation K = (1+|mu|)/(1-|mu|) over all faces.
    double max_dilatation() const;
};

/// Beltrami coefficient mu = f_zbar / f_z of the PL map taking each chart
/// triangle to its image triangle. |mu| < 1 exactly on the
/// orientation-preserving faces.
BeltramiField compute_beltrami(const Embedding2D& map, const Embedding2D& chart);

/// Beltrami coefficient measured against per-face isometric local frames
/// of the (possibly 3D) mesh instead of a global planar chart.
BeltramiField compute_beltrami_intrinsic(const Embedding2D& map);

/// Symmetric 2x2 matrix; the dilation matrix is SPD with unit determinant.
struct Mat2Sym {
    double a11 = 1.0, a12 = 0.0, a22 = 1.0;
    double det() const { return a11 * a22 - a12 * a12; }
};

/// A = 1/(1-|mu|^2) [ (rho-1)^2+tau^2, -2 tau; -2 tau, (1+rho)^2+tau^2 ],
/// mu = rho + i tau, |mu| < 1.
Mat2Sym dilation_matrix(std::complex<double> mu);

}  // namespace mqc
