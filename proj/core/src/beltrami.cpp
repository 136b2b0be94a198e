#include "mqc/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqc/error.hpp"

namespace mqc {

double BeltramiField::max_abs() const {
    double m = 0.0;
    for (const auto& z : values) m = std::max(m, std::abs(z));
    return m;
}

double BeltramiField::l2_sq(const Embedding2D& chart) const {
    double s = 0.0;
    for (int f = 0; f < chart.parent->num_faces(); ++f)
        s += std::abs(chart.signed_area(f)) * std::norm(values[f]);
    return s;
}

double BeltramiField::l2_sq(const TriMesh& mesh) const {
    double s = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) s += mesh.face_area(f) * std::norm(values[f]);
    return s;
}

double BeltramiField::max_dilatation() const {
    const double m = max_abs();
    if (m >= 1.0) return std::numeric_limits<double>::infinity();
    return (1.0 + m) / (1.0 - m);
}

namespace {

std::complex<double> face_beltrami(const std::array<Vec2, 3>& w, const std::array<Vec2, 3>& img,
                                   int f) {
    const Vec2 gu = pl_gradient(w, {img[0].x, img[1].x, img[2].x});
    const Vec2 gv = pl_gradient(w, {img[0].y, img[1].y, img[2].y});
    // Wirtinger derivatives of the affine map u+iv over the chart
    const std::complex<double> fz(0.5 * (gu.x + gv.y), 0.5 * (gv.x - gu.y));
    const std::complex<double> fzb(0.5 * (gu.x - gv.y), 0.5 * (gv.x + gu.y));
    const double scale = std::abs(fz) + std::abs(fzb);
    if (std::abs(fz) <= 1e-14 * scale || scale == 0.0)
        fail_numerical("compute_beltrami: degenerate image on face " + std::to_string(f));
    return fzb / fz;
}

}  // namespace

BeltramiField compute_beltrami(const Embedding2D& map, const Embedding2D& chart) {
    const TriMesh& mesh = *chart.parent;
    BeltramiField out{&mesh, std::vector<std::complex<double>>(mesh.num_faces())};
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        const std::array<Vec2, 3> w{chart.pos(t[0]), chart.pos(t[1]), chart.pos(t[2])};
        out.values[f] = face_beltrami(w, {map.pos(t[0]), map.pos(t[1]), map.pos(t[2])}, f);
    }
    return out;
}

BeltramiField compute_beltrami_intrinsic(const Embedding2D& map) {
    const TriMesh& mesh = *map.parent;
    BeltramiField out{&mesh, std::vector<std::complex<double>>(mesh.num_faces())};
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.face(f);
        const auto w = local_frame(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
        out.values[f] = face_beltrami(w, {map.pos(t[0]), map.pos(t[1]), map.pos(t[2])}, f);
    }
    return out;
}

Mat2Sym dilation_matrix(std::complex<double> mu) {
    const double n = std::norm(mu);
    if (n >= 1.0) fail_validation("dilation_matrix: |mu| >= 1");
    const double rho = mu.real(), tau = mu.imag();
    const double s = 1.0 / (1.0 - n);
    return {s * ((rho - 1) * (rho - 1) + tau * tau), s * (-2.0 * tau),
            s * ((1 + rho) * (1 + rho) + tau * tau)};
}

}  // namespace mqc
