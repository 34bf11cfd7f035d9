#include "vortctl/vorticity.hpp"

#include <stdexcept>

namespace vortctl {

VorticityOps::VorticityOps(const Mesh& mesh)
    : mesh_(&mesh),
      mass_(assemble_mass(mesh)),
      stiffness_(assemble_stiffness(mesh)),
      laplace_(stiffness_.matrix(), mesh) {
    const int nt = mesh.triangle_count();
    area_.resize(nt);
    grad_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const Tri& tr = mesh.triangles[t];
        const Vec2 a = mesh.nodes[tr.v[0]], b = mesh.nodes[tr.v[1]], c = mesh.nodes[tr.v[2]];
        const double A = tri_area(a, b, c);
        area_[t] = A;
        grad_[t][0] = {(b.y - c.y) / (2 * A), (c.x - b.x) / (2 * A)};
        grad_[t][1] = {(c.y - a.y) / (2 * A), (a.x - c.x) / (2 * A)};
        grad_[t][2] = {(a.y - b.y) / (2 * A), (b.x - a.x) / (2 * A)};
    }
}

Vector VorticityOps::stream_function(const Vector& w) const {
    if (w.size() != mesh_->node_count())
        throw std::invalid_argument("stream_function: mesh mismatch");
    return laplace_.solve_zero(mass_.matrix() * w);
}

VelocitySample VorticityOps::velocity_of_stream(const Vector& psi) const {
    VelocitySample u;
    u.per_tri.resize(mesh_->triangle_count());
    for (int t = 0; t < mesh_->triangle_count(); ++t) {
        const Tri& tr = mesh_->triangles[t];
        Vec2 g{0, 0};
        for (int k = 0; k < 3; ++k) g = g + psi[tr.v[k]] * grad_[t][k];
        u.per_tri[t] = {-g.y, g.x};  // curl* of the P1 stream function
    }
    return u;
}

VelocitySample VorticityOps::velocity(const Vector& w) const {
    return velocity_of_stream(stream_function(w));
}

Vector VorticityOps::convection_load(const VelocitySample& u, const Vector& a) const {
    if (a.size() != mesh_->node_count())
        throw std::invalid_argument("convection_load: mesh mismatch");
    Vector out = Vector::Zero(mesh_->node_count());
    for (int t = 0; t < mesh_->triangle_count(); ++t) {
        const Tri& tr = mesh_->triangles[t];
        const Vec2 ut = u.per_tri[t];
        Vec2 grad_a{0, 0};
        double mean_a = 0.0;
        for (int k = 0; k < 3; ++k) {
            grad_a = grad_a + a[tr.v[k]] * grad_[t][k];
            mean_a += a[tr.v[k]] / 3.0;
        }
        const double adv = dot(ut, grad_a);  // constant on the element
        for (int k = 0; k < 3; ++k) {
            // 1/2 [ (u.grad a) v_k - (u.grad v_k) a ], both integrands linear
            out[tr.v[k]] +=
                0.5 * area_[t] * (adv / 3.0 - dot(ut, grad_[t][k]) * mean_a);
        }
    }
    return out;
}

Vector VorticityOps::convection(const Vector& w) const {
    return convection_load(velocity(w), w);
}

Vector VorticityOps::linearized_convection(const Vector& w_about, const Vector& z) const {
    const VelocitySample u_about = velocity(w_about);
    const VelocitySample u_z = velocity(z);
    return convection_load(u_z, w_about) + convection_load(u_about, z);
}

double VorticityOps::velocity_energy(const VelocitySample& u) const {
    double s = 0.0;
    for (int t = 0; t < mesh_->triangle_count(); ++t) s += area_[t] * dot(u.per_tri[t], u.per_tri[t]);
    return s;
}

}  // namespace vortctl
