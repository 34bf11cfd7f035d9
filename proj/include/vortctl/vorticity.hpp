#pragma once

#include <vector>

#include "vortctl/fem.hpp"
#include "vortctl/mesh.hpp"

namespace vortctl {

/// Per-triangle constant velocity (-d psi/dx2, d psi/dx1) of a P1 stream
/// function; exactly divergence-free on each element.
struct VelocitySample {
    std::vector<Vec2> per_tri;
};

/// Stream-function calculus on a fixed mesh: psi = A^{-1} w with psi = 0 on
/// the boundary, u = curl* psi, and the skew-symmetrized convection form
///   b(u, w, v) = 1/2 [ (u . grad w, v)_H - (u . grad v, w)_H ],
/// which satisfies b(u, w, w) = 0 exactly.
class VorticityOps {
public:
    explicit VorticityOps(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    const SpdMatrix& mass() const { return mass_; }
    const SpdMatrix& stiffness() const { return stiffness_; }
    const DirichletSystem& laplace() const { return laplace_; }

    /// psi solving the discrete A psi = w, psi = 0 on the boundary.
    Vector stream_function(const Vector& w) const;

    /// u = curl* psi per triangle.
    VelocitySample velocity(const Vector& w) const;
    VelocitySample velocity_of_stream(const Vector& psi) const;

    /// Load vector with entries b(velocity(w), w, v_i).
    Vector convection(const Vector& w) const;

    /// Load vector with entries b(u, a, v_i) for a given transport field.
    Vector convection_load(const VelocitySample& u, const Vector& a) const;

    /// Weak form of curl*(A^{-1}z).grad w_about + curl*(A^{-1}w_about).grad z,
    /// the same skew-symmetrized pairing applied termwise. Diagnostic only.
    Vector linearized_convection(const Vector& w_about, const Vector& z) const;

    /// Sum over triangles of area * |u|^2 (squared L2 norm of the velocity).
    double velocity_energy(const VelocitySample& u) const;

    double norm_h(const Vector& w) const { return vortctl::norm_h(mass_, w); }
    double seminorm_v(const Vector& w) const { return vortctl::seminorm_v(stiffness_, w); }

private:
    const Mesh* mesh_;
    SpdMatrix mass_;
    SpdMatrix stiffness_;
    DirichletSystem laplace_;
    // cached element geometry
    std::vector<double> area_;
    std::vector<std::array<Vec2, 3>> grad_;
};

}  // namespace vortctl
