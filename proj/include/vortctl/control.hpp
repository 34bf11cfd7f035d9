#pragma once

#include <utility>
#include <vector>

#include "vortctl/actuators.hpp"
#include "vortctl/fem.hpp"
#include "vortctl/vorticity.hpp"

namespace vortctl {

/// Oblique projection P_F^{G perp H} in the discrete H inner product:
/// P z = F c with [(g_i, f_j)_H] c = [(g_i, z)_H]. Projects onto span F
/// along the H-orthogonal complement of span G.
class ObliqueProjector {
public:
    ObliqueProjector(std::vector<Vector> range_basis, std::vector<Vector> cross_basis,
                     const SpdMatrix& mass);

    Vector apply(const Vector& z) const;
    /// Coefficients of P z in the range basis.
    Eigen::VectorXd coords(const Vector& z) const;

    int dim() const { return static_cast<int>(range_.size()); }
    /// Reciprocal condition estimate of the cross Gram; construction throws
    /// when the direct-sum condition fails (singular cross Gram).
    double rcond() const { return rcond_; }

private:
    std::vector<Vector> range_;       // F
    Eigen::MatrixXd cross_gram_m_;    // M * G, stacked as columns
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;  // of [(g_i, f_j)_H]
    double rcond_ = 0.0;
    int n_nodes_ = 0;
};

ObliqueProjector make_projector(const std::vector<Vector>& F, const std::vector<Vector>& G,
                                const SpdMatrix& mass);

/// The explicit feedback K z = -lambda P_V [ A_h P_Vt z ] with A_h the
/// H-Riesz representative of the stiffness action (mass * A_h q =
/// stiffness * q). The output lies in span V_M and depends on z only
/// through the measurements (z, phi_j)_H. All small dense factors are
/// precomputed; apply is pure and thread-safe.
class FeedbackOperator {
public:
    FeedbackOperator(double lambda, const ActuatorFamily& family, const SpdMatrix& mass,
                     const SpdMatrix& stiffness);

    double lambda() const { return lambda_; }
    int count() const { return m_sigma_; }
    const ActuatorFamily& family() const { return *family_; }

    /// Measurements s_j = (z, phi_j)_H.
    Eigen::VectorXd measurements(const Vector& z) const;

    /// Control coordinates u = -lambda B s from a measurement vector.
    Eigen::VectorXd coords_from_measurements(const Eigen::VectorXd& s) const;

    /// Control coordinates for the field z.
    Eigen::VectorXd coords(const Vector& z) const { return coords_from_measurements(measurements(z)); }

    /// The control forcing field sum_j u_j phi_j.
    Vector field_from_coords(const Eigen::VectorXd& u) const;
    Vector apply(const Vector& z) const { return field_from_coords(coords(z)); }

    /// Weak load (sum_j u_j phi_j, v_i)_H of the control forcing.
    Vector load_from_coords(const Eigen::VectorXd& u) const;

    /// Both sides of the monotonicity identity at lambda = 1:
    /// (K_M^1 p, p)_H and -|P_Vt p|_V^2, computed through independent paths.
    std::pair<double, double> monotonicity_certificate(const Vector& p) const;

private:
    double lambda_;
    int m_sigma_;
    const ActuatorFamily* family_;
    const SpdMatrix* mass_;
    const SpdMatrix* stiffness_;
    ObliqueProjector p_v_;    // onto V_M along Vt_M^perp
    ObliqueProjector p_vt_;   // onto Vt_M along V_M^perp
    Eigen::MatrixXd gain_;    // B with u = -lambda B s
    Eigen::MatrixXd mass_v_;  // columns M * phi_j (measurement functionals)
};

/// Poincare-like constant: smallest generalized eigenvalue of
/// (stiffness, mass) over interior fields H-orthogonal to all constraint
/// fields. constraints may be empty (plain first Dirichlet eigenvalue).
/// Inverse iteration with exact constraint elimination.
double xi_estimate(const std::vector<Vector>& constraints, const Mesh& mesh,
                   const SpdMatrix& stiffness, const SpdMatrix& mass);

}  // namespace vortctl
