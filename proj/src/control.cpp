#include "vortctl/control.hpp"

#include <cmath>
#include <stdexcept>

namespace vortctl {

namespace {

double rcond_of(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) / s(0);
}

}  // namespace

ObliqueProjector::ObliqueProjector(std::vector<Vector> range_basis,
                                   std::vector<Vector> cross_basis, const SpdMatrix& mass) {
    if (range_basis.empty() || range_basis.size() != cross_basis.size())
        throw std::invalid_argument("ObliqueProjector: basis sizes must match and be nonempty");
    n_nodes_ = static_cast<int>(range_basis[0].size());
    range_ = std::move(range_basis);

    const int m = static_cast<int>(range_.size());
    cross_gram_m_.resize(n_nodes_, m);
    for (int j = 0; j < m; ++j) cross_gram_m_.col(j) = mass.matrix() * cross_basis[j];

    Eigen::MatrixXd C(m, m);  // C(i, j) = (g_i, f_j)_H
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) C(i, j) = cross_gram_m_.col(i).dot(range_[j]);

    rcond_ = rcond_of(C);
    if (!(rcond_ > 1e-12)) {
        throw std::runtime_error(
            "ObliqueProjector: cross Gram is numerically singular (direct-sum failure), "
            "rcond = " + std::to_string(rcond_));
    }
    lu_.compute(C);
}

Eigen::VectorXd ObliqueProjector::coords(const Vector& z) const {
    if (z.size() != n_nodes_) throw std::invalid_argument("ObliqueProjector: size mismatch");
    return lu_.solve(cross_gram_m_.transpose() * z);
}

Vector ObliqueProjector::apply(const Vector& z) const {
    const Eigen::VectorXd c = coords(z);
    Vector out = Vector::Zero(n_nodes_);
    for (std::size_t j = 0; j < range_.size(); ++j) out += c[j] * range_[j];
    return out;
}

ObliqueProjector make_projector(const std::vector<Vector>& F, const std::vector<Vector>& G,
                                const SpdMatrix& mass) {
    return ObliqueProjector(F, G, mass);
}

FeedbackOperator::FeedbackOperator(double lambda, const ActuatorFamily& family,
                                   const SpdMatrix& mass, const SpdMatrix& stiffness)
    : lambda_(lambda),
      m_sigma_(family.count()),
      family_(&family),
      mass_(&mass),
      stiffness_(&stiffness),
      p_v_(family.v_fields, family.vtilde_fields, mass),
      p_vt_(family.vtilde_fields, family.v_fields, mass) {
    if (lambda < 0) throw std::invalid_argument("FeedbackOperator: lambda must be >= 0");

    const int m = m_sigma_;
    mass_v_.resize(family.mesh.node_count(), m);
    for (int j = 0; j < m; ++j) mass_v_.col(j) = mass.matrix() * family.v_fields[j];

    // C(i, j) = (phi_i, phi_tilde_j)_H, Kt(i, j) = (phi_tilde_i, phi_tilde_j)_V.
    Eigen::MatrixXd C(m, m), Kt(m, m);
    for (int j = 0; j < m; ++j) {
        const Vector mv = mass.matrix() * family.vtilde_fields[j];
        const Vector kv = stiffness.matrix() * family.vtilde_fields[j];
        for (int i = 0; i < m; ++i) {
            C(i, j) = family.v_fields[i].dot(mv);
            Kt(i, j) = family.vtilde_fields[i].dot(kv);
        }
    }
    // u = -lambda C^{-T} Kt C^{-1} s: the projected H-Riesz representative
    // of the stiffness action never needs the mass solve, because only
    // (phi_tilde_i, A_h q)_H = phi_tilde_i' K q enters the outer projection.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(C);
    gain_ = lu.transpose().solve(Kt * lu.solve(Eigen::MatrixXd::Identity(m, m)));
}

Eigen::VectorXd FeedbackOperator::measurements(const Vector& z) const {
    return mass_v_.transpose() * z;
}

Eigen::VectorXd FeedbackOperator::coords_from_measurements(const Eigen::VectorXd& s) const {
    return -lambda_ * (gain_ * s);
}

Vector FeedbackOperator::field_from_coords(const Eigen::VectorXd& u) const {
    Vector out = Vector::Zero(family_->mesh.node_count());
    for (int j = 0; j < m_sigma_; ++j) out += u[j] * family_->v_fields[j];
    return out;
}

Vector FeedbackOperator::load_from_coords(const Eigen::VectorXd& u) const {
    return mass_v_ * u;
}

std::pair<double, double> FeedbackOperator::monotonicity_certificate(const Vector& p) const {
    // left side at lambda = 1, through the gain path
    const Eigen::VectorXd u = -(gain_ * measurements(p));
    const double lhs = field_from_coords(u).dot(mass_->matrix() * p);
    // right side through the full-dimensional projector and stiffness form
    const Vector q = p_vt_.apply(p);
    const double rhs = -stiffness_->quadratic_form(q);
    return {lhs, rhs};
}

double xi_estimate(const std::vector<Vector>& constraints, const Mesh& mesh,
                   const SpdMatrix& stiffness, const SpdMatrix& mass) {
    const DirichletSystem sys(stiffness.matrix(), mesh);
    const auto& interior = sys.interior();
    const int ni = static_cast<int>(interior.size());
    if (ni == 0) throw std::invalid_argument("xi_estimate: no interior nodes");

    std::vector<int> idx(mesh.node_count(), -1);
    for (int i = 0; i < ni; ++i) idx[interior[i]] = i;
    SparseMat MII(ni, ni);
    {
        std::vector<Eigen::Triplet<double>> trip;
        for (int col = 0; col < mass.matrix().outerSize(); ++col)
            for (SparseMat::InnerIterator it(mass.matrix(), col); it; ++it)
                if (idx[it.row()] >= 0 && idx[it.col()] >= 0)
                    trip.emplace_back(idx[it.row()], idx[it.col()], it.value());
        MII.setFromTriplets(trip.begin(), trip.end());
    }

    const int m = static_cast<int>(constraints.size());
    Eigen::MatrixXd Cc(ni, m), W(ni, m);
    for (int j = 0; j < m; ++j) {
        const Vector mc = mass.matrix() * constraints[j];
        for (int i = 0; i < ni; ++i) Cc(i, j) = mc[interior[i]];
        W.col(j) = sys.reduced().solve(Cc.col(j));
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> slu;
    if (m > 0) {
        const Eigen::MatrixXd S = Cc.transpose() * W;
        if (!(rcond_of(S) > 1e-12))
            throw std::runtime_error("xi_estimate: constraint basis rank-deficient");
        slu.compute(S);
    }
    // y = K^{-1} M x with the constraints eliminated exactly
    auto constrained_inverse = [&](const Vector& x) {
        Vector y = sys.reduced().solve(MII * x);
        if (m > 0) y -= W * slu.solve(Cc.transpose() * y);
        return y;
    };

    Vector x(ni);
    for (int i = 0; i < ni; ++i) {
        const Vec2 p = mesh.nodes[interior[i]];
        x[i] = 1.0 + 0.31 * p.x + 0.17 * p.y + 0.05 * std::sin(3.0 * p.x + p.y);
    }
    if (m > 0) {
        // start inside the constraint space
        Vector y = x;
        y -= W * slu.solve(Cc.transpose() * y);
        x = y;
    }
    x /= std::sqrt(x.dot(MII * x));

    double lambda_prev = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Vector y = constrained_inverse(x);
        y /= std::sqrt(y.dot(MII * y));
        const double lambda = y.dot(sys.reduced().matrix() * y);
        x = y;
        if (it > 5 && std::abs(lambda - lambda_prev) <= 1e-10 * lambda) return lambda;
        lambda_prev = lambda;
    }
    return lambda_prev;
}

}  // namespace vortctl
