#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "vortctl/mesh.hpp"

namespace vortctl {

using Vector = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;

/// Nodal P1 coefficient vector tied to a mesh.
struct ScalarField {
    const Mesh* mesh = nullptr;
    Vector values;
};

/// Sparse symmetric matrix with a lazily cached direct factorization.
/// Immutable after construction; copies share the factorization.
class SpdMatrix {
public:
    SpdMatrix() = default;
    explicit SpdMatrix(SparseMat A) : A_(std::move(A)) {}

    const SparseMat& matrix() const { return A_; }
    int rows() const { return static_cast<int>(A_.rows()); }

    /// Direct solve with relative residual at most 1e-10 (one step of
    /// iterative refinement if needed). Throws std::runtime_error when the
    /// factorization breaks down, i.e. the matrix is not SPD on the solved
    /// subspace.
    Vector solve(const Vector& b) const;

    double quadratic_form(const Vector& w) const { return w.dot(A_ * w); }

private:
    SparseMat A_;
    mutable std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> fact_;
};

/// Exact P1 mass matrix: 3x3 blocks area/12 * [2 1 1; 1 2 1; 1 1 2].
SpdMatrix assemble_mass(const Mesh& m);

/// Exact P1 stiffness matrix (gradient-gradient). Singular before
/// Dirichlet reduction: constants are in the kernel.
SpdMatrix assemble_stiffness(const Mesh& m);

Vector solve_spd(const SpdMatrix& A, const Vector& b);

double norm_h(const SpdMatrix& mass, const Vector& w);
double seminorm_v(const SpdMatrix& stiffness, const Vector& w);

/// Dirichlet imposition by elimination with an explicit lifting of the
/// boundary data: the interior system A_II w_I = rhs_I - A_IB g_B is
/// factored once per operator matrix.
class DirichletSystem {
public:
    DirichletSystem(const SparseMat& A, const Mesh& mesh);

    /// rhs and g are full-length nodal vectors; g is read on boundary
    /// nodes only. Returns the full-length solution with boundary = g.
    Vector solve(const Vector& rhs, const Vector& g) const;
    /// Homogeneous boundary data shortcut (pure row/column elimination).
    Vector solve_zero(const Vector& rhs) const;

    Vector reduce_rhs(const Vector& rhs, const Vector& g) const;
    Vector expand(const Vector& interior, const Vector& g) const;

    const SpdMatrix& reduced() const { return A_II_; }
    const std::vector<int>& interior() const { return interior_; }
    int n_interior() const { return static_cast<int>(interior_.size()); }

private:
    int n_nodes_ = 0;
    std::vector<int> interior_;
    std::vector<int> boundary_;
    std::vector<int> index_of_;  // node -> interior position, -1 on boundary
    SpdMatrix A_II_;
    SparseMat A_IB_;
};

// ---------------------------------------------------------------------------
// Quadrature on triangles (barycentric points, weights relative to area)
// ---------------------------------------------------------------------------

struct QuadPoint {
    double b0, b1, b2, w;
};

/// 3-point rule, exact for degree 2.
const std::vector<QuadPoint>& quad_deg2();
/// 7-point rule, exact for degree 5; used for discontinuous forcings.
const std::vector<QuadPoint>& quad_deg5();

/// Load vector (f, v_i)_H by quadrature.
Vector assemble_load(const Mesh& m, const std::function<double(Vec2)>& f,
                     const std::vector<QuadPoint>& rule);

/// Nodal interpolation of an analytic function.
Vector interpolate(const Mesh& m, const std::function<double(Vec2)>& f);

/// Quadrature value of the integral of f over the mesh.
double integrate(const Mesh& m, const std::function<double(Vec2)>& f,
                 const std::vector<QuadPoint>& rule);

/// Debug dump in coordinate text format "i j value", sorted by (i, j).
void dump_matrix(std::ostream& os, const SparseMat& A);

}  // namespace vortctl
