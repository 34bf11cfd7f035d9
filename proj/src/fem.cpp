#include "vortctl/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace vortctl {

namespace {

struct TriGeom {
    double area;
    Vec2 grad[3];  // gradients of the three hat functions
};

TriGeom tri_geom(const Mesh& m, const Tri& t) {
    const Vec2 a = m.nodes[t.v[0]], b = m.nodes[t.v[1]], c = m.nodes[t.v[2]];
    const double A = tri_area(a, b, c);
    TriGeom g;
    g.area = A;
    g.grad[0] = {(b.y - c.y) / (2 * A), (c.x - b.x) / (2 * A)};
    g.grad[1] = {(c.y - a.y) / (2 * A), (a.x - c.x) / (2 * A)};
    g.grad[2] = {(a.y - b.y) / (2 * A), (b.x - a.x) / (2 * A)};
    return g;
}

}  // namespace

Vector SpdMatrix::solve(const Vector& b) const {
    if (b.size() != A_.rows()) throw std::invalid_argument("solve: size mismatch");
    if (!fact_) {
        auto f = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>();
        f->compute(A_);
        if (f->info() != Eigen::Success || f->vectorD().minCoeff() <= 0.0)
            throw std::runtime_error("solve: factorization failed, matrix not SPD");
        fact_ = std::move(f);
    }
    Vector x = fact_->solve(b);
    const double bn = b.norm();
    if (bn > 0.0) {
        double res = (A_ * x - b).norm();
        if (res > 1e-10 * bn) {
            x += fact_->solve(b - A_ * x);  // one step of iterative refinement
            res = (A_ * x - b).norm();
            if (res > 1e-10 * bn)
                throw std::runtime_error("solve: residual above tolerance, matrix not SPD");
        }
    }
    return x;
}

SpdMatrix assemble_mass(const Mesh& m) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m.triangles.size() * 9);
    for (const Tri& t : m.triangles) {
        const double A = tri_area(m.nodes[t.v[0]], m.nodes[t.v[1]], m.nodes[t.v[2]]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(t.v[i], t.v[j], (i == j ? 2.0 : 1.0) * A / 12.0);
    }
    SparseMat M(m.node_count(), m.node_count());
    M.setFromTriplets(trip.begin(), trip.end());
    return SpdMatrix(std::move(M));
}

SpdMatrix assemble_stiffness(const Mesh& m) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m.triangles.size() * 9);
    for (const Tri& t : m.triangles) {
        const TriGeom g = tri_geom(m, t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(t.v[i], t.v[j], g.area * dot(g.grad[i], g.grad[j]));
    }
    SparseMat K(m.node_count(), m.node_count());
    K.setFromTriplets(trip.begin(), trip.end());
    return SpdMatrix(std::move(K));
}

Vector solve_spd(const SpdMatrix& A, const Vector& b) { return A.solve(b); }

double norm_h(const SpdMatrix& mass, const Vector& w) {
    if (w.size() != mass.rows()) throw std::invalid_argument("norm_h: mesh mismatch");
    return std::sqrt(std::max(0.0, mass.quadratic_form(w)));
}

double seminorm_v(const SpdMatrix& stiffness, const Vector& w) {
    if (w.size() != stiffness.rows()) throw std::invalid_argument("seminorm_v: mesh mismatch");
    return std::sqrt(std::max(0.0, stiffness.quadratic_form(w)));
}

DirichletSystem::DirichletSystem(const SparseMat& A, const Mesh& mesh) {
    n_nodes_ = mesh.node_count();
    if (A.rows() != n_nodes_ || A.cols() != n_nodes_)
        throw std::invalid_argument("DirichletSystem: matrix/mesh size mismatch");
    interior_ = mesh.interior_nodes();
    boundary_ = mesh.boundary_nodes();
    index_of_.assign(n_nodes_, -1);
    for (std::size_t i = 0; i < interior_.size(); ++i) index_of_[interior_[i]] = static_cast<int>(i);
    std::vector<int> bindex(n_nodes_, -1);
    for (std::size_t i = 0; i < boundary_.size(); ++i) bindex[boundary_[i]] = static_cast<int>(i);

    std::vector<Eigen::Triplet<double>> tii, tib;
    for (int col = 0; col < A.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(A, col); it; ++it) {
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (index_of_[r] < 0) continue;
            if (index_of_[c] >= 0)
                tii.emplace_back(index_of_[r], index_of_[c], it.value());
            else
                tib.emplace_back(index_of_[r], bindex[c], it.value());
        }
    }
    SparseMat AII(interior_.size(), interior_.size());
    AII.setFromTriplets(tii.begin(), tii.end());
    A_II_ = SpdMatrix(std::move(AII));
    A_IB_.resize(interior_.size(), boundary_.size());
    A_IB_.setFromTriplets(tib.begin(), tib.end());
}

Vector DirichletSystem::reduce_rhs(const Vector& rhs, const Vector& g) const {
    if (rhs.size() != n_nodes_ || g.size() != n_nodes_)
        throw std::invalid_argument("reduce_rhs: size mismatch");
    Vector gb(boundary_.size());
    for (std::size_t i = 0; i < boundary_.size(); ++i) gb[i] = g[boundary_[i]];
    Vector r(interior_.size());
    for (std::size_t i = 0; i < interior_.size(); ++i) r[i] = rhs[interior_[i]];
    return r - A_IB_ * gb;
}

Vector DirichletSystem::expand(const Vector& interior, const Vector& g) const {
    Vector full(n_nodes_);
    for (int i = 0; i < n_nodes_; ++i)
        full[i] = index_of_[i] >= 0 ? interior[index_of_[i]] : g[i];
    return full;
}

Vector DirichletSystem::solve(const Vector& rhs, const Vector& g) const {
    return expand(A_II_.solve(reduce_rhs(rhs, g)), g);
}

Vector DirichletSystem::solve_zero(const Vector& rhs) const {
    return solve(rhs, Vector::Zero(n_nodes_));
}

const std::vector<QuadPoint>& quad_deg2() {
    static const std::vector<QuadPoint> rule = {
        {2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
        {1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3},
        {1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3},
    };
    return rule;
}

const std::vector<QuadPoint>& quad_deg5() {
    // 7-point rule: centroid plus two symmetric orbits.
    const double a1 = 0.059715871789769820;
    const double b1 = 0.470142064105115090;
    const double w1 = 0.132394152788506181;
    const double a2 = 0.797426985353087322;
    const double b2 = 0.101286507323456339;
    const double w2 = 0.125939180544827153;
    static const std::vector<QuadPoint> rule = {
        {1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40},
        {a1, b1, b1, w1},
        {b1, a1, b1, w1},
        {b1, b1, a1, w1},
        {a2, b2, b2, w2},
        {b2, a2, b2, w2},
        {b2, b2, a2, w2},
    };
    return rule;
}

Vector assemble_load(const Mesh& m, const std::function<double(Vec2)>& f,
                     const std::vector<QuadPoint>& rule) {
    Vector load = Vector::Zero(m.node_count());
    for (const Tri& t : m.triangles) {
        const Vec2 a = m.nodes[t.v[0]], b = m.nodes[t.v[1]], c = m.nodes[t.v[2]];
        const double A = tri_area(a, b, c);
        for (const QuadPoint& q : rule) {
            const Vec2 x = q.b0 * a + q.b1 * b + q.b2 * c;
            const double fv = f(x) * q.w * A;
            load[t.v[0]] += fv * q.b0;
            load[t.v[1]] += fv * q.b1;
            load[t.v[2]] += fv * q.b2;
        }
    }
    return load;
}

Vector interpolate(const Mesh& m, const std::function<double(Vec2)>& f) {
    Vector v(m.node_count());
    for (int i = 0; i < m.node_count(); ++i) v[i] = f(m.nodes[i]);
    return v;
}

double integrate(const Mesh& m, const std::function<double(Vec2)>& f,
                 const std::vector<QuadPoint>& rule) {
    double s = 0.0;
    for (const Tri& t : m.triangles) {
        const Vec2 a = m.nodes[t.v[0]], b = m.nodes[t.v[1]], c = m.nodes[t.v[2]];
        const double A = tri_area(a, b, c);
        for (const QuadPoint& q : rule) s += q.w * A * f(q.b0 * a + q.b1 * b + q.b2 * c);
    }
    return s;
}

void dump_matrix(std::ostream& os, const SparseMat& A) {
    std::vector<std::tuple<int, int, double>> entries;
    for (int col = 0; col < A.outerSize(); ++col)
        for (SparseMat::InnerIterator it(A, col); it; ++it)
            entries.emplace_back(it.row(), it.col(), it.value());
    std::sort(entries.begin(), entries.end());
    char buf[96];
    for (const auto& [i, j, v] : entries) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, v);
        os << buf;
    }
}

}  // namespace vortctl
