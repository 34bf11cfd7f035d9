#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "vortctl/fem.hpp"

using namespace vortctl;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Quadrature of (sum_i values_i * hat_i)^2, independent of the assembled mass
// matrix: per triangle the P1 value at a quadrature point is the barycentric
// combination of nodal values.
double brute_force_h_sq(const Mesh& m, const Vector& w) {
    double s = 0.0;
    for (const Tri& t : m.triangles) {
        const Vec2 a = m.nodes[t.v[0]], b = m.nodes[t.v[1]], c = m.nodes[t.v[2]];
        const double A = tri_area(a, b, c);
        for (const QuadPoint& q : quad_deg5()) {
            const double val = q.b0 * w[t.v[0]] + q.b1 * w[t.v[1]] + q.b2 * w[t.v[2]];
            s += q.w * A * val * val;
        }
    }
    return s;
}

// Smallest Dirichlet eigenvalue of -Laplace by inverse iteration on the
// reduced pencil (K_II, M_II).
double smallest_dirichlet_eigenvalue(const Mesh& m) {
    const SpdMatrix K = assemble_stiffness(m);
    const SpdMatrix M = assemble_mass(m);
    const DirichletSystem sys(K.matrix(), m);
    const auto& interior = sys.interior();
    SparseMat MII(interior.size(), interior.size());
    {
        std::vector<int> idx(m.node_count(), -1);
        for (std::size_t i = 0; i < interior.size(); ++i) idx[interior[i]] = static_cast<int>(i);
        std::vector<Eigen::Triplet<double>> trip;
        for (int col = 0; col < M.matrix().outerSize(); ++col)
            for (SparseMat::InnerIterator it(M.matrix(), col); it; ++it)
                if (idx[it.row()] >= 0 && idx[it.col()] >= 0)
                    trip.emplace_back(idx[it.row()], idx[it.col()], it.value());
        MII.setFromTriplets(trip.begin(), trip.end());
    }
    Vector x = Vector::Ones(interior.size());
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector y = sys.reduced().solve(MII * x);
        y /= std::sqrt(y.dot(MII * y));
        const double next = y.dot(sys.reduced().matrix() * y) / y.dot(MII * y);
        if (std::abs(next - lambda) < 1e-12 * next && it > 3) return next;
        lambda = next;
        x = y;
    }
    return lambda;
}

}  // namespace

TEST_CASE("mass matrix integrates constants exactly") {
    SUBCASE("single right triangle: row sums are area/3") {
        Mesh m;
        m.nodes = {{0, 0}, {1, 0}, {0, 1}};
        m.triangles = {{{0, 1, 2}}};
        m.on_boundary = {1, 1, 1};
        const SpdMatrix M = assemble_mass(m);
        const Vector ones = Vector::Ones(3);
        const Vector rows = M.matrix() * ones;
        for (int i = 0; i < 3; ++i) CHECK(rows[i] == doctest::Approx(0.5 / 3).epsilon(1e-14));
    }
    SUBCASE("constant field energy is c^2 vol") {
        const Mesh m = refine(build_mesh({RectangleDomain{2.0, 1.0}}, {}, 0.5));
        const SpdMatrix M = assemble_mass(m);
        const Vector c = Vector::Constant(m.node_count(), 3.0);
        CHECK(M.quadratic_form(c) == doctest::Approx(9.0 * 2.0).epsilon(1e-12));
        CHECK(norm_h(M, c) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("hat function H-norm matches quadrature oracle") {
        const Mesh m = refine(build_mesh({RectangleDomain{1.0, 1.0}}, {}, 0.25));
        const SpdMatrix M = assemble_mass(m);
        Vector w = Vector::Zero(m.node_count());
        w[m.interior_nodes()[m.interior_nodes().size() / 2]] = 1.0;
        CHECK(M.quadratic_form(w) == doctest::Approx(brute_force_h_sq(m, w)).epsilon(1e-12));
    }
}

TEST_CASE("stiffness matrix") {
    const Mesh m = refine(build_mesh({RectangleDomain{1.5, 1.0}}, {}, 0.3));
    const SpdMatrix K = assemble_stiffness(m);

    SUBCASE("constants are in the kernel before boundary conditions") {
        const Vector c = Vector::Constant(m.node_count(), 2.5);
        CHECK((K.matrix() * c).norm() < 1e-12);
    }
    SUBCASE("linear field x1 has energy vol") {
        const Vector x1 = interpolate(m, [](Vec2 p) { return p.x; });
        CHECK(K.quadratic_form(x1) == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(seminorm_v(K, x1) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    }
}

TEST_CASE("first Dirichlet eigenvalue of the unit square converges to 2 pi^2") {
    Mesh m = build_mesh({RectangleDomain{1.0, 1.0}}, {}, 0.25);
    double prev_err = 1e9;
    for (int level = 0; level < 3; ++level) {
        const double lam = smallest_dirichlet_eigenvalue(m);
        const double err = std::abs(lam - 2 * kPi * kPi);
        CHECK(err < prev_err);  // mesh-convergent from above
        CHECK(lam > 2 * kPi * kPi);
        prev_err = err;
        if (level < 2) m = refine(m);
    }
    CHECK(prev_err / (2 * kPi * kPi) < 0.01);
}

TEST_CASE("dirichlet system") {
    const Mesh m = refine(build_mesh({RectangleDomain{1.0, 1.0}}, {}, 0.25));
    const SpdMatrix K = assemble_stiffness(m);
    const DirichletSystem sys(K.matrix(), m);

    SUBCASE("g = 0 restricts to interior nodes") {
        CHECK(sys.n_interior() + static_cast<int>(m.boundary_nodes().size()) == m.node_count());
        CHECK(sys.reduced().rows() == sys.n_interior());
    }
    SUBCASE("harmonic g = x1 is reproduced exactly") {
        const Vector g = interpolate(m, [](Vec2 p) { return p.x; });
        const Vector u = sys.solve(Vector::Zero(m.node_count()), g);
        CHECK((u - g).lpNorm<Eigen::Infinity>() < 1e-10);
    }
    SUBCASE("poisson -lap u = 2, u = 0, against the series oracle") {
        Mesh fine = refine(m);
        const SpdMatrix Kf = assemble_stiffness(fine);
        const DirichletSystem sf(Kf.matrix(), fine);
        const Vector load = assemble_load(fine, [](Vec2) { return 2.0; }, quad_deg2());
        const Vector u = sf.solve_zero(load);

        double exact = 0.0;  // separable sine series at the center point
        for (int mm = 1; mm <= 199; mm += 2) {
            for (int nn = 1; nn <= 199; nn += 2) {
                const double sign = ((mm - 1) / 2 + (nn - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
                exact += sign * 32.0 /
                         (mm * nn * kPi * kPi * kPi * kPi * (double(mm) * mm + double(nn) * nn));
            }
        }
        int center = -1;
        for (int i = 0; i < fine.node_count(); ++i)
            if (std::abs(fine.nodes[i].x - 0.5) < 1e-12 && std::abs(fine.nodes[i].y - 0.5) < 1e-12)
                center = i;
        REQUIRE(center >= 0);
        CHECK(u[center] == doctest::Approx(exact).epsilon(2e-3));
    }
    SUBCASE("galerkin orthogonality of the reduced solve") {
        const Vector load = assemble_load(m, [](Vec2 p) { return p.x * p.y; }, quad_deg2());
        const Vector u = sys.solve_zero(load);
        for (int i : sys.interior()) {
            const double r = load[i] - (K.matrix() * u)[i];
            CHECK(std::abs(r) < 1e-10);
        }
    }
}

TEST_CASE("solve_spd") {
    SUBCASE("identity and diagonal") {
        SparseMat I(4, 4), D(4, 4);
        I.setIdentity();
        D.setIdentity();
        D *= 2.0;
        Vector b(4);
        b << 1, 2, 3, 4;
        CHECK((solve_spd(SpdMatrix(I), b) - b).norm() < 1e-14);
        CHECK((solve_spd(SpdMatrix(D), b) - 0.5 * b).norm() < 1e-14);
    }
    SUBCASE("random SPD 5x5 against dense inverse") {
        std::mt19937 rng(7);
        std::normal_distribution<double> dist;
        Eigen::MatrixXd B(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) B(i, j) = dist(rng);
        Eigen::MatrixXd S = B * B.transpose() + 5.0 * Eigen::MatrixXd::Identity(5, 5);
        Vector b(5);
        for (int i = 0; i < 5; ++i) b[i] = dist(rng);
        const Vector x_oracle = S.inverse() * b;
        const Vector x = solve_spd(SpdMatrix(SparseMat(S.sparseView())), b);
        CHECK((x - x_oracle).norm() < 1e-10 * x_oracle.norm());
    }
    SUBCASE("indefinite matrix is reported") {
        SparseMat A(2, 2);
        std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {1, 1, -1.0}};
        A.setFromTriplets(t.begin(), t.end());
        Vector b(2);
        b << 1, 1;
        CHECK_THROWS_AS(solve_spd(SpdMatrix(A), b), std::runtime_error);
    }
}

TEST_CASE("assembly is deterministic for a fixed mesh") {
    const Mesh m = refine(build_mesh({RectangleDomain{1.0, 1.0}}, {}, 0.3));
    const SparseMat A = assemble_mass(m).matrix();
    const SparseMat B = assemble_mass(m).matrix();
    REQUIRE(A.nonZeros() == B.nonZeros());
    for (int k = 0; k < A.nonZeros(); ++k)
        CHECK(A.valuePtr()[k] == B.valuePtr()[k]);
}

TEST_CASE("norm mesh mismatch is an error") {
    const Mesh m = build_mesh({RectangleDomain{1.0, 1.0}}, {}, 0.5);
    const SpdMatrix M = assemble_mass(m);
    CHECK_THROWS_AS(norm_h(M, Vector::Zero(m.node_count() + 1)), std::invalid_argument);
}

TEST_CASE("matrix dump is sorted coordinate text") {
    Mesh m;
    m.nodes = {{0, 0}, {1, 0}, {0, 1}};
    m.triangles = {{{0, 1, 2}}};
    m.on_boundary = {1, 1, 1};
    std::stringstream ss;
    dump_matrix(ss, assemble_mass(m).matrix());
    std::string line;
    int prev_i = -1, prev_j = -1, count = 0;
    while (std::getline(ss, line)) {
        int i, j;
        double v;
        REQUIRE(std::sscanf(line.c_str(), "%d %d %lf", &i, &j, &v) == 3);
        REQUIRE((i > prev_i || (i == prev_i && j > prev_j)));
        prev_i = i;
        prev_j = j;
        CHECK(v == doctest::Approx((i == j ? 2.0 : 1.0) * 0.5 / 12.0).epsilon(1e-14));
        ++count;
    }
    CHECK(count == 9);
}
