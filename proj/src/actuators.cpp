#include "vortctl/actuators.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace vortctl {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Support-edge classification tolerance on the reference square scale;
// absorbs node merge noise, stays far below the element size.
constexpr double kEdgeTol = 1e-6;

Vec2 incenter(Vec2 a, Vec2 b, Vec2 c) {
    const double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
    return (1.0 / (la + lb + lc)) * (la * a + lb * b + lc * c);
}

double inradius(Vec2 a, Vec2 b, Vec2 c) {
    const double s = 0.5 * (norm(c - b) + norm(a - c) + norm(b - a));
    return std::abs(tri_area(a, b, c)) / s;
}

void triangle_cells_rec(Vec2 a, Vec2 b, Vec2 c, int depth,
                        std::vector<std::array<Vec2, 3>>& out) {
    if (depth == 0) {
        out.push_back(std::array<Vec2, 3>{a, b, c});
        return;
    }
    const Vec2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    triangle_cells_rec(a, mab, mca, depth - 1, out);
    triangle_cells_rec(mab, b, mbc, depth - 1, out);
    triangle_cells_rec(mca, mbc, c, depth - 1, out);
    // middle cell: 180-degree rotated similar copy
    triangle_cells_rec(mbc, mca, mab, depth - 1, out);
}

}  // namespace

BumpPair default_bumps() {
    BumpPair b;
    b.phi = [](double, double) { return 1.0; };
    b.phi_tilde = [](double x, double y) {
        return std::sin(kPi * (x + 0.5)) * std::sin(kPi * (y + 0.5));
    };
    return b;
}

ActuatorLayout rectangle_layout(double L1, double L2, double r, int M) {
    if (!(L1 > 0) || !(L2 > 0)) throw std::invalid_argument("rectangle_layout: bad domain");
    if (M < 1) throw std::invalid_argument("rectangle_layout: M must be >= 1");
    const double lmin = std::min(L1, L2);
    if (!(r > 0) || !(r < 0.5 * lmin))
        throw std::invalid_argument("rectangle_layout: r must satisfy 0 < r < min(L1,L2)/2");
    ActuatorLayout layout;
    layout.M = M;
    const double side = r / M;
    for (int b = 0; b < M; ++b) {
        for (int a = 0; a < M; ++a) {
            Actuator act;
            act.center = {(2 * a + 1) * L1 / (2 * M), (2 * b + 1) * L2 / (2 * M)};
            act.scale = side;
            act.support = axis_square(act.center, side);
            layout.actuators.push_back(std::move(act));
        }
    }
    return layout;
}

ActuatorLayout triangle_layout(const TriangleDomain& tri, int M, double support_scale) {
    if (M < 1) throw std::invalid_argument("triangle_layout: M must be >= 1");
    if (!(support_scale > 0))
        throw std::invalid_argument("triangle_layout: support_scale must be positive");
    Vec2 a = tri.v0, b = tri.v1, c = tri.v2;
    if (tri_area(a, b, c) < 0) std::swap(b, c);

    std::vector<std::array<Vec2, 3>> cells;
    triangle_cells_rec(a, b, c, M - 1, cells);

    ActuatorLayout layout;
    layout.M = M;
    for (const auto& cell : cells) {
        Actuator act;
        act.center = incenter(cell[0], cell[1], cell[2]);
        act.scale = support_scale * std::sqrt(2.0) * inradius(cell[0], cell[1], cell[2]);
        act.support = axis_square(act.center, act.scale);
        layout.actuators.push_back(std::move(act));
    }
    return layout;
}

void evaluate_fields(const ActuatorLayout& layout, const Mesh& mesh, const BumpPair& bumps,
                     std::vector<Vector>& v_fields, std::vector<Vector>& vtilde_fields) {
    v_fields.assign(layout.count(), Vector::Zero(mesh.node_count()));
    vtilde_fields.assign(layout.count(), Vector::Zero(mesh.node_count()));
    for (int j = 0; j < layout.count(); ++j) {
        const Actuator& act = layout.actuators[j];
        for (int i = 0; i < mesh.node_count(); ++i) {
            const double rx = (mesh.nodes[i].x - act.center.x) / act.scale;
            const double ry = (mesh.nodes[i].y - act.center.y) / act.scale;
            const double d = std::max(std::abs(rx), std::abs(ry));
            if (d > 0.5 + kEdgeTol) continue;
            if (d < 0.5 - kEdgeTol) {
                v_fields[j][i] = bumps.phi(rx, ry);
                vtilde_fields[j][i] = bumps.phi_tilde(rx, ry);
            } else {
                // midpoint convention for the indicator jump
                v_fields[j][i] = 0.5 * bumps.phi(rx, ry);
            }
        }
    }
}

namespace {

ActuatorFamily assemble_family(ActuatorLayout layout, Mesh mesh, const BumpPair& bumps) {
    for (const Actuator& act : layout.actuators) {
        if (!supports_aligned(mesh, act.support))
            throw std::runtime_error("actuator family: mesh not support-aligned");
    }
    ActuatorFamily fam;
    fam.layout = std::move(layout);
    fam.mesh = std::move(mesh);
    evaluate_fields(fam.layout, fam.mesh, bumps, fam.v_fields, fam.vtilde_fields);
    for (const Vector& vt : fam.vtilde_fields) {
        if (vt.lpNorm<Eigen::Infinity>() == 0.0)
            throw std::runtime_error(
                "actuator family: mesh too coarse to resolve a support (auxiliary field "
                "vanishes at every node)");
    }
    return fam;
}

}  // namespace

ActuatorFamily build_rectangle_family(double L1, double L2, double r, int M,
                                      const BumpPair& bumps, double target_h) {
    ActuatorLayout layout = rectangle_layout(L1, L2, r, M);
    std::vector<Polygon> supports;
    for (const Actuator& a : layout.actuators) supports.push_back(a.support);
    // at least two cells across each support so the auxiliary bumps have
    // interior nodes
    const double h = std::min(target_h, 0.5 * r / M);
    Mesh mesh = build_mesh({RectangleDomain{L1, L2}}, supports, h);
    return assemble_family(std::move(layout), std::move(mesh), bumps);
}

ActuatorFamily build_triangle_family(const TriangleDomain& tri, int M, const BumpPair& bumps,
                                     double support_scale, double target_h) {
    ActuatorLayout layout = triangle_layout(tri, M, support_scale);
    std::vector<Polygon> supports;
    for (const Actuator& a : layout.actuators) supports.push_back(a.support);
    Mesh mesh = build_mesh({tri}, supports, target_h);
    return assemble_family(std::move(layout), std::move(mesh), bumps);
}

ActuatorFamily refit_family(const ActuatorFamily& family, Mesh refined, const BumpPair& bumps) {
    return assemble_family(family.layout, std::move(refined), bumps);
}

Eigen::MatrixXd cross_gram(const ActuatorFamily& family, const SpdMatrix& mass) {
    const int n = family.count();
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j) {
        const Vector mv = mass.matrix() * family.vtilde_fields[j];
        for (int i = 0; i < n; ++i) G(i, j) = family.v_fields[i].dot(mv);
    }
    return G;
}

Vector gram_diag_check(const ActuatorFamily& family, const SpdMatrix& mass) {
    const Eigen::MatrixXd G = cross_gram(family, mass);
    for (int i = 0; i < G.rows(); ++i) {
        for (int j = 0; j < G.cols(); ++j) {
            if (i == j) {
                if (!(G(i, i) > 0.0))
                    throw std::runtime_error("gram_diag_check: nonpositive diagonal entry");
            } else if (G(i, j) != 0.0) {
                throw std::runtime_error(
                    "gram_diag_check: nonzero off-diagonal entry, supports overlap through "
                    "the mesh");
            }
        }
    }
    return G.diagonal();
}

void write_family(std::ostream& os, const ActuatorLayout& layout) {
    char buf[128];
    for (int j = 0; j < layout.count(); ++j) {
        const Actuator& a = layout.actuators[j];
        os << j;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g", a.center.x, a.center.y, a.scale);
        os << buf;
        for (const Vec2& p : a.support.pts) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", p.x, p.y);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace vortctl
