#include "vortctl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace vortctl {

namespace {

constexpr double kMergeTol = 1e-9;   // relative to domain diameter
constexpr double kGeomTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;

struct RawMesh {
    std::vector<Vec2> nodes;
    std::vector<Tri> tris;
};

int add_node(RawMesh& rm, Vec2 p) {
    rm.nodes.push_back(p);
    return static_cast<int>(rm.nodes.size()) - 1;
}

// Merges coincident nodes, orients triangles counterclockwise, renumbers
// nodes lexicographically by (x2, x1), and recomputes boundary tags from
// edge incidence.
Mesh finalize(RawMesh rm, int refine_level, double diam) {
    const double tol = kMergeTol * diam;
    const int n_raw = static_cast<int>(rm.nodes.size());

    // Merge coincident nodes by quantized hashing with neighbor-cell
    // probing. Genuine duplicates sit within kMergeTol while distinct
    // nodes are separated by element scale.
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    auto cell_key = [&](long long cx, long long cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    };
    std::vector<int> remap(n_raw, -1);
    std::vector<Vec2> merged;
    for (int idx = 0; idx < n_raw; ++idx) {
        const Vec2 p = rm.nodes[idx];
        const long long cx = static_cast<long long>(std::floor(p.x / tol));
        const long long cy = static_cast<long long>(std::floor(p.y / tol));
        int found = -1;
        for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
            for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
                auto it = cells.find(cell_key(cx + dx, cy + dy));
                if (it == cells.end()) continue;
                for (int cand : it->second) {
                    if (std::abs(merged[cand].x - p.x) <= tol &&
                        std::abs(merged[cand].y - p.y) <= tol) {
                        found = cand;
                        break;
                    }
                }
            }
        }
        if (found < 0) {
            merged.push_back(p);
            found = static_cast<int>(merged.size()) - 1;
            cells[cell_key(cx, cy)].push_back(found);
        }
        remap[idx] = found;
    }

    // Deterministic final numbering by (x2, x1).
    const int n = static_cast<int>(merged.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
        if (merged[a].y != merged[b].y) return merged[a].y < merged[b].y;
        if (merged[a].x != merged[b].x) return merged[a].x < merged[b].x;
        return a < b;
    });
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[perm[i]] = i;

    Mesh m;
    m.refine_level = refine_level;
    m.nodes.resize(n);
    for (int i = 0; i < n; ++i) m.nodes[rank[i]] = merged[i];

    m.triangles.reserve(rm.tris.size());
    for (const Tri& t : rm.tris) {
        Tri nt{{rank[remap[t.v[0]]], rank[remap[t.v[1]]], rank[remap[t.v[2]]]}};
        const double a = tri_area(m.nodes[nt.v[0]], m.nodes[nt.v[1]], m.nodes[nt.v[2]]);
        if (a < 0) std::swap(nt.v[1], nt.v[2]);
        m.triangles.push_back(nt);
    }

    // Boundary nodes are exactly the endpoints of edges with one incident
    // triangle.
    std::map<std::pair<int, int>, int> edge_count;
    for (const Tri& t : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t.v[e], b = t.v[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    m.on_boundary.assign(n, 0);
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
            m.on_boundary[edge.first] = 1;
            m.on_boundary[edge.second] = 1;
        }
    }

    check_mesh(m);
    return m;
}

// Sorted coordinate line set for the tensor-grid rectangle mesh.
std::vector<double> coordinate_lines(double lo, double hi, const std::vector<double>& required,
                                     double target_h) {
    std::vector<double> lines{lo, hi};
    lines.insert(lines.end(), required.begin(), required.end());
    std::sort(lines.begin(), lines.end());
    const double tol = kGeomTol * (hi - lo);
    lines.erase(std::unique(lines.begin(), lines.end(),
                            [&](double a, double b) { return std::abs(a - b) <= tol; }),
                lines.end());
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
        out.push_back(lines[i]);
        const double gap = lines[i + 1] - lines[i];
        const int extra = static_cast<int>(std::ceil(gap / target_h)) - 1;
        for (int k = 1; k <= extra; ++k)
            out.push_back(lines[i] + gap * k / (extra + 1));
    }
    out.push_back(lines.back());
    return out;
}

Mesh build_rectangle(const RectangleDomain& rect, const std::vector<Polygon>& supports,
                     double target_h) {
    if (!(rect.L1 > 0.0) || !(rect.L2 > 0.0))
        throw std::invalid_argument("build_mesh: rectangle side lengths must be positive");
    const double tol = kGeomTol * std::max(rect.L1, rect.L2);

    std::vector<double> xs, ys;
    for (const Polygon& p : supports) {
        double xmin = p.pts[0].x, xmax = xmin, ymin = p.pts[0].y, ymax = ymin;
        for (const Vec2& q : p.pts) {
            xmin = std::min(xmin, q.x);
            xmax = std::max(xmax, q.x);
            ymin = std::min(ymin, q.y);
            ymax = std::max(ymax, q.y);
        }
        // Tensor construction requires axis-aligned rectangular supports.
        if (p.pts.size() != 4 || !is_axis_square(p, nullptr, nullptr)) {
            bool rect4 = p.pts.size() == 4;
            for (const Vec2& q : p.pts)
                rect4 = rect4 && (std::abs(q.x - xmin) <= tol || std::abs(q.x - xmax) <= tol) &&
                        (std::abs(q.y - ymin) <= tol || std::abs(q.y - ymax) <= tol);
            if (!rect4)
                throw std::invalid_argument(
                    "build_mesh: only axis-aligned rectangular supports are handled in a "
                    "rectangular domain");
        }
        if (xmin <= tol || ymin <= tol || xmax >= rect.L1 - tol || ymax >= rect.L2 - tol)
            throw std::invalid_argument("build_mesh: support polygon not strictly inside domain");
        xs.push_back(xmin);
        xs.push_back(xmax);
        ys.push_back(ymin);
        ys.push_back(ymax);
    }

    const std::vector<double> X = coordinate_lines(0.0, rect.L1, xs, target_h);
    const std::vector<double> Y = coordinate_lines(0.0, rect.L2, ys, target_h);
    const int nx = static_cast<int>(X.size());
    const int ny = static_cast<int>(Y.size());

    RawMesh rm;
    rm.nodes.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) rm.nodes.push_back({X[i], Y[j]});
    auto vid = [&](int i, int j) { return j * nx + i; };
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            rm.tris.push_back({{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}});
            rm.tris.push_back({{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}});
        }
    }
    return finalize(std::move(rm), 0, std::hypot(rect.L1, rect.L2));
}

std::array<double, 3> barycentric(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    const double A = tri_area(a, b, c);
    return {tri_area(p, b, c) / A, tri_area(a, p, c) / A, tri_area(a, b, p) / A};
}

bool strictly_inside_tri(Vec2 a, Vec2 b, Vec2 c, Vec2 p, double rel_tol) {
    const auto l = barycentric(a, b, c, p);
    return l[0] > rel_tol && l[1] > rel_tol && l[2] > rel_tol;
}

// Uniform lattice of n^2 similar triangles.
void lattice_triangle(RawMesh& rm, Vec2 a, Vec2 b, Vec2 c, double target_h) {
    const double side = std::max({norm(b - a), norm(c - b), norm(a - c)});
    const int n = std::max(2, static_cast<int>(std::ceil(side / target_h)));
    std::vector<std::vector<int>> id(n + 1);
    for (int j = 0; j <= n; ++j) {
        id[j].resize(n - j + 1);
        for (int i = 0; i + j <= n; ++i) {
            const Vec2 p = a + (double(i) / n) * (b - a) + (double(j) / n) * (c - a);
            id[j][i] = add_node(rm, p);
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + j < n; ++i) {
            rm.tris.push_back({{id[j][i], id[j][i + 1], id[j + 1][i]}});
            if (i + j < n - 1)
                rm.tris.push_back({{id[j][i + 1], id[j + 1][i + 1], id[j + 1][i]}});
        }
    }
}

// Triangle with one interior axis-aligned square: structured grid on the
// square, one ring of triangles between the square boundary and the
// uniformly subdivided triangle boundary, zipped by angle around the
// square center. Both loops are convex and nested, so the angular merge
// yields a valid triangulation.
void ring_triangle(RawMesh& rm, Vec2 a, Vec2 b, Vec2 c, Vec2 sq_center, double sq_side,
                   double target_h) {
    const double side = std::max({norm(b - a), norm(c - b), norm(a - c)});
    const int n_bnd = std::max(6, static_cast<int>(std::ceil(side / target_h)));
    const int k_sq = std::max(3, static_cast<int>(std::ceil(sq_side / (0.5 * target_h))));

    // Outer loop, counterclockwise, n_bnd segments per side.
    std::vector<int> outer;
    auto emit_side = [&](Vec2 p, Vec2 q) {
        for (int i = 0; i < n_bnd; ++i)
            outer.push_back(add_node(rm, p + (double(i) / n_bnd) * (q - p)));
    };
    emit_side(a, b);
    emit_side(b, c);
    emit_side(c, a);

    // Square grid nodes; its boundary forms the inner loop.
    const double h0 = sq_side / k_sq;
    const Vec2 corner = sq_center - Vec2{sq_side / 2, sq_side / 2};
    std::vector<std::vector<int>> gid(k_sq + 1, std::vector<int>(k_sq + 1));
    for (int j = 0; j <= k_sq; ++j)
        for (int i = 0; i <= k_sq; ++i)
            gid[j][i] = add_node(rm, corner + Vec2{i * h0, j * h0});
    for (int j = 0; j < k_sq; ++j) {
        for (int i = 0; i < k_sq; ++i) {
            rm.tris.push_back({{gid[j][i], gid[j][i + 1], gid[j + 1][i + 1]}});
            rm.tris.push_back({{gid[j][i], gid[j + 1][i + 1], gid[j + 1][i]}});
        }
    }
    std::vector<int> inner;
    for (int i = 0; i < k_sq; ++i) inner.push_back(gid[0][i]);
    for (int j = 0; j < k_sq; ++j) inner.push_back(gid[j][k_sq]);
    for (int i = k_sq; i > 0; --i) inner.push_back(gid[k_sq][i]);
    for (int j = k_sq; j > 0; --j) inner.push_back(gid[j][0]);

    // Unwrapped angles around the square center, each loop rotated to
    // start at its smallest angle.
    auto angles_of = [&](std::vector<int>& loop) {
        std::vector<double> th(loop.size());
        std::size_t start = 0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec2 d = rm.nodes[loop[i]] - sq_center;
            th[i] = std::atan2(d.y, d.x);
            if (th[i] < th[start]) start = i;
        }
        std::rotate(loop.begin(), loop.begin() + start, loop.end());
        std::rotate(th.begin(), th.begin() + start, th.end());
        for (std::size_t i = 1; i < th.size(); ++i)
            while (th[i] < th[i - 1]) th[i] += 2 * kPi;
        return th;
    };
    std::vector<double> th_out = angles_of(outer);
    std::vector<double> th_in = angles_of(inner);

    const int no = static_cast<int>(outer.size());
    const int ni = static_cast<int>(inner.size());
    auto next_angle = [](const std::vector<double>& th, int i) {
        const int n = static_cast<int>(th.size());
        return i + 1 < n ? th[i + 1] : th[0] + 2 * kPi;
    };
    int io = 0, ij = 0;
    const double area_tol = 1e-14 * side * side;
    auto outer_ok = [&] {
        return tri_area(rm.nodes[outer[io]], rm.nodes[outer[(io + 1) % no]],
                        rm.nodes[inner[ij % ni]]) > area_tol;
    };
    auto inner_ok = [&] {
        return tri_area(rm.nodes[inner[(ij + 1) % ni]], rm.nodes[inner[ij]],
                        rm.nodes[outer[io % no]]) > area_tol;
    };
    while (io < no || ij < ni) {
        // angular preference, overridden when the candidate triangle would
        // fold (coarse outer loop lagging across an inner corner)
        bool take_outer = ij >= ni || (io < no && next_angle(th_out, io) <= next_angle(th_in, ij));
        if (take_outer && ij < ni && !outer_ok()) take_outer = false;
        if (!take_outer && io < no && !inner_ok()) take_outer = true;
        if (take_outer) {
            if (io >= no || !outer_ok())
                throw std::runtime_error("ring_triangle: zip failed, support too close to the boundary");
            rm.tris.push_back({{outer[io], outer[(io + 1) % no], inner[ij % ni]}});
            ++io;
        } else {
            rm.tris.push_back({{inner[(ij + 1) % ni], inner[ij], outer[io % no]}});
            ++ij;
        }
    }
}

void mesh_triangle_rec(RawMesh& rm, Vec2 a, Vec2 b, Vec2 c,
                       const std::vector<Polygon>& supports, double target_h) {
    if (supports.empty()) {
        lattice_triangle(rm, a, b, c, target_h);
        return;
    }
    if (supports.size() == 1) {
        Vec2 center;
        double side = 0.0;
        if (!is_axis_square(supports[0], &center, &side))
            throw std::invalid_argument(
                "build_mesh: triangular-domain supports must be axis-aligned squares");
        for (const Vec2& q : supports[0].pts)
            if (!strictly_inside_tri(a, b, c, q, 1e-9))
                throw std::invalid_argument(
                    "build_mesh: support polygon not strictly inside domain");
        ring_triangle(rm, a, b, c, center, side, target_h);
        return;
    }
    if (supports.size() % 4 != 0)
        throw std::invalid_argument(
            "build_mesh: triangular-domain support count must be a power of 4");

    // Distribute over the four cells of the midpoint subdivision; the
    // middle cell is the 180-degree rotated copy.
    const Vec2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    const std::array<std::array<Vec2, 3>, 4> child{{
        {{a, mab, mca}},
        {{mab, b, mbc}},
        {{mca, mbc, c}},
        {{mbc, mca, mab}},
    }};
    std::array<std::vector<Polygon>, 4> parts;
    for (const Polygon& p : supports) {
        Vec2 centroid{0, 0};
        for (const Vec2& q : p.pts) centroid = centroid + (1.0 / p.pts.size()) * q;
        bool placed = false;
        for (int k = 0; k < 4 && !placed; ++k) {
            if (strictly_inside_tri(child[k][0], child[k][1], child[k][2], centroid, 1e-12)) {
                parts[k].push_back(p);
                placed = true;
            }
        }
        if (!placed)
            throw std::invalid_argument("build_mesh: support does not fit the cell layout");
    }
    for (int k = 0; k < 4; ++k) {
        if (parts[k].size() != supports.size() / 4)
            throw std::invalid_argument(
                "build_mesh: supports are not one-per-cell of the midpoint subdivision");
        mesh_triangle_rec(rm, child[k][0], child[k][1], child[k][2], parts[k], target_h);
    }
}

Mesh build_triangle(const TriangleDomain& tri, const std::vector<Polygon>& supports,
                    double target_h) {
    double A = tri_area(tri.v0, tri.v1, tri.v2);
    Vec2 a = tri.v0, b = tri.v1, c = tri.v2;
    if (A < 0) {
        std::swap(b, c);
        A = -A;
    }
    const double diam = std::max({norm(b - a), norm(c - b), norm(a - c)});
    if (A <= kGeomTol * diam * diam)
        throw std::invalid_argument("build_mesh: degenerate triangle domain");
    RawMesh rm;
    mesh_triangle_rec(rm, a, b, c, supports, target_h);
    return finalize(std::move(rm), 0, diam);
}

}  // namespace

std::vector<int> Mesh::boundary_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i)
        if (on_boundary[i]) out.push_back(i);
    return out;
}

std::vector<int> Mesh::interior_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i)
        if (!on_boundary[i]) out.push_back(i);
    return out;
}

double tri_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

double domain_area(const DomainSpec& spec) {
    if (const auto* r = std::get_if<RectangleDomain>(&spec.shape)) return r->L1 * r->L2;
    const auto& t = std::get<TriangleDomain>(spec.shape);
    return std::abs(tri_area(t.v0, t.v1, t.v2));
}

Polygon axis_square(Vec2 center, double side) {
    const double h = side / 2;
    return Polygon{{{center.x - h, center.y - h},
                    {center.x + h, center.y - h},
                    {center.x + h, center.y + h},
                    {center.x - h, center.y + h}}};
}

bool is_axis_square(const Polygon& p, Vec2* center, double* side) {
    if (p.pts.size() != 4) return false;
    double xmin = p.pts[0].x, xmax = xmin, ymin = p.pts[0].y, ymax = ymin;
    for (const Vec2& q : p.pts) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    const double sx = xmax - xmin, sy = ymax - ymin;
    const double tol = kGeomTol * std::max(sx, sy) + 1e-300;
    if (std::abs(sx - sy) > 1e-9 * std::max(sx, sy)) return false;
    for (const Vec2& q : p.pts) {
        const bool on_x = std::abs(q.x - xmin) <= tol || std::abs(q.x - xmax) <= tol;
        const bool on_y = std::abs(q.y - ymin) <= tol || std::abs(q.y - ymax) <= tol;
        if (!(on_x && on_y)) return false;
    }
    if (center) *center = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
    if (side) *side = sx;
    return true;
}

double polygon_area(const Polygon& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.pts.size(); ++i) {
        const Vec2 a = p.pts[i], b = p.pts[(i + 1) % p.pts.size()];
        s += cross(a, b);
    }
    return 0.5 * s;
}

Mesh build_mesh(const DomainSpec& spec, const std::vector<Polygon>& respect_supports,
                double target_h) {
    if (!(target_h > 0.0)) throw std::invalid_argument("build_mesh: target_h must be positive");
    Mesh m;
    if (const auto* r = std::get_if<RectangleDomain>(&spec.shape))
        m = build_rectangle(*r, respect_supports, target_h);
    else
        m = build_triangle(std::get<TriangleDomain>(spec.shape), respect_supports, target_h);
    for (const Polygon& p : respect_supports) {
        if (!supports_aligned(m, p))
            throw std::runtime_error("build_mesh: produced mesh does not align with a support");
    }
    const double area = domain_area(spec);
    if (std::abs(mesh_area(m) - area) > 1e-12 * area)
        throw std::runtime_error("build_mesh: triangles do not tile the domain");
    return m;
}

Mesh refine(const Mesh& m) {
    RawMesh rm;
    rm.nodes = m.nodes;
    std::unordered_map<std::uint64_t, int> midpoint;
    auto mid_id = [&](int a, int b) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = add_node(rm, 0.5 * (m.nodes[a] + m.nodes[b]));
        midpoint.emplace(key, id);
        return id;
    };
    for (const Tri& t : m.triangles) {
        const int a = t.v[0], b = t.v[1], c = t.v[2];
        const int ab = mid_id(a, b), bc = mid_id(b, c), ca = mid_id(c, a);
        rm.tris.push_back({{a, ab, ca}});
        rm.tris.push_back({{ab, b, bc}});
        rm.tris.push_back({{ca, bc, c}});
        rm.tris.push_back({{ab, bc, ca}});
    }
    double xmin = m.nodes[0].x, xmax = xmin, ymin = m.nodes[0].y, ymax = ymin;
    for (const Vec2& p : m.nodes) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return finalize(std::move(rm), m.refine_level + 1, std::hypot(xmax - xmin, ymax - ymin));
}

Location locate(const Mesh& m, Vec2 p) {
    const double tol = 1e-12;
    for (int t = 0; t < m.triangle_count(); ++t) {
        const Tri& tr = m.triangles[t];
        auto l = barycentric(m.nodes[tr.v[0]], m.nodes[tr.v[1]], m.nodes[tr.v[2]], p);
        if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) {
            for (double& li : l) li = std::clamp(li, 0.0, 1.0);
            const double s = l[0] + l[1] + l[2];
            for (double& li : l) li /= s;
            return {t, l};
        }
    }
    throw std::invalid_argument("locate: point outside the mesh");
}

void check_mesh(const Mesh& m) {
    if (m.on_boundary.size() != m.nodes.size())
        throw std::runtime_error("check_mesh: boundary tag size mismatch");
    std::map<std::pair<int, int>, int> edge_count;
    for (const Tri& t : m.triangles) {
        if (tri_area(m.nodes[t.v[0]], m.nodes[t.v[1]], m.nodes[t.v[2]]) <= 0.0)
            throw std::runtime_error("check_mesh: non-positive triangle area");
        for (int e = 0; e < 3; ++e) {
            int a = t.v[e], b = t.v[(e + 1) % 3];
            if (a == b) throw std::runtime_error("check_mesh: degenerate triangle");
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    std::vector<std::uint8_t> tag(m.nodes.size(), 0);
    for (const auto& [edge, count] : edge_count) {
        if (count > 2) throw std::runtime_error("check_mesh: edge shared by more than 2 triangles");
        if (count == 1) tag[edge.first] = tag[edge.second] = 1;
    }
    for (std::size_t i = 0; i < tag.size(); ++i)
        if (tag[i] != m.on_boundary[i])
            throw std::runtime_error("check_mesh: boundary tagging inconsistent");
}

double mesh_area(const Mesh& m) {
    double s = 0.0;
    for (const Tri& t : m.triangles)
        s += tri_area(m.nodes[t.v[0]], m.nodes[t.v[1]], m.nodes[t.v[2]]);
    return s;
}

bool supports_aligned(const Mesh& m, const Polygon& support) {
    // Convex-polygon point classification: +1 inside, 0 on boundary, -1 outside.
    const auto classify = [&](Vec2 p) {
        double scale = 0.0;
        for (const Vec2& q : support.pts) scale = std::max(scale, std::abs(q.x) + std::abs(q.y));
        const double tol = 1e-9 * std::max(scale, 1.0);
        int side = 1;
        for (std::size_t i = 0; i < support.pts.size(); ++i) {
            const Vec2 a = support.pts[i], b = support.pts[(i + 1) % support.pts.size()];
            const double c = cross(b - a, p - a);
            if (c < -tol) return -1;
            if (c <= tol) side = 0;
        }
        return side;
    };
    for (const Tri& t : m.triangles) {
        const Vec2 centroid =
            (1.0 / 3) * (m.nodes[t.v[0]] + m.nodes[t.v[1]] + m.nodes[t.v[2]]);
        const int want = classify(centroid) >= 0 ? 1 : -1;
        for (int k = 0; k < 3; ++k) {
            const int c = classify(m.nodes[t.v[k]]);
            if (c != 0 && c != want) return false;
        }
    }
    return true;
}

void write_mesh(std::ostream& os, const Mesh& m) {
    char buf[128];
    os << "nodes " << m.node_count() << " triangles " << m.triangle_count() << " level "
       << m.refine_level << "\n";
    for (int i = 0; i < m.node_count(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", m.nodes[i].x, m.nodes[i].y,
                      static_cast<int>(m.on_boundary[i]));
        os << buf;
    }
    for (const Tri& t : m.triangles) os << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
}

Mesh read_mesh(std::istream& is) {
    std::string kw;
    int n = 0, t = 0, level = 0;
    is >> kw >> n;
    if (kw != "nodes") throw std::runtime_error("read_mesh: bad header");
    is >> kw >> t;
    if (kw != "triangles") throw std::runtime_error("read_mesh: bad header");
    is >> kw >> level;
    if (kw != "level") throw std::runtime_error("read_mesh: bad header");
    Mesh m;
    m.refine_level = level;
    m.nodes.resize(n);
    m.on_boundary.resize(n);
    for (int i = 0; i < n; ++i) {
        int b = 0;
        is >> m.nodes[i].x >> m.nodes[i].y >> b;
        m.on_boundary[i] = static_cast<std::uint8_t>(b);
    }
    m.triangles.resize(t);
    for (int i = 0; i < t; ++i) is >> m.triangles[i].v[0] >> m.triangles[i].v[1] >> m.triangles[i].v[2];
    if (!is) throw std::runtime_error("read_mesh: truncated file");
    check_mesh(m);
    return m;
}

}  // namespace vortctl
