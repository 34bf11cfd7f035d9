#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace vortctl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Tri {
    std::array<int, 3> v;  // node indices, counterclockwise
};

/// Conforming P1 triangulation of a convex polygon. Immutable once built.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<Tri> triangles;
    std::vector<std::uint8_t> on_boundary;  // per node, 1 if on a boundary edge
    int refine_level = 0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    std::vector<int> boundary_nodes() const;
    std::vector<int> interior_nodes() const;
};

struct RectangleDomain {
    double L1 = 1.0;
    double L2 = 1.0;
};

struct TriangleDomain {
    Vec2 v0, v1, v2;
};

struct DomainSpec {
    std::variant<RectangleDomain, TriangleDomain> shape;
};

/// Closed polygon, counterclockwise vertex order.
struct Polygon {
    std::vector<Vec2> pts;
};

Polygon axis_square(Vec2 center, double side);
bool is_axis_square(const Polygon& p, Vec2* center = nullptr, double* side = nullptr);
double polygon_area(const Polygon& p);

double tri_area(Vec2 a, Vec2 b, Vec2 c);
double domain_area(const DomainSpec& spec);

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Builds a conforming mesh whose edge set contains the boundaries of all
/// given support polygons (each support becomes a union of whole triangles).
///
/// Supported configurations:
///  - rectangle with any number of axis-aligned rectangular supports
///    (tensor-grid construction with the support coordinates inserted);
///  - triangle with no supports (uniform lattice of similar triangles);
///  - triangle with 4^k supports laid out one per cell of the k-fold
///    midpoint subdivision (the actuator-family layout), each support an
///    axis-aligned square strictly inside its cell.
///
/// target_h bounds the element size of the initial mesh; use refine() for
/// the nested hierarchy.
Mesh build_mesh(const DomainSpec& spec, const std::vector<Polygon>& respect_supports,
                double target_h = 0.125);

/// Midpoint (red) refinement: every triangle splits into 4 similar ones.
Mesh refine(const Mesh& m);

struct Location {
    int tri = -1;
    std::array<double, 3> bary{};  // barycentric coordinates, sum to 1
};

/// Finds the triangle containing p. Throws if p is outside the mesh.
Location locate(const Mesh& m, Vec2 p);

// ---------------------------------------------------------------------------
// Validation and IO
// ---------------------------------------------------------------------------

/// Checks positive areas, the edge-manifold property, and boundary tagging.
/// Throws std::runtime_error with a description on the first violation.
void check_mesh(const Mesh& m);

double mesh_area(const Mesh& m);

/// Returns true if every triangle lies entirely inside or outside the
/// polygon (supports must be unions of whole triangles).
bool supports_aligned(const Mesh& m, const Polygon& support);

void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);

}  // namespace vortctl
