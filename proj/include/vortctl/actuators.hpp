#pragma once

#include <functional>
#include <vector>

#include "vortctl/fem.hpp"
#include "vortctl/mesh.hpp"

namespace vortctl {

/// Reference bump pair on O = (-1/2, 1/2)^2: the actuator vorticity phi > 0
/// on O and the smoother auxiliary phi_tilde vanishing on the boundary of O.
struct BumpPair {
    std::function<double(double, double)> phi;
    std::function<double(double, double)> phi_tilde;
};

/// phi = 1 and phi_tilde = sin(pi(x+1/2)) sin(pi(y+1/2)).
BumpPair default_bumps();

struct Actuator {
    Vec2 center;
    double scale = 0.0;  // side length of the square support
    Polygon support;
};

struct ActuatorLayout {
    int M = 1;
    std::vector<Actuator> actuators;
    int count() const { return static_cast<int>(actuators.size()); }
};

/// M^2 actuators at centers ((2a+1)L1/2M, (2b+1)L2/2M), support side r/M.
/// Requires 0 < r < min(L1, L2)/2.
ActuatorLayout rectangle_layout(double L1, double L2, double r, int M);

/// 4^{M-1} actuators, one per cell of the (M-1)-fold midpoint subdivision,
/// each the image of the M = 1 configuration under the cell's similarity
/// map (the middle cell is rotated by 180 degrees). The M = 1 square sits
/// at the incenter with side = support_scale * sqrt(2) * inradius.
ActuatorLayout triangle_layout(const TriangleDomain& tri, int M, double support_scale);

/// Actuator family: layout plus nodal P1 interpolants of the vorticities
/// phi_j (value 1 inside, 1/2 on the support boundary, 0 outside, times the
/// reference bump) and of the auxiliaries phi_tilde_j on a support-aligned
/// mesh. Immutable after construction.
struct ActuatorFamily {
    ActuatorLayout layout;
    Mesh mesh;
    std::vector<Vector> v_fields;
    std::vector<Vector> vtilde_fields;
    int count() const { return layout.count(); }
};

ActuatorFamily build_rectangle_family(double L1, double L2, double r, int M,
                                      const BumpPair& bumps, double target_h = 0.125);

ActuatorFamily build_triangle_family(const TriangleDomain& tri, int M, const BumpPair& bumps,
                                     double support_scale, double target_h = 0.2);

/// Same layout with fields re-evaluated on a refinement of family.mesh.
ActuatorFamily refit_family(const ActuatorFamily& family, Mesh refined, const BumpPair& bumps);

/// Nodal interpolants of one layout on an aligned mesh (used by the
/// builders and by refit).
void evaluate_fields(const ActuatorLayout& layout, const Mesh& mesh, const BumpPair& bumps,
                     std::vector<Vector>& v_fields, std::vector<Vector>& vtilde_fields);

/// Cross-Gram matrix [(phi_i, phi_tilde_j)_H].
Eigen::MatrixXd cross_gram(const ActuatorFamily& family, const SpdMatrix& mass);

/// Returns the diagonal of the cross Gram; throws if any off-diagonal entry
/// is nonzero (disjoint supports make them exactly zero) or a diagonal
/// entry is not strictly positive. A violation signals a mesh alignment bug.
Vector gram_diag_check(const ActuatorFamily& family, const SpdMatrix& mass);

/// Family dump: CSV "j,cx,cy,scale,x0,y0,x1,y1,..." one row per actuator.
void write_family(std::ostream& os, const ActuatorLayout& layout);

}  // namespace vortctl
