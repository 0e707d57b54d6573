#pragma once

#include <Eigen/Dense>
#include <variant>

namespace hsvm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tolerance on the Minkowski self-product for accepting a point as lying on
// the hyperboloid.
inline constexpr double kManifoldTol = 1e-6;

// A point on the hyperboloid sheet {x : x*x = 1, x0 > 0}, stored in ambient
// coordinates of length d+1.
struct LorentzPoint {
    Vec coords;

    int dim() const { return static_cast<int>(coords.size()) - 1; }
    double time() const { return coords[0]; }
};

// Tangent vector at the origin, stored intrinsically (length d); the ambient
// lift is (0, v).
struct TangentVector {
    Vec coords;
};

// Decision-plane normal in ambient coordinates; valid iff w'Gw >= -tol with
// G = diag(-1, 1, ..., 1).
struct Separator {
    Vec w;
};

struct PoincareCircle {
    Vec center;  // length d
    double radius;
};

struct PoincareLine {
    Vec normal;  // length d, line through the origin
};

using PoincareBoundary = std::variant<PoincareCircle, PoincareLine>;

// Minkowski product x0*y0 - sum_i xi*yi.
double minkowski(const Vec& x, const Vec& y);

// w' G w for G = diag(-1, 1, ..., 1).
double g_quadratic(const Vec& w);

// Applies G = diag(-1, 1, ..., 1).
Vec apply_g(const Vec& v);

bool on_manifold(const Vec& x, double tol = kManifoldTol);

// Builds a LorentzPoint from ambient coordinates, validating the membership
// invariants. With renormalize set, x0 is recomputed as sqrt(1 + |x_1:|^2).
LorentzPoint make_point(const Vec& ambient, bool renormalize = false,
                        double tol = kManifoldTol);

LorentzPoint origin(int d);

// Exponential map at the origin: (cosh|v|, sinh|v| v/|v|).
LorentzPoint exp0(const TangentVector& v);

// Logarithmic map at the origin; inverse of exp0.
TangentVector log0(const LorentzPoint& x);

// Decision rule: +1 iff w * x > 0, -1 otherwise (ties to -1).
int decide(const Separator& w, const LorentzPoint& x);

// Projection onto the open Poincare ball: x_i / (1 + x0).
Vec stereographic(const LorentzPoint& x);

// Poincare image of the geodesic {x : w*x = 0}; d = 2 only, requires
// w*w < 0 strictly.
PoincareBoundary boundary_to_poincare(const Separator& w, double tol = 1e-9);

}  // namespace hsvm
