#include "hsvm/manifold.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hsvm {

double minkowski(const Vec& x, const Vec& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("minkowski: dimension mismatch");
    }
    return x[0] * y[0] - x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

double g_quadratic(const Vec& w) {
    return -w[0] * w[0] + w.tail(w.size() - 1).squaredNorm();
}

Vec apply_g(const Vec& v) {
    Vec out = v;
    out[0] = -out[0];
    return out;
}

bool on_manifold(const Vec& x, double tol) {
    if (x.size() < 2 || !x.allFinite()) return false;
    return std::abs(minkowski(x, x) - 1.0) <= tol && x[0] > 0.0;
}

LorentzPoint make_point(const Vec& ambient, bool renormalize, double tol) {
    if (ambient.size() < 2 || !ambient.allFinite()) {
        throw std::domain_error("make_point: need finite ambient vector of length >= 2");
    }
    Vec x = ambient;
    if (renormalize) {
        x[0] = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
    }
    if (!on_manifold(x, tol)) {
        throw std::domain_error("make_point: point violates hyperboloid membership");
    }
    return LorentzPoint{std::move(x)};
}

LorentzPoint origin(int d) {
    Vec x = Vec::Zero(d + 1);
    x[0] = 1.0;
    return LorentzPoint{std::move(x)};
}

LorentzPoint exp0(const TangentVector& v) {
    if (!v.coords.allFinite()) {
        throw std::domain_error("exp0: non-finite tangent vector");
    }
    const double r = v.coords.norm();
    Vec x(v.coords.size() + 1);
    x[0] = std::cosh(r);
    if (r < 1e-8) {
        // sinh(r)/r -> 1; series guard against 0/0
        x.tail(v.coords.size()) = v.coords;
    } else {
        x.tail(v.coords.size()) = (std::sinh(r) / r) * v.coords;
    }
    return LorentzPoint{std::move(x)};
}

TangentVector log0(const LorentzPoint& x) {
    const double x0 = x.coords[0];
    if (x0 < 1.0 - 1e-9) {
        throw std::domain_error("log0: x0 < 1, point not on upper sheet");
    }
    const Vec spatial = x.coords.tail(x.coords.size() - 1);
    const double sn = spatial.norm();
    if (sn < 1e-12) {
        return TangentVector{Vec::Zero(spatial.size())};
    }
    const double r = std::acosh(std::max(x0, 1.0));
    return TangentVector{(r / sn) * spatial};
}

int decide(const Separator& w, const LorentzPoint& x) {
    return minkowski(w.w, x.coords) > 0.0 ? 1 : -1;
}

Vec stereographic(const LorentzPoint& x) {
    return x.coords.tail(x.coords.size() - 1) / (1.0 + x.coords[0]);
}

PoincareBoundary boundary_to_poincare(const Separator& w, double tol) {
    if (w.w.size() != 3) {
        throw std::invalid_argument("boundary_to_poincare: d = 2 required");
    }
    if (minkowski(w.w, w.w) >= 0.0) {
        throw std::invalid_argument(
            "boundary_to_poincare: w*w >= 0, plane does not intersect the manifold");
    }
    const double w0 = w.w[0];
    Vec spatial = w.w.tail(2);
    if (std::abs(w0) <= tol) {
        return PoincareLine{spatial};
    }
    Vec center = spatial / w0;
    const double r2 = spatial.squaredNorm() / (w0 * w0) - 1.0;
    return PoincareCircle{center, std::sqrt(r2)};
}

}  // namespace hsvm
