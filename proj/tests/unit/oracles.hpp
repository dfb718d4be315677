#pragma once

#include <cmath>

namespace oracle {

// Smooth bump exp(-1/(1 - r^2)) on |r| < 1, extended evenly.
inline double bump(double r) {
    const double s = r * r;
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
}

inline double bump_prime(double r) {
    const double s = r * r;
    if (s >= 1.0) return 0.0;
    return bump(r) * (-2.0 * r / ((1.0 - s) * (1.0 - s)));
}

// 3D massless linear wave with u(0) = g(r), u_t(0) = 0 (g even):
// r u = [(r+t) g(r+t) + (r-t) g(r-t)] / 2, and at the origin u = g(t) + t g'(t).
inline double dalembert3d(double t, double r) {
    if (r == 0.0) return bump(t) + t * bump_prime(t);
    return ((r + t) * bump(r + t) + (r - t) * bump(std::abs(r - t))) / (2.0 * r);
}

}  // namespace oracle
