#pragma once

#include <doctest.h>

#include <functional>
#include <random>

#include "gregsolid/types.hpp"

namespace gregsolid::testing {

/// Deterministic RNG for reproducible property tests.
inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed1234u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng());
}

inline Vec3 random_vec3(double lo, double hi) {
    return Vec3(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
}

/// Central finite difference of a scalar-to-vector function.
inline Vec3 central_diff(const std::function<Vec3(double)>& f, double t, double h = 1e-6) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline void check_close(const Vec3& a, const Vec3& b, double tol) {
    CHECK((a - b).norm() <= tol);
}

inline void check_close_rel(const Vec3& a, const Vec3& b, double rel_tol,
                            double abs_floor = 1e-12) {
    const double scale = std::max(1.0, std::max(a.norm(), b.norm()));
    CHECK((a - b).norm() <= std::max(abs_floor, rel_tol * scale));
}

}  // namespace gregsolid::testing
