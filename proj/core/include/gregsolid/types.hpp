#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gregsolid {

/// Cartesian point / vector in 3-space.
using Vec3 = Eigen::Vector3d;
/// Point in a 2D parameter plane.
using Vec2 = Eigen::Vector2d;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument supplied by the caller (bad name, bad resolution, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Problem with a reference domain or a query against it.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numeric procedure failed to converge or hit a degenerate configuration.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Least-squares fitting failed (rank deficiency, bad conditioning).
class FittingError : public Error {
public:
    using Error::Error;
};

/// Input data violates a structural requirement (mismatched patches, gaps).
class IngestionError : public Error {
public:
    using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Library-wide default solver parameters.
namespace defaults {
inline constexpr double epsilon = 1e-5;  ///< barrier offset in the positivity energy
inline constexpr double rho = 1.0;       ///< consensus penalty weight
inline constexpr double mu = 1e-5;       ///< positivity-energy weight
inline constexpr double nu = 0.1;        ///< sparsity-energy weight
}  // namespace defaults

}  // namespace gregsolid
