#pragma once

#include <cmath>
#include <numbers>

namespace gem {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Named tolerances shared across modules.
namespace tol {
/// Algebraic identities on exact-arithmetic-friendly inputs.
inline constexpr double kAlgebraic = 1e-12;
/// Composed geometric pipelines (frames, transport, gauge laws).
inline constexpr double kGeometric = 1e-10;
/// Ambient-motion invariance of angle tables.
inline constexpr double kAmbient = 1e-9;
/// Projection of an edge onto the tangent plane, relative to edge length.
inline constexpr double kDegenerateEdge = 1e-12;
/// Normals closer than this to antiparallel have no transport axis.
inline constexpr double kAntiparallel = 1e-9;
/// Orthogonality and determinant check for rigid rotations.
inline constexpr double kRotation = 1e-10;
/// Singular-value cutoff (relative) for numeric null spaces.
inline constexpr double kNullSpace = 1e-10;
/// Positional tolerance for isometry discovery.
inline constexpr double kIsometryMatch = 1e-6;
}  // namespace tol

/// Maps any finite angle into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Shortest distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > kPi ? kTwoPi - d : d;
}

}  // namespace gem
