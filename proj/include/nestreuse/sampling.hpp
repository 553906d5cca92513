#pragma once

#include "nestreuse/geometry.hpp"
#include "nestreuse/random.hpp"

#include <span>

namespace nestreuse {

/// Draws one point uniformly (Lebesgue) from `set` by direct transformation.
///
/// Radial families consume the radial uniform first and the direction second,
/// so an l2 ball and an l2 donut of the same dimension driven by identical
/// streams share radial variates and directions:
///  - l2 / l1 ball: R * U^(1/d) times a direction on the unit sphere of the norm
///    (normalised normals for l2, a signed Dirichlet(1, ..., 1) point for l1);
///  - donut: (r0^d + U (r^d - r0^d))^(1/d) times the same kind of direction
///    (l-inf donuts use a uniform point on the cube surface);
///  - l-inf ball and box: independent per-axis uniforms;
///  - union: component with probability proportional to its volume, then a box draw.
Point sample_uniform(const UncertaintySet& set, RandomStream& rng);

/// Maps a point of `set` to [0, 1] such that a uniform point of `set` maps to U(0, 1).
///
/// Balls: (|q - c| / r)^d in the set's norm. Donuts: (|q - c|^d - r0^d) / (r^d - r0^d).
/// Boxes: (max_k |q_k - c_k| / h_k)^d. Unions: the component's cumulative volume
/// share plus its own volume share times the box coordinate.
double uniformity_coordinate(const UncertaintySet& set, std::span<const double> point);

}  // namespace nestreuse
