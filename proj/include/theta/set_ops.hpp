#pragma once

#include <span>

#include "theta/sketch.hpp"

namespace theta {

// Combining rules over sketches built with one shared hash seed. Inputs may
// mix TCF kinds and k. Results keep identifiers only if every input does.
// All throw Error{SeedMismatch} on differing seeds and Error{EmptyInput} on
// an empty list.

/// theta = min theta_j; entries = union of inputs below that theta.
[[nodiscard]] ThetaSketch theta_union(std::span<const ThetaSketch> sketches);

/// theta = min theta_j; entries present in every input and below that theta.
[[nodiscard]] ThetaSketch theta_intersect(std::span<const ThetaSketch> sketches);

/// theta = min(theta_a, theta_b); entries of a absent from b, below theta.
[[nodiscard]] ThetaSketch theta_a_not_b(const ThetaSketch& a, const ThetaSketch& b);

}  // namespace theta
