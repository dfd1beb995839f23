#pragma once

#include "upsilon/calculus.hpp"
#include "upsilon/configuration.hpp"
#include "upsilon/random.hpp"

namespace upsilon {

/// n points i.i.d. uniform on the ball of radius `extent` around the model origin
/// (the whole sphere when extent exceeds its diameter).
Configuration random_configuration(const SpaceForm& space, std::size_t n, double extent,
                                   RandomStream& rng);

/// Random bump with center in the same ball, radius in [0.6, 1.6] (capped below the
/// antipodal distance on a sphere) and amplitude in [0.5, 1.5].
TestFunction random_test_function(const SpaceForm& space, double extent, RandomStream& rng);

/// Random member of the outer catalog with the given arity.
OuterFunction random_outer(int arity, RandomStream& rng);

/// Random cylinder function with `inners` bumps.
CylinderFunction random_cylinder(const SpaceForm& space, int inners, double extent,
                                 RandomStream& rng);

}  // namespace upsilon
