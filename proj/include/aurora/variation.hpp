#pragma once

#include <aurora/common.hpp>

namespace aurora {

/// Uniform sample inside the bounds.
Genotype random_genotype(const Bounds& bounds, Rng& rng);

/// Per-component Gaussian perturbation with standard deviation
/// `sigma_fraction * (upper - lower)`, clamped back into the bounds.
Genotype mutate(const Genotype& g, const Bounds& bounds, double sigma_fraction, Rng& rng);

} // namespace aurora
