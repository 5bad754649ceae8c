#include <aurora/variation.hpp>

#include <algorithm>

namespace aurora {

Genotype random_genotype(const Bounds& bounds, Rng& rng)
{
    Genotype g;
    g.values.reserve(bounds.size());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& b : bounds)
        g.values.push_back(b.lower + u(rng) * b.width());
    return g;
}

Genotype mutate(const Genotype& g, const Bounds& bounds, double sigma_fraction, Rng& rng)
{
    if (g.size() != bounds.size())
        throw ContractViolation("mutate: genotype and bounds sizes differ");
    if (!g.within(bounds))
        throw ContractViolation("mutate: genotype outside its bounds");
    Genotype out = g;
    if (sigma_fraction == 0.0)
        return out;
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double step = n(rng) * sigma_fraction * bounds[i].width();
        out.values[i] = std::clamp(out.values[i] + step, bounds[i].lower, bounds[i].upper);
    }
    return out;
}

} // namespace aurora
