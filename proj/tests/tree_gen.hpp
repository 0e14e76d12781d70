#pragma once

#include <random>
#include <string>

#include "collapse/structure.hpp"

namespace collapse::testing {

inline structure::ParticleNode random_tree(std::mt19937_64& rng, int depth, int* counter = nullptr) {
    int local = 0;
    int& id = counter ? *counter : local;
    std::uniform_real_distribution<double> mass(0.0, 1000.0);
    std::uniform_int_distribution<int> width(1, 3);
    std::bernoulli_distribution leaf(0.4);
    const std::string name = "p" + std::to_string(id++);
    if (depth == 0 || leaf(rng)) return structure::ParticleNode::leaf(name, mass(rng));
    std::vector<structure::ParticleNode> parts;
    for (int i = width(rng); i > 0; --i) parts.push_back(random_tree(rng, depth - 1, &id));
    std::optional<Energy> m;
    if (leaf(rng)) m = Energy{mass(rng)};
    return structure::ParticleNode::composite(name, std::move(parts), m);
}

/// Random tree with exactly `n` leaves.
inline structure::ParticleNode random_tree_with_leaves(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> mass(0.0, 1000.0);
    std::vector<structure::ParticleNode> pool;
    for (std::size_t i = 0; i < n; ++i) pool.push_back(structure::ParticleNode::leaf("l" + std::to_string(i), mass(rng)));
    // group consecutive runs into composites a few times, keeping leaf order
    std::uniform_int_distribution<int> rounds(0, 3);
    for (int r = rounds(rng); r > 0 && pool.size() > 1; --r) {
        std::uniform_int_distribution<std::size_t> start(0, pool.size() - 1);
        const std::size_t s = start(rng);
        std::uniform_int_distribution<std::size_t> len(1, pool.size() - s);
        const std::size_t l = len(rng);
        std::vector<structure::ParticleNode> group(pool.begin() + static_cast<std::ptrdiff_t>(s),
                                                   pool.begin() + static_cast<std::ptrdiff_t>(s + l));
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(s), pool.begin() + static_cast<std::ptrdiff_t>(s + l));
        pool.insert(pool.begin() + static_cast<std::ptrdiff_t>(s),
                    structure::ParticleNode::composite("g" + std::to_string(r), std::move(group)));
    }
    if (pool.size() == 1) return pool.front();
    return structure::ParticleNode::composite("root", std::move(pool));
}

}  // namespace collapse::testing
