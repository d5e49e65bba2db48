// shared generators and brute-force oracles for the test programs
#pragma once

#include "fencelab/amalgam.hpp"
#include "fencelab/morphism.hpp"
#include "fencelab/sequence.hpp"

#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace support {

using namespace fencelab;
using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// random tree shape on k vertices, every edge oriented at random
inline StructurePtr random_forest(Rng& rng, int k, const std::string& prefix = "v") {
    std::vector<Id> ids;
    for (int i = 0; i < k; ++i) ids.push_back(prefix + std::to_string(i));
    std::vector<std::pair<int, int>> covers;
    for (int i = 1; i < k; ++i) {
        if (pick(rng, 0, 4) == 0) continue;  // sometimes start a new component
        int p = pick(rng, 0, i - 1);
        if (pick(rng, 0, 1))
            covers.emplace_back(p, i);
        else
            covers.emplace_back(i, p);
    }
    return share(Structure::from_covers(ids, covers));
}

inline StructurePtr random_chain_forest(Rng& rng, int max_size) {
    int total = pick(rng, 1, max_size);
    std::vector<int> lens;
    while (total > 0) {
        int l = pick(rng, 1, total);
        lens.push_back(l);
        total -= l;
    }
    return share(Structure::chains_of_lengths(lens));
}

// grow dom from a copy of a by local moves that keep an epimorphism onto a
inline StructureMap random_cover_of(Rng& rng, const StructurePtr& a, int max_size, const std::string& prefix) {
    std::vector<Id> ids;
    std::vector<std::pair<int, int>> covers;
    std::vector<int> f;
    for (int i = 0; i < a->size(); ++i) {
        ids.push_back(prefix + std::to_string(i));
        f.push_back(i);
    }
    for (auto [x, y] : a->covers()) covers.emplace_back(x, y);
    int target = pick(rng, a->size(), max_size);
    while (static_cast<int>(ids.size()) < target) {
        int room = target - static_cast<int>(ids.size());
        int move = pick(rng, 0, 3);
        auto fresh = [&](int image) {
            ids.push_back(prefix + std::to_string(ids.size()));
            f.push_back(image);
            return static_cast<int>(ids.size()) - 1;
        };
        if (move == 0 && !covers.empty()) {
            std::size_t e = static_cast<std::size_t>(pick(rng, 0, static_cast<int>(covers.size()) - 1));
            auto [x, y] = covers[e];
            int z = fresh(pick(rng, 0, 1) ? f[static_cast<std::size_t>(x)] : f[static_cast<std::size_t>(y)]);
            covers[e] = {x, z};
            covers.emplace_back(z, y);
        } else if (move == 1 || move == 2) {
            int x = pick(rng, 0, static_cast<int>(ids.size()) - 1);
            int fx = f[static_cast<std::size_t>(x)];
            const auto& nb = move == 1 ? a->up(fx) : a->down(fx);
            int image = fx;
            if (!nb.empty() && pick(rng, 0, 1)) image = nb[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(nb.size()) - 1))];
            int z = fresh(image);
            if (move == 1)
                covers.emplace_back(x, z);
            else
                covers.emplace_back(z, x);
        } else {
            int len = pick(rng, 1, std::min(3, room));
            auto maps = chain_maps_into(len, *a);
            const auto& m = maps[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(maps.size()) - 1))];
            int prev = -1;
            for (int i = 0; i < len; ++i) {
                int z = fresh(m[static_cast<std::size_t>(i)]);
                if (prev >= 0) covers.emplace_back(prev, z);
                prev = z;
            }
        }
    }
    auto dom = share(Structure::from_covers(ids, covers));
    StructureMap out{dom, a, f};
    if (!is_epimorphism(out)) throw std::logic_error("generator produced a non-epimorphism");
    return out;
}

struct Triple {
    StructureMap phi, psi;
};

inline Triple random_triple(Rng& rng, int max_size) {
    auto a = random_forest(rng, pick(rng, 1, std::min(5, max_size)), "a");
    return {random_cover_of(rng, a, max_size, "b"), random_cover_of(rng, a, max_size, "c")};
}

// every function dom -> cod, as index vectors
inline void for_each_function(int dom, int cod, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> f(static_cast<std::size_t>(dom), 0);
    if (cod == 0) {
        if (dom == 0) visit(f);
        return;
    }
    while (true) {
        visit(f);
        int i = 0;
        while (i < dom && ++f[static_cast<std::size_t>(i)] == cod) f[static_cast<std::size_t>(i++)] = 0;
        if (i == dom) return;
    }
}

inline long long brute_force_epi_count(const StructurePtr& dom, const StructurePtr& cod) {
    long long count = 0;
    for_each_function(dom->size(), cod->size(), [&](const std::vector<int>& f) {
        if (is_epimorphism_definitional(StructureMap{dom, cod, f})) ++count;
    });
    return count;
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// is there any epimorphism psi: levels[m] -> Q with theta psi = proj, by enumeration
inline bool brute_force_lift_exists(const ProjectiveSequence& s, int n, int m, const StructureMap& theta) {
    bool found = false;
    const auto& proj = s.projection(n, m);
    for_each_epimorphism(s.level(m), theta.dom, [&](const StructureMap& psi) {
        for (int v = 0; v < psi.dom->size(); ++v)
            if (theta(psi(v)) != proj[static_cast<std::size_t>(v)]) return true;
        found = true;
        return false;
    });
    return found;
}

// all pairs at distance two checked from scratch by BFS distances
inline bool brute_force_separated(const ProjectiveSequence& s, int n, int a, int b, int m) {
    const auto& p = s.projection(n, m);
    const Structure& top = *s.level(m);
    for (int x = 0; x < top.size(); ++x) {
        if (p[static_cast<std::size_t>(x)] != a) continue;
        for (int y = 0; y < top.size(); ++y) {
            if (p[static_cast<std::size_t>(y)] != b) continue;
            auto d = r_distance(top, x, y);
            if (d && *d < 3) return false;
        }
    }
    return true;
}

}  // namespace support
