#pragma once

#include "fencelab/morphism.hpp"

#include <optional>

namespace fencelab {

struct AmalgamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Amalgam {
    StructurePtr t;
    StructureMap theta1;  // t -> dom(phi)
    StructureMap theta2;  // t -> dom(psi)
};

// phi: B -> A, psi: C -> A chain epimorphisms onto one chain
Amalgam amalgamate_chains(const StructureMap& phi, const StructureMap& psi);

// A, B, C forests; result is a chain forest
Amalgam amalgamate_forests(const StructureMap& phi, const StructureMap& psi);

Amalgam joint_projection(const StructurePtr& a, const StructurePtr& b);

struct AmalgamSearch {
    std::optional<Amalgam> witness;
    int bound = 0;
    long long shapes_tried = 0;
};

// exhaustive over chain forests with <= max_size elements
AmalgamSearch search_amalgam(const StructureMap& phi, const StructureMap& psi, int max_size);

// staircase walk on values along A; returns index pairs (b, c)
std::vector<std::pair<int, int>> staircase(const std::vector<int>& phi_vals, const std::vector<int>& psi_vals);

}  // namespace fencelab
