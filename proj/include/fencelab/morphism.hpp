#pragma once

#include "fencelab/structure.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fencelab {

struct MapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StructureMap {
    StructurePtr dom, cod;
    std::vector<int> f;  // dom index -> cod index

    int operator()(int x) const { return f[static_cast<std::size_t>(x)]; }
    bool operator==(const StructureMap& o) const { return f == o.f; }
};

StructureMap make_map(StructurePtr dom, StructurePtr cod, std::vector<int> f);
StructureMap map_from_ids(StructurePtr dom, StructurePtr cod, const std::map<Id, Id>& assignment);
std::map<Id, Id> map_to_ids(const StructureMap& m);
StructureMap identity_map(StructurePtr s);
StructureMap compose(const StructureMap& g, const StructureMap& f);  // g after f
// same assignment read into an equal codomain object
StructureMap with_codomain(const StructureMap& m, StructurePtr cod);

bool is_lr_preserving(const StructureMap& f);
bool is_surjective(const StructureMap& f);
// images of R and <= equal the codomain relations
bool is_epimorphism_definitional(const StructureMap& f);
// forest route: preserving, and every codomain branch is the image of a domain branch
bool is_epimorphism_branchwise(const StructureMap& f);
// definitional check; between forests the branch route runs too and must agree
bool is_epimorphism(const StructureMap& f);

// L_R-preserving maps of one chain (given bottom to top) into cod, each as the
// list of images; ordered by (branch, start, end) then bottom-up assignment
std::vector<std::vector<int>> chain_maps_into(int length, const Structure& cod);

std::vector<StructureMap> enumerate_epimorphisms(StructurePtr dom, StructurePtr cod);
// visitor form; return false from the callback to stop
void for_each_epimorphism(StructurePtr dom, StructurePtr cod, const std::function<bool(const StructureMap&)>& visit);

struct ChainMapOptions {
    bool surjective = false;
    // (b in dom(phi), b' in dom(psi)) with theta(b') = b
    std::optional<std::pair<int, int>> fixpoint;
};

struct ChainMapError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// theta: dom(psi) -> dom(phi) with phi . theta = psi
StructureMap build_chain_map(const StructureMap& phi, const StructureMap& psi, const ChainMapOptions& options = {});

struct Unfolding {
    StructurePtr forest;
    StructureMap map;  // forest -> original
};
Unfolding unfold_to_chainforest(const StructurePtr& p);

}  // namespace fencelab
