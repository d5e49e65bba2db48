#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fencelab {

using Id = std::string;

struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// unvalidated input as read from a file
struct RawStructure {
    std::vector<Id> elements;
    std::vector<std::pair<Id, Id>> covers;
    // set when the input came in chain form
    std::optional<std::vector<std::vector<Id>>> chains;
};

enum class Kind { Hpo, HForest, ChainForest };
const char* kind_name(Kind k);

struct ValidationReport {
    bool partial_order = false;
    bool hasse_minimal = false;
    bool forest = false;
    bool chain_forest = false;
    std::vector<std::string> problems;

    bool valid() const { return partial_order && hasse_minimal; }
    std::optional<Kind> kind() const;
};

// duplicate or dangling ids throw StructureError; order defects are reported
ValidationReport validate(const RawStructure& raw);

class Structure {
public:
    static Structure from_raw(const RawStructure& raw);
    static Structure from_chains(const std::vector<std::vector<Id>>& chains);
    static Structure from_covers(std::vector<Id> elements, const std::vector<std::pair<int, int>>& covers);
    // chains with ids 0..n-1 zero padded, so id order follows chain order
    static Structure chains_of_lengths(const std::vector<int>& lengths);

    int size() const { return static_cast<int>(ids_.size()); }
    const std::vector<Id>& ids() const { return ids_; }
    const Id& id(int i) const { return ids_[static_cast<std::size_t>(i)]; }
    int index(const Id& id) const;
    std::optional<int> find(const Id& id) const;

    const std::vector<std::pair<int, int>>& covers() const { return covers_; }
    const std::vector<int>& up(int i) const { return up_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& down(int i) const { return down_[static_cast<std::size_t>(i)]; }
    // R-neighbours other than i itself
    std::vector<int> neighbors(int i) const;

    bool is_cover(int a, int b) const;  // b is an immediate successor of a
    bool r(int a, int b) const;
    bool leq(int a, int b) const;
    bool less(int a, int b) const { return a != b && leq(a, b); }

    Kind kind() const { return kind_; }
    bool is_forest() const { return kind_ != Kind::Hpo; }
    bool is_chain_forest() const { return kind_ == Kind::ChainForest; }

    // chain forests: chains in declared order, plus lookups
    const std::vector<std::vector<int>>& chains() const;
    int chain_of(int i) const { return chain_of_[static_cast<std::size_t>(i)]; }
    int position(int i) const { return position_[static_cast<std::size_t>(i)]; }
    bool declared_as_chains() const { return declared_chains_; }

    // maximal chains, each bottom to top, sorted by id sequence
    std::vector<std::vector<int>> branches() const;

    RawStructure to_raw() const;

private:
    Structure() = default;
    void finish();

    std::vector<Id> ids_;
    std::unordered_map<Id, int> index_;
    std::vector<std::pair<int, int>> covers_;
    std::vector<std::vector<int>> up_, down_;
    Kind kind_ = Kind::Hpo;
    bool declared_chains_ = false;
    std::vector<std::vector<int>> chains_;
    std::vector<int> chain_of_, position_;
    // reachability rows for the non chain case
    std::vector<std::vector<std::uint64_t>> reach_;
};

using StructurePtr = std::shared_ptr<const Structure>;

inline StructurePtr share(Structure s) { return std::make_shared<const Structure>(std::move(s)); }

// same ids and same cover set
bool same_structure(const Structure& a, const Structure& b);

// shortest path in the R graph; nullopt when disconnected
std::optional<int> r_distance(const Structure& h, const Id& a, const Id& b);
std::optional<int> r_distance(const Structure& h, int a, int b);
bool r_connected(const Structure& h, const std::vector<Id>& subset);
bool r_connected(const Structure& h, const std::vector<int>& subset);

Structure dualize(const Structure& p);

std::string canonical_signature(const Structure& p);

// one representative per isomorphism class of chain forests with <= n elements
std::vector<Structure> enumerate_chainforests(int max_size);
// integer partitions used above, parts ascending
std::vector<std::vector<int>> chainforest_shapes(int max_size);

inline Structure point() { return Structure::chains_of_lengths({1}); }
inline Structure chain(int n) { return Structure::chains_of_lengths({n}); }

}  // namespace fencelab
