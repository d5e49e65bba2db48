#pragma once

#include "fencelab/morphism.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fencelab {

struct SequenceError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class ProjectiveSequence {
public:
    ProjectiveSequence() = default;
    // every level must be a chain forest; every bond is re-verified
    ProjectiveSequence(std::vector<StructurePtr> levels, std::vector<StructureMap> bonds);
    explicit ProjectiveSequence(StructurePtr first);

    void push(StructurePtr level, StructureMap bond);  // bond: level -> current top

    int length() const { return static_cast<int>(levels_.size()); }
    int top() const { return length() - 1; }
    const StructurePtr& level(int n) const;
    const std::vector<StructurePtr>& levels() const { return levels_; }
    const std::vector<StructureMap>& bonds() const { return bonds_; }

    // composed bond levels[m] -> levels[n]
    StructureMap bond(int n, int m) const;
    const std::vector<int>& projection(int n, int m) const;
    int project(int n, int m, int x) const { return projection(n, m)[static_cast<std::size_t>(x)]; }

private:
    std::vector<StructurePtr> levels_;
    std::vector<StructureMap> bonds_;
    // proj_[m][n] : levels[m] -> levels[n]
    std::vector<std::vector<std::vector<int>>> proj_;
};

ProjectiveSequence doubling_arc_sequence(int depth);
ProjectiveSequence identity_chain_sequence(int length, int depth);
ProjectiveSequence point_sequence(int depth);

struct PairEntry {
    int level, a, b;
    std::optional<int> witness;
};
struct FinenessCertificate {
    int up_to = 0;
    std::vector<PairEntry> entries;
    bool resolved() const;
    int unresolved() const;
};

struct PointEntry {
    int level, a;
    std::optional<std::pair<int, int>> witness;  // (m, b)
};
struct IrreducibilityCertificate {
    int up_to = 0;
    std::vector<PointEntry> entries;
    bool resolved() const;
    int unresolved() const;
};

bool fineness_witness_holds(const ProjectiveSequence& s, int n, int a, int b, int m);
std::optional<int> fineness_witness(const ProjectiveSequence& s, int n, int a, int b);
FinenessCertificate fineness_check(const ProjectiveSequence& s, int up_to, int jobs = 1);

bool irreducibility_witness_holds(const ProjectiveSequence& s, int n, int a, int m, int b);
std::optional<std::pair<int, int>> irreducibility_witness(const ProjectiveSequence& s, int n, int a);
IrreducibilityCertificate irreducibility_check(const ProjectiveSequence& s, int up_to, int jobs = 1);

// pairs at R-distance two in a chain forest, as (lower, middle, upper)
std::vector<std::array<int, 3>> distance_two_triples(const Structure& f);

struct Extension {
    int m;
    StructureMap psi;  // levels[m] -> Q
};

// psi: levels[m] -> cod(theta) with theta . psi = proj, honouring forced values; nullopt if none
std::optional<StructureMap> lift_level(const ProjectiveSequence& s, int n, int m, const StructureMap& theta,
                                       const std::vector<int>& forced);

std::optional<Extension> extension_witness(const ProjectiveSequence& s, int n, const StructureMap& theta, int search_to);

struct EndpointFlags {
    bool min_stable = false;
    bool max_stable = false;
};
std::vector<EndpointFlags> classify_endpoints(const ProjectiveSequence& s, int n, int at);

struct ClopenSet {
    int level = 0;
    std::vector<int> branches;  // indices into levels[level]->chains()
};
ClopenSet clopen_preimage(const ProjectiveSequence& s, const ClopenSet& c, int m);
ProjectiveSequence restrict_to_clopen(const ProjectiveSequence& s, const ClopenSet& c);

// arc shadow: a branch at level m whose image runs from a to a' with both ends padded
struct ArcWitness {
    int m, branch;
};
std::optional<ArcWitness> arc_witness(const ProjectiveSequence& s, int n, int a, int a2, int search_to);
bool arc_witness_holds(const ProjectiveSequence& s, int n, int a, int a2, const ArcWitness& w);

struct ArcEntry {
    int level, a, a2;
    std::optional<ArcWitness> witness;
};
struct ArcCertificate {
    int up_to = 0;
    std::vector<ArcEntry> entries;
    bool resolved() const;
    int unresolved() const;
};
// every comparable pair a <= a' at levels <= up_to
ArcCertificate arc_check(const ProjectiveSequence& s, int up_to, int jobs = 1);

struct BranchTarget {
    std::vector<int> image;  // R-connected subset I of P
    int branch;              // branch of levels[source] whose traces J_m are constrained
};
struct FixTarget {
    int y;  // element of P
    int x;  // element of levels[source]
};
struct BackAndForthRequest {
    int n = 0;
    StructureMap phi;  // P -> levels[n]
    std::vector<BranchTarget> targets;
    std::vector<FixTarget> fixes;
    int source = -1;  // defaults to search_to
};
std::optional<Extension> back_and_forth_step(const ProjectiveSequence& s, const BackAndForthRequest& req, int search_to);

// generator

// Refine bundles the fineness, irreducibility and arc gadgets of one level
enum class TaskKind { Extension, Refine, Idle };
const char* task_kind_name(TaskKind k);

struct TaskRecord {
    int at = 0;  // top level when handled
    TaskKind kind = TaskKind::Extension;
    int source = 0;
    std::string detail;
    std::string status;  // discharged, satisfied, deferred
    StructurePtr q;
    std::optional<StructureMap> theta;  // Q -> levels[source]
    std::optional<StructureMap> psi;    // levels[witness_level] -> Q
    int witness_level = -1;
};

struct GeneratorOptions {
    int depth = 1;
    int max_size = 4;
    int gadget_cap = 4000;  // refine tasks with a larger Q are deferred
};

struct Generated {
    ProjectiveSequence seq;
    std::vector<TaskRecord> log;
};

Generated generate_fundamental(const GeneratorOptions& opt);

// all R-doubled intervals of every chain, with the folding map onto f
StructureMap refine_gadget(const StructurePtr& f);

}  // namespace fencelab
