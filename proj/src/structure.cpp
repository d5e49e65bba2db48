#include "fencelab/structure.hpp"

#include <algorithm>
#include <deque>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

namespace fencelab {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Hpo: return "hpo";
        case Kind::HForest: return "hforest";
        case Kind::ChainForest: return "f0";
    }
    return "?";
}

std::optional<Kind> ValidationReport::kind() const {
    if (!valid()) return std::nullopt;
    if (chain_forest) return Kind::ChainForest;
    if (forest) return Kind::HForest;
    return Kind::Hpo;
}

namespace {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a), b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

using Bits = std::vector<std::uint64_t>;

inline bool test_bit(const Bits& b, int i) { return (b[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u; }
inline void set_bit(Bits& b, int i) { b[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63); }

// topological order over covers; empty optional on a directed cycle
std::optional<std::vector<int>> topo_order(int n, const std::vector<std::vector<int>>& up) {
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v)
        for (int w : up[static_cast<std::size_t>(v)]) ++indeg[static_cast<std::size_t>(w)];
    std::deque<int> q;
    for (int v = 0; v < n; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) q.push_back(v);
    std::vector<int> order;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        order.push_back(v);
        for (int w : up[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(w)] == 0) q.push_back(w);
    }
    if (static_cast<int>(order.size()) != n) return std::nullopt;
    return order;
}

std::vector<Bits> reachability(int n, const std::vector<std::vector<int>>& up, const std::vector<int>& order) {
    std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    std::vector<Bits> reach(static_cast<std::size_t>(n), Bits(words, 0));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        Bits& row = reach[static_cast<std::size_t>(v)];
        set_bit(row, v);
        for (int w : up[static_cast<std::size_t>(v)]) {
            const Bits& other = reach[static_cast<std::size_t>(w)];
            for (std::size_t k = 0; k < words; ++k) row[k] |= other[k];
        }
    }
    return reach;
}

struct Indexed {
    std::vector<Id> ids;
    std::unordered_map<Id, int> index;
    std::vector<std::pair<int, int>> covers;
};

Indexed index_raw(const RawStructure& raw) {
    Indexed out;
    std::vector<Id> elements = raw.elements;
    std::vector<std::pair<Id, Id>> covers = raw.covers;
    if (raw.chains) {
        elements.clear();
        covers.clear();
        for (const auto& c : *raw.chains) {
            if (c.empty()) throw StructureError("empty chain");
            for (std::size_t i = 0; i < c.size(); ++i) {
                elements.push_back(c[i]);
                if (i > 0) covers.emplace_back(c[i - 1], c[i]);
            }
        }
    }
    for (const auto& e : elements) {
        if (!out.index.emplace(e, static_cast<int>(out.ids.size())).second)
            throw StructureError("duplicate id: " + e);
        out.ids.push_back(e);
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : covers) {
        auto ia = out.index.find(a);
        auto ib = out.index.find(b);
        if (ia == out.index.end()) throw StructureError("dangling id in covers: " + a);
        if (ib == out.index.end()) throw StructureError("dangling id in covers: " + b);
        if (!seen.emplace(ia->second, ib->second).second)
            throw StructureError("duplicate cover: " + a + " -> " + b);
        out.covers.emplace_back(ia->second, ib->second);
    }
    return out;
}

}  // namespace

ValidationReport validate(const RawStructure& raw) {
    Indexed ix = index_raw(raw);
    int n = static_cast<int>(ix.ids.size());
    std::vector<std::vector<int>> up(static_cast<std::size_t>(n)), down(static_cast<std::size_t>(n));
    ValidationReport rep;
    bool loops = false;
    for (auto [a, b] : ix.covers) {
        if (a == b) loops = true;
        up[static_cast<std::size_t>(a)].push_back(b);
        down[static_cast<std::size_t>(b)].push_back(a);
    }
    auto order = loops ? std::nullopt : topo_order(n, up);
    rep.partial_order = order.has_value();
    if (!rep.partial_order) {
        rep.problems.push_back("covers contain a directed cycle; the closure is not a strict order");
        return rep;
    }
    auto reach = reachability(n, up, *order);
    rep.hasse_minimal = true;
    for (auto [a, b] : ix.covers) {
        for (int x : up[static_cast<std::size_t>(a)]) {
            if (x != b && test_bit(reach[static_cast<std::size_t>(x)], b)) {
                rep.hasse_minimal = false;
                rep.problems.push_back("cover (" + ix.ids[static_cast<std::size_t>(a)] + "," +
                                       ix.ids[static_cast<std::size_t>(b)] + ") is implied by transitivity");
                break;
            }
        }
    }
    Dsu dsu(n);
    rep.forest = true;
    for (auto [a, b] : ix.covers)
        if (!dsu.unite(a, b)) rep.forest = false;
    if (!rep.forest) rep.problems.push_back("cover graph has a cycle");
    rep.chain_forest = rep.forest;
    for (int v = 0; v < n && rep.chain_forest; ++v)
        if (up[static_cast<std::size_t>(v)].size() > 1 || down[static_cast<std::size_t>(v)].size() > 1)
            rep.chain_forest = false;
    return rep;
}

Structure Structure::from_raw(const RawStructure& raw) {
    ValidationReport rep = validate(raw);
    if (!rep.valid()) {
        std::string msg = "not a Hasse partial order";
        for (const auto& p : rep.problems) msg += "; " + p;
        throw StructureError(msg);
    }
    Indexed ix = index_raw(raw);
    Structure s;
    s.ids_ = std::move(ix.ids);
    s.index_ = std::move(ix.index);
    s.covers_ = std::move(ix.covers);
    s.declared_chains_ = raw.chains.has_value();
    s.finish();
    return s;
}

Structure Structure::from_chains(const std::vector<std::vector<Id>>& chains) {
    RawStructure raw;
    raw.chains = chains;
    Indexed ix = index_raw(raw);
    Structure s;
    s.ids_ = std::move(ix.ids);
    s.index_ = std::move(ix.index);
    s.covers_ = std::move(ix.covers);
    s.declared_chains_ = true;
    s.finish();
    return s;
}

Structure Structure::from_covers(std::vector<Id> elements, const std::vector<std::pair<int, int>>& covers) {
    RawStructure raw;
    raw.elements = elements;
    for (auto [a, b] : covers)
        raw.covers.emplace_back(elements.at(static_cast<std::size_t>(a)), elements.at(static_cast<std::size_t>(b)));
    return from_raw(raw);
}

Structure Structure::chains_of_lengths(const std::vector<int>& lengths) {
    int total = 0;
    for (int l : lengths) {
        if (l <= 0) throw StructureError("chain length must be positive");
        total += l;
    }
    int width = 1;
    for (int t = total - 1; t >= 10; t /= 10) ++width;
    std::vector<std::vector<Id>> chains;
    int next = 0;
    for (int l : lengths) {
        std::vector<Id> c;
        for (int i = 0; i < l; ++i) {
            std::string s = std::to_string(next++);
            c.push_back(std::string(static_cast<std::size_t>(width) - s.size(), '0') + s);
        }
        chains.push_back(std::move(c));
    }
    return from_chains(chains);
}

void Structure::finish() {
    int n = size();
    up_.assign(static_cast<std::size_t>(n), {});
    down_.assign(static_cast<std::size_t>(n), {});
    for (auto [a, b] : covers_) {
        up_[static_cast<std::size_t>(a)].push_back(b);
        down_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& v : up_) std::sort(v.begin(), v.end());
    for (auto& v : down_) std::sort(v.begin(), v.end());

    bool degrees_ok = true;
    for (int v = 0; v < n; ++v)
        if (up_[static_cast<std::size_t>(v)].size() > 1 || down_[static_cast<std::size_t>(v)].size() > 1) degrees_ok = false;
    Dsu dsu(n);
    bool forest = true;
    for (auto [a, b] : covers_)
        if (!dsu.unite(a, b)) forest = false;
    if (forest && degrees_ok) {
        kind_ = Kind::ChainForest;
        chain_of_.assign(static_cast<std::size_t>(n), -1);
        position_.assign(static_cast<std::size_t>(n), -1);
        chains_.clear();
        std::vector<std::vector<int>> found;
        for (int v = 0; v < n; ++v) {
            if (!down_[static_cast<std::size_t>(v)].empty()) continue;
            std::vector<int> c{v};
            while (!up_[static_cast<std::size_t>(c.back())].empty()) c.push_back(up_[static_cast<std::size_t>(c.back())][0]);
            found.push_back(std::move(c));
        }
        if (declared_chains_) {
            // declared order is the order in which bottoms appear among ids
            std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x[0] < y[0]; });
        } else {
            std::sort(found.begin(), found.end(), [this](const auto& x, const auto& y) {
                return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                                    [this](int p, int q) { return id(p) < id(q); });
            });
        }
        chains_ = std::move(found);
        for (std::size_t c = 0; c < chains_.size(); ++c)
            for (std::size_t p = 0; p < chains_[c].size(); ++p) {
                chain_of_[static_cast<std::size_t>(chains_[c][p])] = static_cast<int>(c);
                position_[static_cast<std::size_t>(chains_[c][p])] = static_cast<int>(p);
            }
    } else {
        kind_ = forest ? Kind::HForest : Kind::Hpo;
        auto order = topo_order(n, up_);
        if (!order) throw StructureError("covers contain a directed cycle");
        reach_ = reachability(n, up_, *order);
    }
}

int Structure::index(const Id& i) const {
    auto it = index_.find(i);
    if (it == index_.end()) throw StructureError("unknown id: " + i);
    return it->second;
}

std::optional<int> Structure::find(const Id& i) const {
    auto it = index_.find(i);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> Structure::neighbors(int i) const {
    std::vector<int> out = up(i);
    out.insert(out.end(), down(i).begin(), down(i).end());
    std::sort(out.begin(), out.end());
    return out;
}

bool Structure::is_cover(int a, int b) const {
    const auto& u = up(a);
    return std::binary_search(u.begin(), u.end(), b);
}

bool Structure::r(int a, int b) const { return a == b || is_cover(a, b) || is_cover(b, a); }

bool Structure::leq(int a, int b) const {
    if (a == b) return true;
    if (kind_ == Kind::ChainForest) return chain_of(a) == chain_of(b) && position(a) <= position(b);
    return test_bit(reach_[static_cast<std::size_t>(a)], b);
}

const std::vector<std::vector<int>>& Structure::chains() const {
    if (kind_ != Kind::ChainForest) throw StructureError("structure is not a chain forest");
    return chains_;
}

std::vector<std::vector<int>> Structure::branches() const {
    auto by_ids = [this](const std::vector<int>& x, const std::vector<int>& y) {
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                            [this](int p, int q) { return id(p) < id(q); });
    };
    std::vector<std::vector<int>> out;
    if (kind_ == Kind::ChainForest) {
        out = chains_;
    } else {
        std::vector<int> path;
        std::function<void(int)> walk = [&](int v) {
            path.push_back(v);
            if (up(v).empty()) out.push_back(path);
            for (int w : up(v)) walk(w);
            path.pop_back();
        };
        for (int v = 0; v < size(); ++v)
            if (down(v).empty()) walk(v);
    }
    std::sort(out.begin(), out.end(), by_ids);
    return out;
}

RawStructure Structure::to_raw() const {
    RawStructure raw;
    if (declared_chains_ && kind_ == Kind::ChainForest) {
        std::vector<std::vector<Id>> cs;
        for (const auto& c : chains_) {
            std::vector<Id> ids;
            for (int v : c) ids.push_back(id(v));
            cs.push_back(std::move(ids));
        }
        raw.chains = std::move(cs);
    }
    raw.elements = ids_;
    for (auto [a, b] : covers_) raw.covers.emplace_back(id(a), id(b));
    return raw;
}

bool same_structure(const Structure& a, const Structure& b) {
    if (a.size() != b.size()) return false;
    for (const auto& i : a.ids())
        if (!b.find(i)) return false;
    if (a.covers().size() != b.covers().size()) return false;
    for (auto [x, y] : a.covers()) {
        int bx = b.index(a.id(x)), by = b.index(a.id(y));
        if (!b.is_cover(bx, by)) return false;
    }
    return true;
}

std::optional<int> r_distance(const Structure& h, int a, int b) {
    if (a < 0 || b < 0 || a >= h.size() || b >= h.size()) throw StructureError("element index out of range");
    if (h.is_chain_forest()) {
        if (h.chain_of(a) != h.chain_of(b)) return std::nullopt;
        return std::abs(h.position(a) - h.position(b));
    }
    std::vector<int> dist(static_cast<std::size_t>(h.size()), -1);
    std::deque<int> q{a};
    dist[static_cast<std::size_t>(a)] = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (v == b) return dist[static_cast<std::size_t>(v)];
        for (int w : h.neighbors(v))
            if (dist[static_cast<std::size_t>(w)] < 0) {
                dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                q.push_back(w);
            }
    }
    return std::nullopt;
}

std::optional<int> r_distance(const Structure& h, const Id& a, const Id& b) {
    return r_distance(h, h.index(a), h.index(b));
}

bool r_connected(const Structure& h, const std::vector<int>& subset) {
    if (subset.empty()) return true;
    std::unordered_set<int> in(subset.begin(), subset.end());
    std::unordered_set<int> seen{subset[0]};
    std::deque<int> q{subset[0]};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : h.neighbors(v))
            if (in.count(w) && seen.insert(w).second) q.push_back(w);
    }
    return seen.size() == in.size();
}

bool r_connected(const Structure& h, const std::vector<Id>& subset) {
    std::vector<int> ix;
    for (const auto& s : subset) ix.push_back(h.index(s));
    return r_connected(h, ix);
}

Structure dualize(const Structure& p) {
    if (p.declared_as_chains() && p.is_chain_forest()) {
        std::vector<std::vector<Id>> cs;
        for (const auto& c : p.chains()) {
            std::vector<Id> ids;
            for (auto it = c.rbegin(); it != c.rend(); ++it) ids.push_back(p.id(*it));
            cs.push_back(std::move(ids));
        }
        // keep chains listed by their old bottoms so dual of dual restores the order
        return Structure::from_chains(cs);
    }
    std::vector<std::pair<int, int>> rev;
    for (auto [a, b] : p.covers()) rev.emplace_back(b, a);
    return Structure::from_covers(p.ids(), rev);
}

namespace {

std::string rooted_code(const Structure& p, int v, int parent) {
    std::vector<std::string> parts;
    for (int w : p.up(v))
        if (w != parent) parts.push_back("u" + rooted_code(p, w, v));
    for (int w : p.down(v))
        if (w != parent) parts.push_back("d" + rooted_code(p, w, v));
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (auto& s : parts) out += s;
    return out + ")";
}

std::string tree_code(const Structure& p, const std::vector<int>& comp) {
    if (comp.size() == 1) return "()";
    std::unordered_map<int, int> deg;
    for (int v : comp) deg[v] = static_cast<int>(p.neighbors(v).size());
    std::vector<int> layer;
    for (int v : comp)
        if (deg[v] <= 1) layer.push_back(v);
    std::size_t remaining = comp.size();
    while (remaining > 2) {
        remaining -= layer.size();
        std::vector<int> next;
        for (int v : layer) {
            deg[v] = -1;
            for (int w : p.neighbors(v))
                if (deg[w] > 0 && --deg[w] == 1) next.push_back(w);
        }
        layer = std::move(next);
    }
    std::string best;
    for (int c : layer) {
        std::string code = rooted_code(p, c, -1);
        if (best.empty() || code < best) best = code;
    }
    return best;
}

}  // namespace

std::string canonical_signature(const Structure& p) {
    if (p.is_chain_forest()) {
        std::vector<int> lengths;
        for (const auto& c : p.chains()) lengths.push_back(static_cast<int>(c.size()));
        std::sort(lengths.begin(), lengths.end());
        std::string out = "f0:";
        for (std::size_t i = 0; i < lengths.size(); ++i) out += (i ? "," : "") + std::to_string(lengths[i]);
        return out;
    }
    if (!p.is_forest()) throw StructureError("canonical signature needs a forest");
    Dsu dsu(p.size());
    for (auto [a, b] : p.covers()) dsu.unite(a, b);
    std::map<int, std::vector<int>> comps;
    for (int v = 0; v < p.size(); ++v) comps[dsu.find(v)].push_back(v);
    std::vector<std::string> codes;
    for (auto& [root, vs] : comps) codes.push_back(tree_code(p, vs));
    std::sort(codes.begin(), codes.end());
    std::string out = "hf:";
    for (std::size_t i = 0; i < codes.size(); ++i) out += (i ? "," : "") + codes[i];
    return out;
}

std::vector<std::vector<int>> chainforest_shapes(int max_size) {
    std::vector<std::vector<int>> out;
    for (int k = 1; k <= max_size; ++k) {
        std::vector<std::vector<int>> parts;
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int left, int minpart) {
            if (left == 0) {
                parts.push_back(cur);
                return;
            }
            for (int p = minpart; p <= left; ++p) {
                cur.push_back(p);
                rec(left - p, p);
                cur.pop_back();
            }
        };
        rec(k, 1);
        std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        out.insert(out.end(), parts.begin(), parts.end());
    }
    return out;
}

std::vector<Structure> enumerate_chainforests(int max_size) {
    std::vector<Structure> out;
    for (const auto& shape : chainforest_shapes(max_size)) out.push_back(Structure::chains_of_lengths(shape));
    return out;
}

}  // namespace fencelab
