#include "fencelab/fence.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fencelab {

namespace {

bool check_node(const PieceNode& node, const std::string& path, FancyReport& rep) {
    auto fail = [&](const std::string& p, const std::string& what) {
        rep.valid = false;
        rep.path = p;
        rep.problem = what;
        return false;
    };
    if (!(node.lo > 0)) return fail(path, "lo must be positive");
    if (!(node.hi < 1)) return fail(path, "hi must be below 1");
    if (node.lo > node.hi) return fail(path, "lo exceeds hi");
    if (node.children.empty()) return true;
    Rational min_lo = node.children[0].lo, max_hi = node.children[0].hi;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const auto& c = node.children[i];
        std::string cp = path + "." + std::to_string(i);
        if (c.lo < node.lo) return fail(cp, "child lo below the parent's lo");
        if (c.hi > node.hi) return fail(cp, "child hi above the parent's hi");
        min_lo = std::min(min_lo, c.lo);
        max_hi = std::max(max_hi, c.hi);
    }
    if (min_lo != node.lo) return fail(path, "no child attains the parent's lo");
    if (max_hi != node.hi) return fail(path, "no child attains the parent's hi");
    for (std::size_t i = 0; i < node.children.size(); ++i)
        if (!check_node(node.children[i], path + "." + std::to_string(i), rep)) return false;
    return true;
}

void collect_values(const PieceNode& node, std::set<Rational>& out) {
    out.insert(node.lo);
    out.insert(node.hi);
    for (const auto& c : node.children) collect_values(c, out);
}

}  // namespace

FancyReport validate_fancy_pair(const FancyPairSpec& spec) {
    FancyReport rep;
    if (!spec.root) {
        rep.valid = false;
        rep.problem = "spec has no pieces";
        return rep;
    }
    check_node(*spec.root, "r", rep);
    return rep;
}

bool carve_inequality_holds(const std::vector<StepLeaf>& env, const CarvedPart& part, const Rational& epsilon) {
    if (part.leaves.empty()) return false;
    if (std::find(part.leaves.begin(), part.leaves.end(), part.attainer) == part.leaves.end()) return false;
    Rational m = env[static_cast<std::size_t>(part.leaves[0])].lo, big = env[static_cast<std::size_t>(part.leaves[0])].hi;
    for (int l : part.leaves) {
        m = std::min(m, env[static_cast<std::size_t>(l)].lo);
        big = std::max(big, env[static_cast<std::size_t>(l)].hi);
    }
    const auto& x = env[static_cast<std::size_t>(part.attainer)];
    return x.lo - m < epsilon && big - x.hi < epsilon;
}

std::vector<CarvedPart> carve_partition(const std::vector<StepLeaf>& env, const std::vector<std::vector<int>>& coarse,
                                        const Rational& epsilon) {
    if (!(epsilon > 0)) throw FenceError("epsilon must be positive");
    std::vector<char> used(env.size(), 0);
    for (const auto& part : coarse) {
        if (part.empty()) throw FenceError("coarse partition has an empty part");
        for (int l : part) {
            if (l < 0 || l >= static_cast<int>(env.size())) throw FenceError("coarse part names an unknown leaf");
            if (used[static_cast<std::size_t>(l)]) throw FenceError("coarse parts overlap");
            used[static_cast<std::size_t>(l)] = 1;
        }
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) throw FenceError("coarse partition misses a leaf");

    auto attainer_in = [&](const std::vector<int>& v) -> int {
        CarvedPart probe{v, -1};
        for (int l : v) {
            probe.attainer = l;
            if (carve_inequality_holds(env, probe, epsilon)) return l;
        }
        return -1;
    };

    std::vector<CarvedPart> out;
    for (const auto& part : coarse) {
        std::vector<int> rest = part;
        while (!rest.empty()) {
            std::vector<int> v = rest;
            int x;
            while ((x = attainer_in(v)) < 0) {
                Rational top = env[static_cast<std::size_t>(v[0])].hi;
                for (int l : v) top = std::max(top, env[static_cast<std::size_t>(l)].hi);
                std::vector<int> u;
                for (int l : v)
                    if (env[static_cast<std::size_t>(l)].hi < top - epsilon / 2) u.push_back(l);
                if (u.empty() || u.size() == v.size()) throw std::logic_error("carving made no progress");
                v = std::move(u);
            }
            std::vector<int> left;
            for (int l : rest)
                if (std::find(v.begin(), v.end(), l) == v.end()) left.push_back(l);
            out.push_back({std::move(v), x});
            rest = std::move(left);
        }
    }
    return out;
}

std::vector<Rational> canonical_cuts(int level, const std::vector<Rational>& avoid_list) {
    if (level < 0) throw FenceError("negative level");
    std::set<Rational> avoid(avoid_list.begin(), avoid_list.end());
    // cut of every dyadic k/2^n, kept across levels so cuts refine
    std::vector<Rational> cuts;  // level n: cut of j/2^n at index j-1
    for (int n = 1; n <= level; ++n) {
        std::vector<Rational> next;
        long long count = (1LL << n) - 1;
        next.reserve(static_cast<std::size_t>(count));
        for (long long k = 1; k <= count; ++k) {
            if (k % 2 == 0) {
                next.push_back(cuts[static_cast<std::size_t>(k / 2 - 1)]);
                continue;
            }
            Rational left = k == 1 ? Rational(0) : cuts[static_cast<std::size_t>((k - 1) / 2 - 1)];
            Rational right = k == count ? Rational(1) : cuts[static_cast<std::size_t>((k + 1) / 2 - 1)];
            Rational t = dyadic(k, n);
            int e = n + 2;
            while (avoid.count(t)) t += dyadic(1, e++);
            if (!(left < t && t < right)) {
                Rational gap = right - left;
                t = left + gap / 2;
                Rational step = gap / 4;
                while (avoid.count(t)) {
                    t += step;
                    step /= 2;
                }
            }
            next.push_back(t);
        }
        cuts = std::move(next);
    }
    return cuts;
}

Rational CellComplex::interval_lo(int j) const { return j == 0 ? Rational(0) : cuts[static_cast<std::size_t>(j - 1)]; }
Rational CellComplex::interval_hi(int j) const {
    return j == static_cast<int>(cuts.size()) ? Rational(1) : cuts[static_cast<std::size_t>(j)];
}

std::vector<int> CellComplex::column(int piece) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].piece == piece) out.push_back(static_cast<int>(i));
    return out;
}

namespace {

struct LevelPieces {
    std::vector<Piece> pieces;
    std::vector<const PieceNode*> nodes;  // nullptr past the tree: copies of the parent envelope
};

LevelPieces next_pieces(const LevelPieces& cur) {
    LevelPieces out;
    for (std::size_t p = 0; p < cur.pieces.size(); ++p) {
        const Piece& parent = cur.pieces[p];
        const PieceNode* node = cur.nodes[p];
        std::size_t k = node && !node->children.empty() ? node->children.size() : 2;
        Rational width = (parent.x1 - parent.x0) / static_cast<long long>(k);
        for (std::size_t i = 0; i < k; ++i) {
            Piece child;
            child.path = parent.path + "." + std::to_string(i);
            const PieceNode* cn = node && !node->children.empty() ? &node->children[i] : nullptr;
            child.lo = cn ? cn->lo : parent.lo;
            child.hi = cn ? cn->hi : parent.hi;
            child.x0 = parent.x0 + width * static_cast<long long>(i);
            child.x1 = child.x0 + width;
            child.parent = static_cast<int>(p);
            out.pieces.push_back(std::move(child));
            out.nodes.push_back(cn);
        }
    }
    return out;
}

CellComplex make_complex(int level, const LevelPieces& lp, std::vector<Rational> cuts) {
    CellComplex cx;
    cx.level = level;
    cx.cuts = std::move(cuts);
    cx.pieces = lp.pieces;
    for (std::size_t p = 0; p < cx.pieces.size(); ++p) {
        const Piece& u = cx.pieces[p];
        int last = -2;
        for (int j = 0; j < cx.interval_count(); ++j) {
            if (u.lo > cx.interval_hi(j) || u.hi < cx.interval_lo(j)) continue;
            if (last >= 0 && last != j - 1) throw std::logic_error("column is not a run of intervals");
            last = j;
            cx.cells.push_back({static_cast<int>(p), j, u.path + "@" + std::to_string(j)});
        }
        if (last < 0) throw std::logic_error("empty column");
    }
    return cx;
}

StructurePtr complex_structure(const CellComplex& cx) {
    std::vector<std::vector<Id>> chains(cx.pieces.size());
    for (const auto& c : cx.cells) chains[static_cast<std::size_t>(c.piece)].push_back(c.id);
    return share(Structure::from_chains(chains));
}

}  // namespace

Approximation build_approximation(const FancyPairSpec& spec, int depth) {
    auto rep = validate_fancy_pair(spec);
    if (!rep.valid) throw FenceError("invalid fancy pair at " + (rep.path.empty() ? std::string("spec") : rep.path) + ": " + rep.problem);
    if (depth < 0) throw FenceError("depth must be nonnegative");
    std::set<Rational> values;
    collect_values(*spec.root, values);
    std::vector<Rational> avoid(values.begin(), values.end());

    LevelPieces lp;
    lp.pieces.push_back(Piece{"r", spec.root->lo, spec.root->hi, Rational(0), Rational(1), -1});
    lp.nodes.push_back(&*spec.root);

    Approximation out;
    out.complexes.push_back(make_complex(0, lp, {}));
    out.seq = ProjectiveSequence(complex_structure(out.complexes[0]));
    for (int n = 1; n <= depth; ++n) {
        lp = next_pieces(lp);
        CellComplex cx = make_complex(n, lp, canonical_cuts(n, avoid));
        const CellComplex& prev = out.complexes.back();
        for (const Rational& c : prev.cuts)
            if (!std::binary_search(cx.cuts.begin(), cx.cuts.end(), c)) throw std::logic_error("cuts do not refine");
        for (const Rational& c : cx.cuts)
            if (values.count(c)) throw std::logic_error("cut point equals an envelope value");

        std::map<std::pair<int, int>, int> prev_index;
        for (std::size_t i = 0; i < prev.cells.size(); ++i) prev_index[{prev.cells[i].piece, prev.cells[i].interval}] = static_cast<int>(i);
        auto level = complex_structure(cx);
        const Structure& below = *out.seq.level(n - 1);
        std::vector<int> f(cx.cells.size());
        for (std::size_t i = 0; i < cx.cells.size(); ++i) {
            const Cell& c = cx.cells[i];
            Rational a = cx.interval_lo(c.interval);
            int j = static_cast<int>(std::upper_bound(prev.cuts.begin(), prev.cuts.end(), a) - prev.cuts.begin());
            auto it = prev_index.find({cx.pieces[static_cast<std::size_t>(c.piece)].parent, j});
            if (it == prev_index.end()) throw std::logic_error("cell has no parent cell");
            f[i] = below.index(prev.cells[static_cast<std::size_t>(it->second)].id);
        }
        std::vector<int> g(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) g[static_cast<std::size_t>(level->index(cx.cells[i].id))] = f[i];
        StructureMap bond{level, out.seq.level(n - 1), std::move(g)};

        // a parent column must be the whole image of one child column
        for (std::size_t p = 0; p < prev.pieces.size(); ++p) {
            std::size_t want = prev.column(static_cast<int>(p)).size();
            bool found = false;
            for (std::size_t q = 0; q < cx.pieces.size() && !found; ++q) {
                if (cx.pieces[q].parent != static_cast<int>(p)) continue;
                std::set<int> img;
                for (int ci : cx.column(static_cast<int>(q))) img.insert(f[static_cast<std::size_t>(ci)]);
                found = img.size() == want;
            }
            if (!found)
                throw FenceError("bond into level " + std::to_string(n - 1) + " is not an epimorphism: no child of piece " +
                                 prev.pieces[p].path + " spans its whole column (carve the pieces so one child attains both lo and hi)");
        }
        out.seq.push(level, std::move(bond));
        out.complexes.push_back(std::move(cx));
    }
    return out;
}

}  // namespace fencelab
