#include "fencelab/sequence.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>
#include <thread>

namespace fencelab {

namespace {

StructureMap rebase(const StructureMap& m, const StructurePtr& dom, const StructurePtr& cod) {
    StructureMap out = with_codomain(m, cod);
    if (out.dom == dom) return out;
    if (!same_structure(*out.dom, *dom)) throw SequenceError("bond domain does not match its level");
    std::vector<int> f(static_cast<std::size_t>(dom->size()));
    for (int i = 0; i < dom->size(); ++i) f[static_cast<std::size_t>(i)] = out(out.dom->index(dom->id(i)));
    return StructureMap{dom, cod, std::move(f)};
}

template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count < 2) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    int workers = std::min(jobs, count);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

ProjectiveSequence::ProjectiveSequence(StructurePtr first) {
    if (!first->is_chain_forest()) throw SequenceError("levels must be chain forests");
    levels_.push_back(first);
    std::vector<int> id(static_cast<std::size_t>(first->size()));
    for (int i = 0; i < first->size(); ++i) id[static_cast<std::size_t>(i)] = i;
    proj_.push_back({id});
}

ProjectiveSequence::ProjectiveSequence(std::vector<StructurePtr> levels, std::vector<StructureMap> bonds) {
    if (levels.empty()) throw SequenceError("a sequence needs at least one level");
    if (bonds.size() + 1 != levels.size()) throw SequenceError("need exactly one bond between consecutive levels");
    *this = ProjectiveSequence(levels[0]);
    for (std::size_t i = 0; i < bonds.size(); ++i) push(levels[i + 1], bonds[i]);
}

void ProjectiveSequence::push(StructurePtr level, StructureMap bond) {
    if (!level->is_chain_forest()) throw SequenceError("levels must be chain forests");
    StructureMap b = rebase(bond, level, levels_.back());
    if (!is_epimorphism(b)) throw SequenceError("bond " + std::to_string(levels_.size() - 1) + " is not an epimorphism");
    int m = length();
    std::vector<std::vector<int>> row(static_cast<std::size_t>(m + 1));
    std::vector<int> id(static_cast<std::size_t>(level->size()));
    for (int i = 0; i < level->size(); ++i) id[static_cast<std::size_t>(i)] = i;
    row[static_cast<std::size_t>(m)] = id;
    row[static_cast<std::size_t>(m - 1)] = b.f;
    for (int n = m - 2; n >= 0; --n) {
        const auto& step = proj_[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(n)];
        std::vector<int> v(b.f.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = step[static_cast<std::size_t>(b.f[i])];
        row[static_cast<std::size_t>(n)] = std::move(v);
    }
    levels_.push_back(std::move(level));
    bonds_.push_back(std::move(b));
    proj_.push_back(std::move(row));
}

const StructurePtr& ProjectiveSequence::level(int n) const {
    if (n < 0 || n >= length()) throw SequenceError("level " + std::to_string(n) + " out of range");
    return levels_[static_cast<std::size_t>(n)];
}

const std::vector<int>& ProjectiveSequence::projection(int n, int m) const {
    if (n < 0 || m >= length() || n > m) throw SequenceError("bond indices out of range");
    return proj_[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
}

StructureMap ProjectiveSequence::bond(int n, int m) const {
    return StructureMap{level(m), level(n), projection(n, m)};
}

ProjectiveSequence doubling_arc_sequence(int depth) {
    ProjectiveSequence s(share(point()));
    for (int n = 1; n <= depth; ++n) {
        auto lv = share(chain(1 << n));
        std::vector<int> f(static_cast<std::size_t>(lv->size()));
        for (int i = 0; i < lv->size(); ++i) f[static_cast<std::size_t>(i)] = i / 2;
        s.push(lv, StructureMap{lv, s.level(n - 1), std::move(f)});
    }
    return s;
}

ProjectiveSequence identity_chain_sequence(int length, int depth) {
    ProjectiveSequence s(share(chain(length)));
    for (int n = 1; n <= depth; ++n) {
        auto lv = share(chain(length));
        std::vector<int> f(static_cast<std::size_t>(length));
        for (int i = 0; i < length; ++i) f[static_cast<std::size_t>(i)] = i;
        s.push(lv, StructureMap{lv, s.level(n - 1), std::move(f)});
    }
    return s;
}

ProjectiveSequence point_sequence(int depth) {
    ProjectiveSequence s(share(point()));
    for (int n = 1; n <= depth; ++n) {
        auto lv = share(point());
        s.push(lv, StructureMap{lv, s.level(n - 1), {0}});
    }
    return s;
}

bool FinenessCertificate::resolved() const { return unresolved() == 0; }
int FinenessCertificate::unresolved() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const PairEntry& e) { return !e.witness; }));
}
bool IrreducibilityCertificate::resolved() const { return unresolved() == 0; }
int IrreducibilityCertificate::unresolved() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const PointEntry& e) { return !e.witness; }));
}

std::vector<std::array<int, 3>> distance_two_triples(const Structure& f) {
    std::vector<std::array<int, 3>> out;
    for (const auto& c : f.chains())
        for (std::size_t i = 0; i + 2 < c.size(); ++i) out.push_back({c[i], c[i + 1], c[i + 2]});
    return out;
}

bool fineness_witness_holds(const ProjectiveSequence& s, int n, int a, int b, int m) {
    const auto& p = s.projection(n, m);
    for (const auto& c : s.level(m)->chains()) {
        int last_a = -1000, last_b = -1000;
        for (int i = 0; i < static_cast<int>(c.size()); ++i) {
            int v = p[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])];
            if (v == a) {
                if (i - last_b < 3) return false;
                last_a = i;
            } else if (v == b) {
                if (i - last_a < 3) return false;
                last_b = i;
            }
        }
    }
    return true;
}

std::optional<int> fineness_witness(const ProjectiveSequence& s, int n, int a, int b) {
    for (int m = n + 1; m < s.length(); ++m)
        if (fineness_witness_holds(s, n, a, b, m)) return m;
    return std::nullopt;
}

namespace {

// unordered level-n value pairs whose preimages come within distance two at level m
std::unordered_set<std::uint64_t> close_pairs(const ProjectiveSequence& s, int n, int m) {
    const auto& p = s.projection(n, m);
    std::unordered_set<std::uint64_t> out;
    auto add = [&](int x, int y) {
        if (x == y) return;
        if (x > y) std::swap(x, y);
        out.insert((static_cast<std::uint64_t>(x) << 32) | static_cast<std::uint32_t>(y));
    };
    for (const auto& c : s.level(m)->chains())
        for (std::size_t i = 0; i < c.size(); ++i) {
            int x = p[static_cast<std::size_t>(c[i])];
            if (i + 1 < c.size()) add(x, p[static_cast<std::size_t>(c[i + 1])]);
            if (i + 2 < c.size()) add(x, p[static_cast<std::size_t>(c[i + 2])]);
        }
    return out;
}

}  // namespace

FinenessCertificate fineness_check(const ProjectiveSequence& s, int up_to, int jobs) {
    if (up_to >= s.length()) throw SequenceError("check level beyond the sequence");
    FinenessCertificate cert;
    cert.up_to = up_to;
    std::vector<std::size_t> start;
    for (int n = 0; n <= up_to; ++n) {
        start.push_back(cert.entries.size());
        for (const auto& t : distance_two_triples(*s.level(n))) cert.entries.push_back({n, t[0], t[2], std::nullopt});
    }
    start.push_back(cert.entries.size());
    parallel_for(up_to + 1, jobs, [&](int n) {
        std::size_t lo = start[static_cast<std::size_t>(n)], hi = start[static_cast<std::size_t>(n) + 1];
        std::size_t open = hi - lo;
        for (int m = n + 1; m < s.length() && open > 0; ++m) {
            auto close = close_pairs(s, n, m);
            for (std::size_t i = lo; i < hi; ++i) {
                auto& e = cert.entries[i];
                if (e.witness) continue;
                int x = std::min(e.a, e.b), y = std::max(e.a, e.b);
                if (close.count((static_cast<std::uint64_t>(x) << 32) | static_cast<std::uint32_t>(y))) continue;
                e.witness = m;
                --open;
            }
        }
    });
    return cert;
}

bool irreducibility_witness_holds(const ProjectiveSequence& s, int n, int a, int m, int b) {
    const auto& p = s.projection(n, m);
    if (p[static_cast<std::size_t>(b)] != a) return false;
    for (int w : s.level(m)->neighbors(b))
        if (p[static_cast<std::size_t>(w)] != a) return false;
    return true;
}

std::optional<std::pair<int, int>> irreducibility_witness(const ProjectiveSequence& s, int n, int a) {
    for (int m = n; m < s.length(); ++m) {
        const auto& p = s.projection(n, m);
        for (const auto& c : s.level(m)->chains())
            for (std::size_t i = 0; i < c.size(); ++i) {
                auto at = [&](std::size_t k) { return p[static_cast<std::size_t>(c[k])]; };
                if (at(i) != a) continue;
                if (i > 0 && at(i - 1) != a) continue;
                if (i + 1 < c.size() && at(i + 1) != a) continue;
                return std::make_pair(m, c[i]);
            }
    }
    return std::nullopt;
}

IrreducibilityCertificate irreducibility_check(const ProjectiveSequence& s, int up_to, int jobs) {
    if (up_to >= s.length()) throw SequenceError("check level beyond the sequence");
    IrreducibilityCertificate cert;
    cert.up_to = up_to;
    std::vector<std::size_t> start;
    for (int n = 0; n <= up_to; ++n) {
        start.push_back(cert.entries.size());
        for (int a = 0; a < s.level(n)->size(); ++a) cert.entries.push_back({n, a, std::nullopt});
    }
    parallel_for(up_to + 1, jobs, [&](int n) {
        std::size_t base = start[static_cast<std::size_t>(n)];
        int open = s.level(n)->size();
        for (int m = n; m < s.length() && open > 0; ++m) {
            const auto& p = s.projection(n, m);
            for (const auto& c : s.level(m)->chains())
                for (std::size_t i = 0; i < c.size(); ++i) {
                    auto at = [&](std::size_t k) { return p[static_cast<std::size_t>(c[k])]; };
                    int a = at(i);
                    auto& e = cert.entries[base + static_cast<std::size_t>(a)];
                    if (e.witness) continue;
                    if (i > 0 && at(i - 1) != a) continue;
                    if (i + 1 < c.size() && at(i + 1) != a) continue;
                    e.witness = std::make_pair(m, c[i]);
                    --open;
                }
        }
    });
    return cert;
}

namespace {

struct ChainFit {
    bool any = false, cover = false;
    std::vector<int> any_map, cover_map;  // positions in the target chain
};

// monotone step <= 1 maps of a chain into one target chain with theta . map = proj
ChainFit fit_chain(const std::vector<int>& vals, const std::vector<int>& forced, const std::vector<int>& targ_vals,
                   const std::vector<int>& targ_ids) {
    int L = static_cast<int>(vals.size()), k = static_cast<int>(targ_vals.size());
    auto ok = [&](int i, int j) {
        if (targ_vals[static_cast<std::size_t>(j)] != vals[static_cast<std::size_t>(i)]) return false;
        int fz = forced[static_cast<std::size_t>(i)];
        return fz < 0 || fz == targ_ids[static_cast<std::size_t>(j)];
    };
    ChainFit out;
    // back[i][j]: can finish from (i,j); two variants by required end
    auto solve = [&](bool cover, std::vector<int>& result) {
        std::vector<std::vector<char>> back(static_cast<std::size_t>(L), std::vector<char>(static_cast<std::size_t>(k), 0));
        for (int j = 0; j < k; ++j)
            back[static_cast<std::size_t>(L - 1)][static_cast<std::size_t>(j)] = ok(L - 1, j) && (!cover || j == k - 1);
        for (int i = L - 2; i >= 0; --i)
            for (int j = 0; j < k; ++j) {
                if (!ok(i, j)) continue;
                bool nxt = back[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)] ||
                           (j + 1 < k && back[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)]);
                back[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = nxt;
            }
        int j = -1;
        for (int t = 0; t < (cover ? 1 : k); ++t)
            if (back[0][static_cast<std::size_t>(t)]) {
                j = t;
                break;
            }
        if (j < 0) return false;
        result.assign(static_cast<std::size_t>(L), 0);
        result[0] = j;
        for (int i = 1; i < L; ++i) {
            if (!back[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ++j;
            result[static_cast<std::size_t>(i)] = j;
        }
        return true;
    };
    out.any = solve(false, out.any_map);
    if (out.any) out.cover = solve(true, out.cover_map);
    return out;
}

}  // namespace

std::optional<StructureMap> lift_level(const ProjectiveSequence& s, int n, int m, const StructureMap& theta_in,
                                       const std::vector<int>& forced) {
    StructureMap theta = with_codomain(theta_in, s.level(n));
    const Structure& q = *theta.dom;
    const Structure& fm = *s.level(m);
    const auto& proj = s.projection(n, m);
    const auto& ychains = fm.chains();
    const auto& qchains = q.chains();
    std::size_t ny = ychains.size(), nq = qchains.size();
    if (ny < nq) return std::nullopt;

    std::vector<std::vector<int>> qvals(nq);
    for (std::size_t d = 0; d < nq; ++d)
        for (int v : qchains[d]) qvals[d].push_back(theta(v));

    std::vector<std::vector<ChainFit>> fits(ny, std::vector<ChainFit>(nq));
    for (std::size_t y = 0; y < ny; ++y) {
        std::vector<int> vals, frc;
        for (int v : ychains[y]) {
            vals.push_back(proj[static_cast<std::size_t>(v)]);
            frc.push_back(forced.empty() ? -1 : forced[static_cast<std::size_t>(v)]);
        }
        bool any = false;
        for (std::size_t d = 0; d < nq; ++d) {
            fits[y][d] = fit_chain(vals, frc, qvals[d], qchains[d]);
            any = any || fits[y][d].any;
        }
        if (!any) return std::nullopt;
    }

    // every chain of Q needs its own covering chain of levels[m]
    std::vector<int> owner(ny, -1);
    for (std::size_t d = 0; d < nq; ++d) {
        std::vector<char> seen(ny, 0);
        auto augment = [&](auto&& self, std::size_t dd) -> bool {
            for (std::size_t y = 0; y < ny; ++y) {
                if (!fits[y][dd].cover || seen[y]) continue;
                seen[y] = 1;
                if (owner[y] < 0 || self(self, static_cast<std::size_t>(owner[y]))) {
                    owner[y] = static_cast<int>(dd);
                    return true;
                }
            }
            return false;
        };
        if (!augment(augment, d)) return std::nullopt;
    }

    std::vector<int> f(static_cast<std::size_t>(fm.size()), -1);
    for (std::size_t y = 0; y < ny; ++y) {
        std::size_t d;
        const std::vector<int>* pos;
        if (owner[y] >= 0) {
            d = static_cast<std::size_t>(owner[y]);
            pos = &fits[y][d].cover_map;
        } else {
            d = 0;
            while (!fits[y][d].any) ++d;
            pos = &fits[y][d].any_map;
        }
        for (std::size_t i = 0; i < ychains[y].size(); ++i)
            f[static_cast<std::size_t>(ychains[y][i])] = qchains[d][static_cast<std::size_t>((*pos)[i])];
    }
    StructureMap psi{s.level(m), theta.dom, std::move(f)};
    for (int v = 0; v < fm.size(); ++v)
        if (theta(psi(v)) != proj[static_cast<std::size_t>(v)]) throw std::logic_error("lift does not commute");
    if (!is_epimorphism(psi)) throw std::logic_error("lift is not an epimorphism");
    return psi;
}

std::optional<Extension> extension_witness(const ProjectiveSequence& s, int n, const StructureMap& theta_in, int search_to) {
    if (n < 0 || n > search_to || search_to >= s.length()) throw SequenceError("extension range out of bounds");
    StructureMap theta = with_codomain(theta_in, s.level(n));
    if (!theta.dom->is_chain_forest()) throw SequenceError("extension source must be a chain forest");
    if (!is_epimorphism(theta)) throw SequenceError("theta must be an epimorphism");
    for (int m = n; m <= search_to; ++m)
        if (auto psi = lift_level(s, n, m, theta, {})) return Extension{m, std::move(*psi)};
    return std::nullopt;
}

std::vector<EndpointFlags> classify_endpoints(const ProjectiveSequence& s, int n, int at) {
    if (n > at || at >= s.length() || n < 0) throw SequenceError("endpoint levels out of range");
    const Structure& f = *s.level(at);
    const auto& p = s.projection(n, at);
    std::vector<EndpointFlags> out(static_cast<std::size_t>(f.size()));
    for (const auto& c : f.chains())
        for (int v : c) {
            auto& e = out[static_cast<std::size_t>(v)];
            e.max_stable = p[static_cast<std::size_t>(c.back())] == p[static_cast<std::size_t>(v)];
            e.min_stable = p[static_cast<std::size_t>(c.front())] == p[static_cast<std::size_t>(v)];
        }
    return out;
}

ClopenSet clopen_preimage(const ProjectiveSequence& s, const ClopenSet& c, int m) {
    if (c.level > m || m >= s.length()) throw SequenceError("preimage level out of range");
    const Structure& base = *s.level(c.level);
    std::vector<char> in(static_cast<std::size_t>(base.size()), 0);
    for (int b : c.branches) {
        if (b < 0 || b >= static_cast<int>(base.chains().size())) throw SequenceError("branch index out of range");
        for (int v : base.chains()[static_cast<std::size_t>(b)]) in[static_cast<std::size_t>(v)] = 1;
    }
    const Structure& top = *s.level(m);
    const auto& p = s.projection(c.level, m);
    ClopenSet out{m, {}};
    for (std::size_t k = 0; k < top.chains().size(); ++k) {
        const auto& ch = top.chains()[k];
        bool first = in[static_cast<std::size_t>(p[static_cast<std::size_t>(ch[0])])];
        for (int v : ch)
            if (static_cast<bool>(in[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])]) != first)
                throw std::logic_error("preimage of a branch union splits a branch");
        if (first) out.branches.push_back(static_cast<int>(k));
    }
    return out;
}

namespace {

StructurePtr sub_forest(const Structure& f, const std::vector<int>& branches, std::vector<int>& old_of_new) {
    std::vector<std::vector<Id>> chains;
    old_of_new.clear();
    for (int b : branches) {
        std::vector<Id> c;
        for (int v : f.chains()[static_cast<std::size_t>(b)]) {
            c.push_back(f.id(v));
            old_of_new.push_back(v);
        }
        chains.push_back(std::move(c));
    }
    return share(Structure::from_chains(chains));
}

}  // namespace

ProjectiveSequence restrict_to_clopen(const ProjectiveSequence& s, const ClopenSet& c) {
    if (c.branches.empty()) throw SequenceError("clopen set is empty");
    std::vector<StructurePtr> levels;
    std::vector<std::vector<int>> back;  // new index -> old index, per level
    for (int m = c.level; m < s.length(); ++m) {
        ClopenSet pre = clopen_preimage(s, c, m);
        std::vector<int> old;
        levels.push_back(sub_forest(*s.level(m), pre.branches, old));
        back.push_back(std::move(old));
    }
    std::vector<StructureMap> bonds;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        int m = c.level + static_cast<int>(k);
        const auto& b = s.bonds()[static_cast<std::size_t>(m)];
        std::vector<int> inv(static_cast<std::size_t>(s.level(m)->size()), -1);
        for (std::size_t i = 0; i < back[k].size(); ++i) inv[static_cast<std::size_t>(back[k][i])] = static_cast<int>(i);
        std::vector<int> f;
        for (int old : back[k + 1]) f.push_back(inv[static_cast<std::size_t>(b(old))]);
        bonds.push_back(StructureMap{levels[k + 1], levels[k], std::move(f)});
    }
    return ProjectiveSequence(std::move(levels), std::move(bonds));
}

std::optional<ArcWitness> arc_witness(const ProjectiveSequence& s, int n, int a, int a2, int search_to) {
    const Structure& base = *s.level(n);
    if (!base.leq(a, a2)) throw SequenceError("arc endpoints must be comparable with a <= a'");
    for (int m = n; m <= search_to && m < s.length(); ++m) {
        const auto& p = s.projection(n, m);
        const auto& chains = s.level(m)->chains();
        for (std::size_t k = 0; k < chains.size(); ++k) {
            const auto& ch = chains[k];
            auto at = [&](std::size_t i) { return p[static_cast<std::size_t>(ch[i])]; };
            std::size_t L = ch.size();
            if (at(0) != a || at(L - 1) != a2) continue;
            if (L > 1 && (at(1) != a || at(L - 2) != a2)) continue;
            bool inside = true;
            for (std::size_t i = 0; i < L && inside; ++i) inside = base.leq(a, at(i)) && base.leq(at(i), a2);
            if (inside) return ArcWitness{m, static_cast<int>(k)};
        }
    }
    return std::nullopt;
}

bool arc_witness_holds(const ProjectiveSequence& s, int n, int a, int a2, const ArcWitness& w) {
    const Structure& base = *s.level(n);
    const auto& chains = s.level(w.m)->chains();
    if (w.branch < 0 || w.branch >= static_cast<int>(chains.size())) return false;
    const auto& ch = chains[static_cast<std::size_t>(w.branch)];
    const auto& p = s.projection(n, w.m);
    for (int v : ch) {
        int x = p[static_cast<std::size_t>(v)];
        if (!base.leq(a, x) || !base.leq(x, a2)) return false;
    }
    if (p[static_cast<std::size_t>(ch.front())] != a || p[static_cast<std::size_t>(ch.back())] != a2) return false;
    for (int v : s.level(w.m)->neighbors(ch.front()))
        if (p[static_cast<std::size_t>(v)] != a) return false;
    for (int v : s.level(w.m)->neighbors(ch.back()))
        if (p[static_cast<std::size_t>(v)] != a2) return false;
    return true;
}

bool ArcCertificate::resolved() const { return unresolved() == 0; }
int ArcCertificate::unresolved() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const ArcEntry& e) { return !e.witness; }));
}

ArcCertificate arc_check(const ProjectiveSequence& s, int up_to, int jobs) {
    if (up_to >= s.length()) throw SequenceError("check level beyond the sequence");
    ArcCertificate cert;
    cert.up_to = up_to;
    std::vector<std::size_t> start;
    for (int n = 0; n <= up_to; ++n) {
        start.push_back(cert.entries.size());
        for (const auto& c : s.level(n)->chains())
            for (std::size_t i = 0; i < c.size(); ++i)
                for (std::size_t j = i; j < c.size(); ++j) cert.entries.push_back({n, c[i], c[j], std::nullopt});
    }
    start.push_back(cert.entries.size());
    parallel_for(up_to + 1, jobs, [&](int n) {
        std::map<std::pair<int, int>, std::size_t> slot;
        for (std::size_t i = start[static_cast<std::size_t>(n)]; i < start[static_cast<std::size_t>(n) + 1]; ++i)
            slot[{cert.entries[i].a, cert.entries[i].a2}] = i;
        std::size_t open = slot.size();
        for (int m = n; m < s.length() && open > 0; ++m) {
            const auto& p = s.projection(n, m);
            const auto& chains = s.level(m)->chains();
            for (std::size_t k = 0; k < chains.size(); ++k) {
                const auto& ch = chains[k];
                auto at = [&](std::size_t i) { return p[static_cast<std::size_t>(ch[i])]; };
                std::size_t L = ch.size();
                if (L > 1 && (at(1) != at(0) || at(L - 2) != at(L - 1))) continue;
                auto& e = cert.entries[slot.at({at(0), at(L - 1)})];
                if (e.witness) continue;
                e.witness = ArcWitness{m, static_cast<int>(k)};
                --open;
            }
        }
    });
    return cert;
}

std::optional<Extension> back_and_forth_step(const ProjectiveSequence& s, const BackAndForthRequest& req, int search_to) {
    if (search_to >= s.length() || req.n > search_to || req.n < 0) throw SequenceError("search range out of bounds");
    int source = req.source < 0 ? search_to : req.source;
    if (source < search_to || source >= s.length()) throw SequenceError("source level must be at least the search bound");
    StructureMap phi = with_codomain(req.phi, s.level(req.n));
    const Structure& p = *phi.dom;
    if (!p.is_chain_forest()) throw SequenceError("P must be a chain forest");
    if (!is_epimorphism(phi)) throw SequenceError("phi must be an epimorphism");
    const Structure& src = *s.level(source);
    for (const auto& t : req.targets) {
        if (t.image.empty() || !r_connected(p, t.image)) throw SequenceError("target set is not R-connected");
        if (t.branch < 0 || t.branch >= static_cast<int>(src.chains().size())) throw SequenceError("source branch out of range");
        const auto& br = src.chains()[static_cast<std::size_t>(t.branch)];
        std::set<int> jn, img;
        for (int v : br) jn.insert(s.project(req.n, source, v));
        for (int v : t.image) img.insert(phi(v));
        if (jn != img) throw SequenceError("phi[I] differs from the level trace of the source branch");
        if (br.size() == 1 && t.image.size() != 1) throw SequenceError("a singleton source needs a singleton target");
    }
    for (const auto& fx : req.fixes) {
        if (fx.x < 0 || fx.x >= src.size() || fx.y < 0 || fx.y >= p.size()) throw SequenceError("fix point out of range");
        if (phi(fx.y) != s.project(req.n, source, fx.x)) throw SequenceError("fix point y does not lie over x");
    }

    for (int m = req.n; m <= search_to; ++m) {
        std::vector<int> forced(static_cast<std::size_t>(s.level(m)->size()), -1);
        bool clash = false;
        auto force = [&](int v, int target) {
            int& slot = forced[static_cast<std::size_t>(v)];
            if (slot >= 0 && slot != target) clash = true;
            slot = target;
        };
        const auto& pm = s.projection(m, source);
        const Structure& fm = *s.level(m);
        for (const auto& t : req.targets) {
            const auto& br = src.chains()[static_cast<std::size_t>(t.branch)];
            int lo = pm[static_cast<std::size_t>(br.front())], hi = pm[static_cast<std::size_t>(br.back())];
            int imin = t.image[0], imax = t.image[0];
            for (int v : t.image) {
                if (p.less(v, imin)) imin = v;
                if (p.less(imax, v)) imax = v;
            }
            force(lo, imin);
            force(hi, imax);
            (void)fm;
        }
        for (const auto& fx : req.fixes) force(pm[static_cast<std::size_t>(fx.x)], fx.y);
        if (clash) continue;
        if (auto psi = lift_level(s, req.n, m, phi, forced)) return Extension{m, std::move(*psi)};
    }
    return std::nullopt;
}

}  // namespace fencelab
