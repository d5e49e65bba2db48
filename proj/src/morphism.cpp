#include "fencelab/morphism.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace fencelab {

StructureMap make_map(StructurePtr dom, StructurePtr cod, std::vector<int> f) {
    if (!dom || !cod) throw MapError("map needs both structures");
    if (static_cast<int>(f.size()) != dom->size()) throw MapError("map is not total on its domain");
    for (int v : f)
        if (v < 0 || v >= cod->size()) throw MapError("map value outside the codomain");
    return StructureMap{std::move(dom), std::move(cod), std::move(f)};
}

StructureMap map_from_ids(StructurePtr dom, StructurePtr cod, const std::map<Id, Id>& assignment) {
    std::vector<int> f(static_cast<std::size_t>(dom->size()), -1);
    for (const auto& [a, b] : assignment) {
        auto ia = dom->find(a);
        if (!ia) throw MapError("map key is not a domain element: " + a);
        auto ib = cod->find(b);
        if (!ib) throw MapError("map value is not a codomain element: " + b);
        f[static_cast<std::size_t>(*ia)] = *ib;
    }
    for (int i = 0; i < dom->size(); ++i)
        if (f[static_cast<std::size_t>(i)] < 0) throw MapError("map is undefined on " + dom->id(i));
    return make_map(std::move(dom), std::move(cod), std::move(f));
}

std::map<Id, Id> map_to_ids(const StructureMap& m) {
    std::map<Id, Id> out;
    for (int i = 0; i < m.dom->size(); ++i) out[m.dom->id(i)] = m.cod->id(m(i));
    return out;
}

StructureMap identity_map(StructurePtr s) {
    std::vector<int> f(static_cast<std::size_t>(s->size()));
    for (int i = 0; i < s->size(); ++i) f[static_cast<std::size_t>(i)] = i;
    return StructureMap{s, s, std::move(f)};
}

StructureMap compose(const StructureMap& g, const StructureMap& f) {
    if (f.cod != g.dom && !same_structure(*f.cod, *g.dom)) throw MapError("compose: codomain and domain differ");
    std::vector<int> h(f.f.size());
    if (f.cod == g.dom) {
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = g(f.f[i]);
    } else {
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = g(g.dom->index(f.cod->id(f.f[i])));
    }
    return StructureMap{f.dom, g.cod, std::move(h)};
}

StructureMap with_codomain(const StructureMap& m, StructurePtr cod) {
    if (m.cod == cod) return m;
    if (!same_structure(*m.cod, *cod)) throw MapError("codomains differ");
    std::vector<int> f(m.f.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = cod->index(m.cod->id(m.f[i]));
    return StructureMap{m.dom, std::move(cod), std::move(f)};
}

bool is_lr_preserving(const StructureMap& m) {
    const Structure& cod = *m.cod;
    for (auto [a, b] : m.dom->covers()) {
        int x = m(a), y = m(b);
        if (x != y && !cod.is_cover(x, y)) return false;
    }
    return true;
}

bool is_surjective(const StructureMap& m) {
    std::vector<char> hit(static_cast<std::size_t>(m.cod->size()), 0);
    for (int v : m.f) hit[static_cast<std::size_t>(v)] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

namespace {

inline std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

template <class F>
void for_each_leq_pair(const Structure& s, F&& fn) {
    if (s.is_chain_forest()) {
        for (const auto& c : s.chains())
            for (std::size_t i = 0; i < c.size(); ++i)
                for (std::size_t j = i; j < c.size(); ++j) fn(c[i], c[j]);
        return;
    }
    for (int a = 0; a < s.size(); ++a)
        for (int b = 0; b < s.size(); ++b)
            if (s.leq(a, b)) fn(a, b);
}

}  // namespace

bool is_epimorphism_definitional(const StructureMap& m) {
    if (!is_surjective(m)) return false;
    const Structure& dom = *m.dom;
    const Structure& cod = *m.cod;

    // R: the image of the symmetric cover relation plus the diagonal
    std::unordered_set<std::uint64_t> rimg;
    for (auto [a, b] : dom.covers()) {
        int x = m(a), y = m(b);
        if (!cod.r(x, y)) return false;
        rimg.insert(key(x, y));
        rimg.insert(key(y, x));
    }
    for (auto [x, y] : cod.covers())
        if (!rimg.count(key(x, y)) || !rimg.count(key(y, x))) return false;

    std::unordered_set<std::uint64_t> limg;
    bool ok = true;
    for_each_leq_pair(dom, [&](int a, int b) {
        int x = m(a), y = m(b);
        if (!cod.leq(x, y)) ok = false;
        limg.insert(key(x, y));
    });
    if (!ok) return false;
    for_each_leq_pair(cod, [&](int x, int y) {
        if (!limg.count(key(x, y))) ok = false;
    });
    return ok;
}

bool is_epimorphism_branchwise(const StructureMap& m) {
    if (!m.dom->is_forest() || !m.cod->is_forest()) throw MapError("branch criterion needs forests");
    if (!is_lr_preserving(m)) return false;
    std::set<std::vector<int>> images;
    for (const auto& b : m.dom->branches()) {
        std::vector<int> img;
        for (int v : b) img.push_back(m(v));
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        images.insert(std::move(img));
    }
    for (auto b : m.cod->branches()) {
        std::sort(b.begin(), b.end());
        if (!images.count(b)) return false;
    }
    return true;
}

bool is_epimorphism(const StructureMap& m) {
    bool def = is_epimorphism_definitional(m);
    if (m.dom->is_forest() && m.cod->is_forest()) {
        bool br = is_epimorphism_branchwise(m);
        if (br != def) throw std::logic_error("epimorphism checks disagree");
    }
    return def;
}

std::vector<std::vector<int>> chain_maps_into(int length, const Structure& cod) {
    std::vector<std::vector<int>> out;
    std::set<std::vector<int>> seen;
    std::vector<int> steps(static_cast<std::size_t>(length));
    for (const auto& br : cod.branches()) {
        int k = static_cast<int>(br.size());
        for (int s = 0; s < k; ++s)
            for (int e = s; e < k && e - s <= length - 1; ++e) {
                // bottom-up: stay before step
                std::vector<int> cur;
                auto rec = [&](auto&& self, int pos, int value) -> void {
                    cur.push_back(br[static_cast<std::size_t>(value)]);
                    if (pos + 1 == length) {
                        if (value == e && seen.insert(cur).second) out.push_back(cur);
                    } else {
                        int need = e - value, left = length - 1 - pos;
                        if (need < left) self(self, pos + 1, value);
                        if (need > 0) self(self, pos + 1, value + 1);
                    }
                    cur.pop_back();
                };
                rec(rec, 0, s);
            }
    }
    return out;
}

void for_each_epimorphism(StructurePtr dom, StructurePtr cod, const std::function<bool(const StructureMap&)>& visit) {
    if (!dom->is_chain_forest()) throw MapError("epimorphism enumeration needs a chain forest domain");
    if (!cod->is_forest()) throw MapError("epimorphism enumeration needs a forest codomain");
    const auto& chains = dom->chains();
    auto cod_branches = cod->branches();
    std::map<std::vector<int>, int> branch_index;
    for (std::size_t i = 0; i < cod_branches.size(); ++i) {
        auto b = cod_branches[i];
        std::sort(b.begin(), b.end());
        branch_index[b] = static_cast<int>(i);
    }
    struct Option {
        std::vector<int> values;
        int covers;
    };
    std::map<int, std::vector<Option>> by_length;
    for (const auto& c : chains) {
        int len = static_cast<int>(c.size());
        if (by_length.count(len)) continue;
        std::vector<Option> opts;
        for (auto& v : chain_maps_into(len, *cod)) {
            auto img = v;
            std::sort(img.begin(), img.end());
            img.erase(std::unique(img.begin(), img.end()), img.end());
            auto it = branch_index.find(img);
            opts.push_back({std::move(v), it == branch_index.end() ? -1 : it->second});
        }
        by_length[len] = std::move(opts);
    }
    int nb = static_cast<int>(cod_branches.size());
    std::vector<int> cover_count(static_cast<std::size_t>(nb), 0);
    int uncovered = nb;
    std::vector<int> f(static_cast<std::size_t>(dom->size()), -1);
    bool stop = false;
    auto rec = [&](auto&& self, std::size_t ci) -> void {
        if (stop) return;
        if (uncovered > static_cast<int>(chains.size() - ci)) return;
        if (ci == chains.size()) {
            StructureMap m{dom, cod, f};
            if (!is_epimorphism(m)) throw std::logic_error("enumerated map failed the epimorphism check");
            if (!visit(m)) stop = true;
            return;
        }
        const auto& c = chains[ci];
        for (const auto& opt : by_length.at(static_cast<int>(c.size()))) {
            for (std::size_t p = 0; p < c.size(); ++p) f[static_cast<std::size_t>(c[p])] = opt.values[p];
            if (opt.covers >= 0 && cover_count[static_cast<std::size_t>(opt.covers)]++ == 0) --uncovered;
            self(self, ci + 1);
            if (opt.covers >= 0 && --cover_count[static_cast<std::size_t>(opt.covers)] == 0) ++uncovered;
            if (stop) return;
        }
    };
    rec(rec, 0);
}

std::vector<StructureMap> enumerate_epimorphisms(StructurePtr dom, StructurePtr cod) {
    std::vector<StructureMap> out;
    for_each_epimorphism(dom, cod, [&](const StructureMap& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

namespace {

struct Fiber {
    int lo = -1, hi = -1;
    int size() const { return lo < 0 ? 0 : hi - lo + 1; }
};

// positions of a single chain's elements in the chain order of its codomain
std::vector<int> positions_along(const StructureMap& m) {
    const Structure& dom = *m.dom;
    const Structure& cod = *m.cod;
    if (!dom.is_chain_forest() || dom.chains().size() != 1) throw ChainMapError("chain map builder needs chain domains");
    if (!cod.is_chain_forest() || cod.chains().size() != 1) throw ChainMapError("chain map builder needs a chain codomain");
    std::vector<int> out;
    for (int v : dom.chains()[0]) out.push_back(cod.position(m(v)));
    return out;
}

std::vector<Fiber> fibers(const std::vector<int>& pos, int n) {
    std::vector<Fiber> fs(static_cast<std::size_t>(n));
    for (int i = 0; i < static_cast<int>(pos.size()); ++i) {
        Fiber& f = fs[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
        if (f.lo < 0) f.lo = i;
        f.hi = i;
    }
    return fs;
}

// monotone map of [slo, shi] onto [tlo, thi]; earliest targets take the extras
void spread(std::vector<int>& out, int slo, int shi, int tlo, int thi) {
    int s = shi - slo + 1, t = thi - tlo + 1;
    int q = s / t, rem = s % t;
    int src = slo;
    for (int k = 0; k < t; ++k) {
        int take = q + (k < rem ? 1 : 0);
        for (int j = 0; j < take; ++j) out[static_cast<std::size_t>(src++)] = tlo + k;
    }
}

}  // namespace

StructureMap build_chain_map(const StructureMap& phi, const StructureMap& psi, const ChainMapOptions& options) {
    if (phi.cod != psi.cod && !same_structure(*phi.cod, *psi.cod)) throw ChainMapError("phi and psi must share a codomain");
    if (!is_lr_preserving(phi) || !is_lr_preserving(psi)) throw ChainMapError("phi and psi must be L_R-preserving");
    std::vector<int> pb = positions_along(phi);
    std::vector<int> pc = positions_along(psi);
    if (phi.cod != psi.cod) {
        pc.clear();
        for (int v : psi.dom->chains()[0]) pc.push_back(phi.cod->position(phi.cod->index(psi.cod->id(psi(v)))));
    }
    int na = phi.cod->size();
    auto fb = fibers(pb, na);
    auto fc = fibers(pc, na);
    for (int a = 0; a < na; ++a)
        if (fc[static_cast<std::size_t>(a)].size() > 0 && fb[static_cast<std::size_t>(a)].size() == 0)
            throw ChainMapError("psi[B'] is not contained in phi[B]");
    int r = 0;
    for (const auto& f : fb) r = std::max(r, f.size());
    int a0 = pc.front(), a1 = pc.back();
    const auto& achain = phi.cod->chains()[0];
    auto aname = [&](int a) { return phi.cod->id(achain[static_cast<std::size_t>(a)]); };

    for (int a = a0 + 1; a < a1; ++a) {
        int k = fc[static_cast<std::size_t>(a)].size();
        if (k < r)
            throw ChainMapError("interior fiber bound |psi^-1(a)| >= r fails at a=" + aname(a) + ": " + std::to_string(k) +
                                " < " + std::to_string(r));
    }

    bool even_ends = false;
    if (options.surjective) {
        bool same_image = true;
        for (int a = 0; a < na; ++a)
            if ((fb[static_cast<std::size_t>(a)].size() > 0) != (fc[static_cast<std::size_t>(a)].size() > 0)) same_image = false;
        if (!same_image) throw ChainMapError("surjectivity needs psi[B'] = phi[B]");
        int c0 = fc[static_cast<std::size_t>(a0)].size(), c1 = fc[static_cast<std::size_t>(a1)].size();
        int b0 = fb[static_cast<std::size_t>(a0)].size(), b1 = fb[static_cast<std::size_t>(a1)].size();
        if (c0 >= r && c1 >= r) {
            even_ends = true;
        } else if (!(b0 == 1 && b1 == 1)) {
            throw ChainMapError("surjectivity bound fails: end fibers of psi have sizes " + std::to_string(c0) + "," +
                                std::to_string(c1) + " (need >= r=" + std::to_string(r) +
                                ") and end fibers of phi have sizes " + std::to_string(b0) + "," + std::to_string(b1) +
                                " (need 1,1)");
        }
    }

    int fix_a = -1, fix_b = -1, fix_c = -1;
    if (options.fixpoint) {
        auto [b, bp] = *options.fixpoint;
        if (b < 0 || b >= phi.dom->size() || bp < 0 || bp >= psi.dom->size()) throw ChainMapError("fixpoint out of range");
        fix_b = phi.dom->position(b);
        fix_c = psi.dom->position(bp);
        fix_a = pb[static_cast<std::size_t>(fix_b)];
        if (pc[static_cast<std::size_t>(fix_c)] != fix_a) throw ChainMapError("fixpoint: phi(b) and psi(b') differ");
        const Fiber& f = fc[static_cast<std::size_t>(fix_a)];
        int below = fix_c - f.lo, above = f.hi - fix_c;
        if (std::min(below, above) < r - 1)
            throw ChainMapError("fixpoint room bound fails: " + std::to_string(below) + " below and " +
                                std::to_string(above) + " above b', need r-1=" + std::to_string(r - 1) + " on each side");
    }

    std::vector<int> theta(pc.size(), -1);
    for (int a = a0; a <= a1; ++a) {
        const Fiber& c = fc[static_cast<std::size_t>(a)];
        const Fiber& b = fb[static_cast<std::size_t>(a)];
        if (a == fix_a) {
            spread(theta, c.lo, fix_c, b.lo, fix_b);
            spread(theta, fix_c, c.hi, fix_b, b.hi);
        } else if ((a != a0 && a != a1) || even_ends) {
            spread(theta, c.lo, c.hi, b.lo, b.hi);
        } else if (a == a0) {
            for (int i = c.lo; i <= c.hi; ++i) theta[static_cast<std::size_t>(i)] = b.hi;
        } else {
            for (int i = c.lo; i <= c.hi; ++i) theta[static_cast<std::size_t>(i)] = b.lo;
        }
    }

    const auto& bchain = phi.dom->chains()[0];
    const auto& cchain = psi.dom->chains()[0];
    std::vector<int> f(static_cast<std::size_t>(psi.dom->size()));
    for (std::size_t i = 0; i < cchain.size(); ++i)
        f[static_cast<std::size_t>(cchain[i])] = bchain[static_cast<std::size_t>(theta[i])];
    StructureMap out{psi.dom, phi.dom, std::move(f)};
    if (!is_lr_preserving(out)) throw std::logic_error("chain map builder produced a non preserving map");
    for (int v = 0; v < psi.dom->size(); ++v)
        if (phi.cod->id(phi(out(v))) != psi.cod->id(psi(v))) throw std::logic_error("chain map builder broke commutation");
    return out;
}

Unfolding unfold_to_chainforest(const StructurePtr& p) {
    auto brs = p->branches();
    int width = 1;
    for (int t = static_cast<int>(brs.size()) - 1; t >= 10; t /= 10) ++width;
    std::vector<std::vector<Id>> chains;
    std::vector<int> back;
    for (std::size_t k = 0; k < brs.size(); ++k) {
        std::string tag = std::to_string(k);
        tag = "b" + std::string(static_cast<std::size_t>(width) - tag.size(), '0') + tag + ":";
        std::vector<Id> c;
        for (int v : brs[k]) {
            c.push_back(tag + p->id(v));
            back.push_back(v);
        }
        chains.push_back(std::move(c));
    }
    auto forest = share(Structure::from_chains(chains));
    return {forest, StructureMap{forest, p, back}};
}

}  // namespace fencelab
