#include "fencelab/amalgam.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fencelab {

std::vector<std::pair<int, int>> staircase(const std::vector<int>& pv, const std::vector<int>& cv) {
    if (pv.empty() || cv.empty()) throw AmalgamError("staircase on an empty chain");
    if (pv.front() != cv.front() || pv.back() != cv.back()) throw AmalgamError("staircase ends do not match");
    int nb = static_cast<int>(pv.size()), nc = static_cast<int>(cv.size());
    std::vector<std::pair<int, int>> out{{0, 0}};
    int b = 0, c = 0;
    while (b < nb - 1 || c < nc - 1) {
        if (b + 1 < nb && pv[static_cast<std::size_t>(b + 1)] == cv[static_cast<std::size_t>(c)]) {
            ++b;
        } else if (c + 1 < nc && cv[static_cast<std::size_t>(c + 1)] == pv[static_cast<std::size_t>(b)]) {
            ++c;
        } else if (b + 1 < nb && c + 1 < nc && pv[static_cast<std::size_t>(b + 1)] == cv[static_cast<std::size_t>(c + 1)]) {
            ++b, ++c;
        } else {
            throw AmalgamError("staircase stuck: maps are not chain epimorphisms onto one chain");
        }
        out.emplace_back(b, c);
    }
    return out;
}

namespace {

// elements of a set lying in one chain of a, sorted by the order
std::vector<int> sorted_chain(const Structure& a, std::vector<int> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    std::sort(elems.begin(), elems.end(), [&](int x, int y) { return a.less(x, y); });
    return elems;
}

struct Pieces {
    std::vector<std::vector<int>> to_b, to_c;  // per output chain
};

void add_chain(Pieces& out, std::set<std::vector<std::pair<int, int>>>& seen, const std::vector<int>& bseg,
               const std::vector<int>& cseg, const StructureMap& phi, const StructureMap& psi, const Structure& a) {
    std::vector<int> img;
    for (int v : bseg) img.push_back(phi(v));
    auto order = sorted_chain(a, img);
    std::map<int, int> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    std::vector<int> pv, cv;
    for (int v : bseg) pv.push_back(pos.at(phi(v)));
    for (int v : cseg) {
        auto it = pos.find(psi(v));
        if (it == pos.end()) throw AmalgamError("chain pieces have different images");
        cv.push_back(it->second);
    }
    auto steps = staircase(pv, cv);
    std::vector<std::pair<int, int>> ids;
    std::vector<int> tb, tc;
    for (auto [i, j] : steps) {
        tb.push_back(bseg[static_cast<std::size_t>(i)]);
        tc.push_back(cseg[static_cast<std::size_t>(j)]);
        ids.emplace_back(tb.back(), tc.back());
    }
    if (!seen.insert(ids).second) return;
    out.to_b.push_back(std::move(tb));
    out.to_c.push_back(std::move(tc));
}

Amalgam assemble(const Pieces& pieces, const StructureMap& phi, const StructureMap& psi) {
    std::vector<int> lengths;
    for (const auto& c : pieces.to_b) lengths.push_back(static_cast<int>(c.size()));
    auto t = share(Structure::chains_of_lengths(lengths));
    std::vector<int> f1(static_cast<std::size_t>(t->size())), f2(static_cast<std::size_t>(t->size()));
    const auto& chains = t->chains();
    for (std::size_t k = 0; k < chains.size(); ++k)
        for (std::size_t p = 0; p < chains[k].size(); ++p) {
            f1[static_cast<std::size_t>(chains[k][p])] = pieces.to_b[k][p];
            f2[static_cast<std::size_t>(chains[k][p])] = pieces.to_c[k][p];
        }
    Amalgam out{t, StructureMap{t, phi.dom, std::move(f1)}, StructureMap{t, psi.dom, std::move(f2)}};
    for (int v = 0; v < t->size(); ++v)
        if (phi(out.theta1(v)) != psi(out.theta2(v))) throw std::logic_error("amalgam square does not commute");
    if (!is_epimorphism(out.theta1) || !is_epimorphism(out.theta2)) throw std::logic_error("amalgam projection is not an epimorphism");
    return out;
}

StructureMap common_codomain(const StructureMap& phi, const StructureMap& psi) {
    if (phi.cod == psi.cod) return psi;
    if (!same_structure(*phi.cod, *psi.cod)) throw AmalgamError("phi and psi must share a codomain");
    return with_codomain(psi, phi.cod);
}

}  // namespace

Amalgam amalgamate_chains(const StructureMap& phi, const StructureMap& psi_in) {
    StructureMap psi = common_codomain(phi, psi_in);
    for (const StructureMap* m : {&phi, static_cast<const StructureMap*>(&psi)}) {
        if (!m->dom->is_chain_forest() || m->dom->chains().size() != 1) throw AmalgamError("domains must be chains");
        if (!m->cod->is_chain_forest() || m->cod->chains().size() != 1) throw AmalgamError("codomain must be a chain");
        if (!is_epimorphism(*m)) throw AmalgamError("inputs must be epimorphisms");
    }
    Pieces pieces;
    std::set<std::vector<std::pair<int, int>>> seen;
    add_chain(pieces, seen, phi.dom->chains()[0], psi.dom->chains()[0], phi, psi, *phi.cod);
    return assemble(pieces, phi, psi);
}

Amalgam amalgamate_forests(const StructureMap& phi, const StructureMap& psi_in) {
    StructureMap psi = common_codomain(phi, psi_in);
    const Structure& a = *phi.cod;
    if (!a.is_forest()) throw AmalgamError("codomain is not an H-forest; amalgamation is not available");
    if (!phi.dom->is_forest() || !psi.dom->is_forest()) throw AmalgamError("domains must be H-forests");
    if (!is_epimorphism(phi) || !is_epimorphism(psi)) throw AmalgamError("inputs must be epimorphisms");

    auto bbr = phi.dom->branches();
    auto cbr = psi.dom->branches();
    auto image_mask = [&](const std::vector<int>& br, const StructureMap& m) {
        std::vector<char> mask(static_cast<std::size_t>(a.size()), 0);
        for (int v : br) mask[static_cast<std::size_t>(m(v))] = 1;
        return mask;
    };
    std::vector<std::vector<char>> bimg, cimg;
    for (const auto& b : bbr) bimg.push_back(image_mask(b, phi));
    for (const auto& c : cbr) cimg.push_back(image_mask(c, psi));
    auto contains = [&](const std::vector<char>& big, const std::vector<char>& small) {
        for (std::size_t i = 0; i < small.size(); ++i)
            if (small[i] && !big[i]) return false;
        return true;
    };
    auto restrict_to = [](const std::vector<int>& br, const StructureMap& m, const std::vector<char>& mask) {
        std::vector<int> out;
        for (int v : br)
            if (mask[static_cast<std::size_t>(m(v))]) out.push_back(v);
        return out;
    };

    Pieces pieces;
    std::set<std::vector<std::pair<int, int>>> seen;
    for (std::size_t p = 0; p < bbr.size(); ++p) {
        std::size_t d = 0;
        while (d < cbr.size() && !contains(cimg[d], bimg[p])) ++d;
        if (d == cbr.size()) throw std::logic_error("no branch of C covers a branch image of B");
        add_chain(pieces, seen, bbr[p], restrict_to(cbr[d], psi, bimg[p]), phi, psi, a);
    }
    for (std::size_t q = 0; q < cbr.size(); ++q) {
        std::size_t d = 0;
        while (d < bbr.size() && !contains(bimg[d], cimg[q])) ++d;
        if (d == bbr.size()) throw std::logic_error("no branch of B covers a branch image of C");
        add_chain(pieces, seen, restrict_to(bbr[d], phi, cimg[q]), cbr[q], phi, psi, a);
    }
    return assemble(pieces, phi, psi);
}

Amalgam joint_projection(const StructurePtr& a, const StructurePtr& b) {
    auto pt = share(point());
    StructureMap to_a{a, pt, std::vector<int>(static_cast<std::size_t>(a->size()), 0)};
    StructureMap to_b{b, pt, std::vector<int>(static_cast<std::size_t>(b->size()), 0)};
    return amalgamate_forests(to_a, to_b);
}

AmalgamSearch search_amalgam(const StructureMap& phi, const StructureMap& psi_in, int max_size) {
    StructureMap psi = common_codomain(phi, psi_in);
    const Structure& b = *phi.dom;
    const Structure& c = *psi.dom;
    if (!b.is_forest() || !c.is_forest()) throw AmalgamError("search needs forest domains");
    auto bbr = b.branches();
    auto cbr = c.branches();
    int nbits = static_cast<int>(bbr.size() + cbr.size());
    if (nbits > 24) throw AmalgamError("search supports at most 24 target branches");
    auto index_of = [](const std::vector<std::vector<int>>& brs) {
        std::map<std::vector<int>, int> out;
        for (std::size_t i = 0; i < brs.size(); ++i) {
            auto s = brs[i];
            std::sort(s.begin(), s.end());
            out[s] = static_cast<int>(i);
        }
        return out;
    };
    auto bidx = index_of(bbr), cidx = index_of(cbr);
    auto cover_of = [](const std::map<std::vector<int>, int>& idx, std::vector<int> img) {
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        auto it = idx.find(img);
        return it == idx.end() ? -1 : it->second;
    };

    struct Option {
        std::vector<int> f, g;
        std::uint32_t mask;
    };
    std::map<int, std::vector<Option>> options;
    auto options_for = [&](int len) -> const std::vector<Option>& {
        auto it = options.find(len);
        if (it != options.end()) return it->second;
        std::vector<Option> opts;
        auto fs = chain_maps_into(len, b);
        auto gs = chain_maps_into(len, c);
        for (const auto& f : fs)
            for (const auto& g : gs) {
                bool ok = true;
                for (int i = 0; i < len && ok; ++i) ok = phi(f[static_cast<std::size_t>(i)]) == psi(g[static_cast<std::size_t>(i)]);
                if (!ok) continue;
                std::uint32_t mask = 0;
                int cb = cover_of(bidx, f), cc = cover_of(cidx, g);
                if (cb >= 0) mask |= 1u << cb;
                if (cc >= 0) mask |= 1u << (static_cast<int>(bbr.size()) + cc);
                opts.push_back({f, g, mask});
            }
        return options[len] = std::move(opts);
    };

    const std::uint32_t full = nbits == 32 ? ~0u : ((1u << nbits) - 1);
    const std::size_t states = std::size_t{1} << nbits;
    AmalgamSearch out;
    out.bound = max_size;
    for (const auto& shape : chainforest_shapes(max_size)) {
        ++out.shapes_tried;
        std::size_t k = shape.size();
        // suffix[i]: masks reachable by chains i..k-1
        std::vector<std::vector<char>> suffix(k + 1, std::vector<char>(states, 0));
        suffix[k][0] = 1;
        bool dead = false;
        for (std::size_t i = k; i-- > 0;) {
            std::set<std::uint32_t> contribs;
            for (const auto& o : options_for(shape[i])) contribs.insert(o.mask);
            if (contribs.empty()) {
                dead = true;
                break;
            }
            for (std::size_t m = 0; m < states; ++m)
                if (suffix[i + 1][m])
                    for (auto cm : contribs) suffix[i][m | cm] = 1;
        }
        if (dead || !suffix[0][full]) continue;

        auto t = share(Structure::chains_of_lengths(shape));
        std::vector<int> f1(static_cast<std::size_t>(t->size())), f2(static_cast<std::size_t>(t->size()));
        std::uint32_t cur = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const Option* pick = nullptr;
            for (const auto& o : options_for(shape[i])) {
                std::uint32_t m = cur | o.mask;
                bool can = false;
                for (std::size_t s = 0; s < states && !can; ++s)
                    if (suffix[i + 1][s] && (m | static_cast<std::uint32_t>(s)) == full) can = true;
                if (can) {
                    pick = &o;
                    break;
                }
            }
            if (!pick) throw std::logic_error("amalgam search lost its witness");
            cur |= pick->mask;
            const auto& tc = t->chains()[i];
            for (std::size_t p = 0; p < tc.size(); ++p) {
                f1[static_cast<std::size_t>(tc[p])] = pick->f[p];
                f2[static_cast<std::size_t>(tc[p])] = pick->g[p];
            }
        }
        Amalgam w{t, StructureMap{t, phi.dom, std::move(f1)}, StructureMap{t, psi.dom, std::move(f2)}};
        for (int v = 0; v < t->size(); ++v)
            if (phi(w.theta1(v)) != psi(w.theta2(v))) throw std::logic_error("search witness does not commute");
        if (!is_epimorphism(w.theta1) || !is_epimorphism(w.theta2)) throw std::logic_error("search witness is not an epimorphism");
        out.witness = std::move(w);
        return out;
    }
    return out;
}

}  // namespace fencelab
