#include "fencelab/fence.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fencelab {

Realization realize_cells(const Approximation& a) {
    Realization r;
    for (const auto& cx : a.complexes) {
        std::vector<RealizedCell> cells;
        for (const auto& c : cx.cells) {
            const Piece& u = cx.pieces[static_cast<std::size_t>(c.piece)];
            cells.push_back({c.id, Rect{u.x0, u.x1, cx.interval_lo(c.interval), cx.interval_hi(c.interval)}});
        }
        r.levels.push_back(std::move(cells));
    }
    return r;
}

namespace {

long long slots_for(std::size_t count) {
    long long s = 1;
    while (static_cast<std::size_t>(s) < count) s *= 2;
    return s;
}

}  // namespace

Realization realize_abstract(const ProjectiveSequence& s) {
    Realization r;
    std::vector<Rect> prev;  // by element index
    std::vector<std::pair<Rational, Rational>> prev_x;  // by chain index
    for (int n = 0; n < s.length(); ++n) {
        const Structure& lv = *s.level(n);
        const auto& chains = lv.chains();
        std::vector<std::pair<Rational, Rational>> xs(chains.size());
        // children of each parent branch, in chain order
        std::vector<std::vector<std::size_t>> kids(n == 0 ? 1 : s.level(n - 1)->chains().size());
        for (std::size_t k = 0; k < chains.size(); ++k) {
            std::size_t parent = n == 0 ? 0 : static_cast<std::size_t>(s.level(n - 1)->chain_of(s.bonds()[static_cast<std::size_t>(n - 1)](chains[k][0])));
            kids[parent].push_back(k);
        }
        for (std::size_t p = 0; p < kids.size(); ++p) {
            Rational x0 = n == 0 ? Rational(0) : prev_x[p].first;
            Rational x1 = n == 0 ? Rational(1) : prev_x[p].second;
            Rational w = (x1 - x0) / slots_for(kids[p].size());
            for (std::size_t i = 0; i < kids[p].size(); ++i)
                xs[kids[p][i]] = {x0 + w * static_cast<long long>(i), x0 + w * static_cast<long long>(i + 1)};
        }
        std::vector<Rect> cur(static_cast<std::size_t>(lv.size()));
        for (std::size_t k = 0; k < chains.size(); ++k) {
            const auto& ch = chains[k];
            std::size_t i = 0;
            while (i < ch.size()) {
                int img = n == 0 ? -1 : s.bonds()[static_cast<std::size_t>(n - 1)](ch[i]);
                std::size_t j = i;
                if (n == 0)
                    j = ch.size();
                else
                    while (j < ch.size() && s.bonds()[static_cast<std::size_t>(n - 1)](ch[j]) == img) ++j;
                Rational y0 = n == 0 ? Rational(0) : prev[static_cast<std::size_t>(img)].y0;
                Rational y1 = n == 0 ? Rational(1) : prev[static_cast<std::size_t>(img)].y1;
                Rational h = (y1 - y0) / static_cast<long long>(j - i);
                for (std::size_t t = i; t < j; ++t)
                    cur[static_cast<std::size_t>(ch[t])] = Rect{xs[k].first, xs[k].second, y0 + h * static_cast<long long>(t - i),
                                                                y0 + h * static_cast<long long>(t - i + 1)};
                i = j;
            }
        }
        std::vector<RealizedCell> cells;
        for (const auto& ch : chains)
            for (int v : ch) cells.push_back({lv.id(v), cur[static_cast<std::size_t>(v)]});
        r.levels.push_back(std::move(cells));
        prev = std::move(cur);
        prev_x = std::move(xs);
    }
    return r;
}

Rational mesh(const Realization& r, int level) {
    if (level < 0 || level >= static_cast<int>(r.levels.size())) throw FenceError("level out of range");
    Rational out = 0;
    for (const auto& c : r.levels[static_cast<std::size_t>(level)])
        out = std::max(out, std::max(Rational(c.rect.x1 - c.rect.x0), Rational(c.rect.y1 - c.rect.y0)));
    return out;
}

bool is_regular_quasi_partition(const std::vector<RealizedCell>& cells) {
    for (const auto& c : cells)
        if (!(c.rect.x0 < c.rect.x1) || !(c.rect.y0 < c.rect.y1)) return false;
    // rectangles sharing an x-interval only need their y-intervals compared
    std::map<std::pair<Rational, Rational>, std::vector<const Rect*>> columns;
    for (const auto& c : cells) columns[{c.rect.x0, c.rect.x1}].push_back(&c.rect);
    for (auto& [x, rects] : columns) {
        std::sort(rects.begin(), rects.end(), [](const Rect* a, const Rect* b) { return a->y0 < b->y0; });
        for (std::size_t i = 1; i < rects.size(); ++i)
            if (rects[i]->y0 < rects[i - 1]->y1) return false;
    }
    for (auto it = columns.begin(); it != columns.end(); ++it)
        for (auto jt = std::next(it); jt != columns.end(); ++jt) {
            if (jt->first.first >= it->first.second) break;
            for (const Rect* a : it->second)
                for (const Rect* b : jt->second)
                    if (b->y0 < a->y1 && a->y0 < b->y1) return false;
        }
    return true;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const Realization& r, int level, const SvgStyle& style) {
    if (level < 0 || level >= static_cast<int>(r.levels.size())) throw FenceError("level out of range");
    auto dec = [](const Rational& q) { return format_decimal(q, 9); };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"800\" height=\"800\">\n";
    os << "<g fill=\"" << escape_xml(style.fill) << "\" stroke=\"" << escape_xml(style.stroke) << "\" stroke-width=\""
       << escape_xml(style.stroke_width) << "\" data-level=\"" << level << "\">\n";
    for (const auto& c : r.levels[static_cast<std::size_t>(level)]) {
        // y grows upwards in the layout
        os << "<rect data-id=\"" << escape_xml(c.id) << "\" x=\"" << dec(c.rect.x0) << "\" y=\"" << dec(1 - c.rect.y1)
           << "\" width=\"" << dec(c.rect.x1 - c.rect.x0) << "\" height=\"" << dec(c.rect.y1 - c.rect.y0) << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace fencelab
