#include "fencelab/amalgam.hpp"
#include "fencelab/sequence.hpp"

#include <map>
#include <set>
#include <tuple>

namespace fencelab {

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::Extension: return "extension";
        case TaskKind::Refine: return "refine";
        case TaskKind::Idle: return "idle";
    }
    return "?";
}

StructureMap refine_gadget(const StructurePtr& f) {
    if (!f->is_chain_forest()) throw SequenceError("gadget needs a chain forest");
    std::vector<int> lengths, fold;
    for (const auto& c : f->chains())
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i; j < c.size(); ++j) {
                lengths.push_back(static_cast<int>(2 * (j - i + 1)));
                for (std::size_t k = i; k <= j; ++k) {
                    fold.push_back(c[k]);
                    fold.push_back(c[k]);
                }
            }
    auto q = share(Structure::chains_of_lengths(lengths));
    return StructureMap{q, f, std::move(fold)};
}

namespace {

int gadget_size(const Structure& f) {
    long long total = 0;
    for (const auto& c : f.chains()) {
        long long L = static_cast<long long>(c.size());
        total += L * (L + 1) * (L + 2) / 3;
    }
    return total > 1'000'000'000 ? 1'000'000'000 : static_cast<int>(total);
}

bool level_settled(const ProjectiveSequence& s, int n) {
    auto fin = fineness_check(s, n);
    for (const auto& e : fin.entries)
        if (e.level == n && !e.witness) return false;
    auto irr = irreducibility_check(s, n);
    for (const auto& e : irr.entries)
        if (e.level == n && !e.witness) return false;
    auto arc = arc_check(s, n);
    for (const auto& e : arc.entries)
        if (e.level == n && !e.witness) return false;
    return true;
}

std::string shape_text(const Structure& q) {
    std::string out = "[";
    for (std::size_t i = 0; i < q.chains().size(); ++i) {
        if (i) out += ",";
        out += std::to_string(q.chains()[i].size());
    }
    return out + "]";
}

struct ExtTask {
    StructurePtr q;
    StructureMap theta;
};

}  // namespace

Generated generate_fundamental(const GeneratorOptions& opt) {
    if (opt.depth < 1) throw SequenceError("depth must be at least 1");
    Generated g;
    g.seq = ProjectiveSequence(share(point()));
    auto& seq = g.seq;

    std::map<std::tuple<int, int, int>, ExtTask> ext;
    std::set<int> refine;
    auto enqueue = [&](int n) {
        refine.insert(n);
        const auto& f = seq.level(n);
        if (f->size() > opt.max_size) return;
        int idx = 0;
        for (const auto& shape : chainforest_shapes(opt.max_size)) {
            int total = 0;
            for (int l : shape) total += l;
            if (total < f->size()) continue;
            auto q = share(Structure::chains_of_lengths(shape));
            for (auto& th : enumerate_epimorphisms(q, f)) ext.emplace(std::make_tuple(total, n, idx++), ExtTask{q, std::move(th)});
        }
    };
    enqueue(0);

    auto discharge = [&](TaskRecord rec, const StructureMap& theta) {
        int top = seq.top();
        Amalgam am = amalgamate_forests(theta, seq.bond(rec.source, top));
        seq.push(am.t, am.theta2);
        StructureMap psi{seq.level(seq.top()), am.theta1.cod, am.theta1.f};
        const auto& proj = seq.projection(rec.source, seq.top());
        for (int v = 0; v < psi.dom->size(); ++v)
            if (theta(psi(v)) != proj[static_cast<std::size_t>(v)]) throw std::logic_error("task witness does not commute");
        if (!is_epimorphism(psi)) throw std::logic_error("task witness is not an epimorphism");
        rec.at = top;
        rec.status = "discharged";
        rec.witness_level = seq.top();
        rec.psi = std::move(psi);
        g.log.push_back(std::move(rec));
        enqueue(seq.top());
    };

    // returns true when a level was appended
    auto run_extension = [&]() {
        while (!ext.empty()) {
            auto it = ext.begin();
            auto [size, n, idx] = it->first;
            ExtTask task = std::move(it->second);
            ext.erase(it);
            TaskRecord rec;
            rec.kind = TaskKind::Extension;
            rec.source = n;
            rec.detail = "Q" + shape_text(*task.q) + " #" + std::to_string(idx);
            rec.q = task.q;
            rec.theta = task.theta;
            if (auto w = extension_witness(seq, n, task.theta, seq.top())) {
                rec.at = seq.top();
                rec.status = "satisfied at " + std::to_string(w->m);
                rec.witness_level = w->m;
                rec.psi = std::move(w->psi);
                g.log.push_back(std::move(rec));
                continue;
            }
            discharge(std::move(rec), task.theta);
            return true;
        }
        return false;
    };

    auto run_refine = [&]() {
        while (!refine.empty()) {
            int n = *refine.rbegin();
            refine.erase(n);
            TaskRecord rec;
            rec.kind = TaskKind::Refine;
            rec.source = n;
            rec.at = seq.top();
            int size = gadget_size(*seq.level(n));
            rec.detail = "doubled intervals of level " + std::to_string(n) + ", |Q|=" + std::to_string(size);
            if (level_settled(seq, n)) {
                rec.status = "satisfied";
                g.log.push_back(std::move(rec));
                continue;
            }
            if (size > opt.gadget_cap) {
                rec.status = "deferred";
                g.log.push_back(std::move(rec));
                continue;
            }
            StructureMap theta = refine_gadget(seq.level(n));
            rec.q = theta.dom;
            rec.theta = theta;
            discharge(std::move(rec), theta);
            return true;
        }
        return false;
    };

    int turn = 0;
    while (seq.top() < opt.depth) {
        bool done = false;
        for (int k = 0; k < 2 && !done; ++k) {
            int which = (turn + k) % 2;
            done = which == 0 ? run_extension() : run_refine();
            if (done) turn = which + 1;
        }
        if (!done) {
            TaskRecord rec;
            rec.kind = TaskKind::Idle;
            rec.source = seq.top();
            rec.detail = "identity copy of the top level";
            rec.q = seq.level(seq.top());
            rec.theta = identity_map(rec.q);
            StructureMap theta = *rec.theta;
            discharge(std::move(rec), theta);
        }
    }
    return g;
}

}  // namespace fencelab
