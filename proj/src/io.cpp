#include "fencelab/io.hpp"

#include <fstream>
#include <sstream>

namespace fencelab {

namespace fs = std::filesystem;

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::vector<Id> id_list(const Json& j) {
    if (!j.is_array()) throw FormatError("expected an array of ids");
    std::vector<Id> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw FormatError("ids must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::string text_of(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw FormatError("expected a rational as a \"p/q\" string");
}

Rational rational_of(const Json& j) {
    try {
        return parse_rational(text_of(j));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

}  // namespace

RawStructure raw_from_json(const Json& j) {
    if (!j.is_object()) throw FormatError("structure must be an object");
    RawStructure raw;
    if (j.contains("chains")) {
        std::vector<std::vector<Id>> chains;
        for (const auto& c : j.at("chains")) chains.push_back(id_list(c));
        raw.chains = chains;
        for (const auto& c : chains)
            for (std::size_t i = 0; i < c.size(); ++i) {
                raw.elements.push_back(c[i]);
                if (i + 1 < c.size()) raw.covers.emplace_back(c[i], c[i + 1]);
            }
        return raw;
    }
    raw.elements = id_list(field(j, "elements"));
    const Json& covers = field(j, "covers");
    if (!covers.is_array()) throw FormatError("covers must be an array");
    for (const auto& c : covers) {
        auto pair = id_list(c);
        if (pair.size() != 2) throw FormatError("each cover is a pair [a,b]");
        raw.covers.emplace_back(pair[0], pair[1]);
    }
    return raw;
}

Structure structure_from_json(const Json& j) {
    RawStructure raw = raw_from_json(j);
    Structure s = raw.chains ? Structure::from_chains(*raw.chains) : Structure::from_raw(raw);
    if (j.contains("kind")) {
        std::string k = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
        bool ok = (k == "hpo") || (k == "hforest" && s.is_forest()) || (k == "f0" && s.is_chain_forest());
        if (!ok) throw FormatError("declared kind \"" + k + "\" does not match the structure (" + kind_name(s.kind()) + ")");
    }
    return s;
}

Json structure_to_json(const Structure& s) {
    RawStructure raw = s.to_raw();
    Json j;
    j["kind"] = kind_name(s.kind());
    if (raw.chains) {
        j["chains"] = *raw.chains;
        return j;
    }
    j["elements"] = raw.elements;
    Json covers = Json::array();
    for (const auto& [a, b] : raw.covers) covers.push_back({a, b});
    j["covers"] = covers;
    return j;
}

StructurePtr load_structure(const fs::path& path) { return share(structure_from_json(read_json_file(path))); }

namespace {

StructurePtr side(const Json& j, const char* key, const fs::path& base, StructurePtr fallback) {
    if (!j.contains(key)) {
        if (fallback) return fallback;
        throw FormatError(std::string("map is missing \"") + key + "\"");
    }
    const Json& v = j.at(key);
    if (v.is_string()) return load_structure(base / v.get<std::string>());
    auto s = share(structure_from_json(v));
    if (fallback && same_structure(*s, *fallback)) return fallback;
    return s;
}

}  // namespace

StructureMap map_from_json(const Json& j, const fs::path& base, StructurePtr dom_fallback, StructurePtr cod_fallback) {
    if (!j.is_object()) throw FormatError("map must be an object");
    auto dom = side(j, "dom", base, std::move(dom_fallback));
    auto cod = side(j, "cod", base, std::move(cod_fallback));
    const Json& m = field(j, "map");
    if (!m.is_object()) throw FormatError("\"map\" must be an object of id pairs");
    std::map<Id, Id> assignment;
    for (auto it = m.begin(); it != m.end(); ++it) {
        if (!it.value().is_string()) throw FormatError("map values must be ids");
        assignment[it.key()] = it.value().get<std::string>();
    }
    return map_from_ids(dom, cod, assignment);
}

Json map_to_json(const StructureMap& m, bool with_structures) {
    Json j;
    if (with_structures) {
        j["dom"] = structure_to_json(*m.dom);
        j["cod"] = structure_to_json(*m.cod);
    }
    Json pairs = Json::object();
    for (int i = 0; i < m.dom->size(); ++i) pairs[m.dom->id(i)] = m.cod->id(m(i));
    j["map"] = pairs;
    return j;
}

StructureMap load_map(const fs::path& path, StructurePtr dom_fallback, StructurePtr cod_fallback) {
    return map_from_json(read_json_file(path), path.parent_path(), std::move(dom_fallback), std::move(cod_fallback));
}

Json task_to_json(const TaskRecord& r) {
    Json j;
    j["at"] = r.at;
    j["kind"] = task_kind_name(r.kind);
    j["source"] = r.source;
    j["detail"] = r.detail;
    j["status"] = r.status;
    if (r.q) j["q"] = structure_to_json(*r.q);
    if (r.theta) j["theta"] = map_to_json(*r.theta, false);
    if (r.psi) {
        j["witness_level"] = r.witness_level;
        j["psi"] = map_to_json(*r.psi, false);
    }
    return j;
}

Json sequence_to_json(const ProjectiveSequence& s, const std::vector<TaskRecord>& log) {
    Json j;
    Json levels = Json::array(), bonds = Json::array(), tasks = Json::array();
    for (const auto& lv : s.levels()) levels.push_back(structure_to_json(*lv));
    for (const auto& b : s.bonds()) bonds.push_back(map_to_json(b, false));
    for (const auto& r : log) tasks.push_back(task_to_json(r));
    j["levels"] = levels;
    j["bonds"] = bonds;
    j["log"] = tasks;
    return j;
}

namespace {

TaskKind kind_from(const std::string& k) {
    if (k == "extension") return TaskKind::Extension;
    if (k == "refine") return TaskKind::Refine;
    if (k == "idle") return TaskKind::Idle;
    throw FormatError("unknown task kind " + k);
}

}  // namespace

LoadedSequence sequence_from_json(const Json& j) {
    const Json& levels = field(j, "levels");
    const Json& bonds = field(j, "bonds");
    if (!levels.is_array() || levels.empty()) throw FormatError("a sequence needs a nonempty \"levels\" array");
    if (!bonds.is_array() || bonds.size() + 1 != levels.size()) throw FormatError("need one bond per consecutive pair of levels");
    std::vector<StructurePtr> lv;
    for (const auto& l : levels) lv.push_back(share(structure_from_json(l)));
    LoadedSequence out;
    try {
        out.seq = ProjectiveSequence(lv[0]);
        for (std::size_t i = 0; i < bonds.size(); ++i) out.seq.push(lv[i + 1], map_from_json(bonds[i], {}, lv[i + 1], lv[i]));
    } catch (const SequenceError& e) {
        throw FormatError(e.what());
    }
    if (j.contains("log")) {
        for (const auto& t : j.at("log")) {
            TaskRecord r;
            r.at = field(t, "at").get<int>();
            r.kind = kind_from(field(t, "kind").get<std::string>());
            r.source = field(t, "source").get<int>();
            r.detail = field(t, "detail").get<std::string>();
            r.status = field(t, "status").get<std::string>();
            if (r.source < 0 || r.source >= out.seq.length()) throw FormatError("task source level out of range");
            if (t.contains("q")) r.q = share(structure_from_json(t.at("q")));
            if (t.contains("theta")) r.theta = map_from_json(t.at("theta"), {}, r.q, out.seq.level(r.source));
            if (t.contains("psi")) {
                r.witness_level = field(t, "witness_level").get<int>();
                if (r.witness_level < 0 || r.witness_level >= out.seq.length()) throw FormatError("witness level out of range");
                r.psi = map_from_json(t.at("psi"), {}, out.seq.level(r.witness_level), r.q);
            }
            out.log.push_back(std::move(r));
        }
    }
    return out;
}

LoadedSequence load_sequence(const fs::path& path) { return sequence_from_json(read_json_file(path)); }

namespace {

PieceNode node_from(const Json& j) {
    PieceNode n;
    n.lo = rational_of(field(j, "lo"));
    n.hi = rational_of(field(j, "hi"));
    if (j.contains("children"))
        for (const auto& c : j.at("children")) n.children.push_back(node_from(c));
    return n;
}

Json node_to(const PieceNode& n) {
    Json j;
    j["lo"] = format_rational(n.lo);
    j["hi"] = format_rational(n.hi);
    Json kids = Json::array();
    for (const auto& c : n.children) kids.push_back(node_to(c));
    j["children"] = kids;
    return j;
}

}  // namespace

FancyPairSpec fancy_from_json(const Json& j) {
    FancyPairSpec spec;
    if (!j.is_object()) throw FormatError("fancy pair file must be an object");
    if (j.contains("tree") && !j.at("tree").is_null()) {
        const Json& t = j.at("tree");
        if (t.is_object() && !t.empty()) spec.root = node_from(t);
    }
    return spec;
}

Json fancy_to_json(const FancyPairSpec& spec) {
    Json j;
    j["tree"] = spec.root ? node_to(*spec.root) : Json(nullptr);
    return j;
}

Json realization_to_json(const Realization& r) {
    Json out = Json::array();
    for (std::size_t n = 0; n < r.levels.size(); ++n)
        for (const auto& c : r.levels[n]) {
            Json e;
            e["level"] = n;
            e["id"] = c.id;
            e["rect"] = {format_rational(c.rect.x0), format_rational(c.rect.x1), format_rational(c.rect.y0), format_rational(c.rect.y1)};
            out.push_back(e);
        }
    return out;
}

Realization realization_from_json(const Json& j) {
    if (!j.is_array()) throw FormatError("realization must be an array");
    Realization r;
    for (const auto& e : j) {
        int level = field(e, "level").get<int>();
        if (level < 0) throw FormatError("negative level");
        const Json& rect = field(e, "rect");
        if (!rect.is_array() || rect.size() != 4) throw FormatError("rect is [x0,x1,y0,y1]");
        if (static_cast<std::size_t>(level) >= r.levels.size()) r.levels.resize(static_cast<std::size_t>(level) + 1);
        r.levels[static_cast<std::size_t>(level)].push_back(
            {field(e, "id").get<std::string>(), Rect{rational_of(rect[0]), rational_of(rect[1]), rational_of(rect[2]), rational_of(rect[3])}});
    }
    return r;
}

Json fineness_to_json(const ProjectiveSequence& s, const FinenessCertificate& c) {
    Json j;
    j["up_to"] = c.up_to;
    j["resolved"] = c.resolved();
    j["unresolved"] = c.unresolved();
    Json entries = Json::array();
    for (const auto& e : c.entries) {
        Json x;
        x["level"] = e.level;
        x["a"] = s.level(e.level)->id(e.a);
        x["b"] = s.level(e.level)->id(e.b);
        x["witness"] = e.witness ? Json(*e.witness) : Json(nullptr);
        entries.push_back(x);
    }
    j["entries"] = entries;
    return j;
}

Json irreducibility_to_json(const ProjectiveSequence& s, const IrreducibilityCertificate& c) {
    Json j;
    j["up_to"] = c.up_to;
    j["resolved"] = c.resolved();
    j["unresolved"] = c.unresolved();
    Json entries = Json::array();
    for (const auto& e : c.entries) {
        Json x;
        x["level"] = e.level;
        x["a"] = s.level(e.level)->id(e.a);
        if (e.witness) {
            x["witness"] = {{"m", e.witness->first}, {"b", s.level(e.witness->first)->id(e.witness->second)}};
        } else {
            x["witness"] = nullptr;
        }
        entries.push_back(x);
    }
    j["entries"] = entries;
    return j;
}

BackAndForthRequest request_from_json(const Json& j, const ProjectiveSequence& s, const fs::path& base, int search_to) {
    BackAndForthRequest req;
    req.n = field(j, "n").get<int>();
    if (req.n < 0 || req.n >= s.length()) throw FormatError("level n out of range");
    req.source = j.contains("source") ? j.at("source").get<int>() : -1;
    int source = req.source < 0 ? search_to : req.source;
    if (source < 0 || source >= s.length()) throw FormatError("source level out of range");
    req.phi = map_from_json(field(j, "phi"), base, nullptr, s.level(req.n));
    const Structure& p = *req.phi.dom;
    const Structure& src = *s.level(source);
    if (j.contains("targets"))
        for (const auto& t : j.at("targets")) {
            BranchTarget bt;
            for (const auto& id : id_list(field(t, "image"))) {
                auto i = p.find(id);
                if (!i) throw FormatError("target id not in P: " + id);
                bt.image.push_back(*i);
            }
            bt.branch = field(t, "branch").get<int>();
            req.targets.push_back(std::move(bt));
        }
    if (j.contains("fixes"))
        for (const auto& f : j.at("fixes")) {
            auto y = p.find(field(f, "y").get<std::string>());
            auto x = src.find(field(f, "x").get<std::string>());
            if (!y || !x) throw FormatError("fix point names an unknown element");
            req.fixes.push_back({*y, *x});
        }
    return req;
}

}  // namespace fencelab
