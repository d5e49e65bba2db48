#include "fencelab/amalgam.hpp"
#include "fencelab/fence.hpp"
#include "fencelab/io.hpp"
#include "fencelab/sequence.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace fencelab;
namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, Negative = 1, BadInput = 2 };

void emit(const Json& j) { std::cout << dump(j); }

void emit_to(const Json& j, const std::string& out, const std::string& name) {
    if (out.empty()) {
        emit(j);
        return;
    }
    fs::path p = fs::path(out) / name;
    write_text_file(p, dump(j));
    std::cerr << "wrote " << p.string() << "\n";
}

int cmd_validate(const std::string& file) {
    Json j = read_json_file(file);
    if (j.is_object() && j.contains("tree")) {
        auto rep = validate_fancy_pair(fancy_from_json(j));
        Json out;
        out["valid"] = rep.valid;
        if (!rep.valid) {
            out["path"] = rep.path;
            out["problem"] = rep.problem;
        }
        emit(out);
        return rep.valid ? Ok : Negative;
    }
    RawStructure raw = raw_from_json(j);
    ValidationReport rep = validate(raw);
    Json out;
    out["valid"] = rep.valid();
    out["partial_order"] = rep.partial_order;
    out["hasse_minimal"] = rep.hasse_minimal;
    out["forest"] = rep.forest;
    out["chain_forest"] = rep.chain_forest;
    if (auto k = rep.kind()) out["kind"] = kind_name(*k);
    out["problems"] = rep.problems;
    emit(out);
    return rep.valid() ? Ok : Negative;
}

int cmd_branches(const std::string& file) {
    auto s = load_structure(file);
    Json out = Json::array();
    for (const auto& b : s->branches()) {
        std::vector<Id> ids;
        for (int v : b) ids.push_back(s->id(v));
        out.push_back(ids);
    }
    emit(Json{{"branches", out}});
    return Ok;
}

int cmd_unfold(const std::string& file) {
    auto u = unfold_to_chainforest(load_structure(file));
    Json out;
    out["forest"] = structure_to_json(*u.forest);
    out["map"] = map_to_json(u.map);
    emit(out);
    return Ok;
}

int cmd_dual(const std::string& file) {
    emit(structure_to_json(dualize(*load_structure(file))));
    return Ok;
}

int cmd_check_epi(const std::string& file) {
    auto m = load_map(file);
    Json out;
    bool epi = is_epimorphism(m);
    out["epimorphism"] = epi;
    out["surjective"] = is_surjective(m);
    out["lr_preserving"] = is_lr_preserving(m);
    emit(out);
    return epi ? Ok : Negative;
}

int cmd_enum_epi(const std::string& dom, const std::string& cod) {
    auto d = load_structure(dom);
    auto c = load_structure(cod);
    Json out = Json::array();
    for (const auto& m : enumerate_epimorphisms(d, c)) out.push_back(map_to_json(m, false));
    std::cerr << out.size() << " epimorphisms\n";
    emit(out);
    return out.empty() ? Negative : Ok;
}

Json amalgam_json(const Amalgam& a) {
    Json out;
    out["t"] = structure_to_json(*a.t);
    out["theta1"] = map_to_json(a.theta1, false);
    out["theta2"] = map_to_json(a.theta2, false);
    return out;
}

int cmd_amalgamate(const std::string& phi, const std::string& psi) {
    emit(amalgam_json(amalgamate_forests(load_map(phi), load_map(psi))));
    return Ok;
}

int cmd_search(const std::string& phi, const std::string& psi, int max_size) {
    auto res = search_amalgam(load_map(phi), load_map(psi), max_size);
    Json out;
    out["bound"] = res.bound;
    out["shapes_tried"] = res.shapes_tried;
    if (!res.witness) {
        out["result"] = "NONE";
        emit(out);
        return Negative;
    }
    out["result"] = "FOUND";
    out["witness"] = amalgam_json(*res.witness);
    emit(out);
    return Ok;
}

int cmd_gen(int depth, int max_size, int cap, const std::string& out) {
    GeneratorOptions opt;
    opt.depth = depth;
    opt.max_size = max_size;
    opt.gadget_cap = cap;
    auto g = generate_fundamental(opt);
    for (const auto& r : g.log)
        if (r.status == "discharged" || r.status == "deferred")
            std::cerr << "level " << r.at << ": " << task_kind_name(r.kind) << " from " << r.source << " " << r.detail << " " << r.status << "\n";
    emit_to(sequence_to_json(g.seq, g.log), out, "sequence.json");
    return Ok;
}

void check_up_to(const ProjectiveSequence& s, int up_to) {
    if (up_to < 0 || up_to >= s.length()) throw FormatError("--up-to must name an existing level");
}

int cmd_fineness(const std::string& file, int up_to, int jobs) {
    auto ls = load_sequence(file);
    check_up_to(ls.seq, up_to);
    auto c = fineness_check(ls.seq, up_to, jobs);
    emit(fineness_to_json(ls.seq, c));
    std::cerr << c.entries.size() - static_cast<std::size_t>(c.unresolved()) << "/" << c.entries.size() << " pairs resolved\n";
    return c.resolved() ? Ok : Negative;
}

int cmd_irreducible(const std::string& file, int up_to, int jobs) {
    auto ls = load_sequence(file);
    check_up_to(ls.seq, up_to);
    auto c = irreducibility_check(ls.seq, up_to, jobs);
    emit(irreducibility_to_json(ls.seq, c));
    std::cerr << c.entries.size() - static_cast<std::size_t>(c.unresolved()) << "/" << c.entries.size() << " points resolved\n";
    return c.resolved() ? Ok : Negative;
}

int witness_out(const std::optional<Extension>& w) {
    Json out;
    if (!w) {
        out["result"] = "NONE";
        emit(out);
        return Negative;
    }
    out["result"] = "FOUND";
    out["m"] = w->m;
    out["psi"] = map_to_json(w->psi, false);
    emit(out);
    return Ok;
}

int search_bound(const ProjectiveSequence& s, int search_to) {
    if (search_to < 0) return s.top();
    if (search_to >= s.length()) throw FormatError("--search-to beyond the sequence");
    return search_to;
}

int cmd_extend(const std::string& file, int level, const std::string& mapfile, int search_to) {
    auto ls = load_sequence(file);
    if (level < 0 || level >= ls.seq.length()) throw FormatError("--level out of range");
    auto theta = load_map(mapfile, nullptr, ls.seq.level(level));
    return witness_out(extension_witness(ls.seq, level, theta, search_bound(ls.seq, search_to)));
}

int cmd_endpoints(const std::string& file, int n, int at) {
    auto ls = load_sequence(file);
    if (n < 0 || at >= ls.seq.length() || n > at) throw FormatError("need 0 <= --n <= --at < length");
    auto flags = classify_endpoints(ls.seq, n, at);
    Json out = Json::array();
    const Structure& lv = *ls.seq.level(at);
    for (int v = 0; v < lv.size(); ++v)
        out.push_back({{"id", lv.id(v)}, {"min_stable", flags[static_cast<std::size_t>(v)].min_stable},
                       {"max_stable", flags[static_cast<std::size_t>(v)].max_stable}});
    emit(out);
    return Ok;
}

std::vector<int> parse_indices(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        try {
            std::size_t used = 0;
            int v = std::stoi(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            out.push_back(v);
        } catch (const std::exception&) {
            throw FormatError("bad branch index: " + part);
        }
    }
    return out;
}

int cmd_restrict(const std::string& file, int level, const std::string& branches) {
    auto ls = load_sequence(file);
    if (level < 0 || level >= ls.seq.length()) throw FormatError("--level out of range");
    ClopenSet c{level, parse_indices(branches)};
    for (int b : c.branches)
        if (b < 0 || b >= static_cast<int>(ls.seq.level(level)->chains().size())) throw FormatError("branch index out of range");
    emit(sequence_to_json(restrict_to_clopen(ls.seq, c)));
    return Ok;
}

int cmd_bf(const std::string& file, const std::string& constraints, int search_to) {
    auto ls = load_sequence(file);
    int bound = search_bound(ls.seq, search_to);
    auto req = request_from_json(read_json_file(constraints), ls.seq, fs::path(constraints).parent_path(), bound);
    return witness_out(back_and_forth_step(ls.seq, req, bound));
}

int cmd_approx(const std::string& file, int depth, const std::string& out) {
    auto a = build_approximation(fancy_from_json(read_json_file(file)), depth);
    auto r = realize_cells(a);
    if (out.empty()) {
        Json j;
        j["sequence"] = sequence_to_json(a.seq);
        j["realization"] = realization_to_json(r);
        emit(j);
    } else {
        emit_to(sequence_to_json(a.seq), out, "sequence.json");
        emit_to(realization_to_json(r), out, "realization.json");
    }
    for (std::size_t n = 0; n < a.complexes.size(); ++n)
        std::cerr << "level " << n << ": " << a.complexes[n].pieces.size() << " pieces, " << a.complexes[n].cells.size() << " cells\n";
    return Ok;
}

Realization load_realization(const std::string& file) {
    Json j = read_json_file(file);
    if (j.is_array()) return realization_from_json(j);
    if (j.is_object() && j.contains("realization")) return realization_from_json(j.at("realization"));
    if (j.is_object() && j.contains("levels")) return realize_abstract(sequence_from_json(j).seq);
    throw FormatError("expected a sequence or a realization");
}

int cmd_render(const std::string& file, int level, const std::string& svg) {
    auto r = load_realization(file);
    if (level < 0 || level >= static_cast<int>(r.levels.size())) throw FormatError("--level out of range");
    std::string doc = render_svg(r, level);
    if (svg.empty() || svg == "-")
        std::cout << doc;
    else
        write_text_file(svg, doc);
    return Ok;
}

int cmd_mesh(const std::string& file) {
    auto r = load_realization(file);
    Json out = Json::array();
    for (std::size_t n = 0; n < r.levels.size(); ++n) {
        Rational m = mesh(r, static_cast<int>(n));
        out.push_back({{"level", n}, {"mesh", format_rational(m)}, {"decimal", format_decimal(m, 9)}});
    }
    emit(out);
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fencelab: finite Hasse forests, projective sequences and fence approximations"};
    app.require_subcommand(1);
    app.fallthrough();
    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for certificate checks")->check(CLI::PositiveNumber);

    std::string a1, a2, out, svg, branches;
    int max_size = 6, depth = 1, up_to = 0, level = 0, search_to = -1, n_from = 0, at = 0;
    int cap = GeneratorOptions{}.gadget_cap;

    auto* validate_cmd = app.add_subcommand("validate", "check a structure or fancy pair file");
    validate_cmd->add_option("file", a1)->required();
    auto* branches_cmd = app.add_subcommand("branches", "list maximal chains");
    branches_cmd->add_option("file", a1)->required();
    auto* unfold_cmd = app.add_subcommand("unfold", "unfold an H-forest into a chain forest");
    unfold_cmd->add_option("file", a1)->required();
    auto* dual_cmd = app.add_subcommand("dual", "reverse the order");
    dual_cmd->add_option("file", a1)->required();
    auto* check_cmd = app.add_subcommand("check-epi", "test a map for being an epimorphism");
    check_cmd->add_option("map", a1)->required();
    auto* enum_cmd = app.add_subcommand("enum-epi", "list all epimorphisms dom -> cod");
    enum_cmd->add_option("dom", a1)->required();
    enum_cmd->add_option("cod", a2)->required();
    auto* amal_cmd = app.add_subcommand("amalgamate", "amalgamate two epimorphisms onto one forest");
    amal_cmd->add_option("phi", a1)->required();
    amal_cmd->add_option("psi", a2)->required();
    auto* search_cmd = app.add_subcommand("search-amalgam", "exhaustive amalgam search over chain forests");
    search_cmd->add_option("phi", a1)->required();
    search_cmd->add_option("psi", a2)->required();
    search_cmd->add_option("--max-size", max_size)->required()->check(CLI::NonNegativeNumber);
    auto* gen_cmd = app.add_subcommand("gen", "generate a fundamental sequence");
    gen_cmd->add_option("--depth", depth)->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--max-size", max_size)->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--gadget-cap", cap, "largest refine structure discharged")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--out", out, "directory for sequence.json");
    auto* fin_cmd = app.add_subcommand("fineness", "fineness certificate");
    fin_cmd->add_option("seq", a1)->required();
    fin_cmd->add_option("--up-to", up_to)->required();
    auto* irr_cmd = app.add_subcommand("irreducible", "irreducibility certificate");
    irr_cmd->add_option("seq", a1)->required();
    irr_cmd->add_option("--up-to", up_to)->required();
    auto* ext_cmd = app.add_subcommand("extend", "extension witness for theta: Q -> levels[n]");
    ext_cmd->add_option("seq", a1)->required();
    ext_cmd->add_option("map", a2)->required();
    ext_cmd->add_option("--level", level)->required();
    ext_cmd->add_option("--search-to", search_to);
    auto* end_cmd = app.add_subcommand("endpoints", "stability flags of the elements of one level");
    end_cmd->add_option("seq", a1)->required();
    end_cmd->add_option("--n", n_from)->required();
    end_cmd->add_option("--at", at)->required();
    auto* res_cmd = app.add_subcommand("restrict", "restrict a sequence to a union of branches");
    res_cmd->add_option("seq", a1)->required();
    res_cmd->add_option("--level", level)->required();
    res_cmd->add_option("--branches", branches)->required();
    auto* bf_cmd = app.add_subcommand("bf", "one back-and-forth step");
    bf_cmd->add_option("seq", a1)->required();
    bf_cmd->add_option("constraints", a2)->required();
    bf_cmd->add_option("--search-to", search_to);
    auto* approx_cmd = app.add_subcommand("approx", "approximate the fence of a fancy pair");
    approx_cmd->add_option("fancy", a1)->required();
    approx_cmd->add_option("--depth", depth)->required()->check(CLI::NonNegativeNumber);
    approx_cmd->add_option("--out", out, "directory for sequence.json and realization.json");
    auto* render_cmd = app.add_subcommand("render", "draw one level as SVG");
    render_cmd->add_option("input", a1)->required();
    render_cmd->add_option("--level", level)->required();
    render_cmd->add_option("--svg", svg, "output file, stdout when omitted");
    auto* mesh_cmd = app.add_subcommand("mesh", "mesh of every level of a realization");
    mesh_cmd->add_option("input", a1)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return BadInput;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(a1);
        if (branches_cmd->parsed()) return cmd_branches(a1);
        if (unfold_cmd->parsed()) return cmd_unfold(a1);
        if (dual_cmd->parsed()) return cmd_dual(a1);
        if (check_cmd->parsed()) return cmd_check_epi(a1);
        if (enum_cmd->parsed()) return cmd_enum_epi(a1, a2);
        if (amal_cmd->parsed()) return cmd_amalgamate(a1, a2);
        if (search_cmd->parsed()) return cmd_search(a1, a2, max_size);
        if (gen_cmd->parsed()) return cmd_gen(depth, max_size, cap, out);
        if (fin_cmd->parsed()) return cmd_fineness(a1, up_to, jobs);
        if (irr_cmd->parsed()) return cmd_irreducible(a1, up_to, jobs);
        if (ext_cmd->parsed()) return cmd_extend(a1, level, a2, search_to);
        if (end_cmd->parsed()) return cmd_endpoints(a1, n_from, at);
        if (res_cmd->parsed()) return cmd_restrict(a1, level, branches);
        if (bf_cmd->parsed()) return cmd_bf(a1, a2, search_to);
        if (approx_cmd->parsed()) return cmd_approx(a1, depth, out);
        if (render_cmd->parsed()) return cmd_render(a1, level, svg);
        if (mesh_cmd->parsed()) return cmd_mesh(a1);
    } catch (const std::logic_error& e) {
        // invalid_argument derives from logic_error; anything else here is an internal failure
        if (dynamic_cast<const std::invalid_argument*>(&e) == nullptr) {
            std::cerr << "internal error: " << e.what() << "\n";
            return 3;
        }
        std::cerr << "error: " << e.what() << "\n";
        return BadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return BadInput;
    }
    return BadInput;
}
