#pragma once

#include "fencelab/fence.hpp"
#include "fencelab/sequence.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace fencelab {

using Json = nlohmann::ordered_json;

struct FormatError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& j);  // two-space indent, trailing newline

RawStructure raw_from_json(const Json& j);
Structure structure_from_json(const Json& j);
Json structure_to_json(const Structure& s);
StructurePtr load_structure(const std::filesystem::path& path);

// "dom"/"cod" may be inline structures or paths relative to base
// a missing side is taken from the fallback when given
StructureMap map_from_json(const Json& j, const std::filesystem::path& base, StructurePtr dom_fallback = nullptr,
                           StructurePtr cod_fallback = nullptr);
Json map_to_json(const StructureMap& m, bool with_structures = true);
StructureMap load_map(const std::filesystem::path& path, StructurePtr dom_fallback = nullptr, StructurePtr cod_fallback = nullptr);

Json sequence_to_json(const ProjectiveSequence& s, const std::vector<TaskRecord>& log = {});
struct LoadedSequence {
    ProjectiveSequence seq;
    std::vector<TaskRecord> log;
};
LoadedSequence sequence_from_json(const Json& j);
LoadedSequence load_sequence(const std::filesystem::path& path);

Json task_to_json(const TaskRecord& r);

FancyPairSpec fancy_from_json(const Json& j);
Json fancy_to_json(const FancyPairSpec& spec);

Json realization_to_json(const Realization& r);
Realization realization_from_json(const Json& j);

Json fineness_to_json(const ProjectiveSequence& s, const FinenessCertificate& c);
Json irreducibility_to_json(const ProjectiveSequence& s, const IrreducibilityCertificate& c);

BackAndForthRequest request_from_json(const Json& j, const ProjectiveSequence& s, const std::filesystem::path& base,
                                      int search_to);

}  // namespace fencelab
