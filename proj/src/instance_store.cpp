#include "tempdiff/instance_store.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "tempdiff/error.hpp"

namespace tempdiff {

namespace {

using json = nlohmann::ordered_json;

std::string require_string(const json& rec, const char* field) {
    auto it = rec.find(field);
    if (it == rec.end()) {
        throw ValidationError(std::string("missing field '") + field + "'");
    }
    if (!it->is_string()) {
        throw ValidationError(std::string("field '") + field + "' must be a string");
    }
    return it->get<std::string>();
}

json parse_line(const std::string& line) {
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
        throw ValidationError("not a JSON object");
    }
    return rec;
}

template <typename T, typename ParseFn>
std::vector<T> load_records(const std::string& path, ParseFn parse) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);

    std::vector<T> out;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            T inst = parse(line);
            if (!seen_ids.insert(inst.id).second) {
                throw ValidationError("duplicate id '" + inst.id + "'");
            }
            out.push_back(std::move(inst));
        } catch (const ValidationError& e) {
            throw LoadError(path, lineno, e.what());
        }
    }
    return out;
}

}  // namespace

HardInstance parse_hard_record(const std::string& line, Split split) {
    json rec = parse_line(line);
    HardInstance inst;
    inst.id = require_string(rec, "id");
    inst.context = require_string(rec, "context");
    inst.pair.e1 = require_string(rec, "e1");
    inst.pair.e2 = require_string(rec, "e2");
    inst.gold = relation_from_string(require_string(rec, "gold"));
    inst.source = source_from_string(require_string(rec, "source"));
    inst.split = split;
    inst.validate();
    return inst;
}

DiffInstance parse_diff_record(const std::string& line) {
    json rec = parse_line(line);
    DiffInstance inst;
    inst.id = require_string(rec, "id");
    inst.context = require_string(rec, "context");
    inst.pair.e1 = require_string(rec, "e1");
    inst.pair.e2 = require_string(rec, "e2");
    inst.additional_sentence = require_string(rec, "additional_sentence");
    inst.direction = relation_from_string(require_string(rec, "direction"));
    if (rec.contains("explanation") && !rec["explanation"].is_null()) {
        inst.explanation = require_string(rec, "explanation");
    }
    inst.split = split_from_string(require_string(rec, "split"));
    inst.validate();
    return inst;
}

std::vector<HardInstance> load_hard_dataset(const std::string& path, Split split) {
    return load_records<HardInstance>(
        path, [split](const std::string& line) { return parse_hard_record(line, split); });
}

std::vector<DiffInstance> load_diff_dataset(const std::string& path) {
    return load_records<DiffInstance>(
        path, [](const std::string& line) { return parse_diff_record(line); });
}

std::string serialize(const HardInstance& inst) {
    json rec;
    rec["id"] = inst.id;
    rec["context"] = inst.context;
    rec["e1"] = inst.pair.e1;
    rec["e2"] = inst.pair.e2;
    rec["gold"] = to_string(inst.gold);
    rec["source"] = to_string(inst.source);
    return rec.dump();
}

std::string serialize(const DiffInstance& inst) {
    json rec;
    rec["id"] = inst.id;
    rec["context"] = inst.context;
    rec["e1"] = inst.pair.e1;
    rec["e2"] = inst.pair.e2;
    rec["additional_sentence"] = inst.additional_sentence;
    rec["direction"] = to_string(inst.direction);
    if (inst.explanation) rec["explanation"] = *inst.explanation;
    rec["split"] = to_string(inst.split);
    return rec.dump();
}

namespace {

template <typename T>
void save_records(const std::string& path, const std::vector<T>& instances) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file: " + path);
    for (const auto& inst : instances) out << serialize(inst) << '\n';
}

}  // namespace

void save_hard_dataset(const std::string& path,
                       const std::vector<HardInstance>& instances) {
    save_records(path, instances);
}

void save_diff_dataset(const std::string& path,
                       const std::vector<DiffInstance>& instances) {
    save_records(path, instances);
}

}  // namespace tempdiff
