#include "jsonutil.hpp"

#include <cstdlib>

#include <fmt/format.h>

namespace ddenorm::cli {

namespace {

const json* resolve_ref(const json& root, const std::string& ref) {
    constexpr const char* kPrefix = "#/definitions/";
    if (ref.rfind(kPrefix, 0) != 0)
        throw InvalidInput("unsupported schema $ref: " + ref);
    const std::string name = ref.substr(std::string(kPrefix).size());
    const auto defs = root.find("definitions");
    if (defs == root.end() || !defs->contains(name))
        throw InvalidInput("unresolved schema $ref: " + ref);
    return &(*defs)[name];
}

bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    throw InvalidInput("unsupported schema type: " + type);
}

void check(const json& root, const json& schema_in, const json& value,
           const std::string& where) {
    const json* schema = &schema_in;
    if (const auto ref = schema->find("$ref"); ref != schema->end())
        schema = resolve_ref(root, ref->get<std::string>());

    if (const auto type = schema->find("type"); type != schema->end()) {
        bool ok = false;
        if (type->is_array()) {
            for (const auto& t : *type)
                ok = ok || type_matches(value, t.get<std::string>());
        } else {
            ok = type_matches(value, type->get<std::string>());
        }
        if (!ok)
            throw InvalidInput(fmt::format("schema violation at {}: expected "
                                           "type {}, got {}",
                                           where, type->dump(), value.dump()));
    }
    if (const auto en = schema->find("enum"); en != schema->end()) {
        bool ok = false;
        for (const auto& candidate : *en) ok = ok || candidate == value;
        if (!ok)
            throw InvalidInput(fmt::format(
                "schema violation at {}: {} not in enum {}", where,
                value.dump(), en->dump()));
    }
    if (value.is_object()) {
        if (const auto req = schema->find("required"); req != schema->end())
            for (const auto& key : *req)
                if (!value.contains(key.get<std::string>()))
                    throw InvalidInput(fmt::format(
                        "schema violation at {}: missing required field '{}'",
                        where, key.get<std::string>()));
        const auto props = schema->find("properties");
        const bool extra_ok =
            !schema->contains("additionalProperties") ||
            (*schema)["additionalProperties"] != json(false);
        for (const auto& [key, field] : value.items()) {
            if (props != schema->end() && props->contains(key)) {
                check(root, (*props)[key], field, where + "/" + key);
            } else if (!extra_ok) {
                throw InvalidInput(fmt::format(
                    "schema violation at {}: unexpected field '{}'", where,
                    key));
            }
        }
    }
    if (value.is_array()) {
        if (const auto mn = schema->find("minItems"); mn != schema->end())
            if (value.size() < mn->get<size_t>())
                throw InvalidInput(fmt::format(
                    "schema violation at {}: fewer than {} items", where,
                    mn->get<size_t>()));
        if (const auto mx = schema->find("maxItems"); mx != schema->end())
            if (value.size() > mx->get<size_t>())
                throw InvalidInput(fmt::format(
                    "schema violation at {}: more than {} items", where,
                    mx->get<size_t>()));
        if (const auto items = schema->find("items"); items != schema->end())
            for (size_t i = 0; i < value.size(); ++i)
                check(root, *items, value[i],
                      fmt::format("{}/{}", where, i));
    }
}

} // namespace

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open JSON file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(fmt::format("malformed JSON in {}: {}",
                                       path.string(), e.what()));
    }
}

void validate_schema(const json& doc, const json& schema) {
    check(schema, schema, doc, "#");
}

std::filesystem::path schema_dir() {
    if (const char* env = std::getenv("DDENORM_SCHEMA_DIR"))
        return std::filesystem::path(env);
#ifdef DDENORM_SCHEMA_DIR_DEFAULT
    return std::filesystem::path(DDENORM_SCHEMA_DIR_DEFAULT);
#else
    return std::filesystem::path("schemas");
#endif
}

void write_validated_json(const std::filesystem::path& out_file,
                          const json& doc, const std::string& schema_name) {
    const auto schema_file = schema_dir() / (schema_name + ".schema.json");
    validate_schema(doc, load_json_file(schema_file));
    std::ofstream out(out_file);
    if (!out)
        throw InvalidInput("cannot write output file: " + out_file.string());
    out << doc.dump(2) << "\n";
}

} // namespace ddenorm::cli
