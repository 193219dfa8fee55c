#ifndef DDENORM_TOOLS_JSONUTIL_HPP
#define DDENORM_TOOLS_JSONUTIL_HPP

#include <complex>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include <ddenorm/model.hpp>

namespace ddenorm::cli {

using nlohmann::json;

inline json to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json to_json(const Cplx& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Eigen::Vector2d& v) {
    return json::array({v(0), v(1)});
}

inline Vec vec_from_json(const json& a) {
    if (!a.is_array())
        throw InvalidInput("expected a numeric array, got: " + a.dump());
    Vec v(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number())
            throw InvalidInput("expected a numeric array, got: " + a.dump());
        v(static_cast<int>(i)) = a[i].get<double>();
    }
    return v;
}

json load_json_file(const std::filesystem::path& path);

// Validates `doc` against a bundled draft-07 schema subset: type, properties,
// required, additionalProperties, items, enum, minItems, maxItems and local
// "#/definitions/..." references.  Throws InvalidInput with a JSON-pointer
// style location on the first violation.
void validate_schema(const json& doc, const json& schema);

// Resolve the bundled schema directory: $DDENORM_SCHEMA_DIR if set, else the
// compiled-in default.
std::filesystem::path schema_dir();

// Validate against schemas/<name>.schema.json and write with trailing newline.
void write_validated_json(const std::filesystem::path& out_file,
                          const json& doc, const std::string& schema_name);

} // namespace ddenorm::cli

#endif
