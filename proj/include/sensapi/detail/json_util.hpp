#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sensapi/errors.hpp"

namespace sensapi::detail {

using json = nlohmann::ordered_json;

inline json parse_json(std::string_view text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": " + e.what(), e.byte);
    }
}

// Strict schemas: any key outside `allowed` is rejected.
inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& ctx) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known)
            throw ParseError(ctx + ": unknown field \"" + item.key() + "\"");
    }
}

inline const json& require(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(ctx + ": missing field \"" + key + "\"");
    return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_string())
        throw ParseError(ctx + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline bool require_bool(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_boolean())
        throw ParseError(ctx + ": field \"" + key + "\" must be a boolean");
    return v.get<bool>();
}

inline std::int64_t require_int(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_number_integer())
        throw ParseError(ctx + ": field \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

inline const json& require_array(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_array())
        throw ParseError(ctx + ": field \"" + key + "\" must be an array");
    return v;
}

inline const json& require_object(const json& obj, const char* key, const std::string& ctx) {
    const json& v = require(obj, key, ctx);
    if (!v.is_object())
        throw ParseError(ctx + ": field \"" + key + "\" must be an object");
    return v;
}

inline void require_schema_version(const json& obj, const std::string& ctx) {
    if (require_string(obj, "schema_version", ctx) != "1")
        throw ParseError(ctx + ": unsupported schema_version (expected \"1\")");
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string dump_canonical(const json& doc) {
    return doc.dump(2) + "\n";
}

}  // namespace sensapi::detail
