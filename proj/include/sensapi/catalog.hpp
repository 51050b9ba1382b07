#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sensapi/detail/json_util.hpp"
#include "sensapi/errors.hpp"

namespace sensapi {

// ---------------------------------------------------------------------------
// Categories and subcategories
// ---------------------------------------------------------------------------

enum class Category { Filesystem, Network, Process };

// Enumerator order is the canonical presentation order used by reports.
enum class Subcategory {
    Input,
    Output,
    Modification,
    Miscellaneous,
    ReadEnv,
    ReadNetworkEnv,
    Connection,
    Http,
    Socket,
    NamingDirectory,
    CodecCrypto,
    Dependency,
    Reflection,
    OperatingSystem,
    Scripting,
};

inline constexpr int kCategoryCount = 3;
inline constexpr int kSubcategoryCount = 15;

inline constexpr std::array<Subcategory, kSubcategoryCount> kAllSubcategories = {
    Subcategory::Input,          Subcategory::Output,
    Subcategory::Modification,   Subcategory::Miscellaneous,
    Subcategory::ReadEnv,        Subcategory::ReadNetworkEnv,
    Subcategory::Connection,     Subcategory::Http,
    Subcategory::Socket,         Subcategory::NamingDirectory,
    Subcategory::CodecCrypto,    Subcategory::Dependency,
    Subcategory::Reflection,     Subcategory::OperatingSystem,
    Subcategory::Scripting,
};

inline std::string_view to_string(Category c) {
    switch (c) {
        case Category::Filesystem: return "Filesystem";
        case Category::Network: return "Network";
        case Category::Process: return "Process";
    }
    return "?";
}

inline std::string_view to_string(Subcategory s) {
    switch (s) {
        case Subcategory::Input: return "Input";
        case Subcategory::Output: return "Output";
        case Subcategory::Modification: return "Modification";
        case Subcategory::Miscellaneous: return "Miscellaneous";
        case Subcategory::ReadEnv: return "Read_env";
        case Subcategory::ReadNetworkEnv: return "Read_network_env";
        case Subcategory::Connection: return "Connection";
        case Subcategory::Http: return "Http";
        case Subcategory::Socket: return "Socket";
        case Subcategory::NamingDirectory: return "Naming_directory";
        case Subcategory::CodecCrypto: return "Codec_crypto";
        case Subcategory::Dependency: return "Dependency";
        case Subcategory::Reflection: return "Reflection";
        case Subcategory::OperatingSystem: return "Operating_system";
        case Subcategory::Scripting: return "Scripting";
    }
    return "?";
}

inline Category category_of(Subcategory s) {
    switch (s) {
        case Subcategory::Input:
        case Subcategory::Output:
        case Subcategory::Modification:
        case Subcategory::Miscellaneous:
        case Subcategory::ReadEnv:
        case Subcategory::ReadNetworkEnv:
            return Category::Filesystem;
        case Subcategory::Connection:
        case Subcategory::Http:
        case Subcategory::Socket:
        case Subcategory::NamingDirectory:
            return Category::Network;
        default:
            return Category::Process;
    }
}

inline std::optional<Category> parse_category(std::string_view s) {
    if (s == "Filesystem") return Category::Filesystem;
    if (s == "Network") return Category::Network;
    if (s == "Process") return Category::Process;
    return std::nullopt;
}

inline std::optional<Subcategory> parse_subcategory(std::string_view s) {
    for (Subcategory sub : kAllSubcategories)
        if (to_string(sub) == s) return sub;
    return std::nullopt;
}

inline std::size_t index_of(Subcategory s) { return static_cast<std::size_t>(s); }
inline std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }

// ---------------------------------------------------------------------------
// API identifiers
// ---------------------------------------------------------------------------

inline constexpr std::string_view kConstructorName = "<init>";

// Dot-separated Java type name: ident(.ident)*
inline bool is_valid_type_fqn(std::string_view fqn) {
    if (fqn.empty()) return false;
    bool segment_start = true;
    for (char c : fqn) {
        if (segment_start) {
            if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'))
                return false;
            segment_start = false;
        } else if (c == '.') {
            segment_start = true;
        } else if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$')) {
            return false;
        }
    }
    return !segment_start;  // must not end on a dot
}

// A catalog key: fully-qualified class plus method simple name. Matching is
// case-sensitive and ignores parameter signatures (the catalog carries none).
struct ApiIdentifier {
    std::string class_fqn;
    std::string method_name;  // "<init>" denotes a constructor

    // "java.lang.Class.forName()" / constructors as "java.io.File()"
    std::string display() const {
        if (method_name == kConstructorName) return class_fqn + "()";
        return class_fqn + "." + method_name + "()";
    }

    auto operator<=>(const ApiIdentifier&) const = default;
};

// Inverse of ApiIdentifier::display() for JDK-style names (class segments
// capitalized, method names not). Returns nullopt for anything else.
inline std::optional<ApiIdentifier> parse_api_display(std::string_view text) {
    if (text.size() < 3 || !text.ends_with("()")) return std::nullopt;
    std::string_view body = text.substr(0, text.size() - 2);
    if (!is_valid_type_fqn(body)) return std::nullopt;
    std::size_t dot = body.rfind('.');
    if (dot == std::string_view::npos) return std::nullopt;
    std::string_view last = body.substr(dot + 1);
    if (std::isupper(static_cast<unsigned char>(last.front())))
        return ApiIdentifier{std::string(body), std::string(kConstructorName)};
    return ApiIdentifier{std::string(body.substr(0, dot)), std::string(last)};
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct SensitiveApi {
    ApiIdentifier id;
    Category category;
    Subcategory subcategory;
    std::set<int> cwe_ids;
};

// Immutable after load; safe for concurrent readers.
class SensitiveApiCatalog {
public:
    SensitiveApiCatalog() = default;

    explicit SensitiveApiCatalog(std::string schema_version, std::vector<SensitiveApi> entries)
        : schema_version_(std::move(schema_version)), entries_(std::move(entries)) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const SensitiveApi& e = entries_[i];
            validate_entry(e, i);
            auto [it, inserted] =
                index_.emplace(std::pair{e.id.class_fqn, e.id.method_name}, i);
            if (!inserted)
                throw ValidationError("catalog entry " + std::to_string(i) +
                                      ": duplicate id " + e.id.display() +
                                      " (first seen at entry " + std::to_string(it->second) + ")");
        }
    }

    const std::vector<SensitiveApi>& entries() const { return entries_; }
    const std::string& schema_version() const { return schema_version_; }

    // Absence is a normal result. `<init>` queries match constructor entries.
    const SensitiveApi* lookup(std::string_view class_fqn, std::string_view method_name) const {
        auto it = index_.find(std::pair{std::string(class_fqn), std::string(method_name)});
        if (it == index_.end()) return nullptr;
        return &entries_[it->second];
    }

    std::size_t distinct_subcategories() const {
        std::set<Subcategory> subs;
        for (const auto& e : entries_) subs.insert(e.subcategory);
        return subs.size();
    }

    std::size_t distinct_categories() const {
        std::set<Category> cats;
        for (const auto& e : entries_) cats.insert(e.category);
        return cats.size();
    }

private:
    static void validate_entry(const SensitiveApi& e, std::size_t i) {
        const std::string ctx = "catalog entry " + std::to_string(i);
        if (!is_valid_type_fqn(e.id.class_fqn))
            throw ValidationError(ctx + ": invalid class name \"" + e.id.class_fqn + "\"");
        if (e.id.method_name.empty())
            throw ValidationError(ctx + ": empty method name");
        if (category_of(e.subcategory) != e.category)
            throw ValidationError(ctx + ": subcategory " + std::string(to_string(e.subcategory)) +
                                  " does not belong to category " +
                                  std::string(to_string(e.category)));
    }

    std::string schema_version_;
    std::vector<SensitiveApi> entries_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

inline SensitiveApiCatalog load_catalog(std::string_view text) {
    using detail::json;
    json doc = detail::parse_json(text, "catalog");
    if (!doc.is_object()) throw ParseError("catalog: top level must be an object");
    detail::check_keys(doc, {"schema_version", "entries"}, "catalog");
    detail::require_schema_version(doc, "catalog");

    const json& arr = detail::require_array(doc, "entries", "catalog");
    std::vector<SensitiveApi> entries;
    entries.reserve(arr.size());
    std::size_t i = 0;
    for (const json& raw : arr) {
        const std::string ctx = "catalog entry " + std::to_string(i);
        if (!raw.is_object()) throw ParseError(ctx + ": must be an object");
        detail::check_keys(raw, {"class", "method", "category", "subcategory", "cwes"}, ctx);

        SensitiveApi e;
        e.id.class_fqn = detail::trim(detail::require_string(raw, "class", ctx));
        e.id.method_name = detail::trim(detail::require_string(raw, "method", ctx));

        std::string cat = detail::require_string(raw, "category", ctx);
        std::string sub = detail::require_string(raw, "subcategory", ctx);
        auto parsed_cat = parse_category(cat);
        if (!parsed_cat) throw ValidationError(ctx + ": unknown category \"" + cat + "\"");
        auto parsed_sub = parse_subcategory(sub);
        if (!parsed_sub) throw ValidationError(ctx + ": unknown subcategory \"" + sub + "\"");
        e.category = *parsed_cat;
        e.subcategory = *parsed_sub;

        for (const json& c : detail::require_array(raw, "cwes", ctx)) {
            if (!c.is_number_integer() || c.get<std::int64_t>() <= 0)
                throw ParseError(ctx + ": cwes must be positive integers");
            e.cwe_ids.insert(static_cast<int>(c.get<std::int64_t>()));
        }
        entries.push_back(std::move(e));
        ++i;
    }
    return SensitiveApiCatalog("1", std::move(entries));
}

// ---------------------------------------------------------------------------
// CWE -> OWASP Top 10
// ---------------------------------------------------------------------------

inline constexpr std::string_view kOwaspOther = "Other";

// ChildOf edges plus the direct CWE -> OWASP assignments. Acyclicity is
// checked at load; lookups walk parents breadth-first.
struct CweHierarchy {
    std::map<int, std::set<int>> parent_edges;
    std::map<int, std::string> owasp_map;  // values "A01".."A10"
};

inline bool is_owasp_label(std::string_view s) {
    if (s.size() != 3 || s[0] != 'A') return false;
    if (!std::isdigit(static_cast<unsigned char>(s[1])) ||
        !std::isdigit(static_cast<unsigned char>(s[2])))
        return false;
    int n = (s[1] - '0') * 10 + (s[2] - '0');
    return n >= 1 && n <= 10;
}

namespace detail {

inline int parse_cwe_id(const std::string& key, const std::string& ctx) {
    std::string_view v = key;
    if (v.starts_with("CWE-")) v.remove_prefix(4);
    int value = 0;
    for (char c : v) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError(ctx + ": bad CWE id \"" + key + "\"");
        value = value * 10 + (c - '0');
    }
    if (v.empty() || value <= 0) throw ParseError(ctx + ": bad CWE id \"" + key + "\"");
    return value;
}

inline void check_acyclic(const std::map<int, std::set<int>>& parents) {
    // Iterative DFS, colors: 0 unseen, 1 on stack, 2 done.
    std::map<int, int> color;
    for (const auto& [start, _] : parents) {
        if (color[start]) continue;
        std::vector<std::pair<int, bool>> stack{{start, false}};
        while (!stack.empty()) {
            auto [node, leaving] = stack.back();
            stack.pop_back();
            if (leaving) {
                color[node] = 2;
                continue;
            }
            if (color[node] == 2) continue;
            if (color[node] == 1) continue;
            color[node] = 1;
            stack.push_back({node, true});
            auto it = parents.find(node);
            if (it == parents.end()) continue;
            for (int p : it->second) {
                if (color[p] == 1)
                    throw ValidationError("cwe hierarchy: cycle through CWE-" +
                                          std::to_string(p));
                if (color[p] == 0) stack.push_back({p, false});
            }
        }
    }
}

}  // namespace detail

inline CweHierarchy load_cwe_hierarchy(std::string_view text) {
    using detail::json;
    json doc = detail::parse_json(text, "cwe hierarchy");
    if (!doc.is_object()) throw ParseError("cwe hierarchy: top level must be an object");
    detail::check_keys(doc, {"parents", "owasp"}, "cwe hierarchy");

    CweHierarchy h;
    const json& parents = detail::require_object(doc, "parents", "cwe hierarchy");
    for (const auto& item : parents.items()) {
        int child = detail::parse_cwe_id(item.key(), "cwe hierarchy parents");
        if (!item.value().is_array())
            throw ParseError("cwe hierarchy: parents of \"" + item.key() + "\" must be an array");
        for (const json& p : item.value()) {
            if (!p.is_string() && !p.is_number_integer())
                throw ParseError("cwe hierarchy: parent ids must be strings or integers");
            int pid = p.is_string()
                          ? detail::parse_cwe_id(p.get<std::string>(), "cwe hierarchy parents")
                          : static_cast<int>(p.get<std::int64_t>());
            h.parent_edges[child].insert(pid);
        }
    }
    const json& owasp = detail::require_object(doc, "owasp", "cwe hierarchy");
    for (const auto& item : owasp.items()) {
        int id = detail::parse_cwe_id(item.key(), "cwe hierarchy owasp");
        if (!item.value().is_string() || !is_owasp_label(item.value().get<std::string>()))
            throw ParseError("cwe hierarchy: owasp values must be \"A01\"..\"A10\"");
        h.owasp_map[id] = item.value().get<std::string>();
    }
    detail::check_acyclic(h.parent_edges);
    return h;
}

// Nearest mapped ancestor wins; ties at equal depth break toward the
// smallest CWE number; unmapped lineages fall back to "Other".
inline std::string map_cwe_to_owasp(const CweHierarchy& h, int cwe) {
    if (auto it = h.owasp_map.find(cwe); it != h.owasp_map.end()) return it->second;

    std::set<int> frontier{cwe};
    std::set<int> seen{cwe};
    while (!frontier.empty()) {
        std::set<int> next;
        for (int node : frontier) {
            auto it = h.parent_edges.find(node);
            if (it == h.parent_edges.end()) continue;
            for (int p : it->second)
                if (seen.insert(p).second) next.insert(p);
        }
        // std::set iterates ascending, so the first mapped hit in this
        // depth level is the smallest CWE number.
        for (int candidate : next)
            if (auto it = h.owasp_map.find(candidate); it != h.owasp_map.end())
                return it->second;
        frontier = std::move(next);
    }
    return std::string(kOwaspOther);
}

}  // namespace sensapi
