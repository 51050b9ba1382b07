#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sensapi/catalog.hpp"
#include "sensapi/detail/json_util.hpp"
#include "sensapi/errors.hpp"

namespace sensapi {

// ---------------------------------------------------------------------------
// Core value types
// ---------------------------------------------------------------------------

struct PackageCoordinates {
    std::string group;
    std::string artifact;
    std::string version;

    std::string to_string() const { return group + ":" + artifact + ":" + version; }

    auto operator<=>(const PackageCoordinates&) const = default;
};

// A method reference as it appears in exchange documents. Two refs are equal
// iff all present fields match; an absent descriptor only matches an absent
// descriptor.
struct MethodRef {
    std::string owner_fqn;
    std::string name;  // simple name, or "<init>"
    std::optional<std::string> descriptor;

    std::string display() const {
        std::string s = ApiIdentifier{owner_fqn, name}.display();
        if (descriptor) s += *descriptor;
        return s;
    }

    auto operator<=>(const MethodRef&) const = default;
};

struct MethodRefHash {
    std::size_t operator()(const MethodRef& m) const {
        std::size_t h = std::hash<std::string>{}(m.owner_fqn);
        h ^= std::hash<std::string>{}(m.name) + 0x9e3779b9 + (h << 6) + (h >> 2);
        if (m.descriptor)
            h ^= std::hash<std::string>{}(*m.descriptor) + 0x9e3779b9 + (h << 6) + (h >> 2);
        return h;
    }
};

enum class TypeKind { Class, Interface, AbstractClass };
enum class Visibility { Public, Protected, Package, Private };
enum class DispatchKind { Static, Virtual, Interface, Special };

inline std::string_view to_string(TypeKind k) {
    switch (k) {
        case TypeKind::Class: return "class";
        case TypeKind::Interface: return "interface";
        case TypeKind::AbstractClass: return "abstract_class";
    }
    return "?";
}

inline std::string_view to_string(Visibility v) {
    switch (v) {
        case Visibility::Public: return "public";
        case Visibility::Protected: return "protected";
        case Visibility::Package: return "package";
        case Visibility::Private: return "private";
    }
    return "?";
}

inline std::string_view to_string(DispatchKind d) {
    switch (d) {
        case DispatchKind::Static: return "static";
        case DispatchKind::Virtual: return "virtual";
        case DispatchKind::Interface: return "interface";
        case DispatchKind::Special: return "special";
    }
    return "?";
}

inline std::optional<TypeKind> parse_type_kind(std::string_view s) {
    if (s == "class") return TypeKind::Class;
    if (s == "interface") return TypeKind::Interface;
    if (s == "abstract_class") return TypeKind::AbstractClass;
    return std::nullopt;
}

inline std::optional<Visibility> parse_visibility(std::string_view s) {
    if (s == "public") return Visibility::Public;
    if (s == "protected") return Visibility::Protected;
    if (s == "package") return Visibility::Package;
    if (s == "private") return Visibility::Private;
    return std::nullopt;
}

inline std::optional<DispatchKind> parse_dispatch(std::string_view s) {
    if (s == "static") return DispatchKind::Static;
    if (s == "virtual") return DispatchKind::Virtual;
    if (s == "interface") return DispatchKind::Interface;
    if (s == "special") return DispatchKind::Special;
    return std::nullopt;
}

struct MethodDecl {
    std::string name;
    std::optional<std::string> descriptor;
    bool is_abstract = false;
    Visibility visibility = Visibility::Public;

    auto operator<=>(const MethodDecl&) const = default;
};

struct TypeRecord {
    std::string fqn;
    TypeKind kind = TypeKind::Class;
    std::optional<std::string> superclass;
    std::vector<std::string> interfaces;  // unique, input order preserved
    std::vector<MethodDecl> methods;      // unique by (name, descriptor)
    bool has_public_constructor = false;

    bool operator==(const TypeRecord&) const = default;
};

struct CallSite {
    MethodRef caller;
    MethodRef declared_callee;
    DispatchKind dispatch = DispatchKind::Virtual;
    std::int64_t multiplicity = 1;  // source-level occurrences, >= 1

    bool operator==(const CallSite&) const = default;
};

// One package version's call graph: the types it defines plus every call
// site, including calls into types it does not define (JDK, dependencies).
struct IntraPackageCallGraph {
    PackageCoordinates package;
    std::vector<TypeRecord> types;
    std::vector<CallSite> call_sites;

    const TypeRecord* find_type(std::string_view fqn) const {
        for (const TypeRecord& t : types)
            if (t.fqn == fqn) return &t;
        return nullptr;
    }

    bool defines_method(const MethodRef& m) const {
        const TypeRecord* t = find_type(m.owner_fqn);
        if (!t) return false;
        return std::any_of(t->methods.begin(), t->methods.end(), [&](const MethodDecl& d) {
            return d.name == m.name && d.descriptor == m.descriptor;
        });
    }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

// `Foo()` is constructor shorthand; trailing parens on any name are noise.
inline std::string normalize_method_name(std::string name, const std::string& owner_fqn) {
    name = trim(name);
    if (name.size() >= 2 && name.ends_with("()")) {
        name.erase(name.size() - 2);
        std::string_view simple = owner_fqn;
        if (auto dot = simple.rfind('.'); dot != std::string_view::npos)
            simple.remove_prefix(dot + 1);
        if (name == simple) return std::string(kConstructorName);
    }
    return name;
}

inline MethodRef parse_method_ref(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) throw ParseError(ctx + ": must be an object");
    check_keys(obj, {"owner", "name", "descriptor"}, ctx);
    MethodRef m;
    m.owner_fqn = trim(require_string(obj, "owner", ctx));
    m.name = normalize_method_name(require_string(obj, "name", ctx), m.owner_fqn);
    if (auto it = obj.find("descriptor"); it != obj.end()) {
        if (!it->is_string()) throw ParseError(ctx + ": descriptor must be a string");
        m.descriptor = trim(it->get<std::string>());
    }
    if (!is_valid_type_fqn(m.owner_fqn))
        throw ValidationError(ctx + ": invalid owner \"" + m.owner_fqn + "\"");
    if (m.name.empty()) throw ValidationError(ctx + ": empty method name");
    return m;
}

inline json method_ref_to_json(const MethodRef& m) {
    json j;
    j["owner"] = m.owner_fqn;
    j["name"] = m.name;
    if (m.descriptor) j["descriptor"] = *m.descriptor;
    return j;
}

}  // namespace detail

inline IntraPackageCallGraph parse_callgraph(std::string_view text) {
    using detail::json;
    json doc = detail::parse_json(text, "call graph");
    if (!doc.is_object()) throw ParseError("call graph: top level must be an object");
    detail::check_keys(doc, {"schema_version", "package", "types", "call_sites"}, "call graph");
    detail::require_schema_version(doc, "call graph");

    IntraPackageCallGraph g;
    {
        const json& pkg = detail::require_object(doc, "package", "call graph");
        detail::check_keys(pkg, {"group", "artifact", "version"}, "package");
        g.package.group = detail::trim(detail::require_string(pkg, "group", "package"));
        g.package.artifact = detail::trim(detail::require_string(pkg, "artifact", "package"));
        g.package.version = detail::trim(detail::require_string(pkg, "version", "package"));
        if (g.package.group.empty() || g.package.artifact.empty() || g.package.version.empty())
            throw ValidationError("package: group, artifact and version must be non-empty");
    }

    std::unordered_map<std::string, std::size_t> type_index;
    std::size_t ti = 0;
    for (const json& raw : detail::require_array(doc, "types", "call graph")) {
        const std::string ctx = "types[" + std::to_string(ti) + "]";
        if (!raw.is_object()) throw ParseError(ctx + ": must be an object");
        detail::check_keys(raw,
                           {"fqn", "kind", "superclass", "interfaces", "methods",
                            "public_constructor"},
                           ctx);
        TypeRecord t;
        t.fqn = detail::trim(detail::require_string(raw, "fqn", ctx));
        if (!is_valid_type_fqn(t.fqn))
            throw ValidationError(ctx + ": invalid type name \"" + t.fqn + "\"");

        std::string kind = detail::require_string(raw, "kind", ctx);
        auto parsed_kind = parse_type_kind(kind);
        if (!parsed_kind) throw ValidationError(ctx + ": unknown kind \"" + kind + "\"");
        t.kind = *parsed_kind;

        if (auto it = raw.find("superclass"); it != raw.end()) {
            if (!it->is_string()) throw ParseError(ctx + ": superclass must be a string");
            t.superclass = detail::trim(it->get<std::string>());
            if (!is_valid_type_fqn(*t.superclass))
                throw ValidationError(ctx + ": invalid superclass \"" + *t.superclass + "\"");
            if (t.kind == TypeKind::Interface)
                throw ValidationError(ctx + ": interfaces must not declare a superclass" +
                                      " (extended interfaces belong in \"interfaces\")");
        }

        std::set<std::string> iface_seen;
        for (const json& i : detail::require_array(raw, "interfaces", ctx)) {
            if (!i.is_string()) throw ParseError(ctx + ": interfaces must be strings");
            std::string fqn = detail::trim(i.get<std::string>());
            if (!is_valid_type_fqn(fqn))
                throw ValidationError(ctx + ": invalid interface name \"" + fqn + "\"");
            if (iface_seen.insert(fqn).second) t.interfaces.push_back(std::move(fqn));
        }

        std::set<std::pair<std::string, std::optional<std::string>>> method_seen;
        std::size_t mi = 0;
        for (const json& m : detail::require_array(raw, "methods", ctx)) {
            const std::string mctx = ctx + ".methods[" + std::to_string(mi) + "]";
            if (!m.is_object()) throw ParseError(mctx + ": must be an object");
            detail::check_keys(m, {"name", "descriptor", "abstract", "visibility"}, mctx);
            MethodDecl d;
            d.name = detail::normalize_method_name(detail::require_string(m, "name", mctx), t.fqn);
            if (d.name.empty()) throw ValidationError(mctx + ": empty method name");
            if (auto it = m.find("descriptor"); it != m.end()) {
                if (!it->is_string()) throw ParseError(mctx + ": descriptor must be a string");
                d.descriptor = detail::trim(it->get<std::string>());
            }
            d.is_abstract = detail::require_bool(m, "abstract", mctx);
            std::string vis = detail::require_string(m, "visibility", mctx);
            auto parsed_vis = parse_visibility(vis);
            if (!parsed_vis) throw ValidationError(mctx + ": unknown visibility \"" + vis + "\"");
            d.visibility = *parsed_vis;
            if (!method_seen.insert({d.name, d.descriptor}).second)
                throw ValidationError(mctx + ": duplicate method " + d.name + " in " + t.fqn);
            t.methods.push_back(std::move(d));
            ++mi;
        }
        t.has_public_constructor = detail::require_bool(raw, "public_constructor", ctx);

        if (type_index.count(t.fqn))
            throw ValidationError(ctx + ": duplicate type \"" + t.fqn + "\"");
        type_index.emplace(t.fqn, ti);
        g.types.push_back(std::move(t));
        ++ti;
    }

    std::size_t si = 0;
    for (const json& raw : detail::require_array(doc, "call_sites", "call graph")) {
        const std::string ctx = "call_sites[" + std::to_string(si) + "]";
        if (!raw.is_object()) throw ParseError(ctx + ": must be an object");
        detail::check_keys(raw, {"caller", "callee", "dispatch", "multiplicity"}, ctx);
        CallSite s;
        s.caller = detail::parse_method_ref(detail::require(raw, "caller", ctx), ctx + ".caller");
        s.declared_callee =
            detail::parse_method_ref(detail::require(raw, "callee", ctx), ctx + ".callee");
        std::string dispatch = detail::require_string(raw, "dispatch", ctx);
        auto parsed_dispatch = parse_dispatch(dispatch);
        if (!parsed_dispatch)
            throw ValidationError(ctx + ": unknown dispatch \"" + dispatch + "\"");
        s.dispatch = *parsed_dispatch;
        if (auto it = raw.find("multiplicity"); it != raw.end()) {
            if (!it->is_number_integer())
                throw ParseError(ctx + ": multiplicity must be an integer");
            s.multiplicity = it->get<std::int64_t>();
        }
        if (s.multiplicity < 1)
            throw ValidationError(ctx + ": multiplicity must be >= 1");

        auto caller_type = type_index.find(s.caller.owner_fqn);
        if (caller_type == type_index.end())
            throw ValidationError(ctx + ": caller owner \"" + s.caller.owner_fqn +
                                  "\" is not declared in types");
        // Callee owners may be external (JDK etc.); when the owner IS local,
        // an interface-dispatch site must name an interface.
        if (s.dispatch == DispatchKind::Interface) {
            auto callee_type = type_index.find(s.declared_callee.owner_fqn);
            if (callee_type != type_index.end() &&
                g.types[callee_type->second].kind != TypeKind::Interface)
                throw ValidationError(ctx + ": interface dispatch on non-interface type \"" +
                                      s.declared_callee.owner_fqn + "\"");
        }
        g.call_sites.push_back(std::move(s));
        ++si;
    }
    return g;
}

// Canonical form: fixed key order, every optional except descriptors and
// superclass written explicitly. parse(serialize(g)) == g, and serialize is
// the identity's witness for round-trip tests.
inline std::string serialize_callgraph(const IntraPackageCallGraph& g) {
    using detail::json;
    json doc;
    doc["schema_version"] = "1";
    doc["package"] = {{"group", g.package.group},
                      {"artifact", g.package.artifact},
                      {"version", g.package.version}};
    doc["types"] = json::array();
    for (const TypeRecord& t : g.types) {
        json jt;
        jt["fqn"] = t.fqn;
        jt["kind"] = std::string(to_string(t.kind));
        if (t.superclass) jt["superclass"] = *t.superclass;
        jt["interfaces"] = t.interfaces;
        jt["methods"] = json::array();
        for (const MethodDecl& m : t.methods) {
            json jm;
            jm["name"] = m.name;
            if (m.descriptor) jm["descriptor"] = *m.descriptor;
            jm["abstract"] = m.is_abstract;
            jm["visibility"] = std::string(to_string(m.visibility));
            jt["methods"].push_back(std::move(jm));
        }
        jt["public_constructor"] = t.has_public_constructor;
        doc["types"].push_back(std::move(jt));
    }
    doc["call_sites"] = json::array();
    for (const CallSite& s : g.call_sites) {
        json js;
        js["caller"] = detail::method_ref_to_json(s.caller);
        js["callee"] = detail::method_ref_to_json(s.declared_callee);
        js["dispatch"] = std::string(to_string(s.dispatch));
        js["multiplicity"] = s.multiplicity;
        doc["call_sites"].push_back(std::move(js));
    }
    return detail::dump_canonical(doc);
}

// ---------------------------------------------------------------------------
// Type universe
// ---------------------------------------------------------------------------

// Union of all packages' type records keyed by fqn, with provenance.
struct TypeUniverse {
    std::unordered_map<std::string, TypeRecord> types;
    std::unordered_map<std::string, PackageCoordinates> owner_package;
    std::vector<std::string> warnings;
};

// Duplicate fqns across packages (shaded/vendored classes) resolve to the
// first occurrence in input order, like classpath ordering would.
inline TypeUniverse merge_type_universe(const std::vector<const IntraPackageCallGraph*>& graphs) {
    TypeUniverse u;
    for (const IntraPackageCallGraph* g : graphs) {
        for (const TypeRecord& t : g->types) {
            auto it = u.types.find(t.fqn);
            if (it == u.types.end()) {
                u.types.emplace(t.fqn, t);
                u.owner_package.emplace(t.fqn, g->package);
                continue;
            }
            bool was_interface = it->second.kind == TypeKind::Interface;
            bool is_interface = t.kind == TypeKind::Interface;
            if (was_interface != is_interface)
                throw ValidationError("type universe: \"" + t.fqn +
                                      "\" is declared as both a class and an interface");
            u.warnings.push_back("duplicate type \"" + t.fqn + "\" in " +
                                 g->package.to_string() + " shadowed by " +
                                 u.owner_package.at(t.fqn).to_string());
        }
    }
    return u;
}

}  // namespace sensapi
