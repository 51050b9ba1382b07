#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensapi/detail/json_util.hpp"
#include "sensapi/errors.hpp"
#include "sensapi/graph_model.hpp"

namespace sensapi {

// ---------------------------------------------------------------------------
// Type hierarchy
// ---------------------------------------------------------------------------

// Merged subtype relation over a core package plus its dependencies.
// `subtypes` is the exact inverse of the superclass/interfaces edges present
// in `types`; it may be keyed by fqns with no record of their own (edges to
// external supertypes are kept).
class TypeHierarchy {
public:
    std::unordered_map<std::string, TypeRecord> types;
    std::unordered_map<std::string, PackageCoordinates> owner_package;
    std::map<std::string, std::set<std::string>> subtypes;  // direct only

    const TypeRecord* find(const std::string& fqn) const {
        auto it = types.find(fqn);
        return it == types.end() ? nullptr : &it->second;
    }

    // All transitive subtypes of `fqn` (not including `fqn` itself),
    // discovered breadth-first in sorted order.
    std::vector<std::string> transitive_subtypes(const std::string& fqn) const {
        std::vector<std::string> out;
        std::unordered_set<std::string> seen{fqn};
        std::vector<std::string> frontier{fqn};
        while (!frontier.empty()) {
            std::vector<std::string> next;
            for (const std::string& t : frontier) {
                auto it = subtypes.find(t);
                if (it == subtypes.end()) continue;
                for (const std::string& s : it->second) {
                    if (seen.insert(s).second) {
                        out.push_back(s);
                        next.push_back(s);
                    }
                }
            }
            frontier = std::move(next);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline TypeHierarchy build_hierarchy(const TypeUniverse& universe) {
    TypeHierarchy h;
    h.types = universe.types;
    h.owner_package = universe.owner_package;

    for (const auto& [fqn, t] : h.types) {
        if (t.superclass) h.subtypes[*t.superclass].insert(fqn);
        for (const std::string& i : t.interfaces) h.subtypes[i].insert(fqn);
    }

    // Class-extension cycles make superclass-chain walks diverge; reject
    // them up front and name the cycle.
    std::unordered_map<std::string, int> color;  // 0 unseen, 1 on path, 2 done
    for (const auto& [start, _] : h.types) {
        if (color[start]) continue;
        std::vector<std::string> path;
        std::string cur = start;
        while (true) {
            if (color[cur] == 2) break;
            if (color[cur] == 1) {
                auto at = std::find(path.begin(), path.end(), cur);
                std::string cycle;
                for (auto it = at; it != path.end(); ++it) cycle += *it + " -> ";
                throw ValidationError("type hierarchy: class extension cycle: " + cycle + cur);
            }
            color[cur] = 1;
            path.push_back(cur);
            const TypeRecord* rec = h.find(cur);
            if (!rec || !rec->superclass || !h.find(*rec->superclass)) break;
            cur = *rec->superclass;
        }
        for (const std::string& n : path) color[n] = 2;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Call-site resolution (class hierarchy analysis)
// ---------------------------------------------------------------------------

namespace detail {

inline bool descriptor_matches(const std::optional<std::string>& a,
                               const std::optional<std::string>& b) {
    // Producers without descriptors still interoperate; matching degrades
    // to name level (an over-approximation).
    return !a || !b || *a == *b;
}

// Most-derived definitions of (name, descriptor) visible on `type_fqn`.
// Walks the superclass chain; the first declaring type decides, and
// abstract-only declarations resolve to nothing. If no class on the chain
// declares the method, interface default methods are searched breadth-first
// (they count as concrete definitions).
inline std::vector<MethodRef> concrete_definitions(const TypeHierarchy& h,
                                                   const std::string& type_fqn,
                                                   const std::string& name,
                                                   const std::optional<std::string>& descriptor) {
    std::vector<std::string> chain;
    for (const TypeRecord* t = h.find(type_fqn); t;) {
        chain.push_back(t->fqn);
        std::vector<MethodRef> found;
        bool declared = false;
        for (const MethodDecl& m : t->methods) {
            if (m.name != name || !descriptor_matches(m.descriptor, descriptor)) continue;
            declared = true;
            if (!m.is_abstract) found.push_back({t->fqn, m.name, m.descriptor});
        }
        if (declared) return found;  // may be empty: abstract definitions excluded
        t = t->superclass ? h.find(*t->superclass) : nullptr;
    }

    // Default-method fallback over the interfaces of every class on the chain.
    std::set<std::string> seen;
    std::vector<std::string> frontier;
    for (const std::string& c : chain) {
        const TypeRecord* t = h.find(c);
        for (const std::string& i : t->interfaces)
            if (seen.insert(i).second) frontier.push_back(i);
    }
    std::sort(frontier.begin(), frontier.end());
    while (!frontier.empty()) {
        std::vector<MethodRef> found;
        std::vector<std::string> next;
        for (const std::string& ifqn : frontier) {
            const TypeRecord* t = h.find(ifqn);
            if (!t) continue;
            for (const MethodDecl& m : t->methods)
                if (m.name == name && descriptor_matches(m.descriptor, descriptor) &&
                    !m.is_abstract)
                    found.push_back({t->fqn, m.name, m.descriptor});
            for (const std::string& i : t->interfaces)
                if (seen.insert(i).second) next.push_back(i);
        }
        if (!found.empty()) {
            std::sort(found.begin(), found.end());
            return found;
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    return {};
}

}  // namespace detail

struct Resolution {
    bool external = false;           // declared owner absent from the universe
    std::vector<MethodRef> targets;  // sorted, unique
};

// static/special   -> the declared callee, if its owner (or a superclass)
//                     concretely defines the method; otherwise nothing.
// virtual/interface-> the most-derived definition for every concrete class
//                     subtype of the declared owner, owner included when it
//                     is itself a concrete class.
inline Resolution resolve_call_site(const CallSite& site, const TypeHierarchy& hierarchy) {
    const std::string& owner = site.declared_callee.owner_fqn;
    const TypeRecord* owner_rec = hierarchy.find(owner);
    if (!owner_rec) return {.external = true, .targets = {}};

    Resolution r;
    if (site.dispatch == DispatchKind::Static || site.dispatch == DispatchKind::Special) {
        if (!detail::concrete_definitions(hierarchy, owner, site.declared_callee.name,
                                          site.declared_callee.descriptor)
                 .empty())
            r.targets.push_back(site.declared_callee);
        return r;
    }

    std::set<MethodRef> targets;
    std::vector<std::string> receivers;
    if (owner_rec->kind == TypeKind::Class) receivers.push_back(owner);
    for (const std::string& s : hierarchy.transitive_subtypes(owner)) {
        const TypeRecord* rec = hierarchy.find(s);
        if (rec && rec->kind == TypeKind::Class) receivers.push_back(s);
    }
    for (const std::string& recv : receivers)
        for (MethodRef& m : detail::concrete_definitions(hierarchy, recv,
                                                         site.declared_callee.name,
                                                         site.declared_callee.descriptor))
            targets.insert(std::move(m));
    r.targets.assign(targets.begin(), targets.end());
    return r;
}

// ---------------------------------------------------------------------------
// Stitching
// ---------------------------------------------------------------------------

enum class EdgeOrigin { ResolvedDispatch, StaticDirect, ExternalLeaf };

inline std::string_view to_string(EdgeOrigin o) {
    switch (o) {
        case EdgeOrigin::ResolvedDispatch: return "resolved_dispatch";
        case EdgeOrigin::StaticDirect: return "static_direct";
        case EdgeOrigin::ExternalLeaf: return "external_leaf";
    }
    return "?";
}

struct ResolvedEdge {
    MethodRef caller;
    MethodRef target;
    // nullopt marks EXTERNAL: the target owner is absent from the universe.
    std::optional<PackageCoordinates> target_owner_package;
    std::int64_t multiplicity = 1;
    EdgeOrigin origin = EdgeOrigin::ResolvedDispatch;

    bool operator==(const ResolvedEdge&) const = default;
};

struct InterPackageCallGraph {
    PackageCoordinates core;
    std::vector<PackageCoordinates> members;  // core + dependencies, sorted
    std::vector<ResolvedEdge> edges;          // sorted by caller, then target
    std::unordered_map<std::string, PackageCoordinates> type_owners;

    bool core_owns(const std::string& fqn) const {
        auto it = type_owners.find(fqn);
        return it != type_owners.end() && it->second == core;
    }

    // Distinct callee owners kept as external leaves (typically JDK types).
    std::vector<std::string> external_owner_fqns() const {
        std::set<std::string> out;
        for (const ResolvedEdge& e : edges)
            if (e.origin == EdgeOrigin::ExternalLeaf) out.insert(e.target.owner_fqn);
        return {out.begin(), out.end()};
    }
};

namespace detail {

inline bool edge_less(const ResolvedEdge& a, const ResolvedEdge& b) {
    auto key = [](const ResolvedEdge& e) {
        return std::tie(e.caller, e.target, e.origin, e.target_owner_package, e.multiplicity);
    };
    return key(a) < key(b);
}

}  // namespace detail

// Resolves every call site of every member package against the merged
// universe. Call sites whose declared owner is unknown contribute exactly
// one external-leaf edge each; unresolvable in-universe dispatch (e.g. an
// interface with no concrete implementer) contributes no edge at all.
inline InterPackageCallGraph stitch(const IntraPackageCallGraph& core,
                                    const std::vector<IntraPackageCallGraph>& deps,
                                    std::vector<std::string>* warnings = nullptr) {
    for (const IntraPackageCallGraph& d : deps)
        if (d.package == core.package)
            throw ValidationError("stitch: core package " + core.package.to_string() +
                                  " also appears in the dependency list");

    std::vector<const IntraPackageCallGraph*> all{&core};
    for (const IntraPackageCallGraph& d : deps) all.push_back(&d);

    TypeUniverse universe = merge_type_universe(all);
    if (warnings)
        warnings->insert(warnings->end(), universe.warnings.begin(), universe.warnings.end());
    TypeHierarchy hierarchy = build_hierarchy(universe);

    InterPackageCallGraph g;
    g.core = core.package;
    for (const IntraPackageCallGraph* p : all) g.members.push_back(p->package);
    std::sort(g.members.begin(), g.members.end());
    g.type_owners = std::move(universe.owner_package);

    for (const IntraPackageCallGraph* p : all) {
        for (const CallSite& site : p->call_sites) {
            Resolution r = resolve_call_site(site, hierarchy);
            if (r.external) {
                g.edges.push_back({site.caller, site.declared_callee, std::nullopt,
                                   site.multiplicity, EdgeOrigin::ExternalLeaf});
                continue;
            }
            EdgeOrigin origin = (site.dispatch == DispatchKind::Static ||
                                 site.dispatch == DispatchKind::Special)
                                    ? EdgeOrigin::StaticDirect
                                    : EdgeOrigin::ResolvedDispatch;
            for (const MethodRef& target : r.targets)
                g.edges.push_back({site.caller, target,
                                   g.type_owners.at(target.owner_fqn), site.multiplicity,
                                   origin});
        }
    }
    std::sort(g.edges.begin(), g.edges.end(), detail::edge_less);
    return g;
}

// Cache/inspection dump; same JSON conventions as the call-graph format.
inline std::string serialize_intergraph(const InterPackageCallGraph& g) {
    using detail::json;
    json doc;
    doc["schema_version"] = "1";
    doc["core"] = {{"group", g.core.group},
                   {"artifact", g.core.artifact},
                   {"version", g.core.version}};
    doc["members"] = json::array();
    for (const PackageCoordinates& m : g.members)
        doc["members"].push_back(
            {{"group", m.group}, {"artifact", m.artifact}, {"version", m.version}});
    {
        std::map<std::string, std::string> owners;
        for (const auto& [fqn, pkg] : g.type_owners) owners.emplace(fqn, pkg.to_string());
        json jo = json::object();
        for (const auto& [fqn, pkg] : owners) jo[fqn] = pkg;
        doc["type_owners"] = std::move(jo);
    }
    doc["edges"] = json::array();
    for (const ResolvedEdge& e : g.edges) {
        json je;
        je["caller"] = detail::method_ref_to_json(e.caller);
        je["target"] = detail::method_ref_to_json(e.target);
        je["package"] = e.target_owner_package ? e.target_owner_package->to_string()
                                               : std::string("EXTERNAL");
        je["multiplicity"] = e.multiplicity;
        je["origin"] = std::string(to_string(e.origin));
        doc["edges"].push_back(std::move(je));
    }
    return detail::dump_canonical(doc);
}

}  // namespace sensapi
