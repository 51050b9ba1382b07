#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensapi/catalog.hpp"
#include "sensapi/graph_model.hpp"
#include "sensapi/stitcher.hpp"

namespace sensapi {

enum class EntryPointPolicy { AllCoreMethods, PublicCoreMethods };

inline std::string_view to_string(EntryPointPolicy p) {
    return p == EntryPointPolicy::AllCoreMethods ? "all_core_methods" : "public_core_methods";
}

struct EntryPointSet {
    std::vector<MethodRef> roots;  // sorted, unique; owners are core types
    EntryPointPolicy policy = EntryPointPolicy::AllCoreMethods;
};

inline EntryPointSet entry_points(const IntraPackageCallGraph& core, EntryPointPolicy policy,
                                  std::vector<std::string>* warnings = nullptr) {
    EntryPointSet eps;
    eps.policy = policy;
    for (const TypeRecord& t : core.types)
        for (const MethodDecl& m : t.methods) {
            if (policy == EntryPointPolicy::PublicCoreMethods &&
                m.visibility != Visibility::Public)
                continue;
            eps.roots.push_back({t.fqn, m.name, m.descriptor});
        }
    std::sort(eps.roots.begin(), eps.roots.end());
    eps.roots.erase(std::unique(eps.roots.begin(), eps.roots.end()), eps.roots.end());
    if (eps.roots.empty() && warnings)
        warnings->push_back("no entry points in " + core.package.to_string() + " under policy " +
                            std::string(to_string(policy)));
    return eps;
}

struct SensitiveHit {
    MethodRef caller;
    const SensitiveApi* api = nullptr;  // borrowed; the catalog must outlive the hits
    std::int64_t multiplicity = 1;
    bool direct = false;  // caller's owner is defined in the core package
};

struct ReachabilityResult {
    std::vector<MethodRef> visit_order;  // pre-order BFS discovery order
    std::unordered_set<MethodRef, MethodRefHash> visited;
    std::vector<SensitiveHit> hits;
};

// Pre-order BFS from the root set. Roots are processed in canonical sorted
// order and each node is enqueued at most once, so the discovery order is
// deterministic and the walk terminates on cyclic graphs.
inline ReachabilityResult reach(const InterPackageCallGraph& graph, const EntryPointSet& roots) {
    std::unordered_map<MethodRef, std::vector<const MethodRef*>, MethodRefHash> adjacency;
    for (const ResolvedEdge& e : graph.edges) adjacency[e.caller].push_back(&e.target);

    std::vector<MethodRef> sorted_roots = roots.roots;
    std::sort(sorted_roots.begin(), sorted_roots.end());

    ReachabilityResult r;
    std::deque<MethodRef> queue;
    for (const MethodRef& root : sorted_roots) {
        if (r.visited.insert(root).second) {
            r.visit_order.push_back(root);
            queue.push_back(root);
        }
    }
    while (!queue.empty()) {
        MethodRef cur = std::move(queue.front());
        queue.pop_front();
        auto it = adjacency.find(cur);
        if (it == adjacency.end()) continue;
        for (const MethodRef* next : it->second) {
            if (r.visited.insert(*next).second) {
                r.visit_order.push_back(*next);
                queue.push_back(*next);
            }
        }
    }
    return r;
}

// Appends one hit per edge whose caller was reached and whose target is a
// catalog entry; the hit carries the edge multiplicity. Targets match on
// identity only, so a resolved-dispatch target that happens to be a catalog
// API counts exactly like an external leaf.
inline void count_sensitive(const InterPackageCallGraph& graph, ReachabilityResult& result,
                            const SensitiveApiCatalog& catalog) {
    for (const ResolvedEdge& e : graph.edges) {
        if (!result.visited.count(e.caller)) continue;
        const SensitiveApi* api = catalog.lookup(e.target.owner_fqn, e.target.name);
        if (!api) continue;
        result.hits.push_back({e.caller, api, e.multiplicity,
                               graph.core_owns(e.caller.owner_fqn)});
    }
}

// Direct callees only, no traversal: the catalog hits among the call sites
// whose caller is the given function. Deliberately an underestimation.
inline std::map<MethodRef, std::vector<SensitiveHit>> vulnerable_function_scan(
    const IntraPackageCallGraph& graph, const std::vector<MethodRef>& vuln_functions,
    const SensitiveApiCatalog& catalog, std::vector<std::string>* warnings = nullptr) {
    std::map<MethodRef, std::vector<SensitiveHit>> out;
    for (const MethodRef& fn : vuln_functions) {
        auto& hits = out[fn];  // absent functions still map to empty lists
        if (!graph.defines_method(fn)) {
            if (warnings)
                warnings->push_back("vulnerable function " + fn.display() +
                                    " is not defined in " + graph.package.to_string());
            continue;
        }
        for (const CallSite& site : graph.call_sites) {
            if (!(site.caller == fn)) continue;
            const SensitiveApi* api =
                catalog.lookup(site.declared_callee.owner_fqn, site.declared_callee.name);
            if (api) hits.push_back({fn, api, site.multiplicity, true});
        }
    }
    return out;
}

}  // namespace sensapi
