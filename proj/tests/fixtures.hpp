#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sensapi/catalog.hpp"
#include "sensapi/graph_model.hpp"
#include "sensapi/detail/random.hpp"

namespace fixtures {

using namespace sensapi;

inline std::string source_dir() { return SENSAPI_SOURCE_DIR; }
inline std::string shipped_catalog_path() { return source_dir() + "/data/sensitive_apis.json"; }

inline MethodDecl method(std::string name, std::optional<std::string> descriptor = std::nullopt,
                         bool is_abstract = false, Visibility vis = Visibility::Public) {
    return {std::move(name), std::move(descriptor), is_abstract, vis};
}

inline TypeRecord make_type(std::string fqn, TypeKind kind,
                            std::optional<std::string> superclass = std::nullopt,
                            std::vector<std::string> interfaces = {},
                            std::vector<MethodDecl> methods = {}) {
    TypeRecord t;
    t.fqn = std::move(fqn);
    t.kind = kind;
    t.superclass = std::move(superclass);
    t.interfaces = std::move(interfaces);
    t.methods = std::move(methods);
    t.has_public_constructor = kind != TypeKind::Interface;
    return t;
}

inline CallSite site(std::string caller_owner, std::string caller_name, std::string callee_owner,
                     std::string callee_name, DispatchKind dispatch = DispatchKind::Virtual,
                     std::int64_t multiplicity = 1) {
    CallSite s;
    s.caller = {std::move(caller_owner), std::move(caller_name), std::nullopt};
    s.declared_callee = {std::move(callee_owner), std::move(callee_name), std::nullopt};
    s.dispatch = dispatch;
    s.multiplicity = multiplicity;
    return s;
}

inline IntraPackageCallGraph graph(PackageCoordinates pkg, std::vector<TypeRecord> types,
                                   std::vector<CallSite> sites) {
    IntraPackageCallGraph g;
    g.package = std::move(pkg);
    g.types = std::move(types);
    g.call_sites = std::move(sites);
    return g;
}

inline PackageCoordinates pkg(const std::string& artifact, const std::string& version = "1.0") {
    return {"org.example", artifact, version};
}

// A small catalog covering the subcategories the fixture graphs touch.
inline SensitiveApiCatalog mini_catalog() {
    std::vector<SensitiveApi> entries = {
        {{"java.lang.Class", "forName"}, Category::Process, Subcategory::Reflection, {470}},
        {{"java.io.File", "exists"}, Category::Filesystem, Subcategory::Miscellaneous, {22, 73}},
        {{"java.io.FileInputStream", "<init>"}, Category::Filesystem, Subcategory::Input, {73}},
        {{"java.net.Socket", "connect"}, Category::Network, Subcategory::Socket, {577}},
        {{"javax.servlet.http.HttpSession", "getAttribute"},
         Category::Network,
         Subcategory::Http,
         {20}},
    };
    return SensitiveApiCatalog("1", std::move(entries));
}

}  // namespace fixtures
