#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sensapi/catalog.hpp"
#include "sensapi/detail/json_util.hpp"
#include "sensapi/detail/random.hpp"
#include "sensapi/errors.hpp"
#include "sensapi/reachability.hpp"

namespace sensapi {

enum class AnalysisMode { Intra, Inter };

inline std::string_view to_string(AnalysisMode m) {
    return m == AnalysisMode::Intra ? "intra" : "inter";
}

inline std::optional<AnalysisMode> parse_mode(std::string_view s) {
    if (s == "intra") return AnalysisMode::Intra;
    if (s == "inter") return AnalysisMode::Inter;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Per-version profile
// ---------------------------------------------------------------------------

// Sensitive-call counts for one package version. Subcategory and category
// vectors are dense: zero-valued entries are represented explicitly.
struct PackageVersionProfile {
    PackageCoordinates package;
    AnalysisMode mode = AnalysisMode::Intra;
    std::map<ApiIdentifier, std::int64_t> per_api;
    std::array<std::int64_t, kSubcategoryCount> per_subcategory{};
    std::array<std::int64_t, kCategoryCount> per_category{};
    std::int64_t direct_count = 0;
    std::int64_t indirect_count = 0;
    int unique_subcategories_used = 0;

    std::int64_t total() const { return direct_count + indirect_count; }

    bool operator==(const PackageVersionProfile&) const = default;
};

inline PackageVersionProfile build_profile(const PackageCoordinates& package,
                                           const ReachabilityResult& result,
                                           AnalysisMode mode) {
    PackageVersionProfile p;
    p.package = package;
    p.mode = mode;
    for (const SensitiveHit& hit : result.hits) {
        p.per_api[hit.api->id] += hit.multiplicity;
        p.per_subcategory[index_of(hit.api->subcategory)] += hit.multiplicity;
        p.per_category[index_of(hit.api->category)] += hit.multiplicity;
        (hit.direct ? p.direct_count : p.indirect_count) += hit.multiplicity;
    }
    for (std::int64_t c : p.per_subcategory)
        if (c > 0) ++p.unique_subcategories_used;
    return p;
}

namespace detail {

inline void check_profile_consistency(const PackageVersionProfile& p, const std::string& ctx) {
    std::array<std::int64_t, kCategoryCount> rollup{};
    std::int64_t sub_sum = 0;
    for (Subcategory s : kAllSubcategories) {
        rollup[index_of(category_of(s))] += p.per_subcategory[index_of(s)];
        sub_sum += p.per_subcategory[index_of(s)];
    }
    if (rollup != p.per_category)
        throw ValidationError(ctx + ": per_category does not match per_subcategory rollup");
    std::int64_t api_sum = 0;
    for (const auto& [_, c] : p.per_api) api_sum += c;
    if (api_sum != sub_sum || api_sum != p.direct_count + p.indirect_count)
        throw ValidationError(ctx + ": per_api, per_subcategory and direct/indirect totals differ");
    int unique = 0;
    for (std::int64_t c : p.per_subcategory)
        if (c > 0) ++unique;
    if (unique != p.unique_subcategories_used)
        throw ValidationError(ctx + ": unique_subcategories_used is inconsistent");
}

}  // namespace detail

inline std::string emit_profile_json(const PackageVersionProfile& p) {
    using detail::json;
    json doc;
    doc["schema_version"] = "1";
    doc["package"] = {{"group", p.package.group},
                      {"artifact", p.package.artifact},
                      {"version", p.package.version}};
    doc["mode"] = std::string(to_string(p.mode));
    json apis = json::object();
    for (const auto& [api, count] : p.per_api) apis[api.display()] = count;
    doc["per_api"] = std::move(apis);
    json subs = json::object();
    for (Subcategory s : kAllSubcategories)
        subs[std::string(to_string(s))] = p.per_subcategory[index_of(s)];
    doc["per_subcategory"] = std::move(subs);
    doc["per_category"] = {{"Filesystem", p.per_category[0]},
                           {"Network", p.per_category[1]},
                           {"Process", p.per_category[2]}};
    doc["direct_count"] = p.direct_count;
    doc["indirect_count"] = p.indirect_count;
    doc["unique_subcategories_used"] = p.unique_subcategories_used;
    return detail::dump_canonical(doc);
}

inline PackageVersionProfile parse_profile(std::string_view text) {
    using detail::json;
    json doc = detail::parse_json(text, "profile");
    if (!doc.is_object()) throw ParseError("profile: top level must be an object");
    detail::check_keys(doc,
                       {"schema_version", "package", "mode", "per_api", "per_subcategory",
                        "per_category", "direct_count", "indirect_count",
                        "unique_subcategories_used"},
                       "profile");
    detail::require_schema_version(doc, "profile");

    PackageVersionProfile p;
    const json& pkg = detail::require_object(doc, "package", "profile");
    detail::check_keys(pkg, {"group", "artifact", "version"}, "profile.package");
    p.package = {detail::require_string(pkg, "group", "profile"),
                 detail::require_string(pkg, "artifact", "profile"),
                 detail::require_string(pkg, "version", "profile")};
    if (p.package.group.empty() || p.package.artifact.empty() || p.package.version.empty())
        throw ValidationError("profile: package coordinates must be non-empty");

    std::string mode = detail::require_string(doc, "mode", "profile");
    auto parsed_mode = parse_mode(mode);
    if (!parsed_mode) throw ValidationError("profile: unknown mode \"" + mode + "\"");
    p.mode = *parsed_mode;

    for (const auto& item : detail::require_object(doc, "per_api", "profile").items()) {
        auto api = parse_api_display(item.key());
        if (!api) throw ValidationError("profile: unparsable API key \"" + item.key() + "\"");
        if (!item.value().is_number_integer() || item.value().get<std::int64_t>() < 0)
            throw ParseError("profile: per_api counts must be non-negative integers");
        p.per_api[*api] = item.value().get<std::int64_t>();
    }
    const json& subs = detail::require_object(doc, "per_subcategory", "profile");
    detail::check_keys(subs,
                       {"Input", "Output", "Modification", "Miscellaneous", "Read_env",
                        "Read_network_env", "Connection", "Http", "Socket", "Naming_directory",
                        "Codec_crypto", "Dependency", "Reflection", "Operating_system",
                        "Scripting"},
                       "profile.per_subcategory");
    for (Subcategory s : kAllSubcategories)
        p.per_subcategory[index_of(s)] =
            detail::require_int(subs, std::string(to_string(s)).c_str(), "profile");
    const json& cats = detail::require_object(doc, "per_category", "profile");
    detail::check_keys(cats, {"Filesystem", "Network", "Process"}, "profile.per_category");
    p.per_category = {detail::require_int(cats, "Filesystem", "profile"),
                      detail::require_int(cats, "Network", "profile"),
                      detail::require_int(cats, "Process", "profile")};
    p.direct_count = detail::require_int(doc, "direct_count", "profile");
    p.indirect_count = detail::require_int(doc, "indirect_count", "profile");
    p.unique_subcategories_used =
        static_cast<int>(detail::require_int(doc, "unique_subcategories_used", "profile"));

    detail::check_profile_consistency(p, "profile " + p.package.to_string());
    return p;
}

// ---------------------------------------------------------------------------
// Group comparison
// ---------------------------------------------------------------------------

struct ComparisonMatrix {
    std::string group_name;
    std::vector<PackageCoordinates> rows;
    std::vector<Subcategory> columns;
    std::vector<std::vector<std::int64_t>> cells;  // rows x columns
};

// Rows come out in canonical coordinate order unless an explicit order is
// given; columns default to the canonical subcategory order, optionally
// permuted by a seed to counteract column-position bias in visual review.
inline ComparisonMatrix compare_group(const std::vector<PackageVersionProfile>& profiles,
                                      const std::string& group_name,
                                      std::optional<std::uint64_t> shuffle_seed = std::nullopt,
                                      const std::vector<PackageCoordinates>* row_order = nullptr) {
    if (profiles.empty()) throw ValidationError("compare: at least one profile required");
    std::map<PackageCoordinates, const PackageVersionProfile*> by_coords;
    for (const PackageVersionProfile& p : profiles) {
        if (!by_coords.emplace(p.package, &p).second)
            throw ValidationError("compare: duplicate package " + p.package.to_string());
    }

    ComparisonMatrix m;
    m.group_name = group_name;
    if (row_order) {
        for (const PackageCoordinates& c : *row_order) {
            if (!by_coords.count(c))
                throw ValidationError("compare: row order names unknown package " +
                                      c.to_string());
            m.rows.push_back(c);
        }
        if (m.rows.size() != by_coords.size())
            throw ValidationError("compare: row order must list every package exactly once");
    } else {
        for (const auto& [coords, _] : by_coords) m.rows.push_back(coords);
    }

    m.columns.assign(kAllSubcategories.begin(), kAllSubcategories.end());
    if (shuffle_seed) {
        auto perm = detail::shuffled_indices(m.columns.size(), *shuffle_seed);
        std::vector<Subcategory> shuffled;
        shuffled.reserve(m.columns.size());
        for (std::size_t i : perm) shuffled.push_back(m.columns[i]);
        m.columns = std::move(shuffled);
    }

    for (const PackageCoordinates& coords : m.rows) {
        const PackageVersionProfile* p = by_coords.at(coords);
        std::vector<std::int64_t> row;
        row.reserve(m.columns.size());
        for (Subcategory s : m.columns) row.push_back(p->per_subcategory[index_of(s)]);
        m.cells.push_back(std::move(row));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Version delta
// ---------------------------------------------------------------------------

struct DeltaReport {
    PackageCoordinates old_package;
    PackageCoordinates new_package;
    AnalysisMode mode = AnalysisMode::Intra;
    std::map<ApiIdentifier, std::int64_t> per_api_delta;  // new - old, nonzero only
    std::array<std::int64_t, kSubcategoryCount> per_subcategory_delta{};
    std::set<ApiIdentifier> added_apis;    // old == 0 and new > 0
    std::set<ApiIdentifier> removed_apis;  // old > 0 and new == 0
};

inline DeltaReport delta_audit(const PackageVersionProfile& old_profile,
                               const PackageVersionProfile& new_profile) {
    if (old_profile.package.group != new_profile.package.group ||
        old_profile.package.artifact != new_profile.package.artifact)
        throw ValidationError("delta: profiles describe different packages (" +
                              old_profile.package.to_string() + " vs " +
                              new_profile.package.to_string() + ")");
    if (old_profile.mode != new_profile.mode)
        throw ValidationError("delta: profiles mix intra and inter analysis modes");

    DeltaReport d;
    d.old_package = old_profile.package;
    d.new_package = new_profile.package;
    d.mode = old_profile.mode;

    std::set<ApiIdentifier> all_apis;
    for (const auto& [api, _] : old_profile.per_api) all_apis.insert(api);
    for (const auto& [api, _] : new_profile.per_api) all_apis.insert(api);
    auto count_of = [](const PackageVersionProfile& p, const ApiIdentifier& api) {
        auto it = p.per_api.find(api);
        return it == p.per_api.end() ? std::int64_t{0} : it->second;
    };
    for (const ApiIdentifier& api : all_apis) {
        std::int64_t before = count_of(old_profile, api);
        std::int64_t after = count_of(new_profile, api);
        if (after != before) d.per_api_delta[api] = after - before;
        if (before == 0 && after > 0) d.added_apis.insert(api);
        if (before > 0 && after == 0) d.removed_apis.insert(api);
    }
    for (Subcategory s : kAllSubcategories)
        d.per_subcategory_delta[index_of(s)] = new_profile.per_subcategory[index_of(s)] -
                                               old_profile.per_subcategory[index_of(s)];
    return d;
}

inline std::string emit_delta_json(const DeltaReport& d) {
    using detail::json;
    json doc;
    doc["schema_version"] = "1";
    doc["group"] = d.old_package.group;
    doc["artifact"] = d.old_package.artifact;
    doc["old_version"] = d.old_package.version;
    doc["new_version"] = d.new_package.version;
    doc["mode"] = std::string(to_string(d.mode));
    json apis = json::object();
    for (const auto& [api, delta] : d.per_api_delta) apis[api.display()] = delta;
    doc["per_api_delta"] = std::move(apis);
    json subs = json::object();
    for (Subcategory s : kAllSubcategories)
        subs[std::string(to_string(s))] = d.per_subcategory_delta[index_of(s)];
    doc["per_subcategory_delta"] = std::move(subs);
    json added = json::array(), removed = json::array();
    for (const ApiIdentifier& a : d.added_apis) added.push_back(a.display());
    for (const ApiIdentifier& a : d.removed_apis) removed.push_back(a.display());
    doc["added_apis"] = std::move(added);
    doc["removed_apis"] = std::move(removed);
    return detail::dump_canonical(doc);
}

// ---------------------------------------------------------------------------
// Corpus aggregation
// ---------------------------------------------------------------------------

struct RankedApi {
    ApiIdentifier api;
    double aggregate = 0.0;  // sum over packages of the per-package version mean
    double share = 0.0;
};

// Per-package averaging first, then summation across packages, so a package
// with many versions cannot dominate the ranking. Identical duplicate
// versions collapse; conflicting duplicates are an error.
inline std::vector<RankedApi> corpus_top_apis(const std::vector<PackageVersionProfile>& profiles) {
    using VersionMap = std::map<std::string, const PackageVersionProfile*>;
    std::map<std::pair<std::string, std::string>, VersionMap> by_package;
    for (const PackageVersionProfile& p : profiles) {
        VersionMap& versions = by_package[{p.package.group, p.package.artifact}];
        auto [it, inserted] = versions.emplace(p.package.version, &p);
        if (!inserted && !(*it->second == p))
            throw ValidationError("corpus: conflicting profiles for " + p.package.to_string());
    }

    std::map<ApiIdentifier, double> aggregate;
    for (const auto& package_entry : by_package) {
        const VersionMap& versions = package_entry.second;
        std::map<ApiIdentifier, std::int64_t> sums;
        for (const auto& version_entry : versions)
            for (const auto& [api, count] : version_entry.second->per_api) sums[api] += count;
        double n = static_cast<double>(versions.size());
        for (const auto& [api, sum] : sums) aggregate[api] += static_cast<double>(sum) / n;
    }

    double total = 0.0;
    for (const auto& [_, v] : aggregate) total += v;
    std::vector<RankedApi> ranked;
    ranked.reserve(aggregate.size());
    for (const auto& [api, v] : aggregate)
        ranked.push_back({api, v, total > 0.0 ? v / total : 0.0});
    std::sort(ranked.begin(), ranked.end(), [](const RankedApi& a, const RankedApi& b) {
        if (a.aggregate != b.aggregate) return a.aggregate > b.aggregate;
        return a.api.display() < b.api.display();
    });
    return ranked;
}

// ---------------------------------------------------------------------------
// Confidence interval (Wald form)
// ---------------------------------------------------------------------------

struct ConfidenceInterval {
    double p_hat = 0.0;
    std::int64_t n = 0;
    double z = 1.96;
    double half_width = 0.0;
    double lo = 0.0;  // clamped to [0, 1]
    double hi = 0.0;
};

inline ConfidenceInterval wald_interval(double p_hat, std::int64_t n, double z = 1.96) {
    if (n < 1) throw std::domain_error("confidence interval: n must be >= 1");
    if (!(p_hat >= 0.0 && p_hat <= 1.0))
        throw std::domain_error("confidence interval: p must be within [0, 1]");
    if (!(z > 0.0)) throw std::domain_error("confidence interval: z must be positive");
    ConfidenceInterval ci;
    ci.p_hat = p_hat;
    ci.n = n;
    ci.z = z;
    ci.half_width = z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
    ci.lo = std::max(0.0, p_hat - ci.half_width);
    ci.hi = std::min(1.0, p_hat + ci.half_width);
    return ci;
}

// ---------------------------------------------------------------------------
// Intra vs inter multiply factors
// ---------------------------------------------------------------------------

// Per subcategory: sum of inter counts / sum of intra counts across version
// pairs. 0/0 is 1 by convention; x/0 with x > 0 is +infinity (rendered "∞").
inline std::array<double, kSubcategoryCount> multiply_factors(
    const std::vector<PackageVersionProfile>& intra_profiles,
    const std::vector<PackageVersionProfile>& inter_profiles) {
    std::map<PackageCoordinates, const PackageVersionProfile*> inter_by_coords;
    for (const PackageVersionProfile& p : inter_profiles) {
        if (p.mode != AnalysisMode::Inter)
            throw ValidationError("multiply factors: " + p.package.to_string() +
                                  " is not an inter-mode profile");
        inter_by_coords.emplace(p.package, &p);
    }
    std::array<std::int64_t, kSubcategoryCount> intra_sum{}, inter_sum{};
    for (const PackageVersionProfile& p : intra_profiles) {
        if (p.mode != AnalysisMode::Intra)
            throw ValidationError("multiply factors: " + p.package.to_string() +
                                  " is not an intra-mode profile");
        auto it = inter_by_coords.find(p.package);
        if (it == inter_by_coords.end())
            throw ValidationError("multiply factors: no inter profile paired with " +
                                  p.package.to_string());
        for (std::size_t i = 0; i < kSubcategoryCount; ++i) {
            intra_sum[i] += p.per_subcategory[i];
            inter_sum[i] += it->second->per_subcategory[i];
        }
    }
    std::array<double, kSubcategoryCount> factors{};
    for (std::size_t i = 0; i < kSubcategoryCount; ++i) {
        if (intra_sum[i] == 0)
            factors[i] = inter_sum[i] == 0 ? 1.0 : std::numeric_limits<double>::infinity();
        else
            factors[i] = static_cast<double>(inter_sum[i]) / static_cast<double>(intra_sum[i]);
    }
    return factors;
}

// "5.3", "1.19", and the zero-denominator marker "∞".
inline std::string format_multiply_factor(double factor) {
    if (std::isinf(factor)) return "∞";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", factor);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace sensapi
