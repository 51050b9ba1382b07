#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sensapi/catalog.hpp"
#include "sensapi/errors.hpp"
#include "sensapi/graph_model.hpp"
#include "sensapi/metrics.hpp"
#include "sensapi/reachability.hpp"
#include "sensapi/stitcher.hpp"

namespace sensapi {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

struct RunConfig {
    std::string catalog_path;
    std::vector<std::string> core_paths;  // files or directories
    std::vector<std::string> dep_paths;   // files or directories
    AnalysisMode mode = AnalysisMode::Intra;
    EntryPointPolicy entry_policy = EntryPointPolicy::AllCoreMethods;
    std::string out_path;  // single-core profile output ("" = stdout)
    std::string out_dir;   // multi-core profile output directory
    int jobs = 0;          // 0 = hardware concurrency
    std::optional<std::uint64_t> shuffle_seed;

    void validate() const {
        if (catalog_path.empty()) throw ValidationError("analyze: --catalog is required");
        if (core_paths.empty()) throw ValidationError("analyze: at least one core graph required");
        if (mode == AnalysisMode::Intra && !dep_paths.empty())
            throw ValidationError("analyze: --mode intra forbids dependency graphs");
        if (jobs < 0) throw ValidationError("analyze: --jobs must be >= 1");
    }
};

// Files sorted per directory; explicit files keep their order.
inline std::vector<std::filesystem::path> expand_graph_paths(
    const std::vector<std::string>& paths) {
    std::vector<std::filesystem::path> out;
    for (const std::string& p : paths) {
        std::filesystem::path fp(p);
        if (std::filesystem::is_directory(fp)) {
            std::vector<std::filesystem::path> dir_files;
            for (const auto& e : std::filesystem::directory_iterator(fp))
                if (e.is_regular_file() && e.path().extension() == ".json")
                    dir_files.push_back(e.path());
            std::sort(dir_files.begin(), dir_files.end());
            out.insert(out.end(), dir_files.begin(), dir_files.end());
        } else if (std::filesystem::exists(fp)) {
            out.push_back(fp);
        } else {
            throw ParseError("no such file or directory: " + p);
        }
    }
    return out;
}

namespace detail {

inline bool is_platform_type(std::string_view fqn) {
    for (std::string_view prefix : {"java.", "javax.", "jakarta.", "jdk.", "sun.", "com.sun."})
        if (fqn.starts_with(prefix)) return true;
    return false;
}

}  // namespace detail

// One package version end to end: stitch, traverse, count, profile.
inline PackageVersionProfile analyze_one(const SensitiveApiCatalog& catalog,
                                         const IntraPackageCallGraph& core,
                                         const std::vector<IntraPackageCallGraph>& deps,
                                         AnalysisMode mode, EntryPointPolicy policy,
                                         std::vector<std::string>* warnings = nullptr,
                                         InterPackageCallGraph* graph_out = nullptr) {
    InterPackageCallGraph graph =
        mode == AnalysisMode::Inter ? stitch(core, deps, warnings) : stitch(core, {}, warnings);
    EntryPointSet roots = entry_points(core, policy, warnings);
    ReachabilityResult result = reach(graph, roots);
    count_sensitive(graph, result, catalog);
    PackageVersionProfile profile = build_profile(core.package, result, mode);

    // Non-platform external owners usually mean a dependency graph was not
    // supplied; those calls stay as leaves, which can undercount resolution.
    if (warnings && mode == AnalysisMode::Inter) {
        std::vector<std::string> missing;
        for (const std::string& fqn : graph.external_owner_fqns())
            if (!detail::is_platform_type(fqn)) missing.push_back(fqn);
        if (!missing.empty()) {
            std::string list;
            for (std::size_t i = 0; i < missing.size() && i < 5; ++i)
                list += (i ? ", " : "") + missing[i];
            if (missing.size() > 5) list += ", ... (" + std::to_string(missing.size()) + ")";
            warnings->push_back(core.package.to_string() +
                                ": callee owners outside the analyzed universe kept as "
                                "external leaves: " +
                                list);
        }
    }
    if (graph_out) *graph_out = std::move(graph);
    return profile;
}

namespace detail {

// Index-ordered worker pool; the first failure by index is rethrown so
// error behavior does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min<int>(jobs, static_cast<int>(count ? count : 1));

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string profile_file_name(const PackageCoordinates& c) {
    std::string name = c.to_string();
    for (char& ch : name)
        if (ch == ':' || ch == '/') ch = '_';
    return name + ".profile.json";
}

}  // namespace detail

struct AnalyzeOutcome {
    std::vector<PackageVersionProfile> profiles;     // sorted by coordinates
    std::vector<std::string> profile_texts;          // canonical JSON, same order
    std::vector<std::string> warnings;
};

// Analyzes every core graph against the shared dependency set. Workers run
// in parallel over the immutable catalog and dependency graphs; results are
// merged in coordinate order so output is schedule-independent.
inline AnalyzeOutcome run_analyze(const RunConfig& config) {
    config.validate();
    SensitiveApiCatalog catalog = load_catalog(read_file(config.catalog_path));

    std::vector<std::filesystem::path> core_files = expand_graph_paths(config.core_paths);
    if (core_files.empty()) throw ValidationError("analyze: no core graph files found");
    std::vector<std::filesystem::path> dep_files = expand_graph_paths(config.dep_paths);

    std::vector<IntraPackageCallGraph> deps;
    deps.reserve(dep_files.size());
    for (const auto& f : dep_files) {
        try {
            deps.push_back(parse_callgraph(read_file(f)));
        } catch (const ParseError& e) {
            throw ParseError(f.string() + ": " + e.what(), e.byte_offset());
        } catch (const ValidationError& e) {
            throw ValidationError(f.string() + ": " + e.what());
        }
    }

    AnalyzeOutcome outcome;
    std::vector<PackageVersionProfile> profiles(core_files.size());
    std::vector<std::vector<std::string>> warnings(core_files.size());
    detail::parallel_for(core_files.size(), config.jobs, [&](std::size_t i) {
        IntraPackageCallGraph core;
        try {
            core = parse_callgraph(read_file(core_files[i]));
        } catch (const ParseError& e) {
            throw ParseError(core_files[i].string() + ": " + e.what(), e.byte_offset());
        } catch (const ValidationError& e) {
            throw ValidationError(core_files[i].string() + ": " + e.what());
        }
        profiles[i] = analyze_one(catalog, core, deps, config.mode, config.entry_policy,
                                  &warnings[i]);
    });

    std::vector<std::size_t> order(profiles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return profiles[a].package < profiles[b].package;
    });
    for (std::size_t i : order) {
        outcome.profiles.push_back(std::move(profiles[i]));
        outcome.profile_texts.push_back(emit_profile_json(outcome.profiles.back()));
        for (std::string& w : warnings[i]) outcome.warnings.push_back(std::move(w));
    }
    return outcome;
}

// Writes one profile per package version into `dir` using coordinate-derived
// file names; returns the paths in row order.
inline std::vector<std::filesystem::path> write_profiles(const AnalyzeOutcome& outcome,
                                                         const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> paths;
    for (std::size_t i = 0; i < outcome.profiles.size(); ++i) {
        std::filesystem::path p = dir / detail::profile_file_name(outcome.profiles[i].package);
        write_file(p, outcome.profile_texts[i]);
        paths.push_back(std::move(p));
    }
    return paths;
}

}  // namespace sensapi
