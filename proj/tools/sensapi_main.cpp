// Command-line front end: catalog validation, per-version analysis, group
// comparison, version deltas, corpus ranking, confidence intervals and
// vulnerable-function scans over call-graph exchange files.
//
// Exit codes: 0 success, 1 validation/usage failure, 2 I/O or parse failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sensapi/catalog.hpp"
#include "sensapi/graph_model.hpp"
#include "sensapi/metrics.hpp"
#include "sensapi/reachability.hpp"
#include "sensapi/report.hpp"
#include "sensapi/runner.hpp"
#include "sensapi/stitcher.hpp"

namespace {

using namespace sensapi;

bool g_json_errors = false;

void print_warning(const std::string& msg) {
    if (g_json_errors) {
        detail::json j;
        j["level"] = "warning";
        j["message"] = msg;
        std::cerr << j.dump() << "\n";
    } else {
        std::cerr << "warning: " << msg << "\n";
    }
}

void print_error(const std::string& kind, const std::string& msg) {
    if (g_json_errors) {
        detail::json j;
        j["level"] = "error";
        j["kind"] = kind;
        j["message"] = msg;
        std::cerr << j.dump() << "\n";
    } else {
        std::cerr << "error: " << msg << "\n";
    }
}

void emit_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// --- catalog validate -------------------------------------------------------

struct CatalogValidateArgs {
    std::string path;
    std::string hierarchy_path;
};

void run_catalog_validate(const CatalogValidateArgs& args) {
    SensitiveApiCatalog catalog = load_catalog(read_file(args.path));
    std::cout << "catalog OK: " << catalog.entries().size() << " entries, "
              << catalog.distinct_subcategories() << " subcategories, "
              << catalog.distinct_categories() << " categories\n";
    if (!args.hierarchy_path.empty()) {
        CweHierarchy h = load_cwe_hierarchy(read_file(args.hierarchy_path));
        std::cout << "cwe hierarchy OK: " << h.parent_edges.size() << " child entries, "
                  << h.owasp_map.size() << " OWASP mappings\n";
    }
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    RunConfig config;
    std::string config_path;
    std::string mode = "intra";
    std::string policy = "all";
    std::string emit_graph_path;
    bool mode_given = false;
    bool policy_given = false;
};

void apply_analyze_config_file(AnalyzeArgs& args) {
    detail::json doc = detail::parse_json(read_file(args.config_path), "config");
    if (!doc.is_object()) throw ParseError("config: top level must be an object");
    detail::check_keys(doc,
                       {"catalog", "core", "deps", "mode", "entry_policy", "out", "out_dir",
                        "jobs", "shuffle_seed"},
                       "config");
    auto string_or_array = [&](const char* key, std::vector<std::string>& into) {
        auto it = doc.find(key);
        if (it == doc.end()) return;
        if (it->is_string()) {
            into.push_back(it->get<std::string>());
        } else if (it->is_array()) {
            for (const auto& v : *it) {
                if (!v.is_string()) throw ParseError(std::string("config: ") + key +
                                                     " entries must be strings");
                into.push_back(v.get<std::string>());
            }
        } else {
            throw ParseError(std::string("config: ") + key + " must be a string or array");
        }
    };
    if (doc.contains("catalog") && args.config.catalog_path.empty())
        args.config.catalog_path = detail::require_string(doc, "catalog", "config");
    if (args.config.core_paths.empty()) string_or_array("core", args.config.core_paths);
    if (args.config.dep_paths.empty()) string_or_array("deps", args.config.dep_paths);
    if (doc.contains("mode") && !args.mode_given)
        args.mode = detail::require_string(doc, "mode", "config");
    if (doc.contains("entry_policy") && !args.policy_given)
        args.policy = detail::require_string(doc, "entry_policy", "config");
    if (doc.contains("out") && args.config.out_path.empty())
        args.config.out_path = detail::require_string(doc, "out", "config");
    if (doc.contains("out_dir") && args.config.out_dir.empty())
        args.config.out_dir = detail::require_string(doc, "out_dir", "config");
    if (doc.contains("jobs") && args.config.jobs == 0)
        args.config.jobs = static_cast<int>(detail::require_int(doc, "jobs", "config"));
    if (doc.contains("shuffle_seed") && !args.config.shuffle_seed)
        args.config.shuffle_seed =
            static_cast<std::uint64_t>(detail::require_int(doc, "shuffle_seed", "config"));
}

void run_analyze_cmd(AnalyzeArgs& args) {
    if (!args.config_path.empty()) apply_analyze_config_file(args);

    auto mode = parse_mode(args.mode);
    if (!mode) throw ValidationError("analyze: unknown mode \"" + args.mode + "\"");
    args.config.mode = *mode;
    if (args.policy == "all")
        args.config.entry_policy = EntryPointPolicy::AllCoreMethods;
    else if (args.policy == "public")
        args.config.entry_policy = EntryPointPolicy::PublicCoreMethods;
    else
        throw ValidationError("analyze: unknown entry policy \"" + args.policy + "\"");

    AnalyzeOutcome outcome = run_analyze(args.config);
    for (const std::string& w : outcome.warnings) print_warning(w);

    if (!args.emit_graph_path.empty()) {
        if (outcome.profiles.size() != 1)
            throw ValidationError("analyze: --emit-graph requires exactly one core graph");
        SensitiveApiCatalog catalog = load_catalog(read_file(args.config.catalog_path));
        std::vector<std::filesystem::path> cores = expand_graph_paths(args.config.core_paths);
        std::vector<std::filesystem::path> dep_files = expand_graph_paths(args.config.dep_paths);
        IntraPackageCallGraph core = parse_callgraph(read_file(cores[0]));
        std::vector<IntraPackageCallGraph> deps;
        for (const auto& f : dep_files) deps.push_back(parse_callgraph(read_file(f)));
        InterPackageCallGraph graph;
        analyze_one(catalog, core, deps, args.config.mode, args.config.entry_policy, nullptr,
                    &graph);
        write_file(args.emit_graph_path, serialize_intergraph(graph));
    }

    if (!args.config.out_dir.empty()) {
        write_profiles(outcome, args.config.out_dir);
        std::cerr << "wrote " << outcome.profiles.size() << " profiles to "
                  << args.config.out_dir << "\n";
    } else if (outcome.profiles.size() == 1) {
        emit_output(args.config.out_path, outcome.profile_texts[0]);
    } else {
        throw ValidationError("analyze: --out-dir is required with multiple core graphs");
    }
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
    std::vector<std::string> profile_paths;
    std::string group;
    std::string out_prefix;
    std::string scale = "log1p";
    int cell_size = 44;
    std::optional<std::uint64_t> shuffle_seed;
};

void run_compare(const CompareArgs& args) {
    std::vector<PackageVersionProfile> profiles;
    for (const std::string& p : args.profile_paths) profiles.push_back(parse_profile(read_file(p)));
    ComparisonMatrix matrix = compare_group(profiles, args.group, args.shuffle_seed);

    auto scale = parse_scale(args.scale);
    if (!scale) throw ValidationError("compare: unknown scale \"" + args.scale + "\"");
    HeatmapSpec spec;
    spec.matrix = matrix;
    spec.scale = *scale;
    spec.cell_size = args.cell_size;

    write_file(args.out_prefix + ".svg", render_heatmap(spec));
    write_file(args.out_prefix + ".csv", emit_csv(matrix));
    write_file(args.out_prefix + ".json", emit_matrix_json(matrix));
    std::cerr << "wrote " << args.out_prefix << ".{svg,csv,json}\n";
}

// --- delta ------------------------------------------------------------------

struct DeltaArgs {
    std::string old_path;
    std::string new_path;
    std::string out_path;
};

void run_delta(const DeltaArgs& args) {
    PackageVersionProfile old_profile = parse_profile(read_file(args.old_path));
    PackageVersionProfile new_profile = parse_profile(read_file(args.new_path));
    DeltaReport d = delta_audit(old_profile, new_profile);
    emit_output(args.out_path, emit_delta_json(d));
}

// --- corpus top -------------------------------------------------------------

struct CorpusTopArgs {
    std::string profiles_dir;
    std::string catalog_path;
    int top = 10;
    bool as_json = false;
};

void run_corpus_top(const CorpusTopArgs& args) {
    std::vector<PackageVersionProfile> profiles;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(args.profiles_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) profiles.push_back(parse_profile(read_file(f)));
    if (profiles.empty()) throw ValidationError("corpus top: no profiles found");

    std::vector<RankedApi> ranked = corpus_top_apis(profiles);
    if (args.top > 0 && ranked.size() > static_cast<std::size_t>(args.top))
        ranked.resize(static_cast<std::size_t>(args.top));

    std::optional<SensitiveApiCatalog> catalog;
    if (!args.catalog_path.empty()) catalog = load_catalog(read_file(args.catalog_path));
    if (args.as_json) {
        std::cout << emit_corpus_json(ranked, catalog ? &*catalog : nullptr);
        return;
    }
    std::cout << "rank  subcategory              api                                                 "
                 "aggregate   share\n";
    int rank = 1;
    for (const RankedApi& r : ranked) {
        std::string label = "-";
        if (catalog) {
            const SensitiveApi* api = catalog->lookup(r.api.class_fqn, r.api.method_name);
            if (api)
                label = std::string(1, to_string(api->category)[0]) + "/" +
                        std::string(to_string(api->subcategory));
        }
        std::printf("%-5d %-24s %-50s %10.2f %6.2f%%\n", rank++, label.c_str(),
                    r.api.display().c_str(), r.aggregate, r.share * 100.0);
    }
}

// --- stats ci ---------------------------------------------------------------

struct StatsCiArgs {
    double p = 0.0;
    std::int64_t n = 0;
    double z = 1.96;
};

void run_stats_ci(const StatsCiArgs& args) {
    ConfidenceInterval ci = wald_interval(args.p, args.n, args.z);
    std::cout << "lo=" << format_fixed(ci.lo, 4) << " hi=" << format_fixed(ci.hi, 4) << "\n";
}

// --- vuln scan --------------------------------------------------------------

struct VulnScanArgs {
    std::string core_path;
    std::string vuln_path;
    std::string catalog_path;
    std::string out_path;
};

std::vector<MethodRef> parse_vuln_functions(std::string_view text) {
    detail::json doc = detail::parse_json(text, "vulnerable functions");
    if (!doc.is_array()) throw ParseError("vulnerable functions: top level must be an array");
    std::vector<MethodRef> out;
    std::size_t i = 0;
    for (const auto& raw : doc) {
        out.push_back(detail::parse_method_ref(raw, "vulnerable function " + std::to_string(i)));
        ++i;
    }
    return out;
}

void run_vuln_scan(const VulnScanArgs& args) {
    SensitiveApiCatalog catalog = load_catalog(read_file(args.catalog_path));
    IntraPackageCallGraph core = parse_callgraph(read_file(args.core_path));
    std::vector<MethodRef> functions = parse_vuln_functions(read_file(args.vuln_path));

    std::vector<std::string> warnings;
    auto hits = vulnerable_function_scan(core, functions, catalog, &warnings);
    for (const std::string& w : warnings) print_warning(w);

    std::size_t with_hits = 0;
    detail::json report;
    report["schema_version"] = "1";
    report["package"] = core.package.to_string();
    detail::json fn_list = detail::json::array();
    for (const auto& [fn, fn_hits] : hits) {
        detail::json jf;
        jf["function"] = detail::method_ref_to_json(fn);
        jf["present"] = core.defines_method(fn);
        detail::json jh = detail::json::array();
        for (const SensitiveHit& h : fn_hits) {
            detail::json one;
            one["api"] = h.api->id.display();
            one["category"] = std::string(to_string(h.api->category));
            one["subcategory"] = std::string(to_string(h.api->subcategory));
            one["count"] = h.multiplicity;
            jh.push_back(std::move(one));
        }
        jf["hits"] = std::move(jh);
        fn_list.push_back(std::move(jf));
        if (!fn_hits.empty()) ++with_hits;
    }
    report["functions"] = std::move(fn_list);
    report["functions_with_hits"] = with_hits;
    report["total_functions"] = hits.size();
    double proportion =
        hits.empty() ? 0.0 : static_cast<double>(with_hits) / static_cast<double>(hits.size());
    report["proportion"] = proportion;
    emit_output(args.out_path, detail::dump_canonical(report));
    std::cerr << "functions with >=1 sensitive hit: " << with_hits << "/" << hits.size()
              << " (p=" << format_fixed(proportion, 4) << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security-sensitive API visibility for package dependencies"};
    app.require_subcommand(1);
    app.add_flag("--json-errors", g_json_errors, "Machine-readable diagnostics on stderr");

    CatalogValidateArgs catalog_args;
    CLI::App* catalog_cmd = app.add_subcommand("catalog", "Catalog utilities");
    catalog_cmd->require_subcommand(1);
    CLI::App* validate_cmd =
        catalog_cmd->add_subcommand("validate", "Validate a sensitive-API catalog file");
    validate_cmd->add_option("path", catalog_args.path, "Catalog JSON file")->required();
    validate_cmd->add_option("--cwe-hierarchy", catalog_args.hierarchy_path,
                             "Also validate a CWE hierarchy file");

    AnalyzeArgs analyze_args;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Profile sensitive API calls of package versions");
    analyze_cmd->add_option("--catalog", analyze_args.config.catalog_path, "Catalog JSON file");
    analyze_cmd->add_option("--core", analyze_args.config.core_paths,
                            "Core call-graph files or directories");
    analyze_cmd->add_option("--deps", analyze_args.config.dep_paths,
                            "Dependency call-graph files or directories");
    analyze_cmd->add_option("--mode", analyze_args.mode, "intra or inter (default intra)");
    analyze_cmd->add_option("--entry-policy", analyze_args.policy,
                            "all or public (default all)");
    analyze_cmd->add_option("--out", analyze_args.config.out_path,
                            "Profile output file (single core; default stdout)");
    analyze_cmd->add_option("--out-dir", analyze_args.config.out_dir,
                            "Profile output directory (required with multiple cores)");
    analyze_cmd->add_option("--jobs", analyze_args.config.jobs,
                            "Worker count (default: available cores)");
    analyze_cmd->add_option("--emit-graph", analyze_args.emit_graph_path,
                            "Also dump the stitched inter-package graph");
    analyze_cmd->add_option("--config", analyze_args.config_path,
                            "JSON config file mirroring the flags");
    CLI::Option* seed_opt = analyze_cmd->add_option("--shuffle-seed", "Reserved for reports");

    CompareArgs compare_args;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Compare profiles of a package group");
    compare_cmd->add_option("profiles", compare_args.profile_paths, "Profile JSON files")
        ->required()
        ->expected(-1);
    compare_cmd->add_option("--group", compare_args.group, "Group name")->required();
    compare_cmd->add_option("--out-prefix", compare_args.out_prefix,
                            "Output prefix for .svg/.csv/.json")
        ->required();
    compare_cmd->add_option("--scale", compare_args.scale, "linear or log1p (default log1p)");
    compare_cmd->add_option("--cell-size", compare_args.cell_size, "Heatmap cell size in px");
    CLI::Option* compare_seed =
        compare_cmd->add_option("--shuffle-seed", "Permute column order with this seed");

    DeltaArgs delta_args;
    CLI::App* delta_cmd = app.add_subcommand("delta", "Audit the delta between two versions");
    delta_cmd->add_option("--old", delta_args.old_path, "Older version profile")->required();
    delta_cmd->add_option("--new", delta_args.new_path, "Newer version profile")->required();
    delta_cmd->add_option("--out", delta_args.out_path, "Output file (default stdout)");

    CorpusTopArgs corpus_args;
    CLI::App* corpus_cmd = app.add_subcommand("corpus", "Corpus-level statistics");
    corpus_cmd->require_subcommand(1);
    CLI::App* top_cmd = corpus_cmd->add_subcommand("top", "Rank APIs across a profile corpus");
    top_cmd->add_option("--profiles", corpus_args.profiles_dir, "Directory of profile files")
        ->required();
    top_cmd->add_option("-k,--top", corpus_args.top, "How many entries to list (default 10)");
    top_cmd->add_option("--catalog", corpus_args.catalog_path,
                        "Catalog for category labels (optional)");
    top_cmd->add_flag("--json", corpus_args.as_json, "Emit JSON instead of a table");

    StatsCiArgs stats_args;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Statistics helpers");
    stats_cmd->require_subcommand(1);
    CLI::App* ci_cmd = stats_cmd->add_subcommand("ci", "Confidence interval for a proportion");
    ci_cmd->add_option("--p", stats_args.p, "Observed proportion")->required();
    ci_cmd->add_option("--n", stats_args.n, "Sample size")->required();
    ci_cmd->add_option("--z", stats_args.z, "Quantile (default 1.96)");

    VulnScanArgs vuln_args;
    CLI::App* vuln_cmd = app.add_subcommand("vuln", "Vulnerable-function utilities");
    vuln_cmd->require_subcommand(1);
    CLI::App* scan_cmd =
        vuln_cmd->add_subcommand("scan", "Sensitive APIs directly called by given functions");
    scan_cmd->add_option("--core", vuln_args.core_path, "Core call-graph file")->required();
    scan_cmd->add_option("--vuln-functions", vuln_args.vuln_path,
                         "JSON array of {owner, name, descriptor?}")
        ->required();
    scan_cmd->add_option("--catalog", vuln_args.catalog_path, "Catalog JSON file")->required();
    scan_cmd->add_option("--out", vuln_args.out_path, "Output file (default stdout)");

    try {
        app.parse(argc, argv);

        if (seed_opt->count()) analyze_args.config.shuffle_seed = seed_opt->as<std::uint64_t>();
        if (compare_seed->count()) compare_args.shuffle_seed = compare_seed->as<std::uint64_t>();
        analyze_args.mode_given = analyze_cmd->count("--mode") > 0;
        analyze_args.policy_given = analyze_cmd->count("--entry-policy") > 0;

        if (validate_cmd->parsed()) run_catalog_validate(catalog_args);
        if (analyze_cmd->parsed()) run_analyze_cmd(analyze_args);
        if (compare_cmd->parsed()) run_compare(compare_args);
        if (delta_cmd->parsed()) run_delta(delta_args);
        if (top_cmd->parsed()) run_corpus_top(corpus_args);
        if (ci_cmd->parsed()) run_stats_ci(stats_args);
        if (scan_cmd->parsed()) run_vuln_scan(vuln_args);
        return 0;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        print_error("validation", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        print_error("validation", e.what());
        return 1;
    } catch (const ParseError& e) {
        print_error("parse", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("io", e.what());
        return 2;
    }
}
