#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "sensapi/runner.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI with stdout captured to a file; stderr flows to the test log.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out = fs::temp_directory_path() / ("sensapi_cli_out_" + std::to_string(counter++));
    std::string cmd = std::string(SENSAPI_CLI_PATH) + " " + args + " > " + out.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = sensapi::read_file(out);
    fs::remove(out);
    return r;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path dir = fs::temp_directory_path() / "sensapi_cli_fixtures";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream(p, std::ios::trunc) << content;
    return p;
}

std::string shipped_catalog() {
    return std::string(SENSAPI_SOURCE_DIR) + "/data/sensitive_apis.json";
}

const char* kCoreGraph = R"({
  "schema_version": "1",
  "package": {"group": "org.example", "artifact": "demo", "version": "1.0"},
  "types": [
    {"fqn": "demo.Main", "kind": "class", "interfaces": [],
     "methods": [{"name": "run", "abstract": false, "visibility": "public"}],
     "public_constructor": true}
  ],
  "call_sites": [
    {"caller": {"owner": "demo.Main", "name": "run"},
     "callee": {"owner": "java.lang.Class", "name": "forName"},
     "dispatch": "static", "multiplicity": 2}
  ]
})";

TEST(Cli, StatsCiReferenceInterval) {
    RunResult r = run_cli("stats ci --p 0.508 --n 4183");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, "lo=0.4928 hi=0.5232\n");
}

TEST(Cli, StatsCiRejectsZeroN) {
    RunResult r = run_cli("stats ci --p 0.5 --n 0 2>/dev/null");
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, CatalogValidateShippedCatalog) {
    RunResult r = run_cli("catalog validate " + shipped_catalog());
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("219 entries"), std::string::npos);
    EXPECT_NE(r.out.find("15 subcategories"), std::string::npos);
    EXPECT_NE(r.out.find("3 categories"), std::string::npos);
}

TEST(Cli, CatalogValidateBrokenJsonExitsTwo) {
    fs::path bad = write_temp("broken.json", "{not json");
    RunResult r = run_cli("catalog validate " + bad.string() + " 2>/dev/null");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, CatalogValidateDuplicateEntryExitsOne) {
    fs::path dup = write_temp("dup.json", R"({
      "schema_version": "1",
      "entries": [
        {"class": "a.B", "method": "m", "category": "Process", "subcategory": "Reflection", "cwes": []},
        {"class": "a.B", "method": "m", "category": "Process", "subcategory": "Reflection", "cwes": []}
      ]
    })");
    RunResult r = run_cli("catalog validate " + dup.string() + " 2>/dev/null");
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, MissingInputFileExitsTwo) {
    RunResult r = run_cli("catalog validate /nonexistent/catalog.json 2>/dev/null");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, AnalyzeIntraProfileOnStdout) {
    fs::path core = write_temp("core.json", kCoreGraph);
    RunResult r =
        run_cli("analyze --catalog " + shipped_catalog() + " --core " + core.string());
    EXPECT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("mode"), "intra");
    EXPECT_EQ(doc.at("per_api").at("java.lang.Class.forName()"), 2);
    EXPECT_EQ(doc.at("per_subcategory").at("Reflection"), 2);
    EXPECT_EQ(doc.at("direct_count"), 2);
}

TEST(Cli, AnalyzeIntraWithDepsIsUsageError) {
    fs::path core = write_temp("core.json", kCoreGraph);
    RunResult r = run_cli("analyze --catalog " + shipped_catalog() + " --core " + core.string() +
                          " --mode intra --deps " + core.string() + " 2>/dev/null");
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, AnalyzeNoSensitiveCallsGivesZeroProfile) {
    fs::path core = write_temp("quiet.json", R"({
      "schema_version": "1",
      "package": {"group": "org.example", "artifact": "quiet", "version": "1.0"},
      "types": [
        {"fqn": "q.A", "kind": "class", "interfaces": [],
         "methods": [{"name": "m", "abstract": false, "visibility": "public"}],
         "public_constructor": true}
      ],
      "call_sites": []
    })");
    RunResult r = run_cli("analyze --catalog " + shipped_catalog() + " --core " + core.string() +
                          " --mode intra 2>/dev/null");
    EXPECT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("direct_count"), 0);
    EXPECT_EQ(doc.at("unique_subcategories_used"), 0);
}

TEST(Cli, AnalyzeJsonErrorsEmitsStructuredDiagnostics) {
    RunResult r = run_cli("--json-errors analyze --catalog /missing.json --core /missing.json "
                          "2>/tmp/sensapi_err.txt");
    EXPECT_EQ(r.exit_code, 2);
    std::string err = sensapi::read_file("/tmp/sensapi_err.txt");
    auto doc = nlohmann::json::parse(err);
    EXPECT_EQ(doc.at("level"), "error");
    EXPECT_EQ(doc.at("kind"), "parse");
}

TEST(Cli, ConfigFileDrivesAnalyze) {
    fs::path core = write_temp("core.json", kCoreGraph);
    fs::path cfg = write_temp("cfg.json", std::string(R"({
      "catalog": ")") + shipped_catalog() + R"(",
      "core": ")" + core.string() + R"(",
      "mode": "intra"
    })");
    RunResult r = run_cli("analyze --config " + cfg.string());
    EXPECT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("package").at("artifact"), "demo");
}

TEST(Cli, DeltaBetweenVersions) {
    fs::path core1 = write_temp("v1.json", kCoreGraph);
    std::string v2 = kCoreGraph;
    v2.replace(v2.find("\"1.0\""), 5, "\"2.0\"");
    v2.replace(v2.find("\"multiplicity\": 2"), 17, "\"multiplicity\": 7");
    fs::path core2 = write_temp("v2.json", v2);

    fs::path dir = fs::temp_directory_path() / "sensapi_cli_fixtures";
    RunResult a = run_cli("analyze --catalog " + shipped_catalog() + " --core " + core1.string() +
                          " --out " + (dir / "p1.json").string());
    RunResult b = run_cli("analyze --catalog " + shipped_catalog() + " --core " + core2.string() +
                          " --out " + (dir / "p2.json").string());
    ASSERT_EQ(a.exit_code, 0);
    ASSERT_EQ(b.exit_code, 0);
    RunResult d = run_cli("delta --old " + (dir / "p1.json").string() + " --new " +
                          (dir / "p2.json").string());
    EXPECT_EQ(d.exit_code, 0);
    auto doc = nlohmann::json::parse(d.out);
    EXPECT_EQ(doc.at("per_api_delta").at("java.lang.Class.forName()"), 5);
    EXPECT_EQ(doc.at("per_subcategory_delta").at("Reflection"), 5);
}

TEST(Cli, CompareWritesAllThreeArtifacts) {
    fs::path dir = fs::temp_directory_path() / "sensapi_cli_compare";
    fs::create_directories(dir);
    fs::path core = write_temp("core.json", kCoreGraph);
    RunResult a = run_cli("analyze --catalog " + shipped_catalog() + " --core " + core.string() +
                          " --out " + (dir / "demo.json").string());
    ASSERT_EQ(a.exit_code, 0);
    RunResult c = run_cli("compare --group logging --out-prefix " + (dir / "cmp").string() + " " +
                          (dir / "demo.json").string() + " 2>/dev/null");
    EXPECT_EQ(c.exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "cmp.svg"));
    EXPECT_TRUE(fs::exists(dir / "cmp.csv"));
    EXPECT_TRUE(fs::exists(dir / "cmp.json"));
    std::string svg = sensapi::read_file(dir / "cmp.svg");
    EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST(Cli, VulnScanReportsProportion) {
    fs::path core = write_temp("vuln_core.json", R"({
      "schema_version": "1",
      "package": {"group": "org.example", "artifact": "v", "version": "1.0"},
      "types": [
        {"fqn": "v.A", "kind": "class", "interfaces": [],
         "methods": [
            {"name": "bad", "abstract": false, "visibility": "public"},
            {"name": "clean", "abstract": false, "visibility": "public"}
         ],
         "public_constructor": true}
      ],
      "call_sites": [
        {"caller": {"owner": "v.A", "name": "bad"},
         "callee": {"owner": "java.net.Socket", "name": "connect"},
         "dispatch": "virtual"}
      ]
    })");
    fs::path vulns = write_temp("vulns.json", R"([
      {"owner": "v.A", "name": "bad"},
      {"owner": "v.A", "name": "clean"}
    ])");
    RunResult r = run_cli("vuln scan --core " + core.string() + " --vuln-functions " +
                          vulns.string() + " --catalog " + shipped_catalog() + " 2>/dev/null");
    EXPECT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("functions_with_hits"), 1);
    EXPECT_EQ(doc.at("total_functions"), 2);
    EXPECT_DOUBLE_EQ(doc.at("proportion").get<double>(), 0.5);
}

TEST(Cli, CorpusTopRanksApis) {
    fs::path dir = fs::temp_directory_path() / "sensapi_cli_corpus";
    fs::create_directories(dir);
    fs::path core = write_temp("core.json", kCoreGraph);
    RunResult a = run_cli("analyze --catalog " + shipped_catalog() + " --core " + core.string() +
                          " --out " + (dir / "demo.profile.json").string());
    ASSERT_EQ(a.exit_code, 0);
    RunResult r = run_cli("corpus top --profiles " + dir.string() + " --catalog " +
                          shipped_catalog() + " --json");
    EXPECT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.out);
    ASSERT_EQ(doc.at("entries").size(), 1u);
    EXPECT_EQ(doc.at("entries")[0].at("api"), "java.lang.Class.forName()");
    EXPECT_EQ(doc.at("entries")[0].at("subcategory"), "Reflection");
}

TEST(Cli, UnknownSubcommandFails) {
    RunResult r = run_cli("frobnicate 2>/dev/null");
    EXPECT_NE(r.exit_code, 0);
}

TEST(Cli, EntryPolicyPublicExcludesPrivateCallers) {
    fs::path core = write_temp("policy.json", R"({
      "schema_version": "1",
      "package": {"group": "org.example", "artifact": "pol", "version": "1.0"},
      "types": [
        {"fqn": "p.A", "kind": "class", "interfaces": [],
         "methods": [{"name": "hidden", "abstract": false, "visibility": "private"}],
         "public_constructor": true}
      ],
      "call_sites": [
        {"caller": {"owner": "p.A", "name": "hidden"},
         "callee": {"owner": "java.lang.Class", "name": "forName"},
         "dispatch": "static"}
      ]
    })");
    RunResult all = run_cli("analyze --catalog " + shipped_catalog() + " --core " +
                            core.string() + " 2>/dev/null");
    RunResult pub = run_cli("analyze --catalog " + shipped_catalog() + " --core " +
                            core.string() + " --entry-policy public 2>/dev/null");
    ASSERT_EQ(all.exit_code, 0);
    ASSERT_EQ(pub.exit_code, 0);
    EXPECT_EQ(nlohmann::json::parse(all.out).at("direct_count"), 1);
    EXPECT_EQ(nlohmann::json::parse(pub.out).at("direct_count"), 0);
}

// The shipped sample inputs must stay analyzable end to end.
TEST(Cli, SampleWalkthrough) {
    std::string samples = std::string(SENSAPI_SOURCE_DIR) + "/samples";
    fs::path dir = fs::temp_directory_path() / "sensapi_cli_samples";
    fs::create_directories(dir);

    RunResult v1 = run_cli("analyze --catalog " + shipped_catalog() + " --core " + samples +
                           "/logkit-1.0.json --out " + (dir / "v1.json").string());
    ASSERT_EQ(v1.exit_code, 0);
    RunResult v2 = run_cli("analyze --catalog " + shipped_catalog() + " --mode inter --core " +
                           samples + "/logkit-2.0.json --deps " + samples +
                           "/iokit-1.0.json --out " + (dir / "v2.json").string() +
                           " 2>/dev/null");
    ASSERT_EQ(v2.exit_code, 0);

    auto p2 = nlohmann::json::parse(sensapi::read_file(dir / "v2.json"));
    EXPECT_EQ(p2.at("mode"), "inter");
    EXPECT_GT(p2.at("indirect_count").get<int>(), 0);  // dependency contributes
    EXPECT_EQ(p2.at("per_subcategory").at("Socket"), 2);

    RunResult scan = run_cli("vuln scan --core " + samples + "/logkit-1.0.json" +
                             " --vuln-functions " + samples + "/vulnerable_functions.json" +
                             " --catalog " + shipped_catalog() + " 2>/dev/null");
    ASSERT_EQ(scan.exit_code, 0);
    auto report = nlohmann::json::parse(scan.out);
    EXPECT_DOUBLE_EQ(report.at("proportion").get<double>(), 0.5);

    RunResult hier = run_cli("catalog validate " + shipped_catalog() + " --cwe-hierarchy " +
                             samples + "/cwe_hierarchy.json");
    EXPECT_EQ(hier.exit_code, 0);
}

}  // namespace
