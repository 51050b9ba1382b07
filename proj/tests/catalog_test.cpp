#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "sensapi/catalog.hpp"
#include "sensapi/runner.hpp"

using namespace sensapi;

namespace {

std::string shipped_catalog_text() { return read_file(fixtures::shipped_catalog_path()); }

TEST(Catalog, ShippedCatalogLoads) {
    SensitiveApiCatalog c = load_catalog(shipped_catalog_text());
    EXPECT_EQ(c.entries().size(), 219u);
    EXPECT_EQ(c.distinct_subcategories(), 15u);
    EXPECT_EQ(c.distinct_categories(), 3u);
}

TEST(Catalog, LookupRoundTripHoldsForEveryEntry) {
    SensitiveApiCatalog c = load_catalog(shipped_catalog_text());
    for (const SensitiveApi& e : c.entries()) {
        const SensitiveApi* found = c.lookup(e.id.class_fqn, e.id.method_name);
        ASSERT_NE(found, nullptr) << e.id.display();
        EXPECT_EQ(found->id, e.id);
        EXPECT_EQ(found->subcategory, e.subcategory);
    }
}

TEST(Catalog, DisplayNotationRoundTripsForEveryEntry) {
    SensitiveApiCatalog c = load_catalog(shipped_catalog_text());
    for (const SensitiveApi& e : c.entries()) {
        auto parsed = parse_api_display(e.id.display());
        ASSERT_TRUE(parsed.has_value()) << e.id.display();
        EXPECT_EQ(*parsed, e.id);
    }
}

TEST(Catalog, LookupExamples) {
    SensitiveApiCatalog c = load_catalog(shipped_catalog_text());

    const SensitiveApi* forname = c.lookup("java.lang.Class", "forName");
    ASSERT_NE(forname, nullptr);
    EXPECT_EQ(forname->category, Category::Process);
    EXPECT_EQ(forname->subcategory, Subcategory::Reflection);

    const SensitiveApi* fis = c.lookup("java.io.FileInputStream", "<init>");
    ASSERT_NE(fis, nullptr);
    EXPECT_EQ(fis->category, Category::Filesystem);
    EXPECT_EQ(fis->subcategory, Subcategory::Input);

    EXPECT_EQ(c.lookup("com.acme.Foo", "bar"), nullptr);
    // case-sensitive exact match
    EXPECT_EQ(c.lookup("java.lang.class", "forName"), nullptr);
    EXPECT_EQ(c.lookup("java.lang.Class", "forname"), nullptr);
}

TEST(Catalog, PartitionProperty) {
    SensitiveApiCatalog c = load_catalog(shipped_catalog_text());
    for (const SensitiveApi& e : c.entries())
        EXPECT_EQ(category_of(e.subcategory), e.category) << e.id.display();
}

TEST(Catalog, DuplicateIdRejectedWithIndex) {
    const char* text = R"({
      "schema_version": "1",
      "entries": [
        {"class": "java.io.File", "method": "exists", "category": "Filesystem",
         "subcategory": "Miscellaneous", "cwes": [22]},
        {"class": "java.io.File", "method": "exists", "category": "Filesystem",
         "subcategory": "Miscellaneous", "cwes": [22]}
      ]
    })";
    try {
        load_catalog(text);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("entry 1"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("java.io.File.exists()"), std::string::npos);
    }
}

TEST(Catalog, SubcategoryCategoryMismatchRejected) {
    const char* text = R"({
      "schema_version": "1",
      "entries": [
        {"class": "java.lang.Class", "method": "forName", "category": "Network",
         "subcategory": "Reflection", "cwes": []}
      ]
    })";
    EXPECT_THROW(load_catalog(text), ValidationError);
}

TEST(Catalog, UnknownSubcategoryRejected) {
    const char* text = R"({
      "schema_version": "1",
      "entries": [
        {"class": "a.B", "method": "m", "category": "Process",
         "subcategory": "Telepathy", "cwes": []}
      ]
    })";
    EXPECT_THROW(load_catalog(text), ValidationError);
}

TEST(Catalog, UnknownFieldRejected) {
    const char* text = R"({
      "schema_version": "1",
      "entries": [
        {"class": "a.B", "method": "m", "category": "Process",
         "subcategory": "Reflection", "cwes": [], "severity": 9}
      ]
    })";
    EXPECT_THROW(load_catalog(text), ParseError);
}

TEST(Catalog, WrongSchemaVersionRejected) {
    EXPECT_THROW(load_catalog(R"({"schema_version": "2", "entries": []})"), ParseError);
}

TEST(Catalog, MalformedTextIsParseError) {
    EXPECT_THROW(load_catalog("{nope"), ParseError);
}

TEST(Catalog, EmptyCweSetAllowed) {
    const char* text = R"({
      "schema_version": "1",
      "entries": [
        {"class": "a.B", "method": "m", "category": "Process",
         "subcategory": "Reflection", "cwes": []}
      ]
    })";
    SensitiveApiCatalog c = load_catalog(text);
    EXPECT_TRUE(c.entries()[0].cwe_ids.empty());
}

// --- CWE -> OWASP -----------------------------------------------------------

CweHierarchy fixture_hierarchy() {
    return load_cwe_hierarchy(R"({
      "parents": {"23": ["22"], "36": ["23"], "99": ["98"], "610": ["664"]},
      "owasp": {"22": "A01", "664": "A04"}
    })");
}

TEST(CweMapping, DirectHit) {
    CweHierarchy h = fixture_hierarchy();
    EXPECT_EQ(map_cwe_to_owasp(h, 22), "A01");
}

TEST(CweMapping, OneLevelAncestor) {
    // CWE-23 (relative path traversal) is ChildOf CWE-22, which carries A01.
    CweHierarchy h = fixture_hierarchy();
    EXPECT_EQ(map_cwe_to_owasp(h, 23), "A01");
}

TEST(CweMapping, TwoLevelAncestor) {
    CweHierarchy h = fixture_hierarchy();
    EXPECT_EQ(map_cwe_to_owasp(h, 36), "A01");
}

TEST(CweMapping, UnmappedLineageFallsBackToOther) {
    CweHierarchy h = fixture_hierarchy();
    EXPECT_EQ(map_cwe_to_owasp(h, 99), "Other");
    EXPECT_EQ(map_cwe_to_owasp(h, 12345), "Other");
}

TEST(CweMapping, EqualDepthTieBreaksToSmallestCwe) {
    CweHierarchy h = load_cwe_hierarchy(R"({
      "parents": {"5": ["7", "3"]},
      "owasp": {"3": "A09", "7": "A02"}
    })");
    EXPECT_EQ(map_cwe_to_owasp(h, 5), "A09");
}

TEST(CweMapping, NearerAncestorWinsOverSmallerId) {
    CweHierarchy h = load_cwe_hierarchy(R"({
      "parents": {"50": ["40"], "40": ["2"]},
      "owasp": {"40": "A05", "2": "A01"}
    })");
    EXPECT_EQ(map_cwe_to_owasp(h, 50), "A05");
}

TEST(CweMapping, ResultStableUnderEdgesAboveMappedAncestor) {
    CweHierarchy h = fixture_hierarchy();
    std::string before = map_cwe_to_owasp(h, 36);
    h.parent_edges[22].insert(700);  // grandparent above the mapped ancestor
    h.owasp_map[700] = "A10";
    EXPECT_EQ(map_cwe_to_owasp(h, 36), before);
}

TEST(CweMapping, CyclicHierarchyRejectedAtLoad) {
    EXPECT_THROW(load_cwe_hierarchy(R"({
      "parents": {"1": ["2"], "2": ["1"]},
      "owasp": {}
    })"),
                 ValidationError);
}

TEST(CweMapping, CwePrefixedKeysAccepted) {
    CweHierarchy h = load_cwe_hierarchy(R"({
      "parents": {"CWE-23": ["CWE-22"]},
      "owasp": {"CWE-22": "A01"}
    })");
    EXPECT_EQ(map_cwe_to_owasp(h, 23), "A01");
}

TEST(CweMapping, BadOwaspLabelRejected) {
    EXPECT_THROW(load_cwe_hierarchy(R"({"parents": {}, "owasp": {"22": "B01"}})"), ParseError);
}

}  // namespace
