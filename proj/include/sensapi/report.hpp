#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensapi/detail/json_util.hpp"
#include "sensapi/detail/random.hpp"
#include "sensapi/errors.hpp"
#include "sensapi/metrics.hpp"

namespace sensapi {

enum class HeatmapScale { Linear, Log1p };

inline std::string_view to_string(HeatmapScale s) {
    return s == HeatmapScale::Linear ? "linear" : "log1p";
}

inline std::optional<HeatmapScale> parse_scale(std::string_view s) {
    if (s == "linear") return HeatmapScale::Linear;
    if (s == "log1p") return HeatmapScale::Log1p;
    return std::nullopt;
}

// Sequential colorblind-accessible default (dark -> bright).
inline const std::vector<std::string>& default_heatmap_palette() {
    static const std::vector<std::string> palette = {
        "#440154", "#482878", "#3E4989", "#31688E", "#26828E",
        "#1F9E89", "#35B779", "#6DCD59", "#B4DE2C", "#FDE725",
    };
    return palette;
}

struct HeatmapSpec {
    ComparisonMatrix matrix;
    std::vector<std::string> palette = default_heatmap_palette();
    HeatmapScale scale = HeatmapScale::Log1p;  // counts span orders of magnitude
    int cell_size = 44;
    int margin = 0;  // 0 = derive label gutters from content
    std::optional<std::uint64_t> shuffle_seed;
};

namespace detail {

struct Rgb {
    int r = 0, g = 0, b = 0;
};

inline Rgb parse_hex_color(const std::string& hex) {
    if (hex.size() != 7 || hex[0] != '#')
        throw ValidationError("heatmap: bad palette stop \"" + hex + "\"");
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ValidationError("heatmap: bad palette stop \"" + hex + "\"");
    };
    return {nibble(hex[1]) * 16 + nibble(hex[2]), nibble(hex[3]) * 16 + nibble(hex[4]),
            nibble(hex[5]) * 16 + nibble(hex[6])};
}

inline std::string format_hex_color(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

inline std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

// Piecewise-linear palette interpolation; t in [0,1].
inline std::string heatmap_color(const std::vector<std::string>& palette, double t) {
    if (palette.size() < 2) throw ValidationError("heatmap: palette needs at least 2 stops");
    t = std::clamp(t, 0.0, 1.0);
    double pos = t * static_cast<double>(palette.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    if (i >= palette.size() - 1) i = palette.size() - 2;
    double frac = pos - static_cast<double>(i);
    detail::Rgb a = detail::parse_hex_color(palette[i]);
    detail::Rgb b = detail::parse_hex_color(palette[i + 1]);
    auto lerp = [&](int x, int y) {
        return static_cast<int>(std::lround(static_cast<double>(x) +
                                            (static_cast<double>(y) - x) * frac));
    };
    return detail::format_hex_color({lerp(a.r, b.r), lerp(a.g, b.g), lerp(a.b, b.b)});
}

// Normalized position of a count within [min, max] under the chosen scale.
// Degenerate all-equal matrices map to the lowest stop.
inline double heatmap_normalize(std::int64_t value, std::int64_t min_value,
                                std::int64_t max_value, HeatmapScale scale) {
    auto apply = [&](std::int64_t v) {
        double x = static_cast<double>(v);
        return scale == HeatmapScale::Log1p ? std::log1p(x) : x;
    };
    double lo = apply(min_value), hi = apply(max_value);
    if (hi <= lo) return 0.0;
    return (apply(value) - lo) / (hi - lo);
}

// Deterministic static SVG: one rect per cell, row/column labels, a value
// annotation per cell. Identical specs yield identical bytes.
inline std::string render_heatmap(const HeatmapSpec& spec) {
    const ComparisonMatrix& base = spec.matrix;

    std::vector<std::size_t> col_perm(base.columns.size());
    for (std::size_t i = 0; i < col_perm.size(); ++i) col_perm[i] = i;
    if (spec.shuffle_seed)
        col_perm = detail::shuffled_indices(base.columns.size(), *spec.shuffle_seed);

    const int cell = spec.cell_size;
    std::size_t rows = base.rows.size();
    std::size_t cols = base.columns.size();

    std::size_t max_row_label = 0;
    for (const PackageCoordinates& r : base.rows)
        max_row_label = std::max(max_row_label, r.to_string().size());
    std::size_t max_col_label = 0;
    for (Subcategory c : base.columns)
        max_col_label = std::max(max_col_label, to_string(c).size());

    // 7px per character approximates the 12px monospace label font.
    int left = spec.margin > 0 ? spec.margin : static_cast<int>(max_row_label) * 7 + 16;
    int top = spec.margin > 0 ? spec.margin : static_cast<int>(max_col_label) * 5 + 24;
    int right = 24, bottom = 12;
    int width = left + static_cast<int>(cols) * cell + right;
    int height = top + static_cast<int>(rows) * cell + bottom;
    if (rows == 0) {
        width = left + right + cell;
        height = top + bottom + cell;
    }

    std::int64_t min_v = 0, max_v = 0;
    bool first = true;
    for (const auto& row : base.cells)
        for (std::int64_t v : row) {
            if (first || v < min_v) min_v = v;
            if (first || v > max_v) max_v = v;
            first = false;
        }

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    svg += "  <title>" + detail::xml_escape(base.group_name) + "</title>\n";

    if (rows == 0) {
        svg += "  <line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(top) +
               "\" x2=\"" + std::to_string(left) + "\" y2=\"" + std::to_string(height - bottom) +
               "\" stroke=\"#333333\"/>\n";
        svg += "  <line x1=\"" + std::to_string(left) + "\" y1=\"" +
               std::to_string(height - bottom) + "\" x2=\"" + std::to_string(width - right) +
               "\" y2=\"" + std::to_string(height - bottom) + "\" stroke=\"#333333\"/>\n";
        svg += "</svg>\n";
        return svg;
    }

    for (std::size_t j = 0; j < cols; ++j) {
        Subcategory sub = base.columns[col_perm[j]];
        int x = left + static_cast<int>(j) * cell + cell / 2;
        svg += "  <text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(top - 8) +
               "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"start\" " +
               "transform=\"rotate(-45 " + std::to_string(x) + " " + std::to_string(top - 8) +
               ")\">" + detail::xml_escape(to_string(sub)) + "</text>\n";
    }
    for (std::size_t i = 0; i < rows; ++i) {
        int y = top + static_cast<int>(i) * cell + cell / 2 + 4;
        svg += "  <text x=\"" + std::to_string(left - 8) + "\" y=\"" + std::to_string(y) +
               "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">" +
               detail::xml_escape(base.rows[i].to_string()) + "</text>\n";
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            std::int64_t v = base.cells[i][col_perm[j]];
            double t = heatmap_normalize(v, min_v, max_v, spec.scale);
            std::string fill = heatmap_color(spec.palette, t);
            int x = left + static_cast<int>(j) * cell;
            int y = top + static_cast<int>(i) * cell;
            svg += "  <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                   "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
                   "\" fill=\"" + fill + "\" stroke=\"#ffffff\"/>\n";
            // Annotation flips to white on the dark end of the palette.
            detail::Rgb c = detail::parse_hex_color(fill);
            bool dark = (0.299 * c.r + 0.587 * c.g + 0.114 * c.b) < 128.0;
            svg += "  <text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" +
                   std::to_string(y + cell / 2 + 4) +
                   "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\" fill=\"" +
                   (dark ? "#ffffff" : "#000000") + "\">" + std::to_string(v) + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

// ---------------------------------------------------------------------------
// CSV / JSON report variants
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_field(std::string_view text) {
    bool quote = text.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!quote) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

// RFC-4180-style: CRLF terminators, numeric cells unquoted, header carries
// the subcategory names in matrix column order.
inline std::string emit_csv(const ComparisonMatrix& m) {
    std::string out = "package";
    for (Subcategory s : m.columns) out += "," + std::string(to_string(s));
    out += "\r\n";
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        out += detail::csv_field(m.rows[i].to_string());
        for (std::int64_t v : m.cells[i]) out += "," + std::to_string(v);
        out += "\r\n";
    }
    return out;
}

inline std::string emit_matrix_json(const ComparisonMatrix& m) {
    using detail::json;
    json doc;
    doc["schema_version"] = "1";
    doc["group"] = m.group_name;
    json cols = json::array();
    for (Subcategory s : m.columns) cols.push_back(std::string(to_string(s)));
    doc["columns"] = std::move(cols);
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        json row;
        row["package"] = m.rows[i].to_string();
        row["counts"] = m.cells[i];
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return detail::dump_canonical(doc);
}

inline std::string emit_corpus_json(const std::vector<RankedApi>& ranked,
                                    const SensitiveApiCatalog* catalog = nullptr) {
    using detail::json;
    json doc;
    doc["schema_version"] = "1";
    json entries = json::array();
    for (const RankedApi& r : ranked) {
        json e;
        e["api"] = r.api.display();
        if (catalog) {
            const SensitiveApi* api = catalog->lookup(r.api.class_fqn, r.api.method_name);
            if (api) {
                e["category"] = std::string(to_string(api->category));
                e["subcategory"] = std::string(to_string(api->subcategory));
            }
        }
        e["aggregate"] = r.aggregate;
        e["share"] = r.share;
        entries.push_back(std::move(e));
    }
    doc["entries"] = std::move(entries);
    return detail::dump_canonical(doc);
}

}  // namespace sensapi
