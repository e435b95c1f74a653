#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aew {

// Locale-independent formatting: 12 significant digits, '.' decimal point.
std::string format_double(double v);
std::string format_u64(std::uint64_t v);
std::string format_i64(long long v);

// Result rows are kept pre-formatted so integer-valued cells (seeds, counts)
// round-trip exactly through the serializers.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(std::string_view name) const;  // throws if absent
    double num(std::size_t row, std::string_view name) const;
};

// Header row then data rows; LF line endings; UTF-8; create-or-truncate.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable parse_csv(const std::filesystem::path& path);

// Array of one object per row; cells are emitted as JSON numbers.
void emit_json(const ResultTable& table, const std::filesystem::path& path);

struct RatePlotSpec {
    std::string x_col = "n";
    std::string y_col;
    bool ref_slope_half = true;  // reference line of slope -1/2 through the first point
    bool ref_slope_one = true;   // reference line of slope -1 through the first point
    std::string title;
};

// Self-contained deterministic SVG: log-log scatter of y_col against x_col.
// Throws std::runtime_error when fewer than two usable points exist.
std::string render_svg_rate_plot(const ResultTable& table, const RatePlotSpec& spec);
void emit_svg_rate_plot(const ResultTable& table, const std::filesystem::path& path,
                        const RatePlotSpec& spec);

// Diagnostic to stderr; colored only on a terminal without NO_COLOR set.
void warn(const std::string& message);

}  // namespace aew
