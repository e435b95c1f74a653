#include "aew/report.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace aew {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_i64(long long v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::size_t ResultTable::col(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::invalid_argument("no such column: " + std::string(name));
}

double ResultTable::num(std::size_t row, std::string_view name) const {
    const std::string& cell = rows.at(row).at(col(name));
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw std::invalid_argument("non-numeric cell: " + cell);
    return v;
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

ResultTable parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    ResultTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    table.columns = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        table.rows.push_back(split_line(line));
        if (table.rows.back().size() != table.columns.size())
            throw std::runtime_error("ragged csv row in " + path.string());
    }
    return table;
}

void emit_json(const ResultTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "[\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << "  {";
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? ", " : "") << '"' << table.columns[c] << "\": " << table.rows[r][c];
        out << (r + 1 < table.rows.size() ? "},\n" : "}\n");
    }
    out << "]\n";
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 0.05;  // of the viewBox, per the layout contract

struct Scale {
    double lo, hi, out_lo, out_hi;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (out_lo + out_hi);
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

void ref_line(std::ostream& svg, const Scale& sx, const Scale& sy, double lx0,
              double ly0, double slope, const char* dash) {
    // Clip the line log10(y) = ly0 + slope (log10(x) - lx0) to the plot box.
    double a = sx.lo, b = sx.hi;
    auto yat = [&](double lx) { return ly0 + slope * (lx - lx0); };
    for (int i = 0; i < 64; ++i) {  // refine against vertical range
        const double ya = yat(a), yb = yat(b);
        if (ya > sy.hi) a += (b - a) * (ya - sy.hi) / (ya - yb + 1e-300);
        if (yb < sy.lo) b -= (b - a) * (sy.lo - yb) / (ya - yb + 1e-300);
        if (ya >= sy.lo && ya <= sy.hi && yb >= sy.lo && yb <= sy.hi) break;
    }
    if (!(a < b)) return;
    svg << "  <line x1=\"" << format_double(sx(a)) << "\" y1=\"" << format_double(sy(yat(a)))
        << "\" x2=\"" << format_double(sx(b)) << "\" y2=\"" << format_double(sy(yat(b)))
        << "\" stroke=\"#888888\" stroke-dasharray=\"" << dash << "\"/>\n";
}

}  // namespace

std::string render_svg_rate_plot(const ResultTable& table, const RatePlotSpec& spec) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double x = table.num(r, spec.x_col);
        const double y = table.num(r, spec.y_col);
        if (x > 0.0 && y > 0.0) pts.emplace_back(std::log10(x), std::log10(y));
    }
    if (pts.size() < 2)
        throw std::runtime_error("rate plot needs at least 2 positive points");

    double lx_lo = pts[0].first, lx_hi = pts[0].first;
    double ly_lo = pts[0].second, ly_hi = pts[0].second;
    for (const auto& [x, y] : pts) {
        lx_lo = std::min(lx_lo, x);
        lx_hi = std::max(lx_hi, x);
        ly_lo = std::min(ly_lo, y);
        ly_hi = std::max(ly_hi, y);
    }
    const Scale sx{lx_lo, lx_hi, kMargin * kWidth, (1.0 - kMargin) * kWidth};
    // y grows downward in SVG coordinates
    const Scale sy{ly_lo, ly_hi, (1.0 - kMargin) * kHeight, kMargin * kHeight};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"#ffffff\"/>\n";
    if (!spec.title.empty())
        svg << "  <text x=\"" << format_double(0.5 * kWidth)
            << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" << spec.title
            << "</text>\n";
    if (spec.ref_slope_half)
        ref_line(svg, sx, sy, pts[0].first, pts[0].second, -0.5, "6,3");
    if (spec.ref_slope_one)
        ref_line(svg, sx, sy, pts[0].first, pts[0].second, -1.0, "2,3");
    for (const auto& [x, y] : pts)
        svg << "  <circle cx=\"" << format_double(sx(x)) << "\" cy=\""
            << format_double(sy(y)) << "\" r=\"4\" fill=\"#1f6fb3\"/>\n";
    svg << "  <text x=\"" << format_double((1.0 - kMargin) * kWidth) << "\" y=\""
        << format_double(kHeight - 4.0) << "\" text-anchor=\"end\" font-size=\"11\">log "
        << spec.x_col << "</text>\n";
    svg << "  <text x=\"4\" y=\"" << format_double(kMargin * kHeight)
        << "\" font-size=\"11\">log " << spec.y_col << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_svg_rate_plot(const ResultTable& table, const std::filesystem::path& path,
                        const RatePlotSpec& spec) {
    const std::string body = render_svg_rate_plot(table, spec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << body;
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

void warn(const std::string& message) {
    const bool color = isatty(2) != 0 && std::getenv("NO_COLOR") == nullptr;
    if (color)
        std::cerr << "\x1b[33mwarning:\x1b[0m " << message << '\n';
    else
        std::cerr << "warning: " << message << '\n';
}

}  // namespace aew
