#include "mstab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mstab {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (const char c : s) {
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

struct Svg {
    std::ostringstream out;

    void open(int width, int height) {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
            << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
            << "\">\n<rect width=\"" << width << "\" height=\"" << height
            << "\" fill=\"white\"/>\n";
    }
    std::string close() {
        out << "</svg>\n";
        return out.str();
    }
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& dash = "") {
        out << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
            << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
            << num(width) << "\"";
        if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
        out << "/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.5) {
        if (pts.size() < 2) return;
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width)
            << "\" points=\"";
        for (const auto& [x, y] : pts) out << num(x) << "," << num(y) << " ";
        out << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0) {
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
            << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"";
        if (opacity < 1.0) out << " fill-opacity=\"" << num(opacity) << "\"";
        out << "/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& cls = "") {
        out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
            << "\" fill=\"" << fill << "\"";
        if (!cls.empty()) out << " class=\"" << cls << "\"";
        out << "/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 11,
              const std::string& anchor = "start", const std::string& fill = "#333333") {
        out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
            << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << fill
            << "\">" << escape_text(s) << "</text>\n";
    }
};

/// Linear data-to-pixel mapping; collapses to the midpoint for a flat range.
struct Axis {
    double v0 = 0.0, v1 = 1.0, p0 = 0.0, p1 = 1.0;
    double operator()(double v) const {
        if (v1 == v0) return 0.5 * (p0 + p1);
        return p0 + (v - v0) / (v1 - v0) * (p1 - p0);
    }
};

std::string viridis(double v) {
    static const int anchors[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    v = std::clamp(v, 0.0, 1.0) * 4.0;
    const int k = std::min(3, static_cast<int>(v));
    const double f = v - k;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(anchors[k][0] + f * (anchors[k + 1][0] - anchors[k][0])),
                  static_cast<int>(anchors[k][1] + f * (anchors[k + 1][1] - anchors[k][1])),
                  static_cast<int>(anchors[k][2] + f * (anchors[k + 1][2] - anchors[k][2])));
    return buf;
}

void draw_frame(Svg& svg, double x0, double y0, double x1, double y1) {
    svg.line(x0, y1, x1, y1, "#555555");
    svg.line(x0, y0, x0, y1, "#555555");
}

void x_ticks(Svg& svg, const Axis& ax, const std::vector<Scalar>& log_scales, double y_base) {
    if (log_scales.empty()) return;
    const int step = std::max<int>(1, static_cast<int>(log_scales.size()) / 6);
    for (std::size_t i = 0; i < log_scales.size(); i += static_cast<std::size_t>(step)) {
        const double x = ax(log_scales[i]);
        svg.line(x, y_base, x, y_base + 4, "#555555");
        svg.text(x, y_base + 16, num(log_scales[i]), 10, "middle");
    }
}

void y_ticks(Svg& svg, const Axis& ay, double v_min, double v_max, double x_base,
             const std::string& side = "left") {
    for (int k = 0; k <= 4; ++k) {
        const double v = v_min + (v_max - v_min) * k / 4.0;
        const double y = ay(v);
        if (side == "left") {
            svg.line(x_base - 4, y, x_base, y, "#555555");
            svg.text(x_base - 6, y + 3, num(v), 10, "end");
        } else {
            svg.line(x_base, y, x_base + 4, y, "#555555");
            svg.text(x_base + 6, y + 3, num(v), 10, "start");
        }
    }
}

}  // namespace

std::string summary_svg(const ScanResult& result) {
    const int width = 960, height = 800;
    Svg svg;
    svg.open(width, height);
    svg.text(20, 24, "scale scan: " + result.config.constructor + ", " +
                         std::to_string(result.scales.size()) + " scales, " +
                         std::to_string(result.config.n_tries) + " tries per scale",
             14);

    std::vector<Scalar> log_scales;
    for (const auto& s : result.scales) log_scales.push_back(s.log_scale);
    const double lx0 = log_scales.empty() ? 0.0 : log_scales.front();
    const double lx1 = log_scales.empty() ? 1.0 : log_scales.back();

    // row 1: quality (left axis) and community count (right axis, log10)
    {
        const double top = 50, bottom = 250, left = 70, right = 880;
        Axis ax{lx0, lx1, left, right};
        double q_min = 0.0, q_max = 1.0;
        if (!result.scales.empty()) {
            q_min = q_max = result.scales.front().best_quality;
            for (const auto& s : result.scales) {
                q_min = std::min(q_min, s.best_quality);
                q_max = std::max(q_max, s.best_quality);
            }
            if (q_min == q_max) q_max = q_min + 1.0;
        }
        Axis ay{q_min, q_max, bottom, top};
        double c_max = 1.0;
        for (const auto& s : result.scales)
            c_max = std::max(c_max, std::log10(static_cast<double>(
                                        std::max(1, s.best_partition.num_communities()))));
        Axis ac{0.0, std::max(1.0, c_max), bottom, top};

        draw_frame(svg, left, top, right, bottom);
        svg.line(right, top, right, bottom, "#555555");
        std::vector<std::pair<double, double>> q_pts, c_pts;
        for (const auto& s : result.scales) {
            q_pts.emplace_back(ax(s.log_scale), ay(s.best_quality));
            c_pts.emplace_back(ax(s.log_scale),
                               ac(std::log10(static_cast<double>(
                                   std::max(1, s.best_partition.num_communities())))));
        }
        svg.polyline(q_pts, "#1f77b4");
        svg.polyline(c_pts, "#d62728");
        for (const auto& [x, y] : q_pts) svg.circle(x, y, 2.5, "#1f77b4");
        for (const auto& [x, y] : c_pts) svg.circle(x, y, 2.5, "#d62728");
        x_ticks(svg, ax, log_scales, bottom);
        y_ticks(svg, ay, q_min, q_max, left);
        svg.text(left, top - 8, "best quality (blue) / log10 communities (red, right axis)", 11);
        y_ticks(svg, ac, 0.0, std::max(1.0, c_max), right, "right");
        svg.text((left + right) / 2, bottom + 32, "log10 t", 11, "middle");
    }

    // row 2: NVI(t) curve and NVI(t,t') heatmap
    {
        const double top = 310, bottom = 500, left = 70, curve_right = 480;
        Axis ax{lx0, lx1, left, curve_right};
        Axis ay{0.0, 1.0, bottom, top};
        draw_frame(svg, left, top, curve_right, bottom);
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : result.scales) pts.emplace_back(ax(s.log_scale), ay(s.nvi));
        svg.polyline(pts, "#2ca02c");
        for (const auto& [x, y] : pts) svg.circle(x, y, 2.5, "#2ca02c");
        x_ticks(svg, ax, log_scales, bottom);
        y_ticks(svg, ay, 0.0, 1.0, left);
        svg.text(left, top - 8, "NVI(t)", 11);
        svg.text((left + curve_right) / 2, bottom + 32, "log10 t", 11, "middle");

        const int s = static_cast<int>(result.cross_nvi.rows());
        const double heat_left = 560, heat_size = bottom - top;
        if (s > 0) {
            const double cell = heat_size / s;
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    svg.rect(heat_left + j * cell, top + i * cell, cell + 0.5, cell + 0.5,
                             viridis(result.cross_nvi(i, j)));
            svg.text(heat_left, top - 8, "NVI(t, t')", 11);
            // colorbar
            const double bar_x = heat_left + heat_size + 16;
            for (int k = 0; k < 40; ++k)
                svg.rect(bar_x, top + heat_size - (k + 1) * heat_size / 40.0, 12,
                         heat_size / 40.0 + 0.5, viridis(k / 39.0));
            svg.text(bar_x + 16, top + 10, "1", 10);
            svg.text(bar_x + 16, top + heat_size, "0", 10);
        }
    }

    // row 3: Block NVI with basins and selected scales
    {
        const double top = 560, bottom = 740, left = 70, right = 880;
        Axis ax{lx0, lx1, left, right};
        const Vector& block = result.selection.block_nvi;
        double b_max = 1e-9;
        for (Eigen::Index i = 0; i < block.size(); ++i) b_max = std::max(b_max, block[i]);
        Axis ay{0.0, b_max, bottom, top};
        draw_frame(svg, left, top, right, bottom);

        const int radius = std::max(1, result.config.basin_radius);
        for (const int minimum : result.selection.minima) {
            const int lo = std::max(0, minimum - radius);
            const int hi = std::min(static_cast<int>(block.size()) - 1, minimum + radius);
            if (lo >= static_cast<int>(log_scales.size()) ||
                hi >= static_cast<int>(log_scales.size()))
                continue;
            svg.rect(ax(log_scales[static_cast<std::size_t>(lo)]), top,
                     ax(log_scales[static_cast<std::size_t>(hi)]) -
                         ax(log_scales[static_cast<std::size_t>(lo)]),
                     bottom - top, "#9467bd", 0.15);
        }

        std::vector<std::pair<double, double>> pts;
        for (Eigen::Index i = 0; i < block.size(); ++i)
            if (i < static_cast<Eigen::Index>(log_scales.size()))
                pts.emplace_back(ax(log_scales[static_cast<std::size_t>(i)]), ay(block[i]));
        svg.polyline(pts, "#ff7f0e");
        x_ticks(svg, ax, log_scales, bottom);
        y_ticks(svg, ay, 0.0, b_max, left);
        svg.text(left, top - 8, "Block NVI with basins; selected scales in purple", 11);
        svg.text((left + right) / 2, bottom + 32, "log10 t", 11, "middle");

        for (const int index : result.selection.selected) {
            if (index >= static_cast<int>(log_scales.size())) continue;
            const double x = ax(log_scales[static_cast<std::size_t>(index)]);
            svg.line(x, top, x, bottom, "#9467bd", 1.0, "4,3");
            const double y = index < block.size() ? ay(block[index]) : bottom;
            svg.circle(x, y, 4.5, "#9467bd", "selected-scale");
        }
        if (result.selection.selected.empty())
            svg.text((left + right) / 2, (top + bottom) / 2, "no scales selected", 13, "middle",
                     "#aa3333");
        else if (result.selection.fallback)
            svg.text(right, top - 8, "fallback: global NVI(t) argmin", 11, "end", "#aa3333");
    }

    return svg.close();
}

void plot_summary(const ScanResult& result, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    file << summary_svg(result);
}

std::string benchmark_svg(const BenchmarkReport& report) {
    const int width = 760, height = 560;
    const double left = 80, right = 700, top = 60, bottom = 480;
    Svg svg;
    svg.open(width, height);
    svg.text(20, 24, "benchmark: " + report.config.constructor + ", " +
                         std::to_string(report.config.runs_per_scale) + " runs x " +
                         std::to_string(report.config.n_scales) + " scales",
             14);

    double le_min = 1e300, le_max = -1e300, lt_min = 1e300, lt_max = -1e300;
    auto log_time = [](double seconds) { return std::log10(std::max(seconds, 1e-7)); };
    for (const auto& e : report.entries) {
        const double le = std::log10(static_cast<double>(std::max<std::int64_t>(1, e.n_edges)));
        le_min = std::min(le_min, le);
        le_max = std::max(le_max, le);
        for (const double t : {e.constructor_seconds, e.exp_seconds, e.louvain_seconds,
                               e.nvi_seconds, e.postprocess_seconds}) {
            lt_min = std::min(lt_min, log_time(t));
            lt_max = std::max(lt_max, log_time(t));
        }
    }
    if (report.entries.empty()) {
        le_min = 0, le_max = 1, lt_min = -3, lt_max = 0;
    }
    if (le_min == le_max) le_max = le_min + 1;
    lt_min -= 0.2;
    lt_max += 0.2;
    Axis ax{le_min, le_max, left, right};
    Axis ay{lt_min, lt_max, bottom, top};
    draw_frame(svg, left, top, right, bottom);
    svg.text((left + right) / 2, bottom + 36, "log10 E", 11, "middle");
    svg.text(24, (top + bottom) / 2, "log10 seconds", 11, "middle");
    for (int k = 0; k <= 4; ++k) {
        const double v = lt_min + (lt_max - lt_min) * k / 4.0;
        svg.line(left - 4, ay(v), left, ay(v), "#555555");
        svg.text(left - 6, ay(v) + 3, num(v), 10, "end");
        const double e = le_min + (le_max - le_min) * k / 4.0;
        svg.line(ax(e), bottom, ax(e), bottom + 4, "#555555");
        svg.text(ax(e), bottom + 16, num(e), 10, "middle");
    }

    struct Series {
        const char* name;
        const char* color;
        double BenchmarkEntry::* field;
    };
    const Series series[] = {
        {"constructor", "#1f77b4", &BenchmarkEntry::constructor_seconds},
        {"matrix exponential", "#ff7f0e", &BenchmarkEntry::exp_seconds},
        {"louvain", "#d62728", &BenchmarkEntry::louvain_seconds},
        {"NVI", "#2ca02c", &BenchmarkEntry::nvi_seconds},
        {"post-processing", "#9467bd", &BenchmarkEntry::postprocess_seconds},
    };
    double legend_y = top + 6;
    for (const auto& s : series) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& e : report.entries) {
            const double le = std::log10(static_cast<double>(std::max<std::int64_t>(1, e.n_edges)));
            pts.emplace_back(ax(le), ay(log_time(e.*(s.field))));
        }
        svg.polyline(pts, s.color);
        for (const auto& [x, y] : pts) svg.circle(x, y, 3.0, s.color);
        svg.circle(right - 150, legend_y - 3, 4, s.color);
        svg.text(right - 140, legend_y, s.name, 11);
        legend_y += 16;
    }

    // O(E) reference through the first louvain point
    if (report.entries.size() >= 2) {
        const auto& first = report.entries.front();
        const double le0 = std::log10(static_cast<double>(std::max<std::int64_t>(1, first.n_edges)));
        const double lt0 = log_time(first.louvain_seconds);
        svg.line(ax(le0), ay(lt0), ax(le_max), ay(lt0 + (le_max - le0)), "#000000", 1.2, "6,4");
        svg.text(right - 140, legend_y, "O(E) reference", 11);
        svg.line(right - 156, legend_y - 4, right - 144, legend_y - 4, "#000000", 1.2, "6,4");
    }

    return svg.close();
}

void plot_benchmark(const BenchmarkReport& report, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    file << benchmark_svg(report);
}

}  // namespace mstab
