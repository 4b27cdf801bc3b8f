#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "spiralwave/harness.hpp"

namespace spiralwave {

namespace {

constexpr double kSize = 480, kMargin = 50;
const char* const kPalette[] = {"#1f4e9c", "#b2331d", "#2b7a3d", "#7b3f99", "#c77c0e", "#3b8c8c", "#555555"};

std::string f3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    double w, h;
    double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * w; }
    double py(double y) const { return kMargin + h - (y - y0) / (y1 - y0) * h; }
};

void header(std::ostringstream& os, double width, double height, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f3(width) << "\" height=\"" << f3(height)
       << "\" viewBox=\"0 0 " << f3(width) << " " << f3(height) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << f3(width) << "\" height=\"" << f3(height) << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << f3(width / 2) << "\" y=\"" << f3(kMargin / 2) << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
}

void polylines(std::ostringstream& os, const std::vector<PlotLine>& lines, const Frame& fr) {
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const PlotLine& l = lines[k];
        // Split at non-finite points so gaps stay gaps.
        std::vector<std::vector<Vec2>> runs(1);
        for (const Vec2& p : l.points) {
            if (std::isfinite(p.x()) && std::isfinite(p.y())) {
                runs.back().push_back(p);
            } else if (!runs.back().empty()) {
                runs.emplace_back();
            }
        }
        for (const auto& run : runs) {
            if (run.empty()) continue;
            os << "<polyline fill=\"none\" stroke=\"" << kPalette[k % 7] << "\" stroke-width=\"1.5\"";
            if (l.dashed) os << " stroke-dasharray=\"5,4\"";
            os << " points=\"";
            for (std::size_t i = 0; i < run.size(); ++i)
                os << (i ? " " : "") << f3(fr.px(run[i].x())) << "," << f3(fr.py(run[i].y()));
            os << "\"/>\n";
        }
    }
    double ly = kMargin + 14;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (lines[k].label.empty()) continue;
        const double lx = kMargin + fr.w + 10;
        os << "<line x1=\"" << f3(lx) << "\" y1=\"" << f3(ly - 4) << "\" x2=\"" << f3(lx + 20) << "\" y2=\""
           << f3(ly - 4) << "\" stroke=\"" << kPalette[k % 7] << "\" stroke-width=\"1.5\""
           << (lines[k].dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
        os << "<text x=\"" << f3(lx + 26) << "\" y=\"" << f3(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << escape(lines[k].label) << "</text>\n";
        ly += 16;
    }
}

}  // namespace

std::string trajectory_svg(const TrajectoryPlot& plot) {
    if (plot.lines.empty()) throw ValidationError("nothing to plot");
    const double scale = std::min(kSize / plot.dom.lx, kSize / plot.dom.ly);
    Frame fr{0, plot.dom.lx, 0, plot.dom.ly, plot.dom.lx * scale, plot.dom.ly * scale};
    std::ostringstream os;
    header(os, fr.w + 2 * kMargin + 160, fr.h + 2 * kMargin, plot.title);
    os << "<rect x=\"" << f3(kMargin) << "\" y=\"" << f3(kMargin) << "\" width=\"" << f3(fr.w) << "\" height=\""
       << f3(fr.h) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    polylines(os, plot.lines, fr);
    for (std::size_t k = 0; k < plot.lines.size(); ++k) {
        const auto& pts = plot.lines[k].points;
        if (pts.empty() || !std::isfinite(pts.front().x())) continue;
        os << "<circle cx=\"" << f3(fr.px(pts.front().x())) << "\" cy=\"" << f3(fr.py(pts.front().y()))
           << "\" r=\"2.5\" fill=\"" << kPalette[k % 7] << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string series_svg(const SeriesPlot& plot) {
    if (plot.lines.empty()) throw ValidationError("nothing to plot");
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& l : plot.lines)
        for (const Vec2& p : l.points) {
            if (!std::isfinite(p.x()) || !std::isfinite(p.y())) continue;
            x0 = std::min(x0, p.x());
            x1 = std::max(x1, p.x());
            y0 = std::min(y0, p.y());
            y1 = std::max(y1, p.y());
        }
    if (!std::isfinite(x0)) {
        x0 = y0 = 0;
        x1 = y1 = 1;
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    y0 = std::min(y0, 0.0);
    Frame fr{x0, x1, y0, y1, kSize, kSize * 0.6};
    std::ostringstream os;
    header(os, fr.w + 2 * kMargin + 160, fr.h + 2 * kMargin + 20, plot.title);
    os << "<rect x=\"" << f3(kMargin) << "\" y=\"" << f3(kMargin) << "\" width=\"" << f3(fr.w) << "\" height=\""
       << f3(fr.h) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        os << "<text x=\"" << f3(x) << "\" y=\"" << f3(y) << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(text) << "</text>\n";
    };
    label(kMargin, kMargin + fr.h + 14, f3(x0), "start");
    label(kMargin + fr.w, kMargin + fr.h + 14, f3(x1), "end");
    label(kMargin - 4, kMargin + fr.h, f3(y0), "end");
    label(kMargin - 4, kMargin + 8, f3(y1), "end");
    label(kMargin + fr.w / 2, kMargin + fr.h + 30, plot.x_label, "middle");
    label(kMargin, kMargin - 6, plot.y_label, "start");
    polylines(os, plot.lines, fr);
    os << "</svg>\n";
    return os.str();
}

std::vector<std::string> emit_plots(const std::vector<TrajectoryPlot>& trajectories,
                                    const std::vector<SeriesPlot>& series, const std::filesystem::path& dir,
                                    const std::string& stem) {
    std::vector<std::string> names;
    auto write = [&](const std::string& name, const std::string& svg) {
        std::ofstream out(dir / name, std::ios::binary);
        out << svg;
        names.push_back(name);
    };
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        write(stem + "_trajectory" + (trajectories.size() > 1 ? "_" + std::to_string(i) : "") + ".svg",
              trajectory_svg(trajectories[i]));
    for (std::size_t i = 0; i < series.size(); ++i)
        write(stem + "_series" + (series.size() > 1 ? "_" + std::to_string(i) : "") + ".svg", series_svg(series[i]));
    return names;
}

}  // namespace spiralwave
