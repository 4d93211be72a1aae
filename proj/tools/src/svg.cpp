#include "svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "manifest.hpp"

namespace sgdiff::tool {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_bar_chart(const std::vector<Bar>& bars, const std::string& title,
                             const std::string& timestamp) {
    if (bars.empty()) {
        throw std::invalid_argument("bar chart: no bars");
    }
    const double width = 640.0;
    const double height = 400.0;
    const double left = 60.0, right = 20.0, top = 40.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double slot = plot_w / static_cast<double>(bars.size());
    const double bar_w = slot * 0.6;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
    out << "<!-- generated: " << timestamp << " -->\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << escape_text(title) << "</text>\n";

    for (int g = 0; g <= 4; ++g) {
        double frac = g / 4.0;
        double y = top + plot_h * (1.0 - frac);
        out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\""
            << fmt(left + plot_w) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(frac)
            << "</text>\n";
    }

    for (std::size_t i = 0; i < bars.size(); ++i) {
        double clamped = bars[i].value < 0.0 ? 0.0 : (bars[i].value > 1.0 ? 1.0 : bars[i].value);
        double h = plot_h * clamped;
        double x = left + slot * static_cast<double>(i) + (slot - bar_w) / 2.0;
        double y = top + plot_h - h;
        out << "<rect class=\"bar\" x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
            << fmt(bar_w) << "\" height=\"" << fmt(h) << "\" fill=\"#4477aa\"/>\n";
        out << "<text x=\"" << fmt(x + bar_w / 2) << "\" y=\"" << fmt(y - 5)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(bars[i].value) << "</text>\n";
        out << "<text x=\"" << fmt(x + bar_w / 2) << "\" y=\"" << fmt(top + plot_h + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape_text(bars[i].label) << "</text>\n";
    }

    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
        << "\" y2=\"" << fmt(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\""
        << fmt(left + plot_w) << "\" y2=\"" << fmt(top + plot_h)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "</svg>\n";
    return out.str();
}

void write_bar_chart(const std::filesystem::path& path, const std::vector<Bar>& bars,
                     const std::string& title) {
    std::string svg = render_bar_chart(bars, title, utc_timestamp());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write plot: " + path.string());
    }
    out << svg;
}

}  // namespace sgdiff::tool
