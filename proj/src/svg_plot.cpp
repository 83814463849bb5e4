#include "fair_amdp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fairmdp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

constexpr const char* kLineColors[] = {"#1f6fb2", "#d97714", "#2c8a4b", "#b03a43",
                                       "#7b5ea7"};
constexpr const char* kBandColors[] = {"#aac8e8", "#f2c79b", "#a8d8b8", "#e3aeb3",
                                       "#cdc1e0"};
constexpr int kPaletteSize = 5;

} // namespace

PlotSeries aggregate_metric(const std::string& csv_text, const std::string& metric) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    const std::vector<std::string> header = split_csv_line(line);
    int column = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == metric) column = static_cast<int>(i);
    if (column < 0) throw std::invalid_argument("unknown metric: " + metric);
    int t_column = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == "t") t_column = static_cast<int>(i);
    if (t_column < 0) throw std::invalid_argument("CSV has no t column");

    std::map<long long, std::vector<double>> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) <= std::max(column, t_column))
            throw std::invalid_argument("malformed CSV row: " + line);
        values[std::stoll(fields[t_column])].push_back(std::stod(fields[column]));
    }
    if (values.empty()) throw std::invalid_argument("no rows in CSV body");

    PlotSeries series;
    series.metric = metric;
    for (const auto& [t, samples] : values) {
        double mean = 0.0;
        for (const double v : samples) mean += v;
        mean /= samples.size();
        double var = 0.0;
        for (const double v : samples) var += (v - mean) * (v - mean);
        series.t.push_back(t);
        series.mean.push_back(mean);
        series.stddev.push_back(std::sqrt(var / samples.size()));
    }
    return series;
}

std::string render_line_chart(const std::vector<PlotSeries>& series) {
    if (series.empty() || series[0].t.empty())
        throw std::invalid_argument("no rows in CSV body");
    const double width = 800, height = 500;
    const double left = 80, right = 30, top = 30, bottom = 60;

    double t_min = static_cast<double>(series[0].t.front());
    double t_max = t_min;
    double y_min = series[0].mean[0], y_max = y_min;
    for (const PlotSeries& s : series) {
        if (s.t.empty()) throw std::invalid_argument("no rows in CSV body");
        t_min = std::min(t_min, static_cast<double>(s.t.front()));
        t_max = std::max(t_max, static_cast<double>(s.t.back()));
        for (size_t i = 0; i < s.mean.size(); ++i) {
            y_min = std::min(y_min, s.mean[i] - s.stddev[i]);
            y_max = std::max(y_max, s.mean[i] + s.stddev[i]);
        }
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto sx = [&](double t) {
        const double span = t_max > t_min ? t_max - t_min : 1.0;
        return left + (t - t_min) / span * (width - left - right);
    };
    auto sy = [&](double y) {
        return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
           num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (size_t k = 0; k < series.size(); ++k) {
        const PlotSeries& s = series[k];
        const char* band = kBandColors[k % kPaletteSize];
        std::string polygon =
            std::string("<polygon fill=\"") + band + "\" fill-opacity=\"0.5\" points=\"";
        for (size_t i = 0; i < s.t.size(); ++i)
            polygon += num(sx(s.t[i])) + "," + num(sy(s.mean[i] + s.stddev[i])) + " ";
        for (size_t i = s.t.size(); i-- > 0;)
            polygon += num(sx(s.t[i])) + "," + num(sy(s.mean[i] - s.stddev[i])) + " ";
        polygon += "\"/>\n";
        svg += polygon;
    }
    for (size_t k = 0; k < series.size(); ++k) {
        const PlotSeries& s = series[k];
        const char* color = kLineColors[k % kPaletteSize];
        std::string curve = std::string("<polyline fill=\"none\" stroke=\"") + color +
                            "\" stroke-width=\"2\" points=\"";
        for (size_t i = 0; i < s.t.size(); ++i)
            curve += num(sx(s.t[i])) + "," + num(sy(s.mean[i])) + " ";
        curve += "\"/>\n";
        svg += curve;
    }

    // axes and ticks
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" +
           num(width - right) + "\" y2=\"" + num(height - bottom) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(height - bottom) + "\" stroke=\"black\"/>\n";
    const int n_ticks = 5;
    for (int k = 0; k <= n_ticks; ++k) {
        const double t = t_min + (t_max - t_min) * k / n_ticks;
        const double x = sx(t);
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" +
               num(x) + "\" y2=\"" + num(height - bottom + 6) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(height - bottom + 22) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + num(t) + "</text>\n";
        const double y = y_min + (y_max - y_min) * k / n_ticks;
        const double ypix = sy(y);
        svg += "<line x1=\"" + num(left - 6) + "\" y1=\"" + num(ypix) + "\" x2=\"" +
               num(left) + "\" y2=\"" + num(ypix) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(left - 10) + "\" y=\"" + num(ypix + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + num(y) + "</text>\n";
    }

    svg += "<text x=\"" + num((left + width - right) / 2) + "\" y=\"" +
           num(height - 15) + "\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
    std::string y_label;
    for (const PlotSeries& s : series)
        y_label += (y_label.empty() ? "" : ", ") + s.metric;
    svg += "<text x=\"20\" y=\"" + num((top + height - bottom) / 2) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           num((top + height - bottom) / 2) + ")\">" + y_label + "</text>\n";

    for (size_t k = 0; k < series.size(); ++k) {
        const double y = top + 16.0 * (k + 1);
        svg += std::string("<line x1=\"") + num(width - right - 150) + "\" y1=\"" +
               num(y - 4) + "\" x2=\"" + num(width - right - 120) + "\" y2=\"" +
               num(y - 4) + "\" stroke=\"" + kLineColors[k % kPaletteSize] +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(width - right - 112) + "\" y=\"" + num(y) +
               "\" font-size=\"12\">" + series[k].metric + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace fairmdp
