#pragma once

#include <string>
#include <vector>

namespace fairmdp {

/// Per-iteration mean and standard deviation of one run-record metric,
/// aggregated across seeds.
struct PlotSeries {
    std::string metric;
    std::vector<long long> t;
    std::vector<double> mean;
    std::vector<double> stddev;
};

/// Aggregates `metric` (a run-record column such as "reward_policy",
/// "nu_2" or "gap") from CSV text. Throws std::invalid_argument on an
/// unknown metric name or a CSV with no data rows.
PlotSeries aggregate_metric(const std::string& csv_text, const std::string& metric);

/// Standalone SVG line chart: one mean curve with a +-1 std shaded band per
/// series, labeled axes and a legend. Deterministic text output.
std::string render_line_chart(const std::vector<PlotSeries>& series);

inline std::string render_line_chart(const PlotSeries& series) {
    return render_line_chart(std::vector<PlotSeries>{series});
}

} // namespace fairmdp
