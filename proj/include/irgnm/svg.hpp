#pragma once

#include <string>
#include <vector>

namespace irgnm::svg {

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct ChartOptions
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// Standalone SVG document with axes, ticks and a legend. Non-positive values
/// are dropped on a log axis.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& opts);

/// Histogram of `values` with `bins` equal-width bins over their range.
std::string histogram(const std::vector<double>& values, int bins, const ChartOptions& opts);

void write_file(const std::string& path, const std::string& content);

} // namespace irgnm::svg
