#pragma once

#include <string>
#include <vector>

#include "mortkit/survival.hpp"

namespace mortkit {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

// Scatter plot with a least-squares line y = intercept + slope * x.
std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<ScatterPoint>& points,
                        double intercept, double slope);

struct LabelledCurve {
    std::string label;
    SurvivalCurve curve;
};

// Step plot of one or two survival curves with +-1 standard deviation bands,
// drawn out to x_max on the time axis.
std::string svg_survival(const std::string& title, const std::vector<LabelledCurve>& curves,
                         double x_max);

// Ordinary least squares fit y = intercept + slope * x.
std::pair<double, double> least_squares(const std::vector<ScatterPoint>& points);

} // namespace mortkit
