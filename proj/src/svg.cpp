#include "mortkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mortkit/errors.hpp"

namespace mortkit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 56.0;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double to_px(double v, double px_lo, double px_hi) const {
        if (hi == lo) return (px_lo + px_hi) / 2.0;
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

double map_x(const Axis& ax, double v) {
    return ax.to_px(v, kMarginLeft, kWidth - kMarginRight);
}

double map_y(const Axis& ax, double v) {
    return ax.to_px(v, kHeight - kMarginBottom, kMarginTop);
}

void draw_frame(std::ostringstream& out, const std::string& title, const std::string& x_label,
                const std::string& y_label, const Axis& xaxis, const Axis& yaxis) {
    out << "<rect x=\"" << fmt(kMarginLeft) << "\" y=\"" << fmt(kMarginTop) << "\" width=\""
        << fmt(kWidth - kMarginLeft - kMarginRight) << "\" height=\""
        << fmt(kHeight - kMarginTop - kMarginBottom)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kMarginTop - 14)
        << "\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
    out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kHeight - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(kHeight / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << fmt(kHeight / 2) << ")\">" << y_label << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xaxis.lo + (xaxis.hi - xaxis.lo) * i / 4.0;
        const double px = map_x(xaxis, fx);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
            << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(kHeight - kMarginBottom + 5)
            << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kHeight - kMarginBottom + 20)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_tick(fx) << "</text>\n";
        const double fy = yaxis.lo + (yaxis.hi - yaxis.lo) * i / 4.0;
        const double py = map_y(yaxis, fy);
        out << "<line x1=\"" << fmt(kMarginLeft - 5) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(kMarginLeft) << "\" y2=\"" << fmt(py) << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << fmt(kMarginLeft - 9) << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_tick(fy) << "</text>\n";
    }
}

} // namespace

std::pair<double, double> least_squares(const std::vector<ScatterPoint>& points) {
    if (points.size() < 2) throw InsufficientData("least squares needs at least 2 points");
    double mx = 0.0, my = 0.0;
    for (const ScatterPoint& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxx = 0.0, sxy = 0.0;
    for (const ScatterPoint& p : points) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx == 0.0) throw DegenerateData("least squares: x values are constant");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<ScatterPoint>& points,
                        double intercept, double slope) {
    Axis xaxis, yaxis;
    if (!points.empty()) {
        xaxis.lo = xaxis.hi = points[0].x;
        yaxis.lo = yaxis.hi = points[0].y;
        for (const ScatterPoint& p : points) {
            xaxis.lo = std::min(xaxis.lo, p.x);
            xaxis.hi = std::max(xaxis.hi, p.x);
            yaxis.lo = std::min(yaxis.lo, p.y);
            yaxis.hi = std::max(yaxis.hi, p.y);
        }
    }
    const double xpad = (xaxis.hi - xaxis.lo) * 0.05 + 1e-9;
    const double ypad = (yaxis.hi - yaxis.lo) * 0.05 + 1e-9;
    xaxis.lo = std::max(0.0, xaxis.lo - xpad);
    xaxis.hi += xpad;
    yaxis.lo = std::max(0.0, yaxis.lo - ypad);
    yaxis.hi += ypad;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    draw_frame(out, title, x_label, y_label, xaxis, yaxis);

    const double y0 = intercept + slope * xaxis.lo;
    const double y1 = intercept + slope * xaxis.hi;
    out << "<line x1=\"" << fmt(map_x(xaxis, xaxis.lo)) << "\" y1=\"" << fmt(map_y(yaxis, y0))
        << "\" x2=\"" << fmt(map_x(xaxis, xaxis.hi)) << "\" y2=\"" << fmt(map_y(yaxis, y1))
        << "\" stroke=\"#888888\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    for (const ScatterPoint& p : points) {
        out << "<circle cx=\"" << fmt(map_x(xaxis, p.x)) << "\" cy=\"" << fmt(map_y(yaxis, p.y))
            << "\" r=\"4\" fill=\"#1f5fa8\">";
        out << "<title>" << p.label << "</title></circle>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_survival(const std::string& title, const std::vector<LabelledCurve>& curves,
                         double x_max) {
    const char* colors[] = {"#c03030", "#1f5fa8", "#2f8f4e", "#8f572f"};
    Axis xaxis{0.0, x_max > 0.0 ? x_max : 1.0};
    Axis yaxis{0.0, 1.0};

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    draw_frame(out, title, "time (days)", "survival probability", xaxis, yaxis);

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const SurvivalCurve& curve = curves[c].curve;
        const char* color = colors[c % 4];

        // step-shaped band: upper edge left to right, lower edge back
        std::ostringstream band;
        double prev_hi = 1.0, prev_lo = 1.0;
        std::vector<std::pair<double, double>> lows;
        band << "M" << fmt(map_x(xaxis, 0)) << " " << fmt(map_y(yaxis, 1.0));
        lows.push_back({0.0, 1.0});
        for (const SurvivalStep& step : curve.steps) {
            const double sd = std::sqrt(std::max(step.variance, 0.0));
            const double hi = std::min(step.estimate + sd, 1.0);
            const double lo = std::max(step.estimate - sd, 0.0);
            band << " L" << fmt(map_x(xaxis, step.time)) << " " << fmt(map_y(yaxis, prev_hi));
            band << " L" << fmt(map_x(xaxis, step.time)) << " " << fmt(map_y(yaxis, hi));
            lows.push_back({step.time, lo});
            prev_hi = hi;
            prev_lo = lo;
        }
        band << " L" << fmt(map_x(xaxis, xaxis.hi)) << " " << fmt(map_y(yaxis, prev_hi));
        band << " L" << fmt(map_x(xaxis, xaxis.hi)) << " " << fmt(map_y(yaxis, prev_lo));
        for (std::size_t i = lows.size(); i-- > 0;) {
            band << " L" << fmt(map_x(xaxis, lows[i].first)) << " "
                 << fmt(map_y(yaxis, lows[i].second));
            if (i > 0) {
                band << " L" << fmt(map_x(xaxis, lows[i].first)) << " "
                     << fmt(map_y(yaxis, lows[i - 1].second));
            }
        }
        band << " Z";
        out << "<path d=\"" << band.str() << "\" fill=\"" << color
            << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";

        std::ostringstream path;
        path << "M" << fmt(map_x(xaxis, 0)) << " " << fmt(map_y(yaxis, 1.0));
        double prev = 1.0;
        for (const SurvivalStep& step : curve.steps) {
            path << " L" << fmt(map_x(xaxis, step.time)) << " " << fmt(map_y(yaxis, prev));
            path << " L" << fmt(map_x(xaxis, step.time)) << " "
                 << fmt(map_y(yaxis, step.estimate));
            prev = step.estimate;
        }
        path << " L" << fmt(map_x(xaxis, xaxis.hi)) << " " << fmt(map_y(yaxis, prev));
        out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";

        out << "<text x=\"" << fmt(kWidth - kMarginRight - 8) << "\" y=\""
            << fmt(kMarginTop + 18 + 16 * static_cast<double>(c))
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
            << curves[c].label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace mortkit
