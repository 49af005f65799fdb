#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lcsf {

/// Minimal self-contained SVG writer; enough for time series, spectra,
/// scatter and box plots. No external plotting dependency.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const std::string& stroke, double stroke_width = 1.0);
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill);
    void text(double x, double y, const std::string& content, double size = 11.0,
              const std::string& anchor = "start");

    std::string str() const;
    void save(const std::string& path) const;

    double width() const { return width_; }
    double height() const { return height_; }

private:
    double width_;
    double height_;
    std::string body_;
};

/// Linear map from a data rectangle to a pixel rectangle with a y-flip,
/// plus frame, ticks and labels.
class Axes {
public:
    Axes(SvgCanvas& canvas, double px0, double py0, double pw, double ph, double x_min,
         double x_max, double y_min, double y_max);

    double px(double x) const;
    double py(double y) const;

    void frame(const std::string& title, const std::string& x_label,
               const std::string& y_label, int ticks = 5);
    void polyline(const std::vector<std::pair<double, double>>& data,
                  const std::string& stroke, double stroke_width = 1.0);
    void scatter(const std::vector<std::pair<double, double>>& data,
                 const std::string& fill, double radius = 1.2);
    void data_rect(double x0, double y0, double x1, double y1, const std::string& stroke);

    /// Box-and-whisker glyph (min, q1, median, q3, max) centered at data x.
    void box(double x_center, double box_width, double minimum, double q1, double med,
             double q3, double maximum, const std::string& stroke);

    SvgCanvas& canvas() { return canvas_; }

private:
    SvgCanvas& canvas_;
    double px0_, py0_, pw_, ph_;
    double x_min_, x_max_, y_min_, y_max_;
};

} // namespace lcsf
