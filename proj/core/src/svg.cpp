#include "lcsf/svg.hpp"

#include "lcsf/errors.hpp"

#include <cstdio>
#include <fstream>

namespace lcsf {

namespace {

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double stroke_width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& points,
                         const std::string& stroke, double stroke_width) {
    if (points.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\" points=\"";
    for (const auto& [x, y] : points) body_ += num(x) + "," + num(y) + " ";
    body_ += "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke, double stroke_width) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(stroke_width) + "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& anchor) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" +
             escape(content) + "</text>\n";
}

std::string SvgCanvas::str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
           "width=\"" +
           num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) +
           " " + num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
}

void SvgCanvas::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << str();
    if (!out) throw IoError("write failed for " + path);
}

Axes::Axes(SvgCanvas& canvas, double px0, double py0, double pw, double ph, double x_min,
           double x_max, double y_min, double y_max)
    : canvas_(canvas), px0_(px0), py0_(py0), pw_(pw), ph_(ph), x_min_(x_min), x_max_(x_max),
      y_min_(y_min), y_max_(y_max) {
    if (!(x_max_ > x_min_)) x_max_ = x_min_ + 1.0;
    if (!(y_max_ > y_min_)) y_max_ = y_min_ + 1.0;
}

double Axes::px(double x) const { return px0_ + (x - x_min_) / (x_max_ - x_min_) * pw_; }

double Axes::py(double y) const {
    return py0_ + ph_ - (y - y_min_) / (y_max_ - y_min_) * ph_;
}

void Axes::frame(const std::string& title, const std::string& x_label,
                 const std::string& y_label, int ticks) {
    canvas_.rect(px0_, py0_, pw_, ph_, "none", "#404040");
    for (int i = 0; i <= ticks; ++i) {
        const double fx = x_min_ + (x_max_ - x_min_) * i / ticks;
        const double fy = y_min_ + (y_max_ - y_min_) * i / ticks;
        canvas_.line(px(fx), py0_ + ph_, px(fx), py0_ + ph_ + 4, "#404040");
        canvas_.text(px(fx), py0_ + ph_ + 16, num(fx), 9, "middle");
        canvas_.line(px0_ - 4, py(fy), px0_, py(fy), "#404040");
        canvas_.text(px0_ - 6, py(fy) + 3, num(fy), 9, "end");
    }
    canvas_.text(px0_ + pw_ / 2, py0_ - 8, title, 12, "middle");
    canvas_.text(px0_ + pw_ / 2, py0_ + ph_ + 30, x_label, 10, "middle");
    canvas_.text(px0_ - 42, py0_ - 8, y_label, 10, "start");
}

void Axes::polyline(const std::vector<std::pair<double, double>>& data,
                    const std::string& stroke, double stroke_width) {
    std::vector<std::pair<double, double>> pixels;
    pixels.reserve(data.size());
    for (const auto& [x, y] : data) pixels.emplace_back(px(x), py(y));
    canvas_.polyline(pixels, stroke, stroke_width);
}

void Axes::scatter(const std::vector<std::pair<double, double>>& data,
                   const std::string& fill, double radius) {
    for (const auto& [x, y] : data) canvas_.circle(px(x), py(y), radius, fill);
}

void Axes::data_rect(double x0, double y0, double x1, double y1, const std::string& stroke) {
    canvas_.rect(px(x0), py(y1), px(x1) - px(x0), py(y0) - py(y1), "none", stroke, 1.2);
}

void Axes::box(double x_center, double box_width, double minimum, double q1, double med,
               double q3, double maximum, const std::string& stroke) {
    const double cx = px(x_center);
    const double half = box_width / 2.0;
    canvas_.line(cx, py(minimum), cx, py(q1), stroke);
    canvas_.line(cx, py(q3), cx, py(maximum), stroke);
    canvas_.line(cx - half / 2, py(minimum), cx + half / 2, py(minimum), stroke);
    canvas_.line(cx - half / 2, py(maximum), cx + half / 2, py(maximum), stroke);
    canvas_.rect(cx - half, py(q3), 2 * half, py(q1) - py(q3), "none", stroke, 1.2);
    canvas_.line(cx - half, py(med), cx + half, py(med), stroke, 1.6);
}

} // namespace lcsf
