#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ptsol {

/// Minimal standalone SVG chart: scatter series, polylines and straight
/// segments on linear (or log-y) axes. Output is a pure function of the
/// content, with no timestamps or random ids.
class SvgPlot {
 public:
  using Points = std::vector<std::pair<double, double>>;

  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void scatter(const std::string& name, const std::string& color, const Points& points,
               double radius = 2.5);
  void line(const std::string& name, const std::string& color, const Points& points,
            bool dashed = false);
  void set_log_y(bool on) { log_y_ = on; }
  /// Fixes the view instead of fitting it to the data.
  void set_range(double x0, double x1, double y0, double y1);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  struct Series {
    std::string name;
    std::string color;
    Points points;
    bool is_line = false;
    bool dashed = false;
    double radius = 2.5;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool log_y_ = false;
  bool fixed_range_ = false;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
};

}  // namespace ptsol
