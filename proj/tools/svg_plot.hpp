#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace granreg::tools {

/// Minimal static SVG chart writer: axes, ticks, and line/scatter series.
/// Enough to eyeball sweep outputs; anything fancier belongs in a real
/// plotting stack fed by the CSVs.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(std::string name, std::vector<std::pair<double, double>> points);
  void add_scatter(std::string name, std::vector<std::pair<double, double>> points);

  /// Plot x on a log10 scale (values must be positive).
  void set_log_x(bool log_x) { log_x_ = log_x; }

  void write(const std::filesystem::path& path) const;
  std::string render() const;

 private:
  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
    bool line = true;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool log_x_ = false;
};

}  // namespace granreg::tools
