#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace tlab::report {

struct Series {
  std::string name;
  std::vector<double> x, y;
  bool markers = true;
};

struct PlotSpec {
  std::string title;
  std::string xLabel;
  std::string yLabel;
  int width = 720;
  int height = 480;
};

/// Standalone SVG line plot with linear axes.
std::string line_plot_svg(const PlotSpec& spec, const std::vector<Series>& series);
void write_line_plot(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<Series>& series);

/// Shortest round-trip decimal form, stable across runs.
std::string fmt(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::filesystem::path path_;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace tlab::report
