#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

namespace fhs {

struct BandPlot {
  std::string title;
  Eigen::VectorXd x;
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  /// Optional; drawn in black when non-empty.
  Eigen::VectorXd truth;
  /// Optional scatter of observations.
  Eigen::VectorXd points_x;
  Eigen::VectorXd points_y;
};

/// Posterior mean (solid), band (dashed) and truth as a standalone SVG.
void write_band_svg(const std::filesystem::path& path, const BandPlot& plot);

/// Overlay of sample paths sorted by x.
void write_paths_svg(const std::filesystem::path& path, const std::string& title, const Eigen::VectorXd& x,
                     const Eigen::MatrixXd& paths, int max_paths = 5);

}  // namespace fhs
