#include "fhs/svg.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "fhs/errors.hpp"

namespace fhs {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 48.0;

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame frame_for(const Eigen::VectorXd& x, std::initializer_list<const Eigen::VectorXd*> ys) {
  Frame f{x.minCoeff(), x.maxCoeff(), 0.0, 0.0};
  bool first = true;
  for (const auto* y : ys) {
    if (y->size() == 0) continue;
    f.y0 = first ? y->minCoeff() : std::min(f.y0, y->minCoeff());
    f.y1 = first ? y->maxCoeff() : std::max(f.y1, y->maxCoeff());
    first = false;
  }
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;
  return f;
}

std::string polyline(const Frame& f, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& style) {
  std::ostringstream s;
  s.precision(5);
  s << "<polyline fill=\"none\" " << style << " points=\"";
  for (Eigen::Index i = 0; i < x.size(); ++i) s << f.px(x[i]) << ',' << f.py(y[i]) << ' ';
  s << "\"/>\n";
  return s.str();
}

void header(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
      << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  out.precision(4);
  auto label = [&](double x, double y, double v, const char* anchor) {
    out << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << v << "</text>\n";
  };
  label(kMargin, kHeight - kMargin + 16, f.x0, "start");
  label(kWidth - kMargin, kHeight - kMargin + 16, f.x1, "end");
  label(kMargin - 4, kHeight - kMargin, f.y0, "end");
  label(kMargin - 4, kMargin + 10, f.y1, "end");
}

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_band_svg(const std::filesystem::path& path, const BandPlot& plot) {
  if (plot.x.size() < 2) throw ConfigError("plot needs at least two grid points");
  const Frame f = frame_for(plot.x, {&plot.lower, &plot.upper, &plot.mean, &plot.truth, &plot.points_y});
  std::ofstream out = open(path);
  header(out, f, plot.title);
  for (Eigen::Index i = 0; i < plot.points_x.size(); ++i) {
    out << "<circle cx=\"" << f.px(plot.points_x[i]) << "\" cy=\"" << f.py(plot.points_y[i])
        << "\" r=\"1.5\" fill=\"#bbb\"/>\n";
  }
  if (plot.truth.size() == plot.x.size()) out << polyline(f, plot.x, plot.truth, "stroke=\"black\" stroke-width=\"1.5\"");
  out << polyline(f, plot.x, plot.lower, "stroke=\"#c0392b\" stroke-dasharray=\"5,4\"");
  out << polyline(f, plot.x, plot.upper, "stroke=\"#c0392b\" stroke-dasharray=\"5,4\"");
  out << polyline(f, plot.x, plot.mean, "stroke=\"#c0392b\" stroke-width=\"2\"");
  out << "</svg>\n";
}

void write_paths_svg(const std::filesystem::path& path, const std::string& title, const Eigen::VectorXd& x,
                     const Eigen::MatrixXd& paths, int max_paths) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  Eigen::VectorXd xs(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) xs[i] = x[order[i]];
  const auto k = std::min<Eigen::Index>(max_paths, paths.rows());
  std::vector<Eigen::VectorXd> ys;
  Eigen::VectorXd all(k * x.size());
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::VectorXd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = paths(r, order[i]);
    all.segment(r * x.size(), x.size()) = y;
    ys.push_back(std::move(y));
  }
  const Frame f = frame_for(xs, {&all});
  std::ofstream out = open(path);
  header(out, f, title);
  static const char* kColors[] = {"#c0392b", "#2471a3", "#229954", "#7d3c98", "#d68910"};
  for (std::size_t r = 0; r < ys.size(); ++r) {
    out << polyline(f, xs, ys[r], std::string("stroke=\"") + kColors[r % 5] + "\" stroke-width=\"1.2\"");
  }
  out << "</svg>\n";
}

}  // namespace fhs
