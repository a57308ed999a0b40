#include "freqconn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace freqconn::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* colour(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof *kPalette)]; }

} // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render(const LineChart& chart) {
  const double left = 60, right = 160, top = 40, bottom = 50;
  const double pw = chart.width - left - right, ph = chart.height - top - bottom;
  std::size_t n = chart.x_labels.size();
  for (const auto& l : chart.lines) n = std::max(n, l.values.size());

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto scan = [&](const std::vector<std::optional<double>>& v) {
    for (const auto& x : v)
      if (x && std::isfinite(*x)) {
        lo = std::min(lo, *x);
        hi = std::max(hi, *x);
      }
  };
  for (const auto& l : chart.lines) {
    scan(l.values);
    if (l.lower) scan(*l.lower);
    if (l.upper) scan(*l.upper);
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-9) lo -= 1, hi += 1;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto xp = [&](std::size_t i) { return left + (n > 1 ? pw * double(i) / double(n - 1) : pw / 2); };
  auto yp = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(chart.width) << "\" height=\""
    << num(chart.height) << "\" viewBox=\"0 0 " << num(chart.width) << ' ' << num(chart.height) << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(left) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
    << escape(chart.title) << "</text>\n";
  s << "<g stroke=\"#888\" stroke-width=\"1\">\n"
    << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw) << "\" y2=\""
    << num(top + ph) << "\"/>\n"
    << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
    << num(top + ph) << "\"/>\n</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(yp(v) + 4) << "\" text-anchor=\"end\">" << num(v)
      << "</text>\n";
  }
  if (!chart.x_labels.empty()) {
    const std::size_t ticks = std::min<std::size_t>(5, chart.x_labels.size());
    for (std::size_t k = 0; k < ticks; ++k) {
      const std::size_t i = ticks == 1 ? 0 : k * (chart.x_labels.size() - 1) / (ticks - 1);
      s << "<text x=\"" << num(xp(i)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
        << escape(chart.x_labels[i]) << "</text>\n";
    }
  }
  s << "</g>\n";

  for (std::size_t li = 0; li < chart.lines.size(); ++li) {
    const auto& line = chart.lines[li];
    if (line.lower && line.upper) {
      // one polygon per unbroken run of both bounds
      const auto& a = *line.lower;
      const auto& b = *line.upper;
      std::size_t i = 0;
      const std::size_t m = std::min(a.size(), b.size());
      while (i < m) {
        while (i < m && !(a[i] && b[i])) ++i;
        std::size_t j = i;
        while (j < m && a[j] && b[j]) ++j;
        if (j > i) {
          s << "<polygon fill=\"" << colour(li) << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
          for (std::size_t k = i; k < j; ++k) s << num(xp(k)) << ',' << num(yp(*b[k])) << ' ';
          for (std::size_t k = j; k-- > i;) s << num(xp(k)) << ',' << num(yp(*a[k])) << ' ';
          s << "\"/>\n";
        }
        i = j;
      }
    }
    std::string path;
    bool pen = false;
    for (std::size_t i = 0; i < line.values.size(); ++i) {
      const auto& v = line.values[i];
      if (!v || !std::isfinite(*v)) {
        pen = false;
        continue;
      }
      path += (pen ? "L" : "M") + num(xp(i)) + "," + num(yp(*v)) + " ";
      pen = true;
    }
    if (!path.empty())
      s << "<path fill=\"none\" stroke=\"" << colour(li) << "\" stroke-width=\"1.5\" d=\"" << path << "\"/>\n";
    const double ly = top + 16.0 * double(li) + 8;
    s << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 30)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour(li) << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << num(left + pw + 34) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(line.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string heatmap(const std::string& title, const Matrix& values, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels) {
  const auto rows = values.rows(), cols = values.cols();
  const bool dense = cols > 20;
  const double ch = 36, cw = dense ? std::max(1.0, 800.0 / double(std::max<Eigen::Index>(cols, 1))) : 48;
  const double left = 110, top = 50;
  double vmax = 1e-12;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (std::isfinite(values(i, j))) vmax = std::max(vmax, std::abs(values(i, j)));
  const double w = left + cw * double(cols) + 20, h = top + ch * double(rows) + 40;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"10\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  auto label = [](const std::vector<std::string>& l, Eigen::Index i) {
    return i < Eigen::Index(l.size()) ? l[std::size_t(i)] : std::to_string(i);
  };
  for (Eigen::Index i = 0; i < rows; ++i) {
    s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + ch * (double(i) + 0.6))
      << "\" text-anchor=\"end\">" << escape(label(row_labels, i)) << "</text>\n";
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = values(i, j);
      char fill[16];
      if (!std::isfinite(v)) {
        std::snprintf(fill, sizeof fill, "#bbbbbb");
      } else {
        const int shade = static_cast<int>(255 - 200 * std::min(1.0, std::abs(v) / vmax));
        if (v >= 0)
          std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
        else
          std::snprintf(fill, sizeof fill, "#ff%02x%02x", shade, shade);
      }
      s << "<rect x=\"" << num(left + cw * double(j)) << "\" y=\"" << num(top + ch * double(i)) << "\" width=\""
        << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\""
        << (dense ? "" : " stroke=\"white\"") << "/>\n";
      if (!dense)
        s << "<text x=\"" << num(left + cw * (double(j) + 0.5)) << "\" y=\"" << num(top + ch * (double(i) + 0.6))
          << "\" text-anchor=\"middle\">" << (std::isfinite(v) ? num(v) : "NA") << "</text>\n";
    }
  }
  // column labels: every column when sparse, otherwise the ends and middle
  std::vector<Eigen::Index> ticks;
  if (!dense) {
    for (Eigen::Index j = 0; j < cols; ++j) ticks.push_back(j);
  } else {
    ticks = {0, cols / 2, cols - 1};
  }
  for (auto j : ticks)
    s << "<text x=\"" << num(left + cw * (double(j) + 0.5)) << "\" y=\"" << num(top + ch * double(rows) + 16)
      << "\" text-anchor=\"middle\">" << escape(label(col_labels, j)) << "</text>\n";
  s << "</g>\n</svg>\n";
  return s.str();
}

} // namespace freqconn::svg
