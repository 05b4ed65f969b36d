#include "orbcorr/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace orbcorr {

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_fixed(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string csv_matrix(const Eigen::MatrixXd& m, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const std::string& corner) {
  if (m.rows() != static_cast<Eigen::Index>(row_labels.size()) ||
      m.cols() != static_cast<Eigen::Index>(col_labels.size()))
    throw std::invalid_argument("csv_matrix: label count mismatch");
  std::string out = corner;
  for (const std::string& c : col_labels) out += "," + c;
  out += "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += row_labels[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += "," + fmt_full(m(i, j));
    out += "\n";
  }
  return out;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv_table: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

namespace {

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

// white to deep blue, t in [0,1]
std::string grade_color(double t) {
  t = std::min(1.0, std::max(0.0, t));
  const int r = static_cast<int>(std::lround(255 + t * (8 - 255)));
  const int g = static_cast<int>(std::lround(255 + t * (48 - 255)));
  const int b = static_cast<int>(std::lround(255 + t * (107 - 255)));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

}  // namespace

std::string svg_heatmap(const Eigen::MatrixXd& m, const std::vector<std::string>& labels,
                        const std::string& title, double floor) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n || static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("svg_heatmap: need a square matrix with n labels");
  const double cell = 52.0, left = 70.0, top = 50.0;
  const double width = left + n * cell + 20.0, height = top + n * cell + 30.0;
  double vmax = floor;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vmax = std::max(vmax, m(i, j));

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
       "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
       num(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" +
       svg_escape(title) + "</text>\n";
  for (int i = 0; i < n; ++i) {
    s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(top + i * cell + cell / 2 + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
         svg_escape(labels[i]) + "</text>\n";
    s += "<text x=\"" + num(left + i * cell + cell / 2) + "\" y=\"" + num(top - 8) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         svg_escape(labels[i]) + "</text>\n";
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = left + j * cell, y = top + i * cell;
      const double v = m(i, j);
      if (i == j || v < floor) {
        s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) +
             "\" height=\"" + num(cell) + "\" fill=\"#f4f4f4\" stroke=\"#cccccc\"/>\n";
        continue;
      }
      const double t = v / vmax;
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) +
           "\" height=\"" + num(cell) + "\" fill=\"" + grade_color(t) +
           "\" stroke=\"#cccccc\"/>\n";
      s += "<text x=\"" + num(x + cell / 2) + "\" y=\"" + num(y + cell / 2 + 4) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" +
           (t > 0.55 ? std::string("white") : std::string("black")) + "\">" +
           fmt_fixed(v, 3) + "</text>\n";
    }
  s += "</svg>\n";
  return s;
}

std::string svg_grouped_bars(const std::vector<std::string>& row_labels,
                             const std::vector<std::string>& series,
                             const Eigen::MatrixXd& values, const std::string& title) {
  const int n = static_cast<int>(values.rows());
  const int k = static_cast<int>(values.cols());
  if (static_cast<int>(row_labels.size()) != n || static_cast<int>(series.size()) != k)
    throw std::invalid_argument("svg_grouped_bars: label count mismatch");
  static const char* palette[] = {"#9ecae1", "#4292c6", "#08519c", "#c6dbef", "#6baed6"};
  const double bar = 18.0, gap = 14.0, left = 60.0, top = 60.0, plot_h = 220.0;
  const double group = k * bar + gap;
  const double width = left + n * group + 40.0, height = top + plot_h + 50.0;
  double vmax = 1e-12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) vmax = std::max(vmax, values(i, j));

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
       "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
       num(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" +
       svg_escape(title) + "</text>\n";
  for (int j = 0; j < k; ++j) {
    const double lx = left + 140.0 * j;
    s += "<rect x=\"" + num(lx) + "\" y=\"34\" width=\"12\" height=\"12\" fill=\"" +
         palette[j % 5] + "\"/>\n";
    s += "<text x=\"" + num(lx + 18) + "\" y=\"44\" font-family=\"sans-serif\" font-size=\"12\">" +
         svg_escape(series[j]) + "</text>\n";
  }
  // axis: baseline and max tick
  s += "<line x1=\"" + num(left - 6) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
       num(width - 20) + "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(left - 10) + "\" y=\"" + num(top + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
       fmt_fixed(vmax, 3) + "</text>\n";
  s += "<line x1=\"" + num(left - 6) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
       "\" y2=\"" + num(top) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i < n; ++i) {
    const double gx = left + i * group;
    for (int j = 0; j < k; ++j) {
      const double h = plot_h * values(i, j) / vmax;
      s += "<rect x=\"" + num(gx + j * bar) + "\" y=\"" + num(top + plot_h - h) +
           "\" width=\"" + num(bar - 2) + "\" height=\"" + num(h) + "\" fill=\"" +
           palette[j % 5] + "\"/>\n";
    }
    s += "<text x=\"" + num(gx + (k * bar) / 2) + "\" y=\"" + num(top + plot_h + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         svg_escape(row_labels[i]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace orbcorr
