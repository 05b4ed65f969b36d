#pragma once
// Deterministic text renderings of result tables: CSV, SVG heatmaps for
// pairwise matrices, grouped bars for per-orbital profiles. Every function is
// a pure function of its arguments so reruns are byte-identical.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace orbcorr {

// %.17g, shortest round-trip representation
std::string fmt_full(double x);
// fixed precision for display text
std::string fmt_fixed(double x, int digits);

// header "label,<col labels>", one row per line, %.17g cells
std::string csv_matrix(const Eigen::MatrixXd& m, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const std::string& corner);

// rows of equal length -> csv with header
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

// color-graded square matrix; values below `floor` render as empty cells
std::string svg_heatmap(const Eigen::MatrixXd& m, const std::vector<std::string>& labels,
                        const std::string& title, double floor = 1e-12);

// one group of bars per row label, one bar per series
std::string svg_grouped_bars(const std::vector<std::string>& row_labels,
                             const std::vector<std::string>& series,
                             const Eigen::MatrixXd& values, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace orbcorr
