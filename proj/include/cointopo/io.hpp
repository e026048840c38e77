#pragma once

#include <string>
#include <vector>

#include "cointopo/embedding.hpp"
#include "cointopo/rips.hpp"
#include "cointopo/series.hpp"
#include "cointopo/wasserstein.hpp"

namespace cointopo {

/// Shortest round-trippable decimal form ("%.17g" then trimmed), so repeated
/// runs produce byte-identical files.
std::string format_double(double v);

std::string series_csv(const MultiSeries& ms);
void write_series_csv(const std::string& path, const MultiSeries& ms);

std::string cloud_csv(const PointCloud& pc);
void write_cloud_csv(const std::string& path, const PointCloud& pc);
PointCloud read_cloud_csv(const std::string& path);

/// Rows: dimension,birth,death,essential.
std::string diagram_csv(const PersistenceDiagram& pd);
void write_diagram_csv(const std::string& path, const PersistenceDiagram& pd);
PersistenceDiagram read_diagram_csv(const std::string& path);

/// Birth/death scatter with the diagonal, one color per homology dimension.
std::string diagram_svg(const PersistenceDiagram& pd, const std::string& title = "");
void write_diagram_svg(const std::string& path, const PersistenceDiagram& pd,
                       const std::string& title = "");

std::string labeled_matrix_csv(const std::vector<std::string>& labels,
                               const std::vector<std::vector<double>>& matrix);
void write_labeled_matrix_csv(const std::string& path, const std::vector<std::string>& labels,
                              const std::vector<std::vector<double>>& matrix);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cointopo
