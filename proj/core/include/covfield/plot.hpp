#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covfield/cluster.hpp"
#include "covfield/field.hpp"

namespace covfield {

// Deterministic SVG output: fixed canvas, fixed number formatting, no
// timestamps, so equal inputs give byte-identical files.

struct LogLogSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_loglog(const std::vector<LogLogSeries>& series, const std::string& title);
std::string svg_dendrogram(const Dendrogram& dendrogram, double cutoff_height = -1.0);
/// Ellipses centred at the query points with principal radii ∝ √λ_i.
std::string svg_tensor_glyphs(const FieldGrid& field, double glyph_scale = 1.0);
/// Cells coloured by the Fréchet value.
std::string svg_field_heatmap(const FieldGrid& field, int nx, int ny);

/// Semi-axes (major, minor) and angle in degrees of the glyph of a 2×2 tensor.
struct Glyph {
  double major = 0.0;
  double minor = 0.0;
  double angle_deg = 0.0;
};
Glyph tensor_glyph(const CovTensor& t, double scale);

/// Writes text to path, throwing std::runtime_error if the file cannot be written.
void write_text(const std::string& path, const std::string& text);

}  // namespace covfield
