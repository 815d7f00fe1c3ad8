#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "taylorlab/transform.hpp"

namespace taylorlab::transform {

// Field CSV: '#'-prefixed metadata lines (alpha, t, swept index, fixed
// shears, normalized flag, s axis), then one row per scale with the scale
// value in the first column.
void write_field_csv(std::ostream& os, const TransformField& field);
void write_field_csv_file(const std::string& path, const TransformField& field);
TransformField read_field_csv(std::istream& is);
TransformField read_field_csv_file(const std::string& path);

/// Binary 8-bit PGM heatmap: rows are scales (coarsest on top), columns the
/// shear axis, each row rescaled to full intensity. An optional marker value
/// inverts the nearest column.
void write_field_pgm_file(const std::string& path, const TransformField& field,
                          std::optional<double> marker = std::nullopt);

}  // namespace taylorlab::transform
