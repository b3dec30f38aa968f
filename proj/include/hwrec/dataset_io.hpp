#pragma once

#include <string>

#include "hwrec/types.hpp"

namespace hwrec {

// Line-delimited sample file, one JSON object per line:
//   {"label": "<name>", "strokes": [[[x,y],...], ...]}
// Preprocessed datasets additionally carry "preprocessed": true and
// "spans": [span_x, span_y]. Blank lines are ignored. Labels are mapped to
// contiguous 1-based indices in first-appearance order.
Dataset parse_dataset(const std::string& path, Role role);

void write_dataset(const Dataset& ds, const std::string& path);

} // namespace hwrec
