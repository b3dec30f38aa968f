#pragma once

#include <array>

#include "hwrec/types.hpp"

namespace hwrec {

struct PreprocessConfig {
    double delta = 0.02;               // nominal inter-point distance, normalized units
    int target_points = 128;           // total points per character after resampling
    int smoothing_passes = 1;
    std::array<double, 3> smoothing_kernel{0.25, 0.5, 0.25};

    void validate() const;
};

// Drops consecutive duplicate points; order preserved, first point kept.
Stroke remove_repeated_points(const Stroke& s);

// Per-axis affine map of the whole character onto [0,1]; a degenerate axis
// (max == min) maps to the constant 0.5.
Character normalize_bbox(const Character& c);

// Redistributes points at uniform arc-length spacing. target_points is the
// binding constraint: the segment budget (target_points - n_strokes) is
// split across strokes proportionally to arc length (largest remainder,
// >= 1 segment per stroke), so spacing within a stroke is its arc length
// divided by its segment count. Stroke endpoints are preserved and every
// output point lies on the original polyline.
Character resample_equidistant(const Character& c, const PreprocessConfig& cfg);

// 3-tap convolution of each stroke's x and y sequences, endpoints held
// fixed; strokes with fewer than 3 points pass through.
Character smooth(const Character& c, const PreprocessConfig& cfg);

// remove_repeated -> normalize -> resample -> smooth -> renormalize.
// Sets the preprocessed flag and the span features (raw-bbox aspect:
// width/max(w,h), height/max(w,h)).
Character preprocess_pipeline(const Character& c, const PreprocessConfig& cfg = {});

// Arc length of a polyline (sum of segment chord lengths).
double stroke_arc_length(const Stroke& s);

} // namespace hwrec
