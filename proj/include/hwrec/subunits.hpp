#pragma once

#include <array>
#include <cmath>

#include "hwrec/types.hpp"

namespace hwrec {

// Contiguous run of points from one stroke. Runs within a stroke are
// disjoint and cover it, so concatenating a character's sub-units in
// order reproduces its points exactly.
struct SubUnit {
    std::vector<Point> points;
    int source_stroke = 0;
    std::array<double, 4> bbox{0, 0, 0, 0}; // min-x, max-x, min-y, max-y
};

struct SegmentationConfig {
    double turn_threshold = M_PI / 3.0; // accumulated turning per sub-unit, radians
    int min_subunit_points = 6;
    int max_subunits = 12;

    void validate() const;
};

std::array<double, 4> bounding_box(const SubUnit& su);

// Splits at pen-lifts always. Within a stroke the number of parts is
// 1 + floor(total_turning / threshold), capped so each part keeps
// min_subunit_points and the character total stays within max_subunits;
// split positions divide the accumulated turning evenly. Total turning is
// unchanged by reversing a stroke, so the sub-unit count is too.
std::vector<SubUnit> extract_subunits(const Character& c, const SegmentationConfig& cfg = {});

} // namespace hwrec
