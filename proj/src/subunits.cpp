#include "hwrec/subunits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hwrec {

void SegmentationConfig::validate() const {
    if (!(turn_threshold > 0.0) || turn_threshold > M_PI) {
        throw DataError("segmentation: turn_threshold must be in (0, pi]");
    }
    if (min_subunit_points < 2) throw DataError("segmentation: min_subunit_points must be >= 2");
    if (max_subunits < 1) throw DataError("segmentation: max_subunits must be >= 1");
}

std::array<double, 4> bounding_box(const SubUnit& su) {
    if (su.points.empty()) throw DataError("bounding_box: empty sub-unit");
    std::array<double, 4> b{std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity()};
    for (const auto& p : su.points) {
        b[0] = std::min(b[0], p.x);
        b[1] = std::max(b[1], p.x);
        b[2] = std::min(b[2], p.y);
        b[3] = std::max(b[3], p.y);
    }
    return b;
}

namespace {

// Absolute turn angles at the interior vertices of a stroke, skipping
// zero-length segments.
std::vector<double> turn_magnitudes(const Stroke& s) {
    std::vector<double> turns(s.points.size(), 0.0);
    double prev_dir = 0.0;
    bool have_prev = false;
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        const double dx = s.points[i].x - s.points[i - 1].x;
        const double dy = s.points[i].y - s.points[i - 1].y;
        if (dx == 0.0 && dy == 0.0) continue;
        const double dir = std::atan2(dy, dx);
        if (have_prev) {
            double d = dir - prev_dir;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d <= -M_PI) d += 2.0 * M_PI;
            turns[i - 1] = std::abs(d); // turn happens at the shared vertex i-1
        }
        prev_dir = dir;
        have_prev = true;
    }
    return turns;
}

SubUnit make_subunit(const Stroke& s, std::size_t begin, std::size_t end, int stroke_idx) {
    SubUnit su;
    su.points.assign(s.points.begin() + static_cast<std::ptrdiff_t>(begin),
                     s.points.begin() + static_cast<std::ptrdiff_t>(end));
    su.source_stroke = stroke_idx;
    su.bbox = bounding_box(su);
    return su;
}

} // namespace

std::vector<SubUnit> extract_subunits(const Character& c, const SegmentationConfig& cfg) {
    cfg.validate();
    if (c.strokes.empty()) throw DataError("extract_subunits: character has no strokes");

    const int n_strokes = static_cast<int>(c.strokes.size());
    std::vector<SubUnit> out;
    int used = 0;
    for (int si = 0; si < n_strokes; ++si) {
        const Stroke& s = c.strokes[static_cast<std::size_t>(si)];
        const int n = static_cast<int>(s.points.size());
        const int strokes_left = n_strokes - si - 1;
        // Intra-stroke splitting only spends budget beyond the mandatory
        // one sub-unit per stroke.
        const int budget = std::max(1, cfg.max_subunits - used - strokes_left);

        const std::vector<double> turns = turn_magnitudes(s);
        double total_turn = 0.0;
        for (double t : turns) total_turn += t;

        int parts = 1 + static_cast<int>(std::floor(total_turn / cfg.turn_threshold));
        parts = std::min(parts, n / cfg.min_subunit_points);
        parts = std::min(parts, budget);
        parts = std::max(parts, 1);

        if (parts == 1) {
            out.push_back(make_subunit(s, 0, static_cast<std::size_t>(n), si));
            ++used;
            continue;
        }

        // Boundary b_k after the vertex where cumulative turning first
        // reaches k/parts of the total.
        std::vector<int> bounds(static_cast<std::size_t>(parts) + 1, 0);
        bounds[static_cast<std::size_t>(parts)] = n;
        double cum = 0.0;
        int k = 1;
        for (int v = 0; v < n && k < parts; ++v) {
            cum += turns[static_cast<std::size_t>(v)];
            const double level = total_turn * static_cast<double>(k) / static_cast<double>(parts);
            if (cum >= level - 1e-15) {
                bounds[static_cast<std::size_t>(k)] = v + 1;
                ++k;
            }
        }
        for (; k < parts; ++k) bounds[static_cast<std::size_t>(k)] = n;

        // Clamp so every part keeps at least min_subunit_points.
        for (int i = 1; i < parts; ++i) {
            bounds[static_cast<std::size_t>(i)] =
                std::max(bounds[static_cast<std::size_t>(i)],
                         bounds[static_cast<std::size_t>(i - 1)] + cfg.min_subunit_points);
        }
        for (int i = parts - 1; i >= 1; --i) {
            bounds[static_cast<std::size_t>(i)] =
                std::min(bounds[static_cast<std::size_t>(i)],
                         bounds[static_cast<std::size_t>(i + 1)] - cfg.min_subunit_points);
        }

        for (int i = 0; i < parts; ++i) {
            out.push_back(make_subunit(s, static_cast<std::size_t>(bounds[static_cast<std::size_t>(i)]),
                                       static_cast<std::size_t>(bounds[static_cast<std::size_t>(i + 1)]),
                                       si));
        }
        used += parts;
    }
    return out;
}

} // namespace hwrec
