#include "hwrec/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hwrec {

void PreprocessConfig::validate() const {
    if (delta <= 0.0) throw DataError("preprocess: delta must be > 0");
    if (target_points < 2) throw DataError("preprocess: target_points must be >= 2");
    const double ksum = smoothing_kernel[0] + smoothing_kernel[1] + smoothing_kernel[2];
    if (std::abs(ksum - 1.0) > 1e-12) throw DataError("preprocess: smoothing kernel must sum to 1");
    for (double w : smoothing_kernel) {
        if (w < 0.0) throw DataError("preprocess: smoothing kernel weights must be >= 0");
    }
}

double stroke_arc_length(const Stroke& s) {
    double len = 0.0;
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        len += std::hypot(s.points[i].x - s.points[i - 1].x, s.points[i].y - s.points[i - 1].y);
    }
    return len;
}

Stroke remove_repeated_points(const Stroke& s) {
    if (s.points.empty()) throw DataError("remove_repeated_points: empty stroke");
    Stroke out;
    out.points.push_back(s.points.front());
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        if (!(s.points[i] == out.points.back())) out.points.push_back(s.points[i]);
    }
    return out;
}

namespace {

struct Bbox {
    double min_x, max_x, min_y, max_y;
};

Bbox bbox_of(const Character& c) {
    Bbox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : c.strokes) {
        for (const auto& p : s.points) {
            b.min_x = std::min(b.min_x, p.x);
            b.max_x = std::max(b.max_x, p.x);
            b.min_y = std::min(b.min_y, p.y);
            b.max_y = std::max(b.max_y, p.y);
        }
    }
    return b;
}

} // namespace

Character normalize_bbox(const Character& c) {
    if (c.total_points() == 0) throw DataError("normalize_bbox: character has no points");
    const Bbox b = bbox_of(c);
    const double w = b.max_x - b.min_x;
    const double h = b.max_y - b.min_y;
    Character out = c;
    for (auto& s : out.strokes) {
        for (auto& p : s.points) {
            p.x = (w > 0.0) ? (p.x - b.min_x) / w : 0.5;
            p.y = (h > 0.0) ? (p.y - b.min_y) / h : 0.5;
        }
    }
    return out;
}

namespace {

// Uniform arc-length resampling of one stroke into `segments`+1 points.
// Endpoints are exact; interior points are interpolated on the polyline.
Stroke resample_stroke(const Stroke& s, int segments) {
    std::vector<double> cum{0.0};
    cum.reserve(s.points.size());
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        cum.push_back(cum.back() + std::hypot(s.points[i].x - s.points[i - 1].x,
                                              s.points[i].y - s.points[i - 1].y));
    }
    const double total = cum.back();
    Stroke out;
    out.points.reserve(static_cast<std::size_t>(segments) + 1);
    out.points.push_back(s.points.front());
    std::size_t seg = 0;
    for (int k = 1; k < segments; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(segments);
        while (seg + 1 < cum.size() - 1 && cum[seg + 1] < target) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double t = (seg_len > 0.0) ? (target - cum[seg]) / seg_len : 0.0;
        const Point& a = s.points[seg];
        const Point& b = s.points[seg + 1];
        out.points.push_back(Point{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    out.points.push_back(s.points.back());
    return out;
}

} // namespace

Character resample_equidistant(const Character& c, const PreprocessConfig& cfg) {
    cfg.validate();
    const int n_strokes = static_cast<int>(c.strokes.size());
    if (n_strokes == 0) throw DataError("resample: character has no strokes");
    if (cfg.target_points < 2 * n_strokes) {
        throw DataError("resample: target_points " + std::to_string(cfg.target_points) +
                        " too small for " + std::to_string(n_strokes) + " strokes");
    }

    std::vector<double> lens(c.strokes.size());
    double total = 0.0;
    for (std::size_t i = 0; i < c.strokes.size(); ++i) {
        lens[i] = stroke_arc_length(c.strokes[i]);
        if (lens[i] <= 0.0) {
            throw DataError("resample: stroke " + std::to_string(i + 1) + " has zero total length");
        }
        total += lens[i];
    }

    // Segment budget: every stroke gets one segment, the rest distributed
    // proportionally to arc length by largest remainder.
    const int budget = cfg.target_points - n_strokes;
    const int extra = budget - n_strokes;
    std::vector<int> segs(c.strokes.size(), 1);
    if (extra > 0) {
        std::vector<double> quota(c.strokes.size());
        int assigned = 0;
        for (std::size_t i = 0; i < c.strokes.size(); ++i) {
            quota[i] = static_cast<double>(extra) * lens[i] / total;
            segs[i] += static_cast<int>(std::floor(quota[i]));
            assigned += static_cast<int>(std::floor(quota[i]));
        }
        std::vector<std::size_t> order(c.strokes.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
        });
        for (int r = 0; r < extra - assigned; ++r) segs[order[static_cast<std::size_t>(r)]] += 1;
    }

    Character out = c;
    for (std::size_t i = 0; i < c.strokes.size(); ++i) {
        out.strokes[i] = resample_stroke(c.strokes[i], segs[i]);
    }
    return out;
}

Character smooth(const Character& c, const PreprocessConfig& cfg) {
    cfg.validate();
    const auto [k0, k1, k2] = cfg.smoothing_kernel;
    Character out = c;
    for (int pass = 0; pass < cfg.smoothing_passes; ++pass) {
        for (auto& s : out.strokes) {
            if (s.points.size() < 3) continue;
            std::vector<Point> next = s.points;
            for (std::size_t i = 1; i + 1 < s.points.size(); ++i) {
                next[i].x = k0 * s.points[i - 1].x + k1 * s.points[i].x + k2 * s.points[i + 1].x;
                next[i].y = k0 * s.points[i - 1].y + k1 * s.points[i].y + k2 * s.points[i + 1].y;
            }
            s.points = std::move(next);
        }
    }
    return out;
}

Character preprocess_pipeline(const Character& c, const PreprocessConfig& cfg) {
    cfg.validate();
    if (c.strokes.empty()) throw DataError("preprocess: character has no strokes");

    Character work;
    work.strokes.reserve(c.strokes.size());
    for (const auto& s : c.strokes) work.strokes.push_back(remove_repeated_points(s));

    // Span features come from the raw bounding box; normalization would
    // erase the aspect ratio they encode.
    const Bbox raw = bbox_of(work);
    const double w = raw.max_x - raw.min_x;
    const double h = raw.max_y - raw.min_y;
    const double longest = std::max(w, h);
    if (longest <= 0.0) throw DataError("preprocess: character has no spatial extent");

    work = normalize_bbox(work);
    work = resample_equidistant(work, cfg);
    work = smooth(work, cfg);
    work = normalize_bbox(work);

    work.preprocessed = true;
    work.span_x = w / longest;
    work.span_y = h / longest;
    return work;
}

} // namespace hwrec
