#include "hwrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hwrec {

void SynthConfig::validate() const {
    if (n_classes < 1) throw DataError("synth: n_classes must be >= 1");
    if (samples_per_class_train < 1 || samples_per_class_test < 1) {
        throw DataError("synth: sample counts must be >= 1");
    }
    if (noise_sigma < 0.0) throw DataError("synth: noise_sigma must be >= 0");
}

namespace {

constexpr int kSketchGrid = 8;
constexpr double kMinSketchDistance = 0.5; // L1 between normalized occupancy sketches
constexpr int kDensifyPoints = 40;         // base points per sampled stroke

using Polyline = std::vector<Point>;

double polyline_length(const Polyline& p) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        len += std::hypot(p[i].x - p[i - 1].x, p[i].y - p[i - 1].y);
    }
    return len;
}

// Point at arc-length position t along the polyline.
Point point_at(const Polyline& p, double t) {
    double walked = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const double seg = std::hypot(p[i].x - p[i - 1].x, p[i].y - p[i - 1].y);
        if (walked + seg >= t || i + 1 == p.size()) {
            const double u = seg > 0.0 ? std::clamp((t - walked) / seg, 0.0, 1.0) : 0.0;
            return Point{p[i - 1].x + u * (p[i].x - p[i - 1].x),
                         p[i - 1].y + u * (p[i].y - p[i - 1].y)};
        }
        walked += seg;
    }
    return p.back();
}

struct ClassTemplate {
    std::vector<Polyline> strokes;
};

std::vector<double> occupancy_sketch(const ClassTemplate& t) {
    std::vector<double> sketch(kSketchGrid * kSketchGrid, 0.0);
    int total = 0;
    for (const auto& s : t.strokes) {
        const double len = polyline_length(s);
        for (int i = 0; i < kDensifyPoints; ++i) {
            const Point p = point_at(s, len * i / (kDensifyPoints - 1));
            const int ix = std::clamp(static_cast<int>(p.x * kSketchGrid), 0, kSketchGrid - 1);
            const int iy = std::clamp(static_cast<int>(p.y * kSketchGrid), 0, kSketchGrid - 1);
            sketch[static_cast<std::size_t>(ix * kSketchGrid + iy)] += 1.0;
            ++total;
        }
    }
    for (double& v : sketch) v /= total;
    return sketch;
}

double sketch_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

// Stroke lengths are kept within a factor of two of each other so the
// proportional point allocation during resampling stays close to the
// character-wide spacing.
bool stroke_lengths_balanced(const ClassTemplate& t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& s : t.strokes) {
        const double len = polyline_length(s);
        lo = std::min(lo, len);
        hi = std::max(hi, len);
    }
    return lo >= 0.5 * hi;
}

ClassTemplate draw_template(std::mt19937_64& rng, int n_strokes) {
    std::uniform_real_distribution<double> coord(0.08, 0.92);
    std::uniform_int_distribution<int> n_vertices(3, 6);
    for (;;) {
        ClassTemplate t;
        for (int s = 0; s < n_strokes; ++s) {
            Polyline line;
            const int nv = n_vertices(rng);
            while (static_cast<int>(line.size()) < nv) {
                Point p{coord(rng), coord(rng)};
                // keep vertices apart so every stroke has usable arc length
                if (!line.empty() &&
                    std::hypot(p.x - line.back().x, p.y - line.back().y) < 0.15) {
                    continue;
                }
                line.push_back(p);
            }
            t.strokes.push_back(std::move(line));
        }
        if (stroke_lengths_balanced(t)) return t;
    }
}

Character sample_from_template(const ClassTemplate& t, double sigma, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, sigma);
    std::bernoulli_distribution flip(0.5);

    Character c;
    for (const auto& line : t.strokes) {
        const double len = polyline_length(line);
        const double phase = unit(rng); // consumed either way for stream stability
        const double offset = sigma > 0.0 ? phase : 0.0;
        Stroke s;
        for (int i = 0; i < kDensifyPoints; ++i) {
            const double pos = len * (i + offset) / kDensifyPoints;
            Point p = point_at(line, pos);
            if (sigma > 0.0) {
                p.x += jitter(rng);
                p.y += jitter(rng);
            }
            s.points.push_back(p);
        }
        if (flip(rng)) std::reverse(s.points.begin(), s.points.end());
        c.strokes.push_back(std::move(s));
    }
    std::shuffle(c.strokes.begin(), c.strokes.end(), rng);
    return c;
}

} // namespace

std::pair<Dataset, Dataset> synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);

    std::vector<ClassTemplate> templates;
    std::vector<std::vector<double>> sketches;
    for (int k = 0; k < cfg.n_classes; ++k) {
        const int n_strokes = 1 + (k % 3);
        ClassTemplate t;
        bool accepted = false;
        for (int attempt = 0; attempt < 500 && !accepted; ++attempt) {
            t = draw_template(rng, n_strokes);
            const auto sketch = occupancy_sketch(t);
            accepted = true;
            for (const auto& other : sketches) {
                if (sketch_distance(sketch, other) < kMinSketchDistance) {
                    accepted = false;
                    break;
                }
            }
            if (accepted) sketches.push_back(sketch);
        }
        if (!accepted) {
            throw NumericError("synth: could not draw a distinct template for class " +
                               std::to_string(k + 1));
        }
        templates.push_back(std::move(t));
    }

    Dataset train, test;
    train.role = Role::train;
    test.role = Role::test;
    for (int k = 0; k < cfg.n_classes; ++k) {
        const std::string name = "c" + std::to_string(k + 1);
        train.label_names.push_back(name);
        test.label_names.push_back(name);
        train.classes.emplace_back();
        test.classes.emplace_back();
        for (int i = 0; i < cfg.samples_per_class_train; ++i) {
            train.classes.back().push_back(
                sample_from_template(templates[static_cast<std::size_t>(k)], cfg.noise_sigma, rng));
        }
        for (int i = 0; i < cfg.samples_per_class_test; ++i) {
            test.classes.back().push_back(
                sample_from_template(templates[static_cast<std::size_t>(k)], cfg.noise_sigma, rng));
        }
    }
    return {std::move(train), std::move(test)};
}

} // namespace hwrec
