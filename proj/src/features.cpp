#include "hwrec/features.hpp"

#include <cmath>
#include <complex>
#include <functional>

namespace hwrec {

void HpodConfig::validate() const {
    if (grid < 1 || orientation_bins < 1 || dynamics_bins < 1 || local_point_grid < 1 ||
        local_orientation_bins < 1 || local_dynamics_bins < 1) {
        throw DataError("hpod: all grid/bin counts must be >= 1");
    }
}

namespace {

constexpr int kCanonicalPoints = 128;
constexpr int kSpGrid = 28;
constexpr int kHogGrid = 9;
constexpr int kHogBins = 4;

void require_preprocessed(const Character& c, const char* op) {
    if (!c.preprocessed) throw DataError(std::string(op) + ": character is not preprocessed");
}

void require_point_count(const Character& c, const char* op) {
    if (c.total_points() != kCanonicalPoints) {
        throw DataError(std::string(op) + ": expected " + std::to_string(kCanonicalPoints) +
                        " points, got " + std::to_string(c.total_points()));
    }
}

// x and y sequences over all strokes in order.
std::pair<Eigen::VectorXd, Eigen::VectorXd> coordinate_sequences(const Character& c) {
    const std::size_t n = c.total_points();
    Eigen::VectorXd xs(n), ys(n);
    std::size_t i = 0;
    for (const auto& s : c.strokes) {
        for (const auto& p : s.points) {
            xs(static_cast<Eigen::Index>(i)) = p.x;
            ys(static_cast<Eigen::Index>(i)) = p.y;
            ++i;
        }
    }
    return {xs, ys};
}

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT; length must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

int bin_index(double v, double lo, double hi, int bins) {
    const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

int cell_index(double x, double y, int grid) {
    const int ix = std::clamp(static_cast<int>(std::floor(x * grid)), 0, grid - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(y * grid)), 0, grid - 1);
    return ix * grid + iy;
}

struct Segment {
    Point mid;
    double dir;    // atan2 direction, (-pi, pi]
    double length;
    Point vertex;  // shared vertex with the previous segment (its start)
    bool first_in_stroke;
};

std::vector<Segment> character_segments(const std::vector<Stroke>& strokes) {
    std::vector<Segment> segs;
    for (const auto& s : strokes) {
        bool first = true;
        for (std::size_t i = 1; i < s.points.size(); ++i) {
            const Point& a = s.points[i - 1];
            const Point& b = s.points[i];
            const double dx = b.x - a.x;
            const double dy = b.y - a.y;
            const double len = std::hypot(dx, dy);
            if (len == 0.0) continue;
            segs.push_back(Segment{Point{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0},
                                   std::atan2(dy, dx), len, a, first});
            first = false;
        }
    }
    return segs;
}

double unsigned_orientation(double dir) {
    double u = dir;
    if (u < 0.0) u += M_PI;
    if (u >= M_PI) u -= M_PI;
    return u;
}

double wrap_signed(double d) {
    while (d > M_PI) d -= 2.0 * M_PI;
    while (d <= -M_PI) d += 2.0 * M_PI;
    return d;
}

FeatureVector with_spans(FeatureKind kind, Eigen::VectorXd body, const Character& c) {
    FeatureVector f;
    f.kind = kind;
    f.values.resize(body.size() + 2);
    f.values.head(body.size()) = body;
    f.values(body.size()) = c.span_x;
    f.values(body.size() + 1) = c.span_y;
    return f;
}

} // namespace

Eigen::VectorXd dft_half_interleaved(const Eigen::VectorXd& x) {
    const std::size_t n = static_cast<std::size_t>(x.size());
    if (!is_pow2(n)) throw DataError("dft: length must be a power of two");
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = x(static_cast<Eigen::Index>(i));
    fft_pow2(a);
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n / 2; ++k) {
        out(static_cast<Eigen::Index>(2 * k)) = a[k].real() / static_cast<double>(n);
        out(static_cast<Eigen::Index>(2 * k + 1)) = a[k].imag() / static_cast<double>(n);
    }
    return out;
}

Eigen::VectorXd dct2_orthonormal(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += x(i) * std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * n));
        }
        const double scale = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        out(k) = scale * acc;
    }
    return out;
}

// Output ordered coarse to fine: [scaling, d_coarsest, ..., d_finest].
Eigen::VectorXd haar_orthonormal(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    if (!is_pow2(static_cast<std::size_t>(n))) throw DataError("haar: length must be a power of two");
    Eigen::VectorXd buf = x;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int len = n; len > 1; len /= 2) {
        const int half = len / 2;
        Eigen::VectorXd tmp(len);
        for (int i = 0; i < half; ++i) {
            tmp(i) = (buf(2 * i) + buf(2 * i + 1)) * inv_sqrt2;
            tmp(half + i) = (buf(2 * i) - buf(2 * i + 1)) * inv_sqrt2;
        }
        buf.head(len) = tmp;
    }
    return buf;
}

FeatureVector extract_st(const Character& c) {
    require_preprocessed(c, "extract_st");
    require_point_count(c, "extract_st");
    const auto [xs, ys] = coordinate_sequences(c);
    Eigen::VectorXd body(2 * kCanonicalPoints);
    body << xs, ys;
    return with_spans(FeatureKind::ST, std::move(body), c);
}

FeatureVector extract_dft(const Character& c) {
    require_preprocessed(c, "extract_dft");
    require_point_count(c, "extract_dft");
    const auto [xs, ys] = coordinate_sequences(c);
    Eigen::VectorXd body(2 * kCanonicalPoints);
    body << dft_half_interleaved(xs), dft_half_interleaved(ys);
    return with_spans(FeatureKind::DFT, std::move(body), c);
}

FeatureVector extract_dct(const Character& c) {
    require_preprocessed(c, "extract_dct");
    require_point_count(c, "extract_dct");
    const auto [xs, ys] = coordinate_sequences(c);
    Eigen::VectorXd body(2 * kCanonicalPoints);
    body << dct2_orthonormal(xs), dct2_orthonormal(ys);
    return with_spans(FeatureKind::DCT, std::move(body), c);
}

FeatureVector extract_dwt(const Character& c) {
    require_preprocessed(c, "extract_dwt");
    require_point_count(c, "extract_dwt");
    const auto [xs, ys] = coordinate_sequences(c);
    Eigen::VectorXd body(2 * kCanonicalPoints);
    body << haar_orthonormal(xs), haar_orthonormal(ys);
    return with_spans(FeatureKind::DWT, std::move(body), c);
}

FeatureVector extract_sp(const Character& c) {
    require_preprocessed(c, "extract_sp");
    Eigen::VectorXd body = Eigen::VectorXd::Zero(kSpGrid * kSpGrid);
    const double total = static_cast<double>(c.total_points());
    for (const auto& s : c.strokes) {
        for (const auto& p : s.points) body(cell_index(p.x, p.y, kSpGrid)) += 1.0;
    }
    body /= total;
    return with_spans(FeatureKind::SP, std::move(body), c);
}

FeatureVector extract_hog(const Character& c) {
    require_preprocessed(c, "extract_hog");
    Eigen::VectorXd body = Eigen::VectorXd::Zero(kHogGrid * kHogGrid * kHogBins);
    const auto segs = character_segments(c.strokes);
    for (const auto& sg : segs) {
        const int cell = cell_index(sg.mid.x, sg.mid.y, kHogGrid);
        const int bin = bin_index(unsigned_orientation(sg.dir), 0.0, M_PI, kHogBins);
        body(cell * kHogBins + bin) += sg.length;
    }
    const double norm = body.norm();
    if (norm > 0.0) body /= norm;
    return with_spans(FeatureKind::HOG, std::move(body), c);
}

namespace {

// Shared accumulation for the global (per-cell) and local (whole-region)
// variants. grid == 1 collapses the cell structure.
void accumulate_orientation_dynamics(const std::vector<Segment>& segs,
                                     std::function<int(const Point&)> cell_of, int n_cells,
                                     int o_bins, int d_bins, Eigen::Ref<Eigen::VectorXd> orient,
                                     Eigen::Ref<Eigen::VectorXd> dyn) {
    double total_len = 0.0;
    double total_turns = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& sg = segs[i];
        const int cell = cell_of(sg.mid);
        const int ob = bin_index(unsigned_orientation(sg.dir), 0.0, M_PI, o_bins);
        orient(cell * o_bins + ob) += sg.length;
        total_len += sg.length;

        if (!sg.first_in_stroke) {
            const double turn = wrap_signed(sg.dir - segs[i - 1].dir);
            double mirrored = -turn;
            if (mirrored <= -M_PI) mirrored += 2.0 * M_PI;
            const int vc = cell_of(sg.vertex);
            dyn(vc * d_bins + bin_index(turn, -M_PI, M_PI, d_bins)) += 0.5;
            dyn(vc * d_bins + bin_index(mirrored, -M_PI, M_PI, d_bins)) += 0.5;
            total_turns += 1.0;
        }
    }
    (void)n_cells;
    if (total_len > 0.0) orient /= total_len;
    if (total_turns > 0.0) dyn /= total_turns;
}

} // namespace

FeatureVector extract_hpod_global(const Character& c, const HpodConfig& cfg) {
    require_preprocessed(c, "extract_hpod_global");
    cfg.validate();
    const int g = cfg.grid;
    const int n_cells = g * g;
    const int block = 1 + cfg.orientation_bins + cfg.dynamics_bins;

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_cells);
    Eigen::VectorXd orient = Eigen::VectorXd::Zero(n_cells * cfg.orientation_bins);
    Eigen::VectorXd dyn = Eigen::VectorXd::Zero(n_cells * cfg.dynamics_bins);

    for (const auto& s : c.strokes) {
        for (const auto& p : s.points) counts(cell_index(p.x, p.y, g)) += 1.0;
    }
    counts /= static_cast<double>(c.total_points());

    const auto segs = character_segments(c.strokes);
    accumulate_orientation_dynamics(
        segs, [g](const Point& p) { return cell_index(p.x, p.y, g); }, n_cells,
        cfg.orientation_bins, cfg.dynamics_bins, orient, dyn);

    Eigen::VectorXd body(n_cells * block);
    for (int cell = 0; cell < n_cells; ++cell) {
        body(cell * block) = counts(cell);
        body.segment(cell * block + 1, cfg.orientation_bins) =
            orient.segment(cell * cfg.orientation_bins, cfg.orientation_bins);
        body.segment(cell * block + 1 + cfg.orientation_bins, cfg.dynamics_bins) =
            dyn.segment(cell * cfg.dynamics_bins, cfg.dynamics_bins);
    }
    return with_spans(FeatureKind::HPOD_G, std::move(body), c);
}

FeatureVector extract_hpod_local(const SubUnit& su, const HpodConfig& cfg) {
    cfg.validate();
    if (su.points.size() < 2) throw DataError("extract_hpod_local: sub-unit needs >= 2 points");
    const int g = cfg.local_point_grid;
    const auto& b = su.bbox;
    const double w = b[1] - b[0];
    const double h = b[3] - b[2];

    Eigen::VectorXd pos = Eigen::VectorXd::Zero(g * g);
    for (const auto& p : su.points) {
        const double u = (w > 0.0) ? (p.x - b[0]) / w : 0.5;
        const double v = (h > 0.0) ? (p.y - b[2]) / h : 0.5;
        pos(cell_index(u, v, g)) += 1.0;
    }
    pos /= static_cast<double>(su.points.size());

    Eigen::VectorXd orient = Eigen::VectorXd::Zero(cfg.local_orientation_bins);
    Eigen::VectorXd dyn = Eigen::VectorXd::Zero(cfg.local_dynamics_bins);
    std::vector<Stroke> as_stroke{Stroke{su.points}};
    const auto segs = character_segments(as_stroke);
    accumulate_orientation_dynamics(
        segs, [](const Point&) { return 0; }, 1, cfg.local_orientation_bins,
        cfg.local_dynamics_bins, orient, dyn);

    FeatureVector f;
    f.kind = FeatureKind::HPOD_L;
    f.values.resize(cfg.local_dim());
    f.values << pos, orient, dyn, b[0], b[1], b[2], b[3];
    return f;
}

FeatureVector extract_feature(FeatureKind kind, const Character& c, const HpodConfig& cfg) {
    switch (kind) {
        case FeatureKind::ST: return extract_st(c);
        case FeatureKind::DFT: return extract_dft(c);
        case FeatureKind::DCT: return extract_dct(c);
        case FeatureKind::DWT: return extract_dwt(c);
        case FeatureKind::SP: return extract_sp(c);
        case FeatureKind::HOG: return extract_hog(c);
        case FeatureKind::HPOD_G: return extract_hpod_global(c, cfg);
        case FeatureKind::HPOD_L:
            throw DataError("extract_feature: hpod-local needs a sub-unit, not a character");
    }
    throw DataError("extract_feature: unknown kind");
}

int feature_dim(FeatureKind kind, const HpodConfig& cfg) {
    switch (kind) {
        case FeatureKind::ST:
        case FeatureKind::DFT:
        case FeatureKind::DCT:
        case FeatureKind::DWT: return 2 * kCanonicalPoints + 2;
        case FeatureKind::SP: return kSpGrid * kSpGrid + 2;
        case FeatureKind::HOG: return kHogGrid * kHogGrid * kHogBins + 2;
        case FeatureKind::HPOD_G: return cfg.global_dim();
        case FeatureKind::HPOD_L: return cfg.local_dim();
    }
    throw DataError("feature_dim: unknown kind");
}

} // namespace hwrec
