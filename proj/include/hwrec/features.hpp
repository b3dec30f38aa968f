#pragma once

#include "hwrec/subunits.hpp"
#include "hwrec/types.hpp"

namespace hwrec {

// Grid/bin sizes for the point/orientation/dynamics histogram features.
// Defaults give a 6*6*(1+8+11)+2 = 722 global vector and a
// 10*10+16+14+4 = 134 local vector.
struct HpodConfig {
    int grid = 6;                  // global cells per axis
    int orientation_bins = 8;      // global, direction-insensitive over [0,pi)
    int dynamics_bins = 11;        // global, signed turn over (-pi,pi]
    int local_point_grid = 10;     // local cells per axis over the sub-unit bbox
    int local_orientation_bins = 16;
    int local_dynamics_bins = 14;

    int global_dim() const { return grid * grid * (1 + orientation_bins + dynamics_bins) + 2; }
    int local_dim() const {
        return local_point_grid * local_point_grid + local_orientation_bins +
               local_dynamics_bins + 4;
    }
    void validate() const;
};

// All extractors require a preprocessed character (spans available,
// coordinates in [0,1]); ST/DFT/DCT/DWT additionally require exactly 128
// points. Layout conventions shared by every extractor: grids flatten
// x-major (cell = ix*n + iy), bins are left-closed right-open with the
// final bin closed, and the two span features terminate the vector.

// [x_1..x_128, y_1..y_128, span_x, span_y]
FeatureVector extract_st(const Character& c);

// Per axis: coefficients 0..63 of the 1/N-normalized DFT, interleaved as
// (Re, Im) pairs -> 128 reals; both axes then spans.
FeatureVector extract_dft(const Character& c);

// Per axis: all 128 orthonormal DCT-II coefficients; both axes then spans.
FeatureVector extract_dct(const Character& c);

// Per axis: full-depth orthonormal Haar decomposition, coarsest first
// (scaling coefficient, then detail levels coarse to fine); then spans.
FeatureVector extract_dwt(const Character& c);

// 28x28 occupancy histogram over the unit square (point fractions, sums
// to 1), then spans.
FeatureVector extract_sp(const Character& c);

// 9x9 cell grid x 4 unsigned orientation bins of per-segment tangent
// directions, segment-length weighted, cell assigned by segment midpoint;
// the 324 block is L2-normalized per character; then spans.
FeatureVector extract_hog(const Character& c);

// Per cell: [point fraction, orientation histogram, turn-dynamics
// histogram]. Orientations pool theta and theta+pi; each turn angle is
// accumulated at half weight for both signs, which makes the vector
// invariant to stroke direction and stroke order. Each histogram family
// is normalized to total 1 over the whole character.
FeatureVector extract_hpod_global(const Character& c, const HpodConfig& cfg = {});

// [local_point_grid^2 position histogram over the sub-unit's own bbox,
//  orientation histogram, dynamics histogram, bbox (min-x, max-x, min-y,
//  max-y) in character coordinates].
FeatureVector extract_hpod_local(const SubUnit& su, const HpodConfig& cfg = {});

// Dispatch by kind (HPOD_L is not reachable here; it needs a SubUnit).
FeatureVector extract_feature(FeatureKind kind, const Character& c, const HpodConfig& cfg = {});

int feature_dim(FeatureKind kind, const HpodConfig& cfg = {});

// 1-D transforms behind the DFT/DCT/DWT extractors.
// Coefficients 0..N/2-1 of the 1/N-normalized DFT, interleaved (Re, Im);
// the length must be a power of two.
Eigen::VectorXd dft_half_interleaved(const Eigen::VectorXd& x);
// Orthonormal DCT-II, all N coefficients.
Eigen::VectorXd dct2_orthonormal(const Eigen::VectorXd& x);
// Full-depth orthonormal Haar pyramid, coarsest coefficients first;
// the length must be a power of two.
Eigen::VectorXd haar_orthonormal(const Eigen::VectorXd& x);

} // namespace hwrec
