#pragma once

#include "hwrec/types.hpp"

namespace hwrec {

// Per-feature hyperparameter defaults. The HPOD row has no published
// counterpart; its values are this toolkit's own defaults.
struct FeatureDefaults {
    int n_ef;        // retained subspace dimension
    int fnn_hidden;  // hidden-layer width
    double svm_upsilon;
};

inline constexpr double kDefaultSvmBeta = 1024.0;

inline FeatureDefaults feature_defaults(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::ST: return {20, 258, 10.0};
        case FeatureKind::DFT: return {20, 290, 28.0};
        case FeatureKind::DCT: return {30, 270, 28.0};
        case FeatureKind::DWT: return {30, 270, 20.0};
        case FeatureKind::SP: return {70, 500, 10.0};
        case FeatureKind::HOG: return {70, 524, 10.0};
        case FeatureKind::HPOD_G: return {70, 256, 1.0};
        case FeatureKind::HPOD_L: return {20, 64, 1.0};
    }
    throw DataError("feature_defaults: unknown kind");
}

} // namespace hwrec
