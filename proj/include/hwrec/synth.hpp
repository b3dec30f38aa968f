#pragma once

#include <cstdint>
#include <utility>

#include "hwrec/types.hpp"

namespace hwrec {

// Synthetic stroke corpus: each class is defined by 1-3 polyline stroke
// templates; samples are densified templates with per-point Gaussian
// jitter, a resampling phase offset (active only when noise_sigma > 0), a
// 0.5-probability direction reversal per stroke, and a random stroke-order
// permutation. Templates are redrawn until their occupancy sketch is far
// enough from every earlier class. Deterministic for a fixed seed.
struct SynthConfig {
    int n_classes = 10;
    int samples_per_class_train = 133;
    int samples_per_class_test = 29;
    double noise_sigma = 0.01;
    std::uint64_t seed = 42;

    void validate() const;
};

std::pair<Dataset, Dataset> synth_generate(const SynthConfig& cfg);

} // namespace hwrec
