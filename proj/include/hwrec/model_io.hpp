#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hwrec/baselines.hpp"
#include "hwrec/fnn.hpp"
#include "hwrec/preprocess.hpp"
#include "hwrec/sub_model.hpp"
#include "hwrec/svm.hpp"
#include "hwrec/types.hpp"

namespace hwrec {

inline constexpr int kModelFormatVersion = 1;

using AnyModel =
    std::variant<SosModel, SubspaceModel, FisherParams, FnnParams, MulticlassSvmModel, SubClassifier>;

// A fitted classifier together with everything needed to reproduce its
// predictions on raw characters: label map, preprocessing and feature
// configuration, and the seed it was trained with.
struct TrainedModel {
    ClassifierKind classifier = ClassifierKind::SOS;
    FeatureKind feature = FeatureKind::ST;
    std::uint64_t rng_seed = 0;
    std::vector<std::string> label_names;
    PreprocessConfig pre;
    HpodConfig hpod;
    AnyModel model;

    int n_classes() const { return static_cast<int>(label_names.size()); }
    Label predict(const Character& c) const;
};

// Single JSON document with format version and a checksum over the whole
// payload; numeric fields survive a save/load round trip bit-for-bit.
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace hwrec
