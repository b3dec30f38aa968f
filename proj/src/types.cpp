#include "hwrec/types.hpp"

namespace hwrec {

Label one_hot(int k, int n) {
    if (n < 1) throw DataError("one_hot: class count must be >= 1, got " + std::to_string(n));
    if (k < 1 || k > n) {
        throw DataError("one_hot: class index " + std::to_string(k) + " out of range [1," +
                        std::to_string(n) + "]");
    }
    Label l;
    l.index = k;
    l.one_hot = Eigen::VectorXi::Zero(n);
    l.one_hot(k - 1) = 1;
    return l;
}

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::ST: return "st";
        case FeatureKind::DFT: return "dft";
        case FeatureKind::DCT: return "dct";
        case FeatureKind::DWT: return "dwt";
        case FeatureKind::SP: return "sp";
        case FeatureKind::HOG: return "hog";
        case FeatureKind::HPOD_G: return "hpod";
        case FeatureKind::HPOD_L: return "hpod-local";
    }
    return "?";
}

std::string to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::SOS: return "sos";
        case ClassifierKind::SS: return "ss";
        case ClassifierKind::FD: return "fd";
        case ClassifierKind::FNN: return "fnn";
        case ClassifierKind::SVM: return "svm";
        case ClassifierKind::SUB: return "sub";
    }
    return "?";
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "st") return FeatureKind::ST;
    if (s == "dft") return FeatureKind::DFT;
    if (s == "dct") return FeatureKind::DCT;
    if (s == "dwt") return FeatureKind::DWT;
    if (s == "sp") return FeatureKind::SP;
    if (s == "hog") return FeatureKind::HOG;
    if (s == "hpod") return FeatureKind::HPOD_G;
    if (s == "hpod-local") return FeatureKind::HPOD_L;
    throw DataError("unknown feature kind '" + s + "'");
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
    if (s == "sos") return ClassifierKind::SOS;
    if (s == "ss") return ClassifierKind::SS;
    if (s == "fd") return ClassifierKind::FD;
    if (s == "fnn") return ClassifierKind::FNN;
    if (s == "svm") return ClassifierKind::SVM;
    if (s == "sub") return ClassifierKind::SUB;
    throw DataError("unknown classifier kind '" + s + "'");
}

} // namespace hwrec
