#include "hwrec/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hwrec/features.hpp"

namespace hwrec {

using nlohmann::json;

namespace {

std::string fnv1a64_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    j["data"] = std::move(data);
    return j;
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw DataError("model file: matrix payload size mismatch");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
    }
    return m;
}

json gaussian_to_json(const GaussianParams& p) {
    json j;
    j["mu"] = vec_to_json(p.mu);
    j["sigma"] = mat_to_json(p.sigma);
    return j;
}

GaussianParams gaussian_from_json(const json& j) {
    GaussianParams p;
    p.mu = vec_from_json(j.at("mu"));
    p.sigma = mat_from_json(j.at("sigma"));
    refresh_cholesky(p, "load_model");
    return p;
}

std::string activation_name(Activation a) {
    return a == Activation::logistic ? "logistic" : "identity";
}

Activation activation_from_name(const std::string& s) {
    if (s == "logistic") return Activation::logistic;
    if (s == "identity") return Activation::identity;
    throw DataError("model file: unknown activation '" + s + "'");
}

json preprocess_to_json(const PreprocessConfig& c) {
    return json{{"delta", c.delta},
                {"target_points", c.target_points},
                {"smoothing_passes", c.smoothing_passes},
                {"smoothing_kernel", {c.smoothing_kernel[0], c.smoothing_kernel[1], c.smoothing_kernel[2]}}};
}

PreprocessConfig preprocess_from_json(const json& j) {
    PreprocessConfig c;
    c.delta = j.at("delta").get<double>();
    c.target_points = j.at("target_points").get<int>();
    c.smoothing_passes = j.at("smoothing_passes").get<int>();
    const auto& k = j.at("smoothing_kernel");
    c.smoothing_kernel = {k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>()};
    return c;
}

json hpod_to_json(const HpodConfig& c) {
    return json{{"grid", c.grid},
                {"orientation_bins", c.orientation_bins},
                {"dynamics_bins", c.dynamics_bins},
                {"local_point_grid", c.local_point_grid},
                {"local_orientation_bins", c.local_orientation_bins},
                {"local_dynamics_bins", c.local_dynamics_bins}};
}

HpodConfig hpod_from_json(const json& j) {
    HpodConfig c;
    c.grid = j.at("grid").get<int>();
    c.orientation_bins = j.at("orientation_bins").get<int>();
    c.dynamics_bins = j.at("dynamics_bins").get<int>();
    c.local_point_grid = j.at("local_point_grid").get<int>();
    c.local_orientation_bins = j.at("local_orientation_bins").get<int>();
    c.local_dynamics_bins = j.at("local_dynamics_bins").get<int>();
    return c;
}

json seg_to_json(const SegmentationConfig& c) {
    return json{{"turn_threshold", c.turn_threshold},
                {"min_subunit_points", c.min_subunit_points},
                {"max_subunits", c.max_subunits}};
}

SegmentationConfig seg_from_json(const json& j) {
    SegmentationConfig c;
    c.turn_threshold = j.at("turn_threshold").get<double>();
    c.min_subunit_points = j.at("min_subunit_points").get<int>();
    c.max_subunits = j.at("max_subunits").get<int>();
    return c;
}

json params_to_json(const AnyModel& model) {
    json j;
    if (const auto* sos = std::get_if<SosModel>(&model)) {
        json classes = json::array();
        for (const auto& g : sos->classes) classes.push_back(gaussian_to_json(g));
        j["classes"] = std::move(classes);
    } else if (const auto* ss = std::get_if<SubspaceModel>(&model)) {
        j["n_ef"] = ss->n_ef;
        json classes = json::array();
        for (const auto& p : ss->classes) {
            classes.push_back(json{{"mu", vec_to_json(p.mu)},
                                   {"basis", mat_to_json(p.basis)},
                                   {"eigenvalues", vec_to_json(p.eigenvalues)}});
        }
        j["classes"] = std::move(classes);
    } else if (const auto* fd = std::get_if<FisherParams>(&model)) {
        j["w_matrix"] = mat_to_json(fd->w_matrix);
        j["raw_eigvecs"] = mat_to_json(fd->raw_eigvecs);
        j["eigenvalues"] = vec_to_json(fd->eigenvalues);
        json classes = json::array();
        for (const auto& g : fd->projected_classes) classes.push_back(gaussian_to_json(g));
        j["projected_classes"] = std::move(classes);
    } else if (const auto* fnn = std::get_if<FnnParams>(&model)) {
        j["w_hidden"] = mat_to_json(fnn->w_hidden);
        j["b_hidden"] = vec_to_json(fnn->b_hidden);
        j["w_out"] = mat_to_json(fnn->w_out);
        j["b_out"] = vec_to_json(fnn->b_out);
        j["activation_hidden"] = activation_name(fnn->activation_hidden);
        j["activation_out"] = activation_name(fnn->activation_out);
    } else if (const auto* svm = std::get_if<MulticlassSvmModel>(&model)) {
        j["n_classes"] = svm->n_classes;
        json pairs = json::array();
        for (const auto& b : svm->pairwise) {
            json support = json::array();
            for (std::size_t s = 0; s < b.support_x.size(); ++s) {
                support.push_back(json{{"alpha", b.support_alphas[s]},
                                       {"y", b.support_y[s]},
                                       {"x", vec_to_json(b.support_x[s])}});
            }
            pairs.push_back(json{{"kernel_kind", b.kernel.kind == KernelKind::rbf ? "rbf" : "linear"},
                                 {"upsilon", b.kernel.upsilon},
                                 {"beta", b.beta},
                                 {"bias", b.bias},
                                 {"support", std::move(support)}});
        }
        j["pairwise"] = std::move(pairs);
    } else if (const auto* sub = std::get_if<SubClassifier>(&model)) {
        j["fisher_w"] = mat_to_json(sub->fisher_w);
        j["hpod"] = hpod_to_json(sub->hpod);
        j["seg"] = seg_to_json(sub->seg);
        json classes = json::array();
        for (const auto& p : sub->classes) {
            json comps = json::array();
            for (const auto& g : p.components) comps.push_back(gaussian_to_json(g));
            classes.push_back(json{{"global", gaussian_to_json(p.global)},
                                   {"gamma", vec_to_json(p.gamma)},
                                   {"gamma_tail", p.gamma_tail},
                                   {"eta", mat_to_json(p.eta)},
                                   {"n_su", p.n_su},
                                   {"n_h_su", p.n_h_su},
                                   {"components", std::move(comps)}});
        }
        j["classes"] = std::move(classes);
    }
    return j;
}

AnyModel params_from_json(ClassifierKind kind, const json& j) {
    switch (kind) {
        case ClassifierKind::SOS: {
            SosModel m;
            for (const auto& g : j.at("classes")) m.classes.push_back(gaussian_from_json(g));
            return m;
        }
        case ClassifierKind::SS: {
            SubspaceModel m;
            m.n_ef = j.at("n_ef").get<int>();
            for (const auto& p : j.at("classes")) {
                SubspaceParams sp;
                sp.mu = vec_from_json(p.at("mu"));
                sp.basis = mat_from_json(p.at("basis"));
                sp.eigenvalues = vec_from_json(p.at("eigenvalues"));
                m.classes.push_back(std::move(sp));
            }
            return m;
        }
        case ClassifierKind::FD: {
            FisherParams m;
            m.w_matrix = mat_from_json(j.at("w_matrix"));
            m.raw_eigvecs = mat_from_json(j.at("raw_eigvecs"));
            m.eigenvalues = vec_from_json(j.at("eigenvalues"));
            for (const auto& g : j.at("projected_classes")) {
                m.projected_classes.push_back(gaussian_from_json(g));
            }
            return m;
        }
        case ClassifierKind::FNN: {
            FnnParams m;
            m.w_hidden = mat_from_json(j.at("w_hidden"));
            m.b_hidden = vec_from_json(j.at("b_hidden"));
            m.w_out = mat_from_json(j.at("w_out"));
            m.b_out = vec_from_json(j.at("b_out"));
            m.activation_hidden = activation_from_name(j.at("activation_hidden").get<std::string>());
            m.activation_out = activation_from_name(j.at("activation_out").get<std::string>());
            return m;
        }
        case ClassifierKind::SVM: {
            MulticlassSvmModel m;
            m.n_classes = j.at("n_classes").get<int>();
            for (const auto& p : j.at("pairwise")) {
                BinarySvmModel b;
                b.kernel.kind =
                    p.at("kernel_kind").get<std::string>() == "rbf" ? KernelKind::rbf : KernelKind::linear;
                b.kernel.upsilon = p.at("upsilon").get<double>();
                b.beta = p.at("beta").get<double>();
                b.bias = p.at("bias").get<double>();
                for (const auto& s : p.at("support")) {
                    b.support_alphas.push_back(s.at("alpha").get<double>());
                    b.support_y.push_back(s.at("y").get<int>());
                    b.support_x.push_back(vec_from_json(s.at("x")));
                }
                m.pairwise.push_back(std::move(b));
            }
            return m;
        }
        case ClassifierKind::SUB: {
            SubClassifier m;
            m.fisher_w = mat_from_json(j.at("fisher_w"));
            m.hpod = hpod_from_json(j.at("hpod"));
            m.seg = seg_from_json(j.at("seg"));
            for (const auto& p : j.at("classes")) {
                SubModelParams sp;
                sp.global = gaussian_from_json(p.at("global"));
                sp.gamma = vec_from_json(p.at("gamma"));
                sp.gamma_tail = p.at("gamma_tail").get<double>();
                sp.eta = mat_from_json(p.at("eta"));
                sp.n_su = p.at("n_su").get<int>();
                sp.n_h_su = p.at("n_h_su").get<int>();
                for (const auto& g : p.at("components")) {
                    sp.components.push_back(gaussian_from_json(g));
                }
                m.classes.push_back(std::move(sp));
            }
            return m;
        }
    }
    throw DataError("load_model: unknown classifier kind");
}

} // namespace

Label TrainedModel::predict(const Character& raw) const {
    const Character c = raw.preprocessed ? raw : preprocess_pipeline(raw, pre);
    if (const auto* sos = std::get_if<SosModel>(&model)) {
        return sos_predict(extract_feature(feature, c, hpod).values, *sos);
    }
    if (const auto* ss = std::get_if<SubspaceModel>(&model)) {
        return ss_predict(extract_feature(feature, c, hpod).values, *ss);
    }
    if (const auto* fd = std::get_if<FisherParams>(&model)) {
        return fd_predict(extract_feature(feature, c, hpod).values, *fd);
    }
    if (const auto* fnn = std::get_if<FnnParams>(&model)) {
        return fnn_predict(extract_feature(feature, c, hpod).values, *fnn);
    }
    if (const auto* svm = std::get_if<MulticlassSvmModel>(&model)) {
        return svm_predict_multiclass(*svm, extract_feature(feature, c, hpod).values);
    }
    const auto& sub = std::get<SubClassifier>(model);
    return sub_classifier_predict(c, sub);
}

void save_model(const TrainedModel& m, const std::string& path) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["classifier_kind"] = to_string(m.classifier);
    doc["feature_kind"] = to_string(m.feature);
    doc["rng_seed"] = m.rng_seed;
    doc["label_names"] = m.label_names;
    doc["preprocess"] = preprocess_to_json(m.pre);
    doc["hpod"] = hpod_to_json(m.hpod);
    doc["parameters"] = params_to_json(m.model);
    doc["checksum"] = fnv1a64_hex(doc.dump());

    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << doc.dump() << '\n';
    if (!out) throw DataError("write to '" + path + "' failed");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("model file '" + path + "' failed integrity check: " + e.what());
    }
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
        throw DataError("model file '" + path + "' has no format_version");
    }
    const int version = doc["format_version"].get<int>();
    if (version != kModelFormatVersion) {
        throw DataError("model file '" + path + "' has format_version " + std::to_string(version) +
                        ", expected " + std::to_string(kModelFormatVersion));
    }
    if (!doc.contains("checksum")) {
        throw DataError("model file '" + path + "' has no checksum");
    }
    const std::string stored = doc["checksum"].get<std::string>();
    json unsigned_doc = doc;
    unsigned_doc.erase("checksum");
    if (fnv1a64_hex(unsigned_doc.dump()) != stored) {
        throw DataError("model file '" + path + "' failed checksum verification");
    }

    TrainedModel m;
    m.classifier = classifier_kind_from_string(doc.at("classifier_kind").get<std::string>());
    m.feature = feature_kind_from_string(doc.at("feature_kind").get<std::string>());
    m.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    m.label_names = doc.at("label_names").get<std::vector<std::string>>();
    m.pre = preprocess_from_json(doc.at("preprocess"));
    m.hpod = hpod_from_json(doc.at("hpod"));
    m.model = params_from_json(m.classifier, doc.at("parameters"));
    return m;
}

} // namespace hwrec
