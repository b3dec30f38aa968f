#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwrec/dataset_io.hpp"
#include "hwrec/defaults.hpp"
#include "hwrec/eval.hpp"
#include "hwrec/features.hpp"
#include "hwrec/model_io.hpp"
#include "hwrec/preprocess.hpp"
#include "hwrec/subunits.hpp"
#include "hwrec/synth.hpp"
#include "hwrec/types.hpp"

namespace {

using namespace hwrec;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Shared knobs for train/compare; 0 or negative picks the per-feature default.
struct TrainingOpts {
    std::uint64_t seed = 42;
    int jobs = 1;
    double ridge = 1e-3;
    int n_ef = 0;
    int hidden = 0;
    int epochs = 200;
    double lr = 0.01;
    double momentum = 0.9;
    double beta = kDefaultSvmBeta;
    double upsilon = 0.0;
    int nh = 8;
    int max_iters = 200;
    double tol = 1e-6;
    double smoothing = 1.0;
    int points = 128;
    double delta = 0.02;
    double turn_threshold_deg = 60.0;
    int min_subunit_points = 6;
    int max_subunits = 12;
};

void add_training_options(CLI::App* cmd, TrainingOpts& o) {
    cmd->add_option("--seed", o.seed, "RNG seed for all stochastic steps");
    cmd->add_option("--jobs", o.jobs, "worker threads for per-class / per-pair fits");
    cmd->add_option("--ridge", o.ridge, "relative ridge added to covariances and scatters");
    cmd->add_option("--n-ef", o.n_ef, "subspace dimension (0 = per-feature default)");
    cmd->add_option("--hidden", o.hidden, "FNN hidden units (0 = per-feature default)");
    cmd->add_option("--epochs", o.epochs, "FNN training epochs");
    cmd->add_option("--lr", o.lr, "FNN learning rate");
    cmd->add_option("--momentum", o.momentum, "FNN momentum");
    cmd->add_option("--beta", o.beta, "SVM box bound");
    cmd->add_option("--upsilon", o.upsilon, "SVM RBF width (0 = per-feature default)");
    cmd->add_option("--nh", o.nh, "SUB mixture components per class");
    cmd->add_option("--max-iters", o.max_iters, "SUB EM iteration cap");
    cmd->add_option("--tol", o.tol, "SUB EM relative log-likelihood tolerance");
    cmd->add_option("--smoothing", o.smoothing, "SUB Laplace pseudo-count for gamma/eta");
    cmd->add_option("--points", o.points, "preprocessed points per character");
    cmd->add_option("--delta", o.delta, "nominal resampling distance");
    cmd->add_option("--turn-threshold", o.turn_threshold_deg, "sub-unit turning threshold, degrees");
    cmd->add_option("--min-subunit-points", o.min_subunit_points, "minimum points per sub-unit");
    cmd->add_option("--max-subunits", o.max_subunits, "sub-unit count cap per character");
}

void add_config_option(CLI::App* cmd, std::string& holder) {
    cmd->add_option("--config", holder,
                    "key=value config file; explicit flags override file values");
}

ExperimentSpec make_spec(const TrainingOpts& o, ClassifierKind classifier, FeatureKind feature) {
    ExperimentSpec s;
    s.classifier = classifier;
    s.feature = feature;
    s.seed = o.seed;
    s.ridge = o.ridge;
    s.n_ef = o.n_ef;
    s.svm_beta = o.beta;
    s.svm_upsilon = o.upsilon;
    s.fnn.hidden = o.hidden;
    s.fnn.epochs = o.epochs;
    s.fnn.learning_rate = o.lr;
    s.fnn.momentum = o.momentum;
    s.fnn.seed = o.seed;
    s.em.n_h_su = o.nh;
    s.em.max_iters = o.max_iters;
    s.em.rel_tol = o.tol;
    s.em.ridge = o.ridge;
    s.em.smoothing = o.smoothing;
    s.em.seed = o.seed;
    s.pre.target_points = o.points;
    s.pre.delta = o.delta;
    s.seg.turn_threshold = o.turn_threshold_deg * M_PI / 180.0;
    s.seg.min_subunit_points = o.min_subunit_points;
    s.seg.max_subunits = o.max_subunits;
    s.jobs = o.jobs;
    return s;
}

void echo_config(const CLI::App& cmd) {
    std::cout << "# resolved config: " << cmd.get_name() << "\n";
    for (const CLI::Option* opt : cmd.get_options()) {
        if (opt->get_name().rfind("--", 0) != 0 || opt->get_name() == "--help") continue;
        std::string value = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
        if (value.empty()) value = "\"\"";
        std::cout << "# " << opt->get_name().substr(2) << "=" << value << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw DataError("write to '" + path + "' failed");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Appends the key=value lines of a --config file as flags, skipping keys
// the command line already sets, so explicit flags always win.
std::vector<std::string> splice_config_args(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw DataError("config file '" + path + "': line " + std::to_string(line_no) +
                            " is not key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                present = true;
                break;
            }
        }
        if (!present) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void emit_em_traces(const FitOutput& fit) {
    std::cout << std::setprecision(17);
    for (std::size_t k = 0; k < fit.em_traces.size(); ++k) {
        for (std::size_t i = 0; i < fit.em_traces[k].size(); ++i) {
            std::cout << fit.model.label_names[k] << '\t' << i << '\t' << fit.em_traces[k][i]
                      << '\n';
        }
    }
}

// Reindexes a test set to the model's class numbering; every test label
// must be known to the model.
Dataset align_to_model(const Dataset& test, const TrainedModel& model) {
    Dataset aligned;
    aligned.role = Role::test;
    aligned.label_names = model.label_names;
    aligned.classes.resize(model.label_names.size());
    for (std::size_t k = 0; k < test.classes.size(); ++k) {
        const auto it =
            std::find(model.label_names.begin(), model.label_names.end(), test.label_names[k]);
        if (it == model.label_names.end()) {
            throw DataError("test label '" + test.label_names[k] + "' is unknown to the model");
        }
        const std::size_t idx = static_cast<std::size_t>(it - model.label_names.begin());
        for (const auto& c : test.classes[k]) aligned.classes[idx].push_back(c);
    }
    return aligned;
}

int run_synth(const CLI::App& cmd, const SynthConfig& cfg, const std::string& out_dir) {
    echo_config(cmd);
    auto [train, test] = synth_generate(cfg);
    std::filesystem::create_directories(out_dir);
    write_dataset(train, out_dir + "/train.jsonl");
    write_dataset(test, out_dir + "/test.jsonl");
    std::cout << "wrote " << train.n_samples() << " train and " << test.n_samples()
              << " test samples to " << out_dir << "\n";
    return 0;
}

int run_preprocess(const CLI::App& cmd, const std::string& in, const std::string& out,
                   const PreprocessConfig& cfg) {
    echo_config(cmd);
    Dataset ds = parse_dataset(in, Role::train);
    for (auto& cls : ds.classes) {
        for (auto& c : cls) c = c.preprocessed ? c : preprocess_pipeline(c, cfg);
    }
    write_dataset(ds, out);
    std::cout << "preprocessed " << ds.n_samples() << " samples\n";
    return 0;
}

int run_subunits(const CLI::App& cmd, const std::string& in, const std::string& out) {
    echo_config(cmd);
    Dataset ds = parse_dataset(in, Role::train);
    std::ofstream os(out);
    if (!os) throw DataError("cannot open '" + out + "' for writing");
    for (std::size_t k = 0; k < ds.classes.size(); ++k) {
        for (const auto& raw : ds.classes[k]) {
            const Character c = raw.preprocessed ? raw : preprocess_pipeline(raw, {});
            const auto subunits = extract_subunits(c, {});
            nlohmann::json j;
            j["label"] = ds.label_names[k];
            nlohmann::json arr = nlohmann::json::array();
            std::vector<std::size_t> offset(c.strokes.size(), 0);
            for (const auto& su : subunits) {
                const std::size_t begin = offset[static_cast<std::size_t>(su.source_stroke)];
                const std::size_t end = begin + su.points.size();
                offset[static_cast<std::size_t>(su.source_stroke)] = end;
                arr.push_back(
                    nlohmann::json{{"stroke", su.source_stroke},
                                   {"begin", begin},
                                   {"end", end},
                                   {"bbox", {su.bbox[0], su.bbox[1], su.bbox[2], su.bbox[3]}}});
            }
            j["subunits"] = std::move(arr);
            os << j.dump() << '\n';
        }
    }
    std::cout << "wrote sub-unit boundaries for " << ds.n_samples() << " samples\n";
    return 0;
}

int run_features(const CLI::App& cmd, const std::string& type, const std::string& in,
                 const std::string& out) {
    echo_config(cmd);
    const FeatureKind kind = feature_kind_from_string(type);
    Dataset ds = parse_dataset(in, Role::train);
    std::ofstream os(out);
    if (!os) throw DataError("cannot open '" + out + "' for writing");
    for (std::size_t k = 0; k < ds.classes.size(); ++k) {
        for (const auto& raw : ds.classes[k]) {
            const Character c = raw.preprocessed ? raw : preprocess_pipeline(raw, {});
            const FeatureVector f = extract_feature(kind, c, {});
            nlohmann::json j;
            j["label"] = ds.label_names[k];
            nlohmann::json values = nlohmann::json::array();
            for (Eigen::Index i = 0; i < f.values.size(); ++i) values.push_back(f.values(i));
            j["values"] = std::move(values);
            os << j.dump() << '\n';
        }
    }
    std::cout << "extracted " << to_string(kind) << " features for " << ds.n_samples()
              << " samples\n";
    return 0;
}

int run_train(const CLI::App& cmd, const std::string& classifier, const std::string& features,
              const std::string& in, const std::string& model_path, const TrainingOpts& opts) {
    echo_config(cmd);
    const ClassifierKind ck = classifier_kind_from_string(classifier);
    const FeatureKind fk = feature_kind_from_string(features);
    const Dataset train = parse_dataset(in, Role::train);
    const ExperimentSpec spec = make_spec(opts, ck, fk);
    FitOutput fit = fit_model(train, spec);
    emit_em_traces(fit);
    save_model(fit.model, model_path);
    std::cout << "trained " << to_string(ck) << " on " << train.n_samples() << " samples, model -> "
              << model_path << "\n";
    return 0;
}

int run_eval(const CLI::App& cmd, const std::string& model_path, const std::string& test_path,
             const std::string& report_path, const std::string& jsonl_path) {
    echo_config(cmd);
    const TrainedModel model = load_model(model_path);
    const Dataset test = align_to_model(parse_dataset(test_path, Role::test), model);
    const EvalReport report =
        evaluate([&model](const Character& c) { return model.predict(c); }, test);
    write_text_file(report_path, render_eval_report(report, model.label_names));
    if (!jsonl_path.empty()) {
        write_text_file(jsonl_path, render_eval_report_jsonl(report, model.label_names));
    }
    std::cout << std::fixed << std::setprecision(6) << "overall_accuracy "
              << report.overall_accuracy << " (" << report.n_test << " samples)\n";
    return 0;
}

int run_compare(const CLI::App& cmd, std::string classifiers_csv, bool all_baselines,
                const std::string& features_csv, const std::string& in, const std::string& test_in,
                const std::string& report_path, const std::string& jsonl_path,
                const TrainingOpts& opts) {
    echo_config(cmd);
    if (all_baselines) classifiers_csv = classifiers_csv.empty()
                                             ? "sos,ss,fd,fnn,svm"
                                             : "sos,ss,fd,fnn,svm," + classifiers_csv;
    if (classifiers_csv.empty()) throw DataError("compare: no classifiers selected");

    const Dataset train = parse_dataset(in, Role::train);
    const Dataset test = parse_dataset(test_in, Role::test);

    std::vector<ExperimentResult> rows;
    for (const std::string& cname : split_csv(classifiers_csv)) {
        const ClassifierKind ck = classifier_kind_from_string(cname);
        if (ck == ClassifierKind::SUB) {
            rows.push_back(
                run_experiment(train, test, make_spec(opts, ck, FeatureKind::HPOD_G), &std::cout));
            continue;
        }
        for (const std::string& fname : split_csv(features_csv)) {
            rows.push_back(
                run_experiment(train, test, make_spec(opts, ck, feature_kind_from_string(fname))));
        }
    }
    const std::string table = render_comparison(rows);
    std::cout << table;
    if (!report_path.empty()) write_text_file(report_path, table);
    if (!jsonl_path.empty()) write_text_file(jsonl_path, render_comparison_jsonl(rows));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"online handwritten character recognition toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default(true);
    std::string config_file; // shared holder; --config is resolved before parsing

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic stroke corpus");
    add_config_option(synth, config_file);
    SynthConfig synth_cfg;
    std::string out_dir = "data";
    synth->add_option("--classes", synth_cfg.n_classes, "number of classes");
    synth->add_option("--train", synth_cfg.samples_per_class_train, "train samples per class");
    synth->add_option("--test", synth_cfg.samples_per_class_test, "test samples per class");
    synth->add_option("--noise", synth_cfg.noise_sigma, "per-point jitter sigma");
    synth->add_option("--seed", synth_cfg.seed, "RNG seed");
    synth->add_option("--out-dir", out_dir, "output directory");

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "normalize, resample and smooth raw samples");
    add_config_option(pre, config_file);
    std::string pre_in, pre_out;
    PreprocessConfig pre_cfg;
    pre->add_option("--in", pre_in, "input dataset")->required();
    pre->add_option("--out", pre_out, "output dataset")->required();
    pre->add_option("--points", pre_cfg.target_points, "points per character");
    pre->add_option("--delta", pre_cfg.delta, "nominal resampling distance");

    // subunits
    auto* sub = app.add_subcommand("subunits", "emit per-character sub-unit boundaries");
    add_config_option(sub, config_file);
    std::string sub_in, sub_out;
    sub->add_option("--in", sub_in, "input dataset")->required();
    sub->add_option("--out", sub_out, "output boundary file")->required();

    // features
    auto* feat = app.add_subcommand("features", "extract feature vectors");
    add_config_option(feat, config_file);
    std::string feat_type = "st", feat_in, feat_out;
    feat->add_option("--type", feat_type, "st|dft|dct|dwt|sp|hog|hpod");
    feat->add_option("--in", feat_in, "input dataset")->required();
    feat->add_option("--out", feat_out, "output feature file")->required();

    // train
    auto* train = app.add_subcommand("train", "fit a classifier and persist the model");
    add_config_option(train, config_file);
    std::string train_classifier = "sos", train_features = "st", train_in, train_model;
    TrainingOpts train_opts;
    train->add_option("--classifier", train_classifier, "sos|ss|fd|fnn|svm|sub");
    train->add_option("--features", train_features, "st|dft|dct|dwt|sp|hog|hpod");
    train->add_option("--in", train_in, "training dataset")->required();
    train->add_option("--model", train_model, "output model file")->required();
    add_training_options(train, train_opts);

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a persisted model on a test set");
    add_config_option(ev, config_file);
    std::string eval_model, eval_test, eval_report, eval_jsonl;
    ev->add_option("--model", eval_model, "model file")->required();
    ev->add_option("--test", eval_test, "test dataset")->required();
    ev->add_option("--report", eval_report, "report output file")->required();
    ev->add_option("--jsonl", eval_jsonl, "machine-readable report output file");

    // compare
    auto* cmp = app.add_subcommand("compare", "train/evaluate a classifier-feature matrix");
    add_config_option(cmp, config_file);
    std::string cmp_classifiers, cmp_features = "st", cmp_in, cmp_test, cmp_report, cmp_jsonl;
    bool cmp_all_baselines = false;
    TrainingOpts cmp_opts;
    cmp->add_option("--classifiers", cmp_classifiers, "comma list of sos|ss|fd|fnn|svm|sub");
    cmp->add_flag("--all-baselines", cmp_all_baselines, "shortcut for sos,ss,fd,fnn,svm");
    cmp->add_option("--features", cmp_features, "comma list of feature kinds");
    cmp->add_option("--in", cmp_in, "training dataset")->required();
    cmp->add_option("--test", cmp_test, "test dataset")->required();
    cmp->add_option("--report", cmp_report, "report output file");
    cmp->add_option("--jsonl", cmp_jsonl, "machine-readable report output file");
    add_training_options(cmp, cmp_opts);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = splice_config_args(args);
    } catch (const DataError& e) {
        std::cerr << "error\tdata\t" << e.what() << "\n";
        return kExitData;
    }
    std::reverse(args.begin(), args.end());

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(*synth, synth_cfg, out_dir);
        if (pre->parsed()) return run_preprocess(*pre, pre_in, pre_out, pre_cfg);
        if (sub->parsed()) return run_subunits(*sub, sub_in, sub_out);
        if (feat->parsed()) return run_features(*feat, feat_type, feat_in, feat_out);
        if (train->parsed()) {
            return run_train(*train, train_classifier, train_features, train_in, train_model,
                             train_opts);
        }
        if (ev->parsed()) return run_eval(*ev, eval_model, eval_test, eval_report, eval_jsonl);
        if (cmp->parsed()) {
            return run_compare(*cmp, cmp_classifiers, cmp_all_baselines, cmp_features, cmp_in,
                               cmp_test, cmp_report, cmp_jsonl, cmp_opts);
        }
    } catch (const DataError& e) {
        std::cerr << "error\tdata\t" << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "error\tnumeric\t" << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error\tnumeric\t" << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
