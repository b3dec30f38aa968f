#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hwrec {

// Error categories map to CLI exit codes: DataError -> 3, NumericError -> 4.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

struct Stroke {
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

// A character is an ordered sequence of strokes. After preprocessing all
// coordinates lie in [0,1] and the total point count is fixed (128 by
// default). span_x/span_y summarize the pre-normalization aspect ratio:
// (width, height) / max(width, height).
struct Character {
    std::vector<Stroke> strokes;
    bool preprocessed = false;
    double span_x = 1.0;
    double span_y = 1.0;

    std::size_t total_points() const {
        std::size_t n = 0;
        for (const auto& s : strokes) n += s.points.size();
        return n;
    }
};

// 1-of-N class label. `index` is 1-based to match the class numbering used
// in dataset reports; internal containers are 0-based.
struct Label {
    int index = 1;
    Eigen::VectorXi one_hot;
};

Label one_hot(int k, int n);

enum class Role { train, test };

// Labeled sample container. Class k (1-based) lives at classes[k-1];
// label_names[k-1] is the label string as it appeared in the source file.
// Indices are assigned by first appearance order.
struct Dataset {
    Role role = Role::train;
    std::vector<std::string> label_names;
    std::vector<std::vector<Character>> classes;

    int n_classes() const { return static_cast<int>(classes.size()); }
    std::size_t n_samples() const {
        std::size_t n = 0;
        for (const auto& c : classes) n += c.size();
        return n;
    }
};

enum class FeatureKind { ST, DFT, DCT, DWT, SP, HOG, HPOD_G, HPOD_L };
enum class ClassifierKind { SOS, SS, FD, FNN, SVM, SUB };

std::string to_string(FeatureKind k);
std::string to_string(ClassifierKind k);
FeatureKind feature_kind_from_string(const std::string& s);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct FeatureVector {
    FeatureKind kind = FeatureKind::ST;
    Eigen::VectorXd values;

    int dim() const { return static_cast<int>(values.size()); }
};

// Feature vectors grouped by class; index k holds class k+1's samples.
using ClassSamples = std::vector<std::vector<Eigen::VectorXd>>;

} // namespace hwrec
