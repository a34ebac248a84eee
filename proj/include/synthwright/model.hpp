#ifndef SYNTHWRIGHT_MODEL_HPP
#define SYNTHWRIGHT_MODEL_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "synthwright/dataset.hpp"

namespace synthwright {

// Black-box classifier: one label per input row, deterministic for a fixed
// model state.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::vector<std::string> predict(const Dataset& rows) const = 0;
};

struct TreeParams {
    int max_depth = 8;
    std::size_t min_samples_split = 2;
};

// Greedy CART with Gini impurity. Numeric splits test value < threshold at
// midpoints between consecutive distinct values; categorical splits are
// one-vs-rest on a single value. All ties keep the first candidate in scan
// order (columns in dataset order, thresholds and values ascending), which
// makes training deterministic.
class DecisionTreeModel : public Classifier {
public:
    struct Node {
        bool leaf = true;
        std::string label;     // leaves
        std::string column;    // splits
        ColumnKind kind = ColumnKind::Numeric;
        double threshold = 0.0; // numeric split: left when value < threshold
        std::string value;      // categorical split: left when cell == value
        int left = -1;
        int right = -1;
    };

    static DecisionTreeModel train(const Dataset& ds, const std::string& label,
                                   const TreeParams& params = {});

    std::vector<std::string> predict(const Dataset& rows) const override;

    const std::string& label_column() const { return label_column_; }
    const std::vector<std::pair<std::string, ColumnKind>>& features() const {
        return features_;
    }
    const std::vector<Node>& nodes() const { return nodes_; }

    std::string to_json_text() const;
    static DecisionTreeModel from_json_text(const std::string& text);
    void save(const std::string& path) const;
    static DecisionTreeModel load(const std::string& path);

    // Test hook: assemble a tree directly from its parts.
    static DecisionTreeModel from_parts(std::vector<Node> nodes,
                                        std::vector<std::pair<std::string, ColumnKind>> features,
                                        std::string label_column);

private:
    std::vector<Node> nodes_; // index 0 is the root
    std::vector<std::pair<std::string, ColumnKind>> features_;
    std::string label_column_;
};

// Runs `command` through /bin/sh, feeding it a CSV (header plus rows) on
// standard input and reading one label per line from its standard output.
class ExternalModel : public Classifier {
public:
    explicit ExternalModel(std::string command, int timeout_ms = 60000);
    std::vector<std::string> predict(const Dataset& rows) const override;

private:
    std::string command_;
    int timeout_ms_;
};

// Fraction of rows whose prediction equals the label column.
double accuracy(const Classifier& model, const Dataset& ds, const std::string& label);

// "builtin:tree:<model.json>" or "exec:<command>".
std::unique_ptr<Classifier> make_classifier(const std::string& spec,
                                            int exec_timeout_ms = 60000);

} // namespace synthwright

#endif
